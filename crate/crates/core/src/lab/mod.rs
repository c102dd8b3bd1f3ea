//! Seeded random generators and Monte-Carlo campaigns.

mod campaign;
mod random;
mod tightness;

pub use campaign::{
    evaluate_witness, fuzz, sample_witness, Campaign, CampaignParams, FuzzReport, NearSaturation,
    RngConfig, SampleError, Witness, WitnessDigest, ENTANGLED_SPREAD, LEMMA3_Q_GRID,
    MAX_CAMPAIGN_DIM, MAX_REPORTED_ERRORS,
};
#[allow(unused_imports)]
pub(crate) use random::{complex_gaussian, gaussian_matrix, haar_isometry};
pub use random::{
    entangled_state, equal_marginal_pair_with, ginibre_state, haar_pure, random_channel,
    random_equal_marginal_pair, sample_rng, sample_seed, SampleRng, MARGINAL_RESIDUAL,
};
pub use tightness::{isotropic_family, thm1_family, thm1_witness, tightness_suite, SATURATION_TOL};
