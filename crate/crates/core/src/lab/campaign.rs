//! Fuzzing campaigns: i.i.d. samples per index, one [`BoundReport`] each, reduced in index order.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::random::{
    entangled_state, ginibre_state, random_channel, random_equal_marginal_pair, sample_rng,
    sample_seed,
};
use crate::bounds::{
    check_equal_marginals, check_mi_conjecture, check_thm1, check_wilde, BoundReport,
};
use crate::error::{range_err, Error, Result};
use crate::filtered::{cor10_check, lemma3_check, prop9_check, ChannelSet, FreeSet};
use crate::operator::{isotropic_mix, max_entangled, BipartiteDensityMatrix, DensityMatrix};

/// Largest local dimension a campaign may sample.
pub const MAX_CAMPAIGN_DIM: usize = 8;

/// The six campaign families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Campaign {
    Thm1,
    Eq14,
    Wilde,
    MiConjecture,
    Prop9,
    Lemma3,
}

impl Campaign {
    pub const ALL: [Campaign; 6] = [
        Campaign::Thm1,
        Campaign::Eq14,
        Campaign::Wilde,
        Campaign::MiConjecture,
        Campaign::Prop9,
        Campaign::Lemma3,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Campaign::Thm1 => "thm1",
            Campaign::Eq14 => "eq14",
            Campaign::Wilde => "wilde",
            Campaign::MiConjecture => "mi_conjecture",
            Campaign::Prop9 => "prop9",
            Campaign::Lemma3 => "lemma3",
        }
    }

    /// Slack below `-tolerance` counts as a violation.
    pub fn tolerance(self) -> f64 {
        match self {
            Campaign::Thm1 | Campaign::Eq14 | Campaign::Wilde | Campaign::MiConjecture => 1e-8,
            Campaign::Prop9 => 1e-5,
            Campaign::Lemma3 => 1e-6,
        }
    }

    /// Conjecture campaigns record violations as findings instead of failing.
    pub fn is_conjecture(self) -> bool {
        matches!(self, Campaign::Wilde | Campaign::MiConjecture)
    }

    /// Default inclusive dimension range.
    pub fn default_dims(self) -> (usize, usize) {
        match self {
            Campaign::Thm1 => (2, 6),
            Campaign::Eq14 => (2, 4),
            Campaign::Wilde | Campaign::MiConjecture => (2, 3),
            Campaign::Prop9 | Campaign::Lemma3 => (2, 3),
        }
    }
}

impl fmt::Display for Campaign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Campaign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Campaign::ALL
            .into_iter()
            .find(|c| c.tag() == s)
            .ok_or_else(|| range_err(format!("unknown campaign '{s}'")))
    }
}

/// Master seed and worker count. Output never depends on `workers`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngConfig {
    pub master_seed: u64,
    pub workers: usize,
}

impl RngConfig {
    pub fn new(master_seed: u64, workers: usize) -> Self {
        Self {
            master_seed,
            workers,
        }
    }
}

impl Default for RngConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            workers: 1,
        }
    }
}

/// Sampling knobs; `None` fields take the campaign defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignParams {
    /// Inclusive range for the (first) local dimension.
    pub dims: Option<(usize, usize)>,
    /// Inclusive range for the `B` dimension of bipartite campaigns; defaults to `dims`.
    pub dims_b: Option<(usize, usize)>,
    /// Sample entangled states (perturbed maximally entangled) for the bipartite campaigns.
    pub entanglement_bias: bool,
    /// Replace every `k`-th sample by an isotropic witness (equal-marginal campaign only).
    pub witness_every: Option<u64>,
    /// Shrinking parameter for the sandwich campaign; `None` cycles through 0.1, 0.3, 0.6.
    pub q: Option<f64>,
    /// How many of the smallest slacks to keep as witnesses.
    pub near_saturation_count: usize,
}

impl Default for CampaignParams {
    fn default() -> Self {
        Self {
            dims: None,
            dims_b: None,
            entanglement_bias: false,
            witness_every: None,
            q: None,
            near_saturation_count: 10,
        }
    }
}

/// Largest Ginibre admixture in entanglement-biased samples.
pub const ENTANGLED_SPREAD: f64 = 0.3;

/// Default shrinking parameters of the sandwich campaign.
pub const LEMMA3_Q_GRID: [f64; 3] = [0.1, 0.3, 0.6];

impl CampaignParams {
    /// Defaults for `campaign`: isotropic witnesses every 1000 samples for the equal-marginal campaign.
    pub fn for_campaign(campaign: Campaign) -> Self {
        let mut p = Self::default();
        if campaign == Campaign::Eq14 {
            p.witness_every = Some(1000);
        }
        p
    }

    fn dims_for(&self, campaign: Campaign) -> Result<(usize, usize)> {
        check_range(self.dims.unwrap_or_else(|| campaign.default_dims()))
    }

    fn dims_b_for(&self, campaign: Campaign) -> Result<(usize, usize)> {
        match self.dims_b {
            Some(r) => check_range(r),
            None => self.dims_for(campaign),
        }
    }

    fn validate(&self, campaign: Campaign) -> Result<()> {
        self.dims_for(campaign)?;
        self.dims_b_for(campaign)?;
        if let Some(q) = self.q {
            if !(q > 0.0 && q < 1.0) {
                return Err(range_err(format!("q = {q} outside (0,1)")));
            }
        }
        if self.witness_every == Some(0) {
            return Err(range_err("witness_every must be positive"));
        }
        Ok(())
    }
}

fn check_range((lo, hi): (usize, usize)) -> Result<(usize, usize)> {
    if lo < 2 || lo > hi || hi > MAX_CAMPAIGN_DIM {
        return Err(range_err(format!(
            "dimension range {lo}..={hi} must lie within 2..={MAX_CAMPAIGN_DIM}"
        )));
    }
    Ok((lo, hi))
}

/// The states drawn for one sample.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Triple {
        rho: DensityMatrix,
        sigma: DensityMatrix,
        omega: DensityMatrix,
    },
    Pair {
        rho: BipartiteDensityMatrix,
        sigma: BipartiteDensityMatrix,
    },
    Filtered {
        rho: DensityMatrix,
        sigma: DensityMatrix,
        free: FreeSet,
        channels: ChannelSet,
        q: Option<f64>,
    },
}

fn hash_matrix(h: &mut Sha256, m: &crate::operator::CMatrix) {
    h.update((m.nrows() as u64).to_le_bytes());
    h.update((m.ncols() as u64).to_le_bytes());
    for z in m.iter() {
        h.update(z.re.to_le_bytes());
        h.update(z.im.to_le_bytes());
    }
}

impl Witness {
    /// First 16 hex digits of the SHA-256 of every matrix entry, in a fixed order.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        match self {
            Witness::Triple { rho, sigma, omega } => {
                for m in [rho, sigma, omega] {
                    hash_matrix(&mut h, m.matrix());
                }
            }
            Witness::Pair { rho, sigma } => {
                for m in [rho, sigma] {
                    h.update((m.da() as u64).to_le_bytes());
                    hash_matrix(&mut h, m.state().matrix());
                }
            }
            Witness::Filtered {
                rho,
                sigma,
                free,
                channels,
                q,
            } => {
                hash_matrix(&mut h, rho.matrix());
                hash_matrix(&mut h, sigma.matrix());
                h.update((free.star_center_index() as u64).to_le_bytes());
                for g in free.generators() {
                    hash_matrix(&mut h, g.matrix());
                }
                for ch in channels.channels() {
                    for k in ch.kraus() {
                        hash_matrix(&mut h, k);
                    }
                }
                h.update(q.unwrap_or(-1.0).to_le_bytes());
            }
        }
        h.finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Enough to redraw a sample: the per-sample seed is derived from `(master seed, index)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDigest {
    pub index: u64,
    pub seed: u64,
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearSaturation {
    #[serde(with = "crate::json::float")]
    pub slack: f64,
    pub witness: WitnessDigest,
}

/// A sample that raised an error instead of producing a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleError {
    pub index: u64,
    pub message: String,
}

/// Errors kept verbatim in a report; the rest are only counted.
pub const MAX_REPORTED_ERRORS: usize = 10;

/// Reduction of a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub campaign_tag: String,
    pub samples: u64,
    /// Applicable samples with slack below `-tolerance`.
    pub violations: u64,
    /// Largest `-slack` over applicable samples, floored at 0.
    #[serde(with = "crate::json::float")]
    pub max_violation: f64,
    /// Smallest slack over applicable samples (`+inf` if none).
    #[serde(with = "crate::json::float")]
    pub min_slack: f64,
    /// Smallest slacks, ascending, ties broken by sample index.
    pub near_saturations: Vec<NearSaturation>,
    pub seed: u64,
    #[serde(with = "crate::json::float")]
    pub tolerance: f64,
    pub inapplicable: u64,
    pub errors: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub error_samples: Vec<SampleError>,
    /// True for a theorem campaign with violations or errors; conjecture campaigns never fail.
    pub failed: bool,
}

impl FuzzReport {
    pub const CSV_HEADER: &'static str = "campaign,samples,violations,max_violation,min_slack,seed";

    /// One-line CSV summary matching [`Self::CSV_HEADER`].
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{:e},{:e},{}",
            self.campaign_tag,
            self.samples,
            self.violations,
            self.max_violation,
            self.min_slack,
            self.seed
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("fuzz reports always serialise")
    }
}

fn dim_in(range: (usize, usize), rng: &mut impl Rng) -> usize {
    rng.random_range(range.0..=range.1)
}

/// `(1−t) ρ + t σ'` with `t` uniform, so trace distances cover the whole range.
fn nearby(rho: &DensityMatrix, other: DensityMatrix, rng: &mut impl Rng) -> Result<DensityMatrix> {
    let t: f64 = rng.random();
    other.mix(rho, t)
}

fn random_rank_state(d: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    let rank = rng.random_range(1..=d);
    ginibre_state(d, rank, rng)
}

fn bipartite_nearby(
    rho: &BipartiteDensityMatrix,
    rng: &mut impl Rng,
) -> Result<BipartiteDensityMatrix> {
    let n = rho.da() * rho.db();
    let other = random_rank_state(n, rng)?;
    BipartiteDensityMatrix::new(nearby(rho.state(), other, rng)?, rho.da(), rho.db())
}

fn filtered_instance(
    d: usize,
    rng: &mut impl Rng,
    random_center: bool,
) -> Result<(FreeSet, ChannelSet)> {
    let extra = rng.random_range(1..=3);
    let mut generators = vec![DensityMatrix::maximally_mixed(d)?];
    for _ in 0..extra {
        generators.push(random_rank_state(d, rng)?);
    }
    let center = if random_center {
        rng.random_range(0..generators.len())
    } else {
        0
    };
    let free = FreeSet::new(generators, center)?;
    let mut channels = Vec::with_capacity(2);
    for _ in 0..2 {
        let dout = rng.random_range(2..=d);
        let min_kraus = d.div_ceil(dout);
        let kraus = rng.random_range(min_kraus..=min_kraus + 1);
        channels.push(random_channel(d, dout, kraus, rng)?);
    }
    Ok((free, ChannelSet::new(channels)?))
}

/// Redraws sample `index` of a campaign exactly.
pub fn sample_witness(
    campaign: Campaign,
    params: &CampaignParams,
    master_seed: u64,
    index: u64,
) -> Result<Witness> {
    params.validate(campaign)?;
    let dims = params.dims_for(campaign)?;
    let dims_b = params.dims_b_for(campaign)?;
    let mut rng = sample_rng(master_seed, index);
    let rng = &mut rng;
    match campaign {
        Campaign::Thm1 => {
            let d = dim_in(dims, rng);
            let rho = random_rank_state(d, rng)?;
            let other = random_rank_state(d, rng)?;
            let sigma = nearby(&rho, other, rng)?;
            let omega = ginibre_state(d, d, rng)?;
            Ok(Witness::Triple { rho, sigma, omega })
        }
        Campaign::Eq14 => {
            if let Some(k) = params.witness_every {
                if index % k == k - 1 {
                    let hi = dims.1.min(4).max(dims.0);
                    let d = dims.0 + ((index / k) as usize % (hi - dims.0 + 1));
                    let n = (d * d) as f64;
                    let eps = rng.random::<f64>() * (1.0 - 1.0 / n);
                    return Ok(Witness::Pair {
                        rho: max_entangled(d)?,
                        sigma: isotropic_mix(d, eps)?,
                    });
                }
            }
            let da = dim_in(dims, rng);
            let db = dim_in(dims_b, rng);
            let (rho, sigma) = random_equal_marginal_pair(da, db, rng)?;
            Ok(Witness::Pair { rho, sigma })
        }
        Campaign::Wilde | Campaign::MiConjecture => {
            let da = dim_in(dims, rng);
            // The biased mode perturbs a maximally entangled state, so it stays square.
            let rho = if params.entanglement_bias {
                entangled_state(da, ENTANGLED_SPREAD, rng)?
            } else {
                let db = dim_in(dims_b, rng);
                BipartiteDensityMatrix::new(random_rank_state(da * db, rng)?, da, db)?
            };
            let sigma = bipartite_nearby(&rho, rng)?;
            Ok(Witness::Pair { rho, sigma })
        }
        Campaign::Prop9 | Campaign::Lemma3 => {
            let d = dim_in(dims, rng);
            let lemma = campaign == Campaign::Lemma3;
            let (free, channels) = filtered_instance(d, rng, lemma)?;
            let rho = random_rank_state(d, rng)?;
            let other = random_rank_state(d, rng)?;
            let sigma = nearby(&rho, other, rng)?;
            let q = lemma.then(|| params.q.unwrap_or(LEMMA3_Q_GRID[(index % 3) as usize]));
            Ok(Witness::Filtered {
                rho,
                sigma,
                free,
                channels,
                q,
            })
        }
    }
}

/// The bound report of one sample. The filtered campaign evaluates both the star-center
/// form and the two-sided form around `I/D` and keeps the smaller slack.
pub fn evaluate_witness(campaign: Campaign, witness: &Witness) -> Result<BoundReport> {
    match (campaign, witness) {
        (Campaign::Thm1, Witness::Triple { rho, sigma, omega }) => {
            check_thm1(rho, sigma, omega, None, None)
        }
        (Campaign::Eq14, Witness::Pair { rho, sigma }) => check_equal_marginals(rho, sigma, None),
        (Campaign::Wilde, Witness::Pair { rho, sigma }) => check_wilde(rho, sigma),
        (Campaign::MiConjecture, Witness::Pair { rho, sigma }) => check_mi_conjecture(rho, sigma),
        (
            Campaign::Prop9,
            Witness::Filtered {
                rho,
                sigma,
                free,
                channels,
                ..
            },
        ) => {
            let star = prop9_check(rho, sigma, free, channels)?;
            let two_sided = cor10_check(rho, sigma, free, channels)?;
            let (a, b) = match (star.slack, two_sided.slack) {
                (Some(x), Some(y)) if y < x => (two_sided, star),
                _ => (star, two_sided),
            };
            Ok(match b.slack {
                Some(s) => a.with_param(&format!("{}_slack", b.equation_tag), s),
                None => a,
            })
        }
        (
            Campaign::Lemma3,
            Witness::Filtered {
                rho,
                free,
                channels,
                q,
                ..
            },
        ) => {
            let q = q.ok_or_else(|| range_err("sandwich witness without q"))?;
            lemma3_check(rho, free, channels, q)
        }
        _ => Err(range_err(format!(
            "witness kind does not match campaign {campaign}"
        ))),
    }
}

enum Outcome {
    Report(Option<f64>, bool),
    Failed(String),
}

/// Runs `samples` draws of `campaign` and reduces them in index order.
pub fn fuzz(
    campaign: Campaign,
    params: &CampaignParams,
    samples: u64,
    rng: &RngConfig,
) -> Result<FuzzReport> {
    params.validate(campaign)?;
    if samples == 0 {
        return Err(range_err("a campaign needs at least one sample"));
    }
    if rng.workers == 0 {
        return Err(range_err("workers must be positive"));
    }
    let seed = rng.master_seed;
    let run = |index: u64| -> Outcome {
        let result = sample_witness(campaign, params, seed, index)
            .and_then(|w| evaluate_witness(campaign, &w));
        match result {
            Ok(r) => Outcome::Report(r.slack.filter(|s| !s.is_nan()), r.applicable),
            Err(e) => Outcome::Failed(e.to_string()),
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(rng.workers)
        .build()
        .map_err(|e| Error::NumericalFailure(format!("thread pool: {e}")))?;
    let outcomes: Vec<Outcome> = pool.install(|| (0..samples).into_par_iter().map(run).collect());

    let tolerance = campaign.tolerance();
    let mut report = FuzzReport {
        campaign_tag: campaign.tag().to_string(),
        samples,
        violations: 0,
        max_violation: 0.0,
        min_slack: f64::INFINITY,
        near_saturations: Vec::new(),
        seed,
        tolerance,
        inapplicable: 0,
        errors: 0,
        error_samples: Vec::new(),
        failed: false,
    };
    let mut slacks: Vec<(f64, u64)> = Vec::new();
    for (index, outcome) in outcomes.into_iter().enumerate() {
        let index = index as u64;
        match outcome {
            Outcome::Failed(message) => {
                report.errors += 1;
                if report.error_samples.len() < MAX_REPORTED_ERRORS {
                    report.error_samples.push(SampleError { index, message });
                }
            }
            Outcome::Report(_, false) => report.inapplicable += 1,
            Outcome::Report(None, true) => {}
            Outcome::Report(Some(slack), true) => {
                if slack < -tolerance {
                    report.violations += 1;
                }
                report.max_violation = report.max_violation.max(-slack);
                report.min_slack = report.min_slack.min(slack);
                slacks.push((slack, index));
            }
        }
    }
    slacks.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for &(slack, index) in slacks.iter().take(params.near_saturation_count) {
        let witness = sample_witness(campaign, params, seed, index)?;
        report.near_saturations.push(NearSaturation {
            slack,
            witness: WitnessDigest {
                index,
                seed: sample_seed(seed, index),
                digest: witness.digest(),
            },
        });
    }
    report.failed = !campaign.is_conjecture() && (report.violations > 0 || report.errors > 0);
    Ok(report)
}
