//! Seeded inputs shared by the benchmarks.

use qcont::lab::{ginibre_state, random_channel, sample_rng};
use qcont::{ChannelSet, DensityMatrix, FreeSet, QuantumChannel};

/// Two full-rank states of dimension `d`, the same for every call with the same `seed`.
pub fn state_pair(d: usize, seed: u64) -> (DensityMatrix, DensityMatrix) {
    let mut rng = sample_rng(seed, 0);
    let rho = ginibre_state(d, d, &mut rng).expect("valid dimension");
    let sigma = ginibre_state(d, d, &mut rng).expect("valid dimension");
    (rho, sigma)
}

/// Two channels `d → d`; the second has full Kraus rank so its Choi matrix is invertible.
pub fn channel_pair(d: usize, seed: u64) -> (QuantumChannel, QuantumChannel) {
    let mut rng = sample_rng(seed, 1);
    let l1 = random_channel(d, d, 2, &mut rng).expect("valid dimension");
    let l2 = random_channel(d, d, d * d, &mut rng).expect("valid dimension");
    (l1, l2)
}

/// A free set of `I/d` plus `extra` Ginibre states, with two random channels.
pub fn filtered_instance(
    d: usize,
    extra: usize,
    seed: u64,
) -> (DensityMatrix, FreeSet, ChannelSet) {
    let mut rng = sample_rng(seed, 2);
    let mut gens = vec![DensityMatrix::maximally_mixed(d).expect("valid dimension")];
    for _ in 0..extra {
        gens.push(ginibre_state(d, d, &mut rng).expect("valid dimension"));
    }
    let free = FreeSet::new(gens, 0).expect("generators share a dimension");
    let channels = (0..2)
        .map(|_| random_channel(d, d, 2, &mut rng).expect("valid dimension"))
        .collect();
    let l = ChannelSet::new(channels).expect("channels share an input dimension");
    let rho = ginibre_state(d, d, &mut rng).expect("valid dimension");
    (rho, free, l)
}
