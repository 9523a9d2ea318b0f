//! Shared input generators for the benchmark targets.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sidonkit::{Family, KSet};

/// Deterministic family of `size` distinct k-subsets of {0..range}.
pub fn random_family(seed: u64, size: usize, k: usize, range: i64) -> Family {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let universe: Vec<i64> = (0..=range).collect();
    let mut members = Vec::with_capacity(size);
    let mut seen = std::collections::HashSet::new();
    while members.len() < size {
        let pick: Vec<i64> = universe
            .choose_multiple(&mut rng, k)
            .copied()
            .collect();
        let set = KSet::from_unsorted(pick).unwrap();
        if seen.insert(set.clone()) {
            members.push(set);
        }
    }
    Family::new(members).unwrap()
}
