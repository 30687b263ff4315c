//! Fixtures shared by the benchmarks.

use replicator_core::{CounterRng, SimulationConfig};
use rand::Rng;

/// `count` sorted slates of `k` uniform positions.
pub fn sorted_slates(k: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            let mut rng = CounterRng::for_election(seed, 0, 0, i as u64);
            let mut s: Vec<f64> = (0..k).map(|_| rng.random()).collect();
            s.sort_by(f64::total_cmp);
            s
        })
        .collect()
}

/// Plain dynamics config used by the generation benchmarks.
pub fn plain_config(k: usize, elections: usize) -> SimulationConfig {
    let mut cfg = SimulationConfig::new(k, 1, elections);
    cfg.seed = 1;
    cfg
}
