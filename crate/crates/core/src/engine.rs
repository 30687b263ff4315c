//! The generation loop.
//!
//! Generation `t` runs `n` independent elections. Every candidate copies a
//! position from an earlier generation's winners (or from the initial
//! distribution for generation 1), optionally subject to uniform noise,
//! mirroring, Gaussian perturbation, memory of several generations and
//! copying from the top `h` finishers. The winners form the next pool.

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{
    bin_index, histogram_modes, Atom, InitialDistribution, VoterModel, WinnerPool,
};
use crate::election::{Ballot, TieBreakRule};
use crate::error::{Error, Result};
use crate::rng::{self, CounterRng, MAX_ELECTIONS, MAX_GENERATIONS};

/// Number of points of the stored ECDF grid; point `j` sits at `(j+1)/512`.
pub const ECDF_GRID: usize = 512;
/// Number of equal-width histogram bins over `[0, 1]`.
pub const HIST_BINS: usize = 200;
/// Open interval used for the centre-mass summary.
pub const CENTER_BAND: (f64, f64) = (0.45, 0.55);
/// Closed interval used for the inner-mass summary.
pub const INNER_BAND: (f64, f64) = (0.34, 0.66);

/// Largest supported candidate count per election.
pub const MAX_K: usize = 4096;

/// Grid abscissae of the stored ECDF.
pub fn ecdf_grid() -> impl Iterator<Item = f64> {
    (1..=ECDF_GRID).map(|j| j as f64 / ECDF_GRID as f64)
}

/// One entry of a candidate-count mixture.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KShare {
    pub k: usize,
    pub p: f64,
}

fn one() -> usize {
    1
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

fn is_one(x: &usize) -> bool {
    *x == 1
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    /// Fixed candidate count. Exactly one of `k` and `k_counts` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Mixture of candidate counts with proportions summing to 1.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub k_counts: Vec<KShare>,
    pub generations: usize,
    pub elections: usize,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Mirror every copied position across 1/2 with probability 1/2.
    #[serde(default, skip_serializing_if = "is_false")]
    pub symmetry: bool,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub perturbation_variance: f64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub memory: usize,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub top_h: usize,
    #[serde(default)]
    pub rule: TieBreakRule,
    #[serde(default, skip_serializing_if = "is_false")]
    pub allow_combined: bool,
    #[serde(default)]
    pub initial: VoterModel,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub initial_atoms: Vec<Atom>,
    #[serde(default)]
    pub voters: VoterModel,
    /// Extra points at which the exact pool ECDF is recorded.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<f64>,
    /// Keep every generation's full winner pool in the trajectory.
    #[serde(default, skip_serializing_if = "is_false")]
    pub keep_pools: bool,
}

impl SimulationConfig {
    /// Plain dynamics with `k` candidates, uniform voters and uniform F_0.
    pub fn new(k: usize, generations: usize, elections: usize) -> Self {
        SimulationConfig {
            k: Some(k),
            k_counts: Vec::new(),
            generations,
            elections,
            trials: 1,
            seed: 0,
            symmetry: false,
            epsilon: 0.0,
            perturbation_variance: 0.0,
            memory: 1,
            top_h: 1,
            rule: TieBreakRule::LeftRight,
            allow_combined: false,
            initial: VoterModel::Uniform,
            initial_atoms: Vec::new(),
            voters: VoterModel::Uniform,
            probes: Vec::new(),
            keep_pools: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.k, self.k_counts.is_empty()) {
            (Some(_), false) => {
                return Err(Error::param("k", "set either `k` or `k_counts`, not both"))
            }
            (None, true) => return Err(Error::param("k", "one of `k` or `k_counts` is required")),
            _ => {}
        }
        for (k, p) in self.k_mixture() {
            if k == 0 || k > MAX_K {
                return Err(Error::param("k", format!("must lie in 1..={MAX_K}, got {k}")));
            }
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::param("k_counts", format!("proportion for k={k} must be > 0, got {p}")));
            }
        }
        let mut ks: Vec<usize> = self.k_counts.iter().map(|s| s.k).collect();
        ks.sort_unstable();
        if ks.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("k_counts", "duplicate candidate count"));
        }
        let total: f64 = self.k_mixture().iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::param("k_counts", format!("proportions sum to {total}, expected 1")));
        }
        if self.generations == 0 || self.generations as u64 >= MAX_GENERATIONS {
            return Err(Error::param(
                "generations",
                format!("must lie in 1..{MAX_GENERATIONS}, got {}", self.generations),
            ));
        }
        if self.elections == 0 || self.elections as u64 > MAX_ELECTIONS {
            return Err(Error::param(
                "elections",
                format!("must lie in 1..={MAX_ELECTIONS}, got {}", self.elections),
            ));
        }
        if self.trials == 0 {
            return Err(Error::param("trials", "must be >= 1"));
        }
        if self.seed > i64::MAX as u64 {
            return Err(Error::param("seed", "must be at most 2^63 - 1"));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::param("epsilon", format!("must lie in [0, 1], got {}", self.epsilon)));
        }
        if !(self.perturbation_variance.is_finite() && self.perturbation_variance >= 0.0) {
            return Err(Error::param(
                "perturbation_variance",
                format!("must be >= 0, got {}", self.perturbation_variance),
            ));
        }
        if self.memory == 0 {
            return Err(Error::param("memory", "must be >= 1"));
        }
        let min_k = self.min_k();
        if self.top_h == 0 || self.top_h > min_k {
            return Err(Error::param(
                "top_h",
                format!("must lie in 1..={min_k} (smallest k), got {}", self.top_h),
            ));
        }
        let active = [
            self.epsilon > 0.0,
            self.perturbation_variance > 0.0,
            self.memory > 1,
            self.top_h > 1,
            self.k_counts.len() > 1,
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        if active > 1 && !self.allow_combined {
            return Err(Error::param(
                "allow_combined",
                "more than one variant (epsilon, perturbation_variance, memory, top_h, k_counts) is active",
            ));
        }
        if let Some(bad) = self.probes.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::param("probes", format!("must lie in [0, 1], got {bad}")));
        }
        self.initial.validate()?;
        self.voters.validate()?;
        self.initial_distribution().validate()
    }

    /// `(k, proportion)` pairs in configuration order.
    pub fn k_mixture(&self) -> Vec<(usize, f64)> {
        match self.k {
            Some(k) => vec![(k, 1.0)],
            None => self.k_counts.iter().map(|s| (s.k, s.p)).collect(),
        }
    }

    pub fn min_k(&self) -> usize {
        self.k_mixture().iter().map(|&(k, _)| k).min().unwrap_or(0)
    }

    pub fn initial_distribution(&self) -> InitialDistribution {
        InitialDistribution {
            base: self.initial,
            atoms: self.initial_atoms.clone(),
        }
    }

    /// Elections per candidate count, by largest-remainder rounding of
    /// `p_k * n`. Remainder ties go to the earlier entry.
    pub fn k_allocation(&self) -> Vec<(usize, usize)> {
        largest_remainder(&self.k_mixture(), self.elections)
    }
}

fn largest_remainder(mixture: &[(usize, f64)], n: usize) -> Vec<(usize, usize)> {
    let exact: Vec<f64> = mixture.iter().map(|&(_, p)| p * n as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|&e| e.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..mixture.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().take(n.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    // guard against floor rounding overshooting when proportions sum above 1
    let mut total: usize = counts.iter().sum();
    for i in order.iter().rev() {
        if total <= n {
            break;
        }
        let cut = (total - n).min(counts[*i]);
        counts[*i] -= cut;
        total -= cut;
    }
    mixture.iter().map(|&(k, _)| k).zip(counts).collect()
}

/// Per-generation statistics kept for every generation of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationSummary {
    pub t: usize,
    pub n: usize,
    /// Exact pool ECDF at `(j+1)/512` for `j = 0..512`.
    pub ecdf: Vec<f64>,
    /// Counts in 200 equal bins over `[0, 1]`.
    pub histogram: Vec<u64>,
    /// Fraction of the pool in the open interval `(0.45, 0.55)`.
    pub center_mass: f64,
    /// Fraction of the pool in the closed interval `[0.34, 0.66]`.
    pub inner_mass: f64,
    /// Fraction of the pool exactly at one of the initial atoms.
    pub atom_mass: f64,
    /// `(x, ecdf(x))` at the configured probe points.
    pub probes: Vec<(f64, f64)>,
}

impl GenerationSummary {
    pub fn from_pool(t: usize, pool: &[f64], probes: &[f64], atoms: &[Atom]) -> Self {
        let n = pool.len();
        let nf = n as f64;
        let mut grid_counts = vec![0u64; ECDF_GRID + 1];
        let mut histogram = vec![0u64; HIST_BINS];
        let (mut center, mut inner, mut atom) = (0usize, 0usize, 0usize);
        for &v in pool {
            // v <= j/512 exactly when ceil(512 v) <= j; the product is exact
            grid_counts[(v * ECDF_GRID as f64).ceil() as usize] += 1;
            histogram[bin_index(v, HIST_BINS)] += 1;
            center += (v > CENTER_BAND.0 && v < CENTER_BAND.1) as usize;
            inner += (v >= INNER_BAND.0 && v <= INNER_BAND.1) as usize;
            atom += atoms.iter().any(|a| a.position == v) as usize;
        }
        let mut ecdf = Vec::with_capacity(ECDF_GRID);
        let mut acc = grid_counts[0];
        for c in &grid_counts[1..] {
            acc += c;
            ecdf.push(acc as f64 / nf);
        }
        let probes = probes
            .iter()
            .map(|&x| (x, pool.iter().filter(|&&v| v <= x).count() as f64 / nf))
            .collect();
        GenerationSummary {
            t,
            n,
            ecdf,
            histogram,
            center_mass: center as f64 / nf,
            inner_mass: inner as f64 / nf,
            atom_mass: atom as f64 / nf,
            probes,
        }
    }

    /// ECDF at a grid point `x = j/512` with `1 <= j <= 512`; `None` off the
    /// grid.
    pub fn ecdf_at(&self, x: f64) -> Option<f64> {
        let scaled = x * ECDF_GRID as f64;
        if scaled.fract() != 0.0 || !(1.0..=ECDF_GRID as f64).contains(&scaled) {
            return None;
        }
        Some(self.ecdf[scaled as usize - 1])
    }

    /// Exact ECDF at a configured probe point.
    pub fn probe(&self, x: f64) -> Option<f64> {
        self.probes.iter().find(|p| p.0 == x).map(|p| p.1)
    }

    /// Modes of the histogram, smoothed over 5 bins, at 5% of the peak.
    pub fn modes(&self) -> Vec<f64> {
        histogram_modes(&self.histogram, 2, 0.05)
    }
}

/// One generation of one trial.
#[derive(Clone, Debug)]
pub struct GenerationRecord {
    pub t: usize,
    pub summary: GenerationSummary,
    /// Full winner pool, present when `keep_pools` is set.
    pub pool: Option<WinnerPool>,
    /// Pools of the 1st..h-th place finishers, present when `keep_pools` is
    /// set and `top_h > 1`.
    pub rank_pools: Vec<WinnerPool>,
}

/// All generations of one trial; `records[0]` is a sample from F_0.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub trial: usize,
    pub config: SimulationConfig,
    pub records: Vec<GenerationRecord>,
}

impl Trajectory {
    pub fn summary(&self, t: usize) -> &GenerationSummary {
        &self.records[t].summary
    }

    pub fn last(&self) -> &GenerationSummary {
        &self.records.last().expect("trajectory has records").summary
    }
}

/// Where a generation's candidates copy from.
enum Source {
    /// The analytic initial distribution.
    Initial,
    /// `pools[r]` holds the `(r+1)`-th place finishers of one generation.
    Pools(Vec<Vec<f64>>),
}

/// Stepwise driver for one trial.
pub struct Simulation<'c> {
    cfg: &'c SimulationConfig,
    key: u64,
    t: usize,
    initial: InitialDistribution,
    allocation: Vec<(usize, usize)>,
    sigma: f64,
    /// Most recent generation first, at most `memory` entries.
    history: VecDeque<Source>,
}

impl<'c> Simulation<'c> {
    pub fn new(cfg: &'c SimulationConfig, trial: usize) -> Result<Self> {
        cfg.validate()?;
        let mut history = VecDeque::with_capacity(cfg.memory);
        history.push_front(Source::Initial);
        Ok(Simulation {
            cfg,
            key: rng::trial_key(cfg.seed, trial as u64),
            t: 0,
            initial: cfg.initial_distribution(),
            allocation: cfg.k_allocation(),
            sigma: cfg.perturbation_variance.sqrt(),
            history,
        })
    }

    /// Index of the last completed generation.
    pub fn generation(&self) -> usize {
        self.t
    }

    /// Winners of the last completed generation (`None` before the first
    /// step).
    pub fn current_pool(&self) -> Option<&[f64]> {
        match self.history.front() {
            Some(Source::Pools(p)) => Some(&p[0]),
            _ => None,
        }
    }

    /// A sample of `n` positions from F_0, recorded as generation 0.
    pub fn initial_record(&self) -> GenerationRecord {
        let cfg = self.cfg;
        let pool: Vec<f64> = (0..cfg.elections)
            .into_par_iter()
            .map(|e| {
                let mut rng = CounterRng::with_trial_key(self.key, 0, e as u64);
                self.initial.sample(&mut rng)
            })
            .collect();
        self.record(0, vec![pool])
    }

    /// One candidate position for generation `self.t + 1`.
    #[inline]
    pub fn draw_candidate<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let cfg = self.cfg;
        if cfg.epsilon > 0.0 && rng.random::<f64>() < cfg.epsilon {
            return rng.random::<f64>();
        }
        let source = if self.history.len() == 1 {
            &self.history[0]
        } else {
            &self.history[rng.random_range(0..self.history.len())]
        };
        let mut x = match source {
            Source::Initial => self.initial.sample(rng),
            Source::Pools(pools) => {
                let pool = if cfg.top_h == 1 {
                    &pools[0]
                } else {
                    &pools[rng.random_range(0..cfg.top_h)]
                };
                pool[rng.random_range(0..pool.len())]
            }
        };
        if cfg.symmetry && rng.random::<bool>() {
            x = 1.0 - x;
        }
        if self.sigma > 0.0 {
            let z: f64 = rng.sample(StandardNormal);
            x = (x + self.sigma * z).clamp(0.0, 1.0) + 0.0;
        }
        x
    }

    /// Runs the next generation and returns its record.
    pub fn step(&mut self) -> GenerationRecord {
        let cfg = self.cfg;
        let t = self.t + 1;
        let h = cfg.top_h;
        let n = cfg.elections;
        let mut out = vec![0.0f64; n * h];
        let this = &*self;
        let mut start = 0;
        for &(k, count) in &self.allocation {
            out[start * h..(start + count) * h]
                .par_chunks_mut(h)
                .enumerate()
                .for_each_init(
                    || (Vec::with_capacity(k), Ballot::new()),
                    |(cands, ballot), (i, slot)| {
                        let e = (start + i) as u64;
                        let mut rng = CounterRng::with_trial_key(this.key, t as u64, e);
                        cands.clear();
                        cands.extend((0..k).map(|_| this.draw_candidate(&mut rng)));
                        cands.sort_unstable_by(f64::total_cmp);
                        if h == 1 {
                            slot[0] = cands[ballot.winner(cands, &cfg.voters, cfg.rule, &mut rng)];
                        } else {
                            let ranked = ballot.top_h(cands, &cfg.voters, cfg.rule, h, &mut rng);
                            for (s, &r) in slot.iter_mut().zip(ranked) {
                                *s = cands[r];
                            }
                        }
                    },
                );
            start += count;
        }
        let pools: Vec<Vec<f64>> = if h == 1 {
            vec![out]
        } else {
            (0..h)
                .map(|r| out.iter().skip(r).step_by(h).copied().collect())
                .collect()
        };
        let record = self.record(t, pools.clone());
        self.history.push_front(Source::Pools(pools));
        self.history.truncate(cfg.memory);
        self.t = t;
        record
    }

    fn record(&self, t: usize, pools: Vec<Vec<f64>>) -> GenerationRecord {
        let cfg = self.cfg;
        let summary =
            GenerationSummary::from_pool(t, &pools[0], &cfg.probes, &self.initial.atoms);
        let (pool, rank_pools) = if cfg.keep_pools {
            let rank_pools = if pools.len() > 1 {
                pools
                    .iter()
                    .map(|p| WinnerPool::from_trusted(p.clone(), t))
                    .collect()
            } else {
                Vec::new()
            };
            let mut pools = pools;
            (Some(WinnerPool::from_trusted(pools.swap_remove(0), t)), rank_pools)
        } else {
            (None, Vec::new())
        };
        GenerationRecord {
            t,
            summary,
            pool,
            rank_pools,
        }
    }
}

/// Runs generations `0..=T` of one trial.
pub fn run_trial(cfg: &SimulationConfig, trial: usize) -> Result<Trajectory> {
    let mut sim = Simulation::new(cfg, trial)?;
    let mut records = Vec::with_capacity(cfg.generations + 1);
    records.push(sim.initial_record());
    for _ in 0..cfg.generations {
        records.push(sim.step());
    }
    Ok(Trajectory {
        trial,
        config: cfg.clone(),
        records,
    })
}

/// Runs trials `0..cfg.trials`.
pub fn run_experiment(cfg: &SimulationConfig) -> Result<Vec<Trajectory>> {
    cfg.validate()?;
    (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_trial(cfg, trial))
        .collect()
}

/// Cross-trial aggregate of one generation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateSummary {
    pub t: usize,
    pub trials: usize,
    /// Mean ECDF across trials on the 512-point grid.
    pub mean_ecdf: Vec<f64>,
    /// Histogram counts pooled across trials.
    pub pooled_histogram: Vec<u64>,
    pub mean_center_mass: f64,
    pub mean_inner_mass: f64,
    pub mean_probes: Vec<(f64, f64)>,
}

impl AggregateSummary {
    pub fn modes(&self) -> Vec<f64> {
        histogram_modes(&self.pooled_histogram, 2, 0.05)
    }
}

/// Aggregates trajectories generation by generation.
pub fn aggregate(trajectories: &[Trajectory]) -> Vec<AggregateSummary> {
    let Some(first) = trajectories.first() else {
        return Vec::new();
    };
    let m = trajectories.len() as f64;
    (0..first.records.len())
        .map(|t| {
            let mut mean_ecdf = vec![0.0; ECDF_GRID];
            let mut pooled_histogram = vec![0u64; HIST_BINS];
            let mut mean_probes: Vec<(f64, f64)> =
                first.summary(t).probes.iter().map(|&(x, _)| (x, 0.0)).collect();
            let (mut center, mut inner) = (0.0, 0.0);
            for tr in trajectories {
                let s = tr.summary(t);
                for (a, b) in mean_ecdf.iter_mut().zip(&s.ecdf) {
                    *a += b / m;
                }
                for (a, b) in pooled_histogram.iter_mut().zip(&s.histogram) {
                    *a += b;
                }
                for (a, b) in mean_probes.iter_mut().zip(&s.probes) {
                    a.1 += b.1 / m;
                }
                center += s.center_mass / m;
                inner += s.inner_mass / m;
            }
            AggregateSummary {
                t,
                trials: trajectories.len(),
                mean_ecdf,
                pooled_histogram,
                mean_center_mass: center,
                mean_inner_mass: inner,
                mean_probes,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;
    use rand::SeedableRng;

    fn cfg(k: usize, generations: usize, elections: usize) -> SimulationConfig {
        SimulationConfig::new(k, generations, elections)
    }

    #[test]
    fn validation_rejects_bad_configs() {
        assert!(cfg(3, 10, 100).validate().is_ok());
        assert!(cfg(0, 10, 100).validate().is_err());
        assert!(cfg(3, 0, 100).validate().is_err());
        assert!(cfg(3, 10, 0).validate().is_err());
        let mut c = cfg(3, 10, 100);
        c.epsilon = 1.5;
        assert!(c.validate().is_err());
        let mut c = cfg(3, 10, 100);
        c.top_h = 4;
        assert!(c.validate().is_err());
        let mut c = cfg(3, 10, 100);
        c.epsilon = 0.1;
        c.memory = 2;
        assert!(c.validate().is_err());
        c.allow_combined = true;
        assert!(c.validate().is_ok());
        let mut c = cfg(3, 10, 100);
        c.k = None;
        c.k_counts = vec![KShare { k: 3, p: 0.5 }, KShare { k: 4, p: 0.4 }];
        assert!(c.validate().is_err());
        c.k_counts[1].p = 0.5;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn largest_remainder_allocation() {
        assert_eq!(largest_remainder(&[(3, 1.0)], 7), vec![(3, 7)]);
        assert_eq!(
            largest_remainder(&[(3, 1.0 / 3.0), (4, 1.0 / 3.0), (5, 1.0 / 3.0)], 100),
            vec![(3, 34), (4, 33), (5, 33)]
        );
        assert_eq!(
            largest_remainder(&[(3, 0.25), (4, 0.75)], 10),
            vec![(3, 3), (4, 7)]
        );
        let alloc = largest_remainder(&[(3, 0.1), (4, 0.2), (5, 0.7)], 100_001);
        assert_eq!(alloc.iter().map(|a| a.1).sum::<usize>(), 100_001);
    }

    #[test]
    fn full_uniform_noise_ignores_pools() {
        let mut c = cfg(2, 1, 10);
        c.epsilon = 1.0;
        c.initial_atoms = vec![Atom {
            position: 0.5,
            mass: 1.0,
        }];
        let sim = Simulation::new(&c, 0).unwrap();
        let mut rng = CounterRng::seed_from_u64(1);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| sim.draw_candidate(&mut rng)).collect();
        assert!(xs.iter().all(|&x| x != 0.5));
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.005);
    }

    #[test]
    fn perturbation_clamps_at_boundary() {
        let mut c = cfg(2, 1, 10);
        c.perturbation_variance = 0.01;
        c.initial_atoms = vec![Atom {
            position: 0.0,
            mass: 1.0,
        }];
        let sim = Simulation::new(&c, 0).unwrap();
        let mut rng = CounterRng::seed_from_u64(2);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| sim.draw_candidate(&mut rng)).collect();
        assert!(xs.iter().all(|&x| (0.0..=1.0).contains(&x)));
        let zero = xs.iter().filter(|&&x| x == 0.0).count() as f64 / n as f64;
        assert!((zero - 0.5).abs() < 0.01, "{zero}");
    }

    #[test]
    fn point_mass_is_stationary() {
        for k in [2, 3, 5, 7] {
            for x in [0.5, 0.2, 0.0] {
                let mut c = cfg(k, 5, 2000);
                c.initial_atoms = vec![Atom {
                    position: x,
                    mass: 1.0,
                }];
                c.keep_pools = true;
                let tr = run_trial(&c, 0).unwrap();
                for rec in &tr.records {
                    assert!(rec.pool.as_ref().unwrap().positions().iter().all(|&v| v == x));
                }
            }
        }
    }

    #[test]
    fn trials_are_deterministic_and_composable() {
        let mut c = cfg(3, 4, 3000);
        c.trials = 2;
        c.symmetry = true;
        c.probes = vec![0.25, 0.4];
        let runs = run_experiment(&c).unwrap();
        for (i, tr) in runs.iter().enumerate() {
            let again = run_trial(&c, i).unwrap();
            for (a, b) in tr.records.iter().zip(&again.records) {
                assert_eq!(a.summary, b.summary);
            }
        }
        assert_ne!(runs[0].last().ecdf, runs[1].last().ecdf);
    }

    #[test]
    fn single_entry_mixture_matches_fixed_k() {
        let a = cfg(4, 3, 5000);
        let mut b = a.clone();
        b.k = None;
        b.k_counts = vec![KShare { k: 4, p: 1.0 }];
        let ta = run_trial(&a, 0).unwrap();
        let tb = run_trial(&b, 0).unwrap();
        for (x, y) in ta.records.iter().zip(&tb.records) {
            assert_eq!(x.summary, y.summary);
        }
    }

    #[test]
    fn flanked_candidates_never_win_in_the_engine() {
        let mut c = cfg(5, 1, 20_000);
        c.initial = VoterModel::uniform_interval(0.25, 0.75).unwrap();
        c.keep_pools = true;
        c.top_h = 1;
        let mut sim = Simulation::new(&c, 0).unwrap();
        // recompute each election's slate from its stream and compare
        let rec = sim.step();
        let winners = rec.pool.unwrap();
        let sim0 = Simulation::new(&c, 0).unwrap();
        for (e, &w) in winners.positions().iter().enumerate().take(2000) {
            let mut rng = CounterRng::with_trial_key(sim0.key, 1, e as u64);
            let mut cands: Vec<f64> = (0..5).map(|_| sim0.draw_candidate(&mut rng)).collect();
            cands.sort_by(f64::total_cmp);
            assert!(w == cands[0] || w == cands[4]);
        }
    }

    #[test]
    fn top_h_pools_are_per_election_rankings() {
        let mut c = cfg(3, 2, 4000);
        c.top_h = 2;
        c.keep_pools = true;
        let tr = run_trial(&c, 0).unwrap();
        let rec = &tr.records[2];
        assert_eq!(rec.rank_pools.len(), 2);
        let first = rec.rank_pools[0].positions();
        let second = rec.rank_pools[1].positions();
        assert_eq!(first, rec.pool.as_ref().unwrap().positions());
        assert_eq!(first.len(), 4000);
        assert_eq!(second.len(), 4000);
        assert!(first.iter().zip(second).filter(|(a, b)| a == b).count() < 10);
    }

    #[test]
    fn summary_matches_pool() {
        let pool = vec![0.0, 0.25, 0.25, 0.5, 0.5, 0.7, 1.0, 1.0 / 3.0];
        let s = GenerationSummary::from_pool(0, &pool, &[0.3, 0.5], &[]);
        assert_eq!(s.ecdf.len(), ECDF_GRID);
        assert_eq!(s.ecdf_at(0.25), Some(3.0 / 8.0));
        assert_eq!(s.ecdf_at(0.5), Some(6.0 / 8.0));
        assert_eq!(s.ecdf_at(0.3), None);
        assert_eq!(s.ecdf_at(1.0), Some(1.0));
        for (j, x) in ecdf_grid().enumerate() {
            let direct = pool.iter().filter(|&&v| v <= x).count() as f64 / 8.0;
            assert_eq!(s.ecdf[j], direct);
        }
        assert_eq!(s.histogram.iter().sum::<u64>(), 8);
        assert_eq!(s.center_mass, 2.0 / 8.0);
        assert_eq!(s.inner_mass, 2.0 / 8.0);
        assert_eq!(s.probe(0.3), Some(3.0 / 8.0));
    }

    #[test]
    fn two_candidate_first_generation() {
        let mut c = cfg(2, 1, 100_000);
        c.probes = vec![0.25];
        let tr = run_trial(&c, 0).unwrap();
        let got = tr.summary(1).probe(0.25).unwrap();
        assert!((got - 0.125).abs() < 0.005, "{got}");
        let t0 = tr.summary(0).ecdf_at(0.25).unwrap();
        assert!((t0 - 0.25).abs() < 0.006);
    }

    #[test]
    fn mirrored_runs_stay_symmetric() {
        let mut c = cfg(4, 20, 20_000);
        c.symmetry = true;
        c.trials = 4;
        let agg = aggregate(&run_experiment(&c).unwrap());
        let last = agg.last().unwrap();
        let h = &last.pooled_histogram;
        let total: u64 = h.iter().sum();
        for (lo, hi) in [(0, 40), (40, 80), (80, 95), (95, 100)] {
            let left: u64 = h[lo..hi].iter().sum();
            let right: u64 = h[HIST_BINS - hi..HIST_BINS - lo].iter().sum();
            let p = (left + right) as f64 / (2 * total) as f64;
            let se = (2.0 * p * (1.0 - p) / total as f64).sqrt();
            let diff = (left as f64 - right as f64).abs() / total as f64;
            assert!(diff < 5.0 * se + 1e-12, "bins {lo}..{hi}: {left} vs {right}");
        }
    }
}
