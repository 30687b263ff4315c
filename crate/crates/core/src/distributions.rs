//! Voter and initial-candidate distributions on `[0, 1]`, and the empirical
//! winner pool that stands in for the winner distribution of a generation.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bisection tolerance for quantiles without a closed form.
const QUANTILE_TOL: f64 = 1e-15;

/// An analytic distribution over `[0, 1]`.
///
/// Models must be validated with [`VoterModel::validate`] before use; the
/// evaluation methods assume valid parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum VoterModel {
    Uniform,
    UniformInterval { a: f64, b: f64 },
    Beta { alpha: f64, beta: f64 },
    /// Two-sided Weibull truncated to `[0, 1]` and renormalized.
    DoubleWeibull { shape: f64, location: f64, scale: f64 },
}

impl Default for VoterModel {
    fn default() -> Self {
        VoterModel::Uniform
    }
}

impl VoterModel {
    pub fn uniform_interval(a: f64, b: f64) -> Result<Self> {
        let m = VoterModel::UniformInterval { a, b };
        m.validate()?;
        Ok(m)
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        let m = VoterModel::Beta { alpha, beta };
        m.validate()?;
        Ok(m)
    }

    pub fn double_weibull(shape: f64, location: f64, scale: f64) -> Result<Self> {
        let m = VoterModel::DoubleWeibull {
            shape,
            location,
            scale,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            VoterModel::Uniform => Ok(()),
            VoterModel::UniformInterval { a, b } => {
                if !(a.is_finite() && b.is_finite() && 0.0 <= a && a < b && b <= 1.0) {
                    return Err(Error::param("interval", format!("need 0 <= a < b <= 1, got ({a}, {b})")));
                }
                Ok(())
            }
            VoterModel::Beta { alpha, beta } => {
                if !(alpha.is_finite() && alpha > 0.0) {
                    return Err(Error::param("alpha", format!("must be > 0, got {alpha}")));
                }
                if !(beta.is_finite() && beta > 0.0) {
                    return Err(Error::param("beta", format!("must be > 0, got {beta}")));
                }
                Ok(())
            }
            VoterModel::DoubleWeibull {
                shape,
                location,
                scale,
            } => {
                if !(shape.is_finite() && shape > 0.0) {
                    return Err(Error::param("shape", format!("must be > 0, got {shape}")));
                }
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(Error::param("scale", format!("must be > 0, got {scale}")));
                }
                if !location.is_finite() {
                    return Err(Error::param("location", "must be finite"));
                }
                let (lo, hi) = weibull_bounds(shape, location, scale);
                if hi - lo <= 0.0 {
                    return Err(Error::param("location", "no mass inside [0, 1]"));
                }
                Ok(())
            }
        }
    }

    /// CDF at `x`; arguments outside `[0, 1]` are clamped.
    #[inline]
    pub fn cdf(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match *self {
            VoterModel::Uniform => x,
            VoterModel::UniformInterval { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            VoterModel::Beta { alpha, beta } => beta_cdf(alpha, beta, x),
            VoterModel::DoubleWeibull {
                shape,
                location,
                scale,
            } => {
                let (lo, hi) = weibull_bounds(shape, location, scale);
                ((weibull_cdf(shape, location, scale, x) - lo) / (hi - lo)).clamp(0.0, 1.0)
            }
        }
    }

    /// CDF with parameter and argument checking.
    pub fn checked_cdf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::param("x", format!("must lie in [0, 1], got {x}")));
        }
        Ok(self.cdf(x))
    }

    /// Inverse CDF: the smallest `x` with `cdf(x) >= p` (up to bisection
    /// tolerance where no closed form exists).
    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        match *self {
            VoterModel::Uniform => p,
            VoterModel::UniformInterval { a, b } => a + p * (b - a),
            VoterModel::Beta { alpha, beta } if alpha == 0.5 && beta == 0.5 => {
                (FRAC_PI_2 * p).sin().powi(2)
            }
            VoterModel::Beta { alpha, beta } if alpha == 2.0 && beta == 2.0 => {
                // inverse of 3x^2 - 2x^3
                (0.5 + ((2.0 * p - 1.0).asin() / 3.0).sin()).clamp(0.0, 1.0)
            }
            VoterModel::Beta { .. } => bisect_quantile(|x| self.cdf(x), p),
            VoterModel::DoubleWeibull {
                shape,
                location,
                scale,
            } => {
                let (lo, hi) = weibull_bounds(shape, location, scale);
                let g = lo + p * (hi - lo);
                let z = if g < 0.5 {
                    -(-(2.0 * g).ln()).powf(1.0 / shape)
                } else if g < 1.0 {
                    (-(2.0 * (1.0 - g)).ln()).powf(1.0 / shape)
                } else {
                    f64::INFINITY
                };
                (location + scale * z).clamp(0.0, 1.0)
            }
        }
    }

    pub fn checked_quantile(&self, p: f64) -> Result<f64> {
        self.validate()?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param("p", format!("must lie in [0, 1], got {p}")));
        }
        Ok(self.quantile(p))
    }

    /// Inverse-CDF sample.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            VoterModel::Uniform => rng.random::<f64>(),
            _ => self.quantile(rng.random::<f64>()),
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, VoterModel::Uniform)
    }
}

fn beta_cdf(alpha: f64, beta: f64, x: f64) -> f64 {
    if alpha == 2.0 && beta == 2.0 {
        x * x * (3.0 - 2.0 * x)
    } else if alpha == 0.5 && beta == 0.5 {
        FRAC_2_PI * x.sqrt().asin()
    } else if alpha == 1.0 && beta == 1.0 {
        x
    } else {
        statrs::function::beta::beta_reg(alpha, beta, x)
    }
}

fn weibull_cdf(shape: f64, location: f64, scale: f64, x: f64) -> f64 {
    let z = (x - location) / scale;
    if z < 0.0 {
        0.5 * (-(-z).powf(shape)).exp()
    } else {
        1.0 - 0.5 * (-z.powf(shape)).exp()
    }
}

fn weibull_bounds(shape: f64, location: f64, scale: f64) -> (f64, f64) {
    (
        weibull_cdf(shape, location, scale, 0.0),
        weibull_cdf(shape, location, scale, 1.0),
    )
}

fn bisect_quantile(cdf: impl Fn(f64) -> f64, p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > QUANTILE_TOL {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// A point mass in an initial distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub position: f64,
    pub mass: f64,
}

/// Initial candidate distribution: optional point masses plus an analytic
/// base model carrying the remaining mass.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InitialDistribution {
    pub base: VoterModel,
    pub atoms: Vec<Atom>,
}

impl InitialDistribution {
    pub fn from_model(base: VoterModel) -> Self {
        InitialDistribution {
            base,
            atoms: Vec::new(),
        }
    }

    pub fn with_atoms(base: VoterModel, atoms: Vec<Atom>) -> Result<Self> {
        let d = InitialDistribution { base, atoms };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        let mut total = 0.0;
        for atom in &self.atoms {
            if !(0.0..=1.0).contains(&atom.position) {
                return Err(Error::param("atom.position", format!("must lie in [0, 1], got {}", atom.position)));
            }
            if !(atom.mass > 0.0 && atom.mass <= 1.0) {
                return Err(Error::param("atom.mass", format!("must lie in (0, 1], got {}", atom.mass)));
            }
            total += atom.mass;
        }
        if total > 1.0 + 1e-12 {
            return Err(Error::param("atoms", format!("total atom mass {total} exceeds 1")));
        }
        Ok(())
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if !self.atoms.is_empty() {
            let mut u: f64 = rng.random();
            for atom in &self.atoms {
                if u < atom.mass {
                    return atom.position;
                }
                u -= atom.mass;
            }
        }
        self.base.sample(rng)
    }
}

/// The winners of one generation.
#[derive(Clone, Debug, PartialEq)]
pub struct WinnerPool {
    positions: Vec<f64>,
    generation: usize,
}

impl WinnerPool {
    pub fn new(positions: Vec<f64>, generation: usize) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::EmptyPool);
        }
        if let Some(bad) = positions.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::param("position", format!("must lie in [0, 1], got {bad}")));
        }
        Ok(WinnerPool {
            positions,
            generation,
        })
    }

    /// Caller guarantees a non-empty vector of positions in `[0, 1]`.
    pub(crate) fn from_trusted(positions: Vec<f64>, generation: usize) -> Self {
        debug_assert!(!positions.is_empty());
        WinnerPool {
            positions,
            generation,
        }
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Uniform draw from the pool, mirrored across 1/2 with probability 1/2
    /// when `mirror` is set.
    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, mirror: bool, rng: &mut R) -> f64 {
        let x = self.positions[rng.random_range(0..self.positions.len())];
        if mirror && rng.random::<bool>() {
            1.0 - x
        } else {
            x
        }
    }

    pub fn stats(&self) -> EmpiricalStats {
        EmpiricalStats::new(&self.positions)
    }
}

/// Checked form of [`WinnerPool::draw`] over a raw slice of positions.
pub fn pool_sample<R: Rng + ?Sized>(pool: &[f64], mirror: bool, rng: &mut R) -> Result<f64> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let x = pool[rng.random_range(0..pool.len())];
    Ok(if mirror && rng.random::<bool>() { 1.0 - x } else { x })
}

/// Sorted snapshot of a finite sample with ECDF, quantile and histogram
/// queries.
#[derive(Clone, Debug)]
pub struct EmpiricalStats {
    sorted: Vec<f64>,
}

impl EmpiricalStats {
    pub fn new(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        EmpiricalStats { sorted }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Fraction of the sample `<= x`.
    pub fn ecdf(&self, x: f64) -> f64 {
        if self.sorted.is_empty() {
            return 0.0;
        }
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// Order statistic at index `ceil(p n) - 1` (index 0 for `p = 0`).
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.sorted.len();
        let idx = ((p.clamp(0.0, 1.0) * n as f64).ceil() as usize).clamp(1, n) - 1;
        self.sorted[idx]
    }

    /// Equal-width histogram over `[0, 1]`; the value 1 falls in the last bin.
    pub fn histogram(&self, bins: usize) -> Vec<u64> {
        histogram(&self.sorted, bins)
    }

    /// Fraction of the sample in the closed interval `[lo, hi]`.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        if self.sorted.is_empty() || hi < lo {
            return 0.0;
        }
        let a = self.sorted.partition_point(|&v| v < lo);
        let b = self.sorted.partition_point(|&v| v <= hi);
        (b - a) as f64 / self.sorted.len() as f64
    }

    /// Fraction of the sample in the open interval `(lo, hi)`.
    pub fn mass_open(&self, lo: f64, hi: f64) -> f64 {
        if self.sorted.is_empty() || hi <= lo {
            return 0.0;
        }
        let a = self.sorted.partition_point(|&v| v <= lo);
        let b = self.sorted.partition_point(|&v| v < hi);
        (b - a) as f64 / self.sorted.len() as f64
    }

    /// One-sample Kolmogorov-Smirnov statistic against `cdf`.
    pub fn ks_statistic(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let n = self.sorted.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }
}

pub fn histogram(values: &[f64], bins: usize) -> Vec<u64> {
    let mut counts = vec![0u64; bins];
    for &v in values {
        counts[bin_index(v, bins)] += 1;
    }
    counts
}

#[inline]
pub(crate) fn bin_index(v: f64, bins: usize) -> usize {
    ((v * bins as f64) as usize).min(bins - 1)
}

/// Modes of a histogram over `[0, 1]`.
///
/// Counts are smoothed with a centred moving average of `2 * half_window + 1`
/// bins. Every maximal run of smoothed bins at or above `rel_threshold` times
/// the global smoothed maximum is one mode, located at the centre of its
/// highest raw bin.
pub fn histogram_modes(counts: &[u64], half_window: usize, rel_threshold: f64) -> Vec<f64> {
    let bins = counts.len();
    if bins == 0 {
        return Vec::new();
    }
    let smoothed: Vec<f64> = (0..bins)
        .map(|i| {
            let lo = i.saturating_sub(half_window);
            let hi = (i + half_window).min(bins - 1);
            counts[lo..=hi].iter().sum::<u64>() as f64 / (hi - lo + 1) as f64
        })
        .collect();
    let peak = smoothed.iter().cloned().fold(0.0, f64::max);
    if peak <= 0.0 {
        return Vec::new();
    }
    let cut = rel_threshold * peak;
    let width = 1.0 / bins as f64;
    let mut modes = Vec::new();
    let mut i = 0;
    while i < bins {
        if smoothed[i] >= cut {
            let start = i;
            while i < bins && smoothed[i] >= cut {
                i += 1;
            }
            let best = (start..i).max_by_key(|&j| (counts[j], std::cmp::Reverse(j))).unwrap();
            modes.push((best as f64 + 0.5) * width);
        } else {
            i += 1;
        }
    }
    modes
}

/// Centre of the highest bin, reflected into `[0, 1/2]`.
pub fn folded_mode(counts: &[u64]) -> Option<f64> {
    let bins = counts.len();
    let best = (0..bins).max_by_key(|&j| (counts[j], std::cmp::Reverse(j)))?;
    if counts[best] == 0 {
        return None;
    }
    let centre = (best as f64 + 0.5) / bins as f64;
    Some(centre.min(1.0 - centre))
}
