//! Closed-form CDF bounds, noisy limits and the scalar iterated maps that
//! describe the dynamics, with a bracketing fixed-point solver.

use serde::{Deserialize, Serialize};

use crate::distributions::VoterModel;
use crate::error::{Error, Result};

/// Grid resolution of the fixed-point scan.
pub const FIXED_POINT_GRID: usize = 10_000;
/// Bisection tolerance for fixed points.
pub const FIXED_POINT_TOL: f64 = 1e-12;
/// Central-difference step for stability classification.
pub const DERIVATIVE_STEP: f64 = 1e-6;
/// `|f'| - 1` within this distance of zero is reported as marginal.
pub const MARGINAL_BAND: f64 = 1e-4;

/// A closed-form statement about the winner CDF `F_{k,t}(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Bound {
    /// Exact two-candidate CDF `[2 F_0(x)]^(2^t) / 2`.
    K2Exact { x: f64, t: u32 },
    /// Three-candidate upper bound `F_0(x) (3/4 + F_0(x)^2)^t`.
    K3Upper { x: f64, t: u32 },
    /// Four-candidate upper bound `F_0(x) [1 - 4 (1/2 - F_0(x/3 + 1/3))^3]^t`
    /// for `x` in `(1/3, 1/2)`.
    K4Upper { x: f64, t: u32 },
    /// Limit of the two-candidate CDF under uniform noise.
    K2NoisyLimit { x: f64, epsilon: f64 },
    /// Upper bound `1.5 epsilon` on the three-candidate limsup.
    K3NoisyLimit { epsilon: f64 },
    /// Upper bound `epsilon / (8 beta^3)` on the four-candidate limsup.
    K4NoisyLimit { x: f64, epsilon: f64 },
}

impl Bound {
    /// Candidate count the bound describes.
    pub fn k(&self) -> usize {
        match self {
            Bound::K2Exact { .. } | Bound::K2NoisyLimit { .. } => 2,
            Bound::K3Upper { .. } | Bound::K3NoisyLimit { .. } => 3,
            Bound::K4Upper { .. } | Bound::K4NoisyLimit { .. } => 4,
        }
    }

    /// True for exact values, false for upper bounds.
    pub fn is_exact(&self) -> bool {
        matches!(self, Bound::K2Exact { .. } | Bound::K2NoisyLimit { .. })
    }
}

fn check_unit(name: &'static str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::param(name, format!("must lie in [0, 1], got {x}")));
    }
    Ok(())
}

fn check_left_half(x: f64) -> Result<()> {
    if !(0.0..0.5).contains(&x) {
        return Err(Error::param("x", format!("must lie in [0, 1/2), got {x}")));
    }
    Ok(())
}

fn check_k4_range(x: f64) -> Result<()> {
    if !(x > 1.0 / 3.0 && x < 0.5) {
        return Err(Error::param("x", format!("must lie in (1/3, 1/2), got {x}")));
    }
    Ok(())
}

/// Evaluates `bound` for initial distribution `f0`.
pub fn cdf_bound(bound: &Bound, f0: &VoterModel) -> Result<f64> {
    f0.validate()?;
    match *bound {
        Bound::K2Exact { x, t } => {
            check_unit("x", x)?;
            let e = 2f64.powi(t as i32);
            let f = f0.cdf(x);
            Ok(if f <= 0.5 {
                (2.0 * f).powf(e) / 2.0
            } else {
                1.0 - (2.0 * (1.0 - f)).powf(e) / 2.0
            })
        }
        Bound::K3Upper { x, t } => {
            if !(0.0..=0.5).contains(&x) {
                return Err(Error::param("x", format!("must lie in [0, 1/2], got {x}")));
            }
            let f = f0.cdf(x);
            Ok(f * (0.75 + f * f).powi(t as i32))
        }
        Bound::K4Upper { x, t } => {
            check_k4_range(x)?;
            let d = 0.5 - f0.cdf(x / 3.0 + 1.0 / 3.0);
            Ok(f0.cdf(x) * (1.0 - 4.0 * d * d * d).powi(t as i32))
        }
        Bound::K2NoisyLimit { x, epsilon } => {
            check_left_half(x)?;
            if !(epsilon > 0.0 && epsilon < 1.0) {
                return Err(Error::param("epsilon", format!("must lie in (0, 1), got {epsilon}")));
            }
            Ok(k2_noisy_fixed_points(epsilon, x).0)
        }
        Bound::K3NoisyLimit { epsilon } => {
            if !(epsilon > 0.0 && epsilon < 1.0 / 3.0) {
                return Err(Error::param("epsilon", format!("must lie in (0, 1/3), got {epsilon}")));
            }
            Ok(1.5 * epsilon)
        }
        Bound::K4NoisyLimit { x, epsilon } => {
            let beta = k4_noisy_beta(x, epsilon, f0)?;
            Ok(epsilon / (8.0 * beta.powi(3)))
        }
    }
}

/// The constant `beta` of the four-candidate noisy bound.
pub fn k4_noisy_beta(x: f64, epsilon: f64, f0: &VoterModel) -> Result<f64> {
    check_k4_range(x)?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::param("epsilon", format!("must lie in (0, 1], got {epsilon}")));
    }
    let y = x / 3.0 + 1.0 / 3.0;
    Ok(0.5 - epsilon * y - (1.0 - epsilon) * y.max(f0.cdf(y)))
}

/// Both roots of the two-candidate noisy map, smaller first.
fn k2_noisy_fixed_points(epsilon: f64, x: f64) -> (f64, f64) {
    let a = epsilon * (1.0 - epsilon);
    let root = (1.0 - 8.0 * a * x).sqrt();
    let denom = 4.0 * (1.0 - epsilon).powi(2);
    ((1.0 - 4.0 * x * a - root) / denom, (1.0 - 4.0 * x * a + root) / denom)
}

/// Per-generation growth factor of the density at 1/2 when F_0 is supported
/// inside `(1/4, 3/4)`: `k (1/2)^(k-2)`.
pub fn density_ratio(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::param("k", format!("must be >= 2, got {k}")));
    }
    Ok(k as f64 * 0.5f64.powi(k as i32 - 2))
}

/// `(1 - sqrt(3/7)) / 2`, the unstable fixed point of the five-candidate
/// limited-support map.
pub fn limited_support_threshold() -> f64 {
    (1.0 - (3.0f64 / 7.0).sqrt()) / 2.0
}

/// Scalar maps `p -> p'` governing CDF values or atom masses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IteratedMap {
    /// `2p^2(1-e)^2 + 4pxe(1-e) + 2x^2e^2` on `[0, 1/2]`.
    QuadraticNoisyK2 { epsilon: f64, x: f64 },
    /// `3/4 q + q^3` with `q = e/2 + (1-e)p` on `[0, 1/2]`.
    CubicNoisyK3 { epsilon: f64 },
    /// `(1-e)(1-4b^3) p + e x (1-4b^3)` on `[0, 1/2]`.
    LinearNoisyK4 { epsilon: f64, x: f64, beta: f64 },
    /// `1/2 + p^k - (1-p)^k + (1-2p)^k / 2` on `[0, 1]`.
    LargeK { k: u32 },
    /// `p^k + k p^(k-1) (1-p)` on `[0, 1]`.
    CenterMassThreshold { k: u32 },
    /// `(2p)^k/2 + k(1-2p)((2p)^(k-1) - 2p^(k-1))/2` on `[0, 1/2]`.
    TwoSpikeThreshold { k: u32 },
}

/// Local behaviour of a fixed point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub value: f64,
    pub derivative: f64,
    pub stability: Stability,
}

impl IteratedMap {
    pub fn validate(&self) -> Result<()> {
        match *self {
            IteratedMap::QuadraticNoisyK2 { epsilon, x } => {
                if !(epsilon > 0.0 && epsilon < 1.0) {
                    return Err(Error::param("epsilon", format!("must lie in (0, 1), got {epsilon}")));
                }
                check_left_half(x)
            }
            IteratedMap::CubicNoisyK3 { epsilon } => {
                if !(epsilon > 0.0 && epsilon < 1.0 / 3.0) {
                    return Err(Error::param("epsilon", format!("must lie in (0, 1/3), got {epsilon}")));
                }
                Ok(())
            }
            IteratedMap::LinearNoisyK4 { epsilon, x, beta } => {
                if !(epsilon > 0.0 && epsilon <= 1.0) {
                    return Err(Error::param("epsilon", format!("must lie in (0, 1], got {epsilon}")));
                }
                check_k4_range(x)?;
                if !(beta > 0.0 && beta <= 0.5) {
                    return Err(Error::param("beta", format!("must lie in (0, 1/2], got {beta}")));
                }
                Ok(())
            }
            IteratedMap::LargeK { k } => {
                if k < 2 {
                    return Err(Error::param("k", format!("must be >= 2, got {k}")));
                }
                Ok(())
            }
            IteratedMap::CenterMassThreshold { k } | IteratedMap::TwoSpikeThreshold { k } => {
                if k < 2 {
                    return Err(Error::param("k", format!("must be >= 2, got {k}")));
                }
                Ok(())
            }
        }
    }

    /// The interval the map acts on.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            IteratedMap::LargeK { .. } | IteratedMap::CenterMassThreshold { .. } => (0.0, 1.0),
            _ => (0.0, 0.5),
        }
    }

    /// The map itself. Defined for every real `p`; only the domain is
    /// meaningful.
    pub fn evaluate(&self, p: f64) -> f64 {
        match *self {
            IteratedMap::QuadraticNoisyK2 { epsilon: e, x } => {
                2.0 * p * p * (1.0 - e).powi(2) + 4.0 * p * x * e * (1.0 - e) + 2.0 * x * x * e * e
            }
            IteratedMap::CubicNoisyK3 { epsilon: e } => {
                let q = e / 2.0 + (1.0 - e) * p;
                0.75 * q + q * q * q
            }
            IteratedMap::LinearNoisyK4 { epsilon: e, x, beta } => {
                let c = 1.0 - 4.0 * beta.powi(3);
                p * (1.0 - e) * c + e * x * c
            }
            IteratedMap::LargeK { k } => {
                let k = k as i32;
                0.5 + p.powi(k) - (1.0 - p).powi(k) + (1.0 - 2.0 * p).powi(k) / 2.0
            }
            IteratedMap::CenterMassThreshold { k } => {
                let kf = k as f64;
                let k = k as i32;
                p.powi(k) + kf * p.powi(k - 1) * (1.0 - p)
            }
            IteratedMap::TwoSpikeThreshold { k } => {
                let kf = k as f64;
                let k = k as i32;
                let q = 2.0 * p;
                q.powi(k) / 2.0 + kf * (1.0 - q) * (q.powi(k - 1) - 2.0 * p.powi(k - 1)) / 2.0
            }
        }
    }

    /// Central-difference derivative with step [`DERIVATIVE_STEP`].
    pub fn derivative(&self, p: f64) -> f64 {
        let h = DERIVATIVE_STEP;
        (self.evaluate(p + h) - self.evaluate(p - h)) / (2.0 * h)
    }

    /// Fixed points from algebraic formulas, for the maps that have them.
    pub fn closed_form_fixed_points(&self) -> Option<Vec<f64>> {
        match *self {
            IteratedMap::QuadraticNoisyK2 { epsilon, x } => {
                let (a, b) = k2_noisy_fixed_points(epsilon, x);
                Some(vec![a, b])
            }
            IteratedMap::CubicNoisyK3 { epsilon: e } => {
                let r = 0.25 * ((1.0 + 15.0 * e) / (1.0 - e).powi(3)).sqrt();
                let c = (1.0 + 2.0 * e) / (4.0 * (1.0 - e));
                Some(vec![-r - c, r - c, 0.5])
            }
            IteratedMap::LinearNoisyK4 { epsilon: e, x, beta } => {
                let c = 1.0 - 4.0 * beta.powi(3);
                Some(vec![e * x * c / (1.0 - (1.0 - e) * c)])
            }
            IteratedMap::LargeK { k: 5 } => {
                let l = limited_support_threshold();
                Some(vec![0.0, l, 0.5, 1.0 - l, 1.0])
            }
            IteratedMap::CenterMassThreshold { k: 3 } => Some(vec![0.0, 0.5, 1.0]),
            _ => None,
        }
    }

    /// The orbit `p0, f(p0), ..., f^steps(p0)`.
    pub fn iterate(&self, p0: f64, steps: usize) -> Result<Vec<f64>> {
        iterate_map(self, p0, steps)
    }

    pub fn fixed_points(&self) -> Result<Vec<FixedPoint>> {
        fixed_points(self)
    }
}

/// Slack allowed when checking that an orbit stays in the domain.
const DOMAIN_SLACK: f64 = 1e-12;

pub fn iterate_map(map: &IteratedMap, p0: f64, steps: usize) -> Result<Vec<f64>> {
    map.validate()?;
    let (lo, hi) = map.domain();
    if !(lo..=hi).contains(&p0) {
        return Err(Error::param("p0", format!("must lie in [{lo}, {hi}], got {p0}")));
    }
    let mut orbit = Vec::with_capacity(steps + 1);
    orbit.push(p0);
    let mut p = p0;
    for step in 1..=steps {
        p = map.evaluate(p);
        if !(p >= lo - DOMAIN_SLACK && p <= hi + DOMAIN_SLACK) {
            return Err(Error::DomainEscape {
                step,
                value: p,
                lo,
                hi,
            });
        }
        orbit.push(p);
    }
    Ok(orbit)
}

/// All fixed points in the map's domain.
///
/// Scans `f(p) - p` on a uniform grid of [`FIXED_POINT_GRID`] intervals,
/// keeps exact zeros at grid points and bisects every sign change down to
/// [`FIXED_POINT_TOL`]. Roots where `f(p) - p` touches zero without
/// crossing between grid points are not detected.
pub fn fixed_points(map: &IteratedMap) -> Result<Vec<FixedPoint>> {
    map.validate()?;
    let (lo, hi) = map.domain();
    let g = |p: f64| map.evaluate(p) - p;
    let n = FIXED_POINT_GRID;
    let at = |i: usize| lo + (hi - lo) * i as f64 / n as f64;
    let mut roots: Vec<f64> = Vec::new();
    let mut ga = g(at(0));
    for i in 0..n {
        let a = at(i);
        let b = at(i + 1);
        let gb = g(b);
        if ga == 0.0 {
            roots.push(a);
        } else if gb != 0.0 && (ga < 0.0) != (gb < 0.0) {
            roots.push(bisect(&g, a, b, ga));
        }
        if i + 1 == n && gb == 0.0 {
            roots.push(b);
        }
        ga = gb;
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    Ok(roots
        .into_iter()
        .map(|value| {
            let derivative = map.derivative(value);
            let stability = if (derivative.abs() - 1.0).abs() <= MARGINAL_BAND {
                Stability::Marginal
            } else if derivative.abs() < 1.0 {
                Stability::Stable
            } else {
                Stability::Unstable
            };
            FixedPoint {
                value,
                derivative,
                stability,
            }
        })
        .collect())
}

fn bisect(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut ga: f64) -> f64 {
    while b - a > FIXED_POINT_TOL {
        let m = 0.5 * (a + b);
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;
    use rand::{Rng, SeedableRng};

    const U: VoterModel = VoterModel::Uniform;

    // two-candidate noisy limit at x = 0.25, epsilon = 0.1, from 50-digit
    // arithmetic on the closed form
    const K2_NOISY_ORACLE: f64 = 0.001_377_001_909_338_993;

    #[test]
    fn bound_examples() {
        let v = cdf_bound(&Bound::K2Exact { x: 0.25, t: 1 }, &U).unwrap();
        assert!((v - 0.125).abs() < 1e-15);
        let v = cdf_bound(&Bound::K3Upper { x: 0.25, t: 1 }, &U).unwrap();
        assert!((v - 0.203125).abs() < 1e-15);
        for t in 0..8 {
            let v = cdf_bound(&Bound::K2Exact { x: 0.5, t }, &U).unwrap();
            assert_eq!(v, 0.5);
        }
        let seq: Vec<f64> = (0..=3)
            .map(|t| cdf_bound(&Bound::K2Exact { x: 0.25, t }, &U).unwrap())
            .collect();
        assert_eq!(seq, vec![0.25, 0.125, 0.03125, 0.001953125]);
        let v = cdf_bound(&Bound::K2NoisyLimit { x: 0.25, epsilon: 0.1 }, &U).unwrap();
        assert!((v - K2_NOISY_ORACLE).abs() < 1e-15, "{v}");
        assert!(v <= 0.1);
    }

    #[test]
    fn bound_domains() {
        assert!(cdf_bound(&Bound::K4Upper { x: 0.3, t: 1 }, &U).is_err());
        assert!(cdf_bound(&Bound::K4Upper { x: 0.5, t: 1 }, &U).is_err());
        assert!(cdf_bound(&Bound::K4Upper { x: 0.4, t: 1 }, &U).is_ok());
        assert!(cdf_bound(&Bound::K3NoisyLimit { epsilon: 0.4 }, &U).is_err());
        assert!(cdf_bound(&Bound::K2NoisyLimit { x: 0.5, epsilon: 0.1 }, &U).is_err());
        assert!(cdf_bound(&Bound::K2NoisyLimit { x: 0.2, epsilon: 1.0 }, &U).is_err());
        assert!(density_ratio(1).is_err());
    }

    #[test]
    fn k2_exact_is_symmetric() {
        for t in 0..6 {
            for x in [0.1, 0.3, 0.45] {
                let a = cdf_bound(&Bound::K2Exact { x, t }, &U).unwrap();
                let b = cdf_bound(&Bound::K2Exact { x: 1.0 - x, t }, &U).unwrap();
                assert!((a + b - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn k3_closed_form_dominates_recursion() {
        for x in [0.1, 0.25, 0.4, 0.49] {
            let mut p = U.cdf(x);
            for t in 1..30u32 {
                p = 0.75 * p + p.powi(3);
                let closed = cdf_bound(&Bound::K3Upper { x, t }, &U).unwrap();
                assert!(p <= closed + 1e-15);
            }
        }
    }

    #[test]
    fn density_ratios() {
        let expected = [(2, 2.0), (3, 1.5), (4, 1.0), (5, 0.625), (6, 0.375)];
        for (k, r) in expected {
            assert_eq!(density_ratio(k).unwrap(), r);
        }
    }

    #[test]
    fn threshold_constant() {
        let l = limited_support_threshold();
        assert!((l - 0.172_673_164_646_011_43).abs() < 1e-15);
        assert!(2.0 * l < 0.5);
        let m = VoterModel::uniform_interval(0.25, 0.75).unwrap();
        assert!((m.quantile(l) - 0.336_336_582_323_005_7).abs() < 1e-15);
    }

    #[test]
    fn large_k_fixed_points() {
        let map = IteratedMap::LargeK { k: 5 };
        let fps = map.fixed_points().unwrap();
        let values: Vec<f64> = fps.iter().map(|f| f.value).collect();
        let expected = map.closed_form_fixed_points().unwrap();
        assert_eq!(values.len(), expected.len(), "{values:?}");
        for (a, b) in values.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-10);
        }
        assert_eq!(fps[1].stability, Stability::Unstable);
        assert!((fps[1].derivative - 1.43).abs() < 0.01);
        assert_eq!(fps[2].stability, Stability::Stable);
        assert!((fps[2].derivative - 0.625).abs() < 1e-8);
        // the boundary points are super-attracting: f'(0) = f'(1) = 0
        assert_eq!(fps[0].stability, Stability::Stable);
        assert_eq!(fps[4].stability, Stability::Stable);
    }

    #[test]
    fn large_k_orbits() {
        let map = IteratedMap::LargeK { k: 5 };
        assert!(map.iterate(0.5, 50).unwrap().iter().all(|&p| p == 0.5));
        let orbit = map.iterate(0.3, 200).unwrap();
        assert!((orbit[200] - 0.5).abs() < 1e-9);
        // marginal centre for k = 4
        let fps = IteratedMap::LargeK { k: 4 }.fixed_points().unwrap();
        let centre = fps.iter().find(|f| (f.value - 0.5).abs() < 1e-9).unwrap();
        assert_eq!(centre.stability, Stability::Marginal);
    }

    #[test]
    fn noisy_k2_orbit_reaches_closed_form() {
        let map = IteratedMap::QuadraticNoisyK2 { epsilon: 0.1, x: 0.25 };
        let orbit = map.iterate(0.25, 200).unwrap();
        assert!((orbit[200] - K2_NOISY_ORACLE).abs() < 1e-9);
        let fps = map.fixed_points().unwrap();
        assert_eq!(fps.len(), 1);
        assert!(fps[0].value <= 0.1);
        assert_eq!(fps[0].stability, Stability::Stable);
    }

    #[test]
    fn closed_forms_match_bisection() {
        let maps = [
            IteratedMap::QuadraticNoisyK2 { epsilon: 0.05, x: 0.4 },
            IteratedMap::QuadraticNoisyK2 { epsilon: 0.3, x: 0.1 },
            IteratedMap::CubicNoisyK3 { epsilon: 0.02 },
            IteratedMap::CubicNoisyK3 { epsilon: 0.3 },
            IteratedMap::LinearNoisyK4 { epsilon: 0.02, x: 0.4, beta: 0.2 },
            IteratedMap::LargeK { k: 5 },
            IteratedMap::CenterMassThreshold { k: 3 },
        ];
        for map in maps {
            let (lo, hi) = map.domain();
            let closed: Vec<f64> = map
                .closed_form_fixed_points()
                .unwrap()
                .into_iter()
                .filter(|p| (lo..=hi).contains(p))
                .collect();
            let found: Vec<f64> = map.fixed_points().unwrap().iter().map(|f| f.value).collect();
            assert_eq!(closed.len(), found.len(), "{map:?}: {closed:?} vs {found:?}");
            for (a, b) in closed.iter().zip(&found) {
                assert!((a - b).abs() < 1e-10, "{map:?}");
            }
        }
    }

    #[test]
    fn cubic_noisy_limit_below_one_and_a_half_epsilon() {
        for e in [0.01, 0.02, 0.05, 0.1, 0.2, 0.3] {
            let map = IteratedMap::CubicNoisyK3 { epsilon: e };
            let p = map.iterate(0.49, 20_000).unwrap()[20_000];
            assert!(p <= 1.5 * e, "{e}: {p}");
            let fp = map.closed_form_fixed_points().unwrap()[1];
            assert!((p - fp).abs() < 1e-9);
        }
    }

    #[test]
    fn center_mass_fixed_points() {
        let fps = IteratedMap::CenterMassThreshold { k: 3 }.fixed_points().unwrap();
        let v: Vec<f64> = fps.iter().map(|f| f.value).collect();
        assert_eq!(v.len(), 3);
        assert!((v[0]).abs() < 1e-12 && (v[1] - 0.5).abs() < 1e-12 && (v[2] - 1.0).abs() < 1e-12);
        assert_eq!(fps[1].stability, Stability::Unstable);
    }

    #[test]
    fn two_spike_derivative_at_half() {
        for k in 2..10u32 {
            let map = IteratedMap::TwoSpikeThreshold { k };
            let want = 2f64.powi(2 - k as i32) * k as f64;
            assert!((map.derivative(0.5) - want).abs() < 1e-9, "k={k}");
            assert!((map.evaluate(0.5) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn stable_points_attract_random_starts() {
        let maps = [
            IteratedMap::QuadraticNoisyK2 { epsilon: 0.1, x: 0.25 },
            IteratedMap::CubicNoisyK3 { epsilon: 0.05 },
            IteratedMap::LinearNoisyK4 { epsilon: 0.05, x: 0.4, beta: 0.1 },
            IteratedMap::LargeK { k: 5 },
            IteratedMap::CenterMassThreshold { k: 3 },
            IteratedMap::TwoSpikeThreshold { k: 5 },
        ];
        let mut rng = CounterRng::seed_from_u64(31);
        for map in maps {
            let fps = map.fixed_points().unwrap();
            let (lo, hi) = map.domain();
            for (i, fp) in fps.iter().enumerate() {
                if fp.stability != Stability::Stable {
                    continue;
                }
                // starts within 0.05 of the point and closer to it than to
                // any neighbouring fixed point
                let left = if i > 0 { 0.5 * (fps[i - 1].value + fp.value) } else { lo };
                let right = fps.get(i + 1).map_or(hi, |n| 0.5 * (fp.value + n.value));
                let a = (fp.value - 0.05).max(left);
                let b = (fp.value + 0.05).min(right);
                for _ in 0..10 {
                    let p0 = a + (b - a) * rng.random::<f64>();
                    let orbit = map.iterate(p0, 5000).unwrap();
                    assert!(
                        (orbit[5000] - fp.value).abs() < 1e-8,
                        "{map:?}: start {p0} ended at {} not {}",
                        orbit[5000],
                        fp.value
                    );
                }
            }
        }
    }

    #[test]
    fn escape_is_reported() {
        // even k sends p = 1 to 2
        let err = IteratedMap::LargeK { k: 4 }.iterate(1.0, 3).unwrap_err();
        assert!(matches!(err, Error::DomainEscape { step: 1, .. }));
        assert!(IteratedMap::LargeK { k: 5 }.iterate(1.5, 3).is_err());
    }
}
