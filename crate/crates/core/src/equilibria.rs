//! The one-shot positioning game with uniform voters.
//!
//! Candidates are complete plurality maximizers: they first maximize their
//! probability of winning, then their expected vote margin against each
//! opponent, strongest opponent first. Payoffs are computed exactly by
//! enumerating every tie-resolution outcome with its probability.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{Atom, VoterModel};
use crate::election::{TieBreakRule, SHARE_TIE_TOL};
use crate::engine::{run_trial, SimulationConfig};
use crate::error::{Error, Result};

/// Default grid resolution for deviation scans.
pub const DEFAULT_GRID: usize = 10_000;
/// Default size of the small moves tried around every occupied point.
pub const DEFAULT_OFFSET: f64 = 1e-6;

/// Grid deviations closer than this to an occupied point, but not equal to
/// it, are skipped: at that distance share differences drop below the tie
/// tolerance and the deviant would be credited with a tie it cannot hold.
const SNAP: f64 = 1e-9;

/// Candidate positions (in candidate order) and the tie-break rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    positions: Vec<f64>,
    rule: TieBreakRule,
}

impl Profile {
    pub fn new(positions: Vec<f64>, rule: TieBreakRule) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::param("profile", "needs at least two candidates"));
        }
        if let Some(p) = positions.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::param("profile", format!("position {p} outside [0, 1]")));
        }
        // fold -0.0 into 0.0 so coincidence is plain bit equality
        let positions = positions.into_iter().map(|p| p + 0.0).collect();
        Ok(Self { positions, rule })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn rule(&self) -> TieBreakRule {
        self.rule
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// The reflected profile `x -> 1 - x`, candidate order preserved.
    pub fn mirrored(&self) -> Profile {
        Profile {
            positions: self.positions.iter().map(|&p| 1.0 - p).collect(),
            rule: self.rule,
        }
    }

    fn with_moved(&self, i: usize, to: f64) -> Profile {
        let mut positions = self.positions.clone();
        positions[i] = to;
        Profile {
            positions,
            rule: self.rule,
        }
    }

    /// Distinct occupied points, ascending.
    pub fn occupied(&self) -> Vec<f64> {
        let mut pts = self.positions.clone();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

/// Win probability plus expected margins against each opponent, ascending,
/// so the first entry is the margin against the strongest opponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Payoff {
    pub win_probability: f64,
    pub expected_margins: Vec<f64>,
}

impl Payoff {
    /// Lexicographic comparison with a per-component tolerance.
    pub fn compare(&self, other: &Payoff) -> Ordering {
        let a = std::iter::once(self.win_probability).chain(self.expected_margins.iter().copied());
        let b = std::iter::once(other.win_probability).chain(other.expected_margins.iter().copied());
        for (x, y) in a.zip(b) {
            if x > y + SHARE_TIE_TOL {
                return Ordering::Greater;
            }
            if x < y - SHARE_TIE_TOL {
                return Ordering::Less;
            }
        }
        Ordering::Equal
    }
}

/// One coincident group of candidates with the shares available at its point.
struct Group {
    members: Vec<usize>,
    left: f64,
    right: f64,
}

fn groups(positions: &[f64]) -> Vec<Group> {
    let mut order: Vec<usize> = (0..positions.len()).collect();
    order.sort_by(|&a, &b| positions[a].total_cmp(&positions[b]));
    let mut out: Vec<Group> = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let p = positions[order[i]];
        let mut j = i + 1;
        while j < order.len() && positions[order[j]] == p {
            j += 1;
        }
        let lo = if i == 0 { 0.0 } else { 0.5 * (positions[order[i - 1]] + p) };
        let hi = if j == order.len() { 1.0 } else { 0.5 * (p + positions[order[j]]) };
        out.push(Group {
            members: order[i..j].to_vec(),
            left: p - lo,
            right: hi - p,
        });
        i = j;
    }
    out
}

/// Calls `visit(shares, probability)` once per tie-resolution outcome.
fn for_each_outcome(positions: &[f64], rule: TieBreakRule, mut visit: impl FnMut(&[f64], f64)) {
    let groups = groups(positions);
    let mut shares = vec![0.0; positions.len()];
    let mut ties = Vec::new();
    for g in &groups {
        let c = g.members.len();
        if c == 1 {
            shares[g.members[0]] = g.left + g.right;
        } else if rule == TieBreakRule::EqualSplit {
            let each = (g.left + g.right) / c as f64;
            g.members.iter().for_each(|&m| shares[m] = each);
        } else {
            ties.push(g);
        }
    }
    fn recurse(
        ties: &[&Group],
        shares: &mut [f64],
        prob: f64,
        visit: &mut dyn FnMut(&[f64], f64),
    ) {
        let Some((g, rest)) = ties.split_first() else {
            visit(shares, prob);
            return;
        };
        let c = g.members.len();
        let p = prob / (c * (c - 1)) as f64;
        for &a in &g.members {
            for &b in &g.members {
                if a == b {
                    continue;
                }
                g.members.iter().for_each(|&m| shares[m] = 0.0);
                shares[a] = g.left;
                shares[b] = g.right;
                recurse(rest, shares, p, visit);
            }
        }
    }
    recurse(&ties, &mut shares, 1.0, &mut visit);
}

/// Win probability of every candidate.
pub fn win_probabilities(profile: &Profile) -> Vec<f64> {
    let mut win = vec![0.0; profile.len()];
    for_each_outcome(&profile.positions, profile.rule, |shares, prob| {
        let max = shares.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tied = shares.iter().filter(|&&s| s >= max - SHARE_TIE_TOL).count();
        for (w, &s) in win.iter_mut().zip(shares) {
            if s >= max - SHARE_TIE_TOL {
                *w += prob / tied as f64;
            }
        }
    });
    win
}

/// Expected vote share of every candidate.
///
/// Both rules hand a coincident group its whole cell in expectation, split
/// evenly, so this does not depend on the rule.
pub fn expected_shares(profile: &Profile) -> Vec<f64> {
    let mut out = vec![0.0; profile.len()];
    for g in groups(&profile.positions) {
        let each = (g.left + g.right) / g.members.len() as f64;
        g.members.iter().for_each(|&m| out[m] = each);
    }
    out
}

/// Exact payoff of candidate `i`.
pub fn payoff(profile: &Profile, i: usize) -> Payoff {
    assert!(i < profile.len(), "candidate index out of range");
    let mut win = 0.0;
    for_each_outcome(&profile.positions, profile.rule, |shares, prob| {
        let max = shares.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if shares[i] >= max - SHARE_TIE_TOL {
            let tied = shares.iter().filter(|&&s| s >= max - SHARE_TIE_TOL).count();
            win += prob / tied as f64;
        }
    });
    let expected = expected_shares(profile);
    let mut margins: Vec<f64> = (0..profile.len())
        .filter(|&j| j != i)
        .map(|j| expected[i] - expected[j])
        .collect();
    margins.sort_by(f64::total_cmp);
    Payoff {
        win_probability: win,
        expected_margins: margins,
    }
}

/// A strictly improving unilateral move.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub candidate: usize,
    pub from: f64,
    pub to: f64,
    pub before: Payoff,
    pub after: Payoff,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsneVerdict {
    pub is_equilibrium: bool,
    pub witness: Option<Deviation>,
}

/// Deviation targets in scan order: small moves around occupied points, the
/// occupied points themselves, then the grid.
fn deviation_targets(occupied: &[f64], grid: usize, delta: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for &p in occupied {
        for q in [p - delta, p + delta] {
            if (0.0..=1.0).contains(&q) {
                out.push(q);
            }
        }
    }
    out.extend_from_slice(occupied);
    out.extend(
        (0..=grid)
            .map(|j| j as f64 / grid as f64)
            .filter(|&g| occupied.iter().all(|&p| g == p || (g - p).abs() > SNAP)),
    );
    out
}

/// Checks that no candidate gains by moving to any deviation target.
///
/// Targets are `{j / grid}`, every occupied point, and every occupied point
/// shifted by `±delta`. A negative verdict is a proof; a positive one is
/// complete only over these targets.
pub fn is_psne(profile: &Profile, grid: usize, delta: f64) -> Result<PsneVerdict> {
    if grid < 1000 {
        return Err(Error::param("grid", format!("must be at least 1000, got {grid}")));
    }
    if !(delta > 0.0 && delta <= 1e-4) {
        return Err(Error::param("delta", format!("must lie in (0, 1e-4], got {delta}")));
    }
    let targets = deviation_targets(&profile.occupied(), grid, delta);
    // candidates at the same point are interchangeable
    let mut seen: Vec<f64> = Vec::new();
    for i in 0..profile.len() {
        let from = profile.positions[i];
        if seen.contains(&from) {
            continue;
        }
        seen.push(from);
        let before = payoff(profile, i);
        let found = targets.par_iter().find_map_first(|&to| {
            if to == from {
                return None;
            }
            let after = payoff(&profile.with_moved(i, to), i);
            (after.compare(&before) == Ordering::Greater).then_some((to, after))
        });
        if let Some((to, after)) = found {
            return Ok(PsneVerdict {
                is_equilibrium: false,
                witness: Some(Deviation {
                    candidate: i,
                    from,
                    to,
                    before,
                    after,
                }),
            });
        }
    }
    Ok(PsneVerdict {
        is_equilibrium: true,
        witness: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmsneVerdict {
    pub is_equilibrium: bool,
    pub best_deviation: f64,
    pub best_win_probability: f64,
}

fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Win probability of a lone candidate at `y` against `k - 1` opponents who
/// each pick `x` or `1 - x` with equal probability (left-right tie-break).
pub fn two_spike_deviation_win(x: f64, k: usize, y: f64) -> f64 {
    let n = k - 1;
    let scale = 0.5f64.powi(n as i32);
    (0..=n)
        .map(|left| {
            let mut positions = vec![y];
            positions.extend(std::iter::repeat_n(x, left));
            positions.extend(std::iter::repeat_n(1.0 - x, n - left));
            let profile = Profile {
                positions,
                rule: TieBreakRule::LeftRight,
            };
            binomial(n, left) * scale * payoff(&profile, 0).win_probability
        })
        .sum()
}

/// Checks whether mixing 50/50 over `{x, 1 - x}` is a symmetric mixed
/// equilibrium: no pure reply may win with probability above `1 / k`.
pub fn is_two_spike_smsne(x: f64, k: usize) -> Result<SmsneVerdict> {
    if !(x > 0.0 && x < 0.5) {
        return Err(Error::param("x", format!("must lie in (0, 1/2), got {x}")));
    }
    if k < 2 {
        return Err(Error::param("k", "needs at least two candidates"));
    }
    let targets = deviation_targets(&[x, 1.0 - x], DEFAULT_GRID, DEFAULT_OFFSET);
    let (best_deviation, best_win_probability) = targets
        .par_iter()
        .map(|&y| (y, two_spike_deviation_win(x, k, y)))
        .reduce(
            || (f64::NAN, f64::NEG_INFINITY),
            |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a },
        );
    Ok(SmsneVerdict {
        is_equilibrium: best_win_probability <= 1.0 / k as f64 + SHARE_TIE_TOL,
        best_deviation,
        best_win_probability,
    })
}

/// Point-mass seeding for the atom experiments. The rest of the initial
/// mass is uniform on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AtomSeed {
    /// Mass `p` at `1/2`.
    CenterMass { p: f64 },
    /// Mass `p` at each of `x` and `1 - x`.
    TwoSpike { p: f64, x: f64 },
}

impl AtomSeed {
    pub fn atoms(&self) -> Result<Vec<Atom>> {
        match *self {
            AtomSeed::CenterMass { p } => {
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::param("p", format!("must lie in (0, 1), got {p}")));
                }
                Ok(vec![Atom { position: 0.5, mass: p }])
            }
            AtomSeed::TwoSpike { p, x } => {
                if !(p > 0.0 && p < 0.5) {
                    return Err(Error::param("p", format!("must lie in (0, 1/2), got {p}")));
                }
                if !(x > 0.0 && x < 0.5) {
                    return Err(Error::param("x", format!("must lie in (0, 1/2), got {x}")));
                }
                Ok(vec![
                    Atom { position: x, mass: p },
                    Atom { position: 1.0 - x, mass: p },
                ])
            }
        }
    }
}

/// Runs the dynamics from an atom-seeded start and returns the fraction of
/// each generation's pool sitting exactly on the atoms.
pub fn atom_seeded_convergence(
    seed_kind: AtomSeed,
    k: usize,
    generations: usize,
    elections: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut cfg = SimulationConfig::new(k, generations, elections);
    cfg.seed = seed;
    cfg.rule = TieBreakRule::LeftRight;
    cfg.initial = VoterModel::Uniform;
    cfg.initial_atoms = seed_kind.atoms()?;
    let trajectory = run_trial(&cfg, 0)?;
    Ok(trajectory.records.iter().map(|r| r.summary.atom_mass).collect())
}

/// Listed equilibria under left-right tie-breaking with uniform voters,
/// instantiating each one-parameter family at the given `xs` in `(1/4, 1/2)`.
pub fn left_right_catalog(k: usize, xs: &[f64]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.5; k]];
    if k >= 4 {
        for &x in xs {
            let half = k / 2;
            let mut base = vec![x; half];
            base.extend(std::iter::repeat_n(1.0 - x, half));
            if k % 2 == 1 {
                let mut a = base.clone();
                a.push(x);
                let mut b = base;
                b.push(1.0 - x);
                out.push(a);
                out.push(b);
            } else {
                out.push(base);
            }
        }
    }
    if k >= 5 {
        let side = (k - 1) / 2;
        let mut base = vec![0.25; side];
        base.extend(std::iter::repeat_n(0.75, side));
        base.push(0.5);
        if k % 2 == 0 {
            let mut a = base.clone();
            a.push(0.25);
            let mut b = base;
            b.push(0.75);
            out.push(a);
            out.push(b);
        } else {
            out.push(base);
        }
    }
    if k % 2 == 0 {
        out.push(paired_profile(k));
    }
    for p in &mut out {
        p.sort_by(f64::total_cmp);
    }
    // at k = 2 the paired profile is the all-centre one
    out.dedup();
    out
}

/// Two candidates at each of `1/k, 3/k, ..., (k-1)/k` (even `k`).
pub fn paired_profile(k: usize) -> Vec<f64> {
    assert!(k >= 2 && k % 2 == 0, "paired profile needs an even k");
    (0..k / 2)
        .flat_map(|j| {
            let p = (2 * j + 1) as f64 / k as f64;
            [p, p]
        })
        .collect()
}
