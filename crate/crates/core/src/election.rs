//! Single plurality elections on `[0, 1]`.
//!
//! Each candidate receives the voter mass of its Voronoi cell: everything
//! between the midpoints to its neighbours, with the outermost candidates
//! taking the boundary sides. Candidates at exactly the same position share
//! that point according to a [`TieBreakRule`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::VoterModel;
use crate::error::{Error, Result};

/// Two shares within this distance count as tied for the maximum.
pub const SHARE_TIE_TOL: f64 = 1e-12;

/// A policy coordinate in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Position(f64);

impl Position {
    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::param("position", format!("must lie in [0, 1], got {value}")));
        }
        // normalise -0.0 so that equal points are also bit-equal
        Ok(Position(value + 0.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn mirror(self) -> Self {
        Position(1.0 - self.0)
    }
}

impl TryFrom<f64> for Position {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Position::new(v)
    }
}

impl From<Position> for f64 {
    fn from(p: Position) -> f64 {
        p.0
    }
}

/// How candidates at the same point divide that point's voters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreakRule {
    /// One member chosen uniformly at random takes the whole left side, a
    /// different member takes the whole right side, the rest get nothing.
    #[default]
    LeftRight,
    /// Every member receives an equal fraction of the point's cell.
    EqualSplit,
}

impl std::str::FromStr for TieBreakRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left-right" | "leftright" => Ok(TieBreakRule::LeftRight),
            "equal-split" | "equalsplit" => Ok(TieBreakRule::EqualSplit),
            other => Err(Error::param("rule", format!("unknown tie-break rule `{other}`"))),
        }
    }
}

/// Candidate positions in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct Slate {
    positions: Vec<f64>,
}

impl Slate {
    pub fn new(mut positions: Vec<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::param("slate", "needs at least one candidate"));
        }
        for p in positions.iter_mut() {
            *p = Position::new(*p)?.value();
        }
        positions.sort_by(f64::total_cmp);
        Ok(Slate { positions })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Runs of coincident positions as `(position, first index, count)`.
    pub fn groups(&self) -> Vec<(f64, usize, usize)> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.positions.len() {
            let p = self.positions[i];
            let start = i;
            while i < self.positions.len() && self.positions[i] == p {
                i += 1;
            }
            out.push((p, start, i - start));
        }
        out
    }

    pub fn mirrored(&self) -> Slate {
        Slate {
            positions: self.positions.iter().rev().map(|&p| 1.0 - p).collect(),
        }
    }
}

/// Vote shares, one per candidate, in slate order.
#[derive(Clone, Debug, PartialEq)]
pub struct ShareVector(Vec<f64>);

impl ShareVector {
    pub fn shares(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Reusable scratch space for running many elections without allocating.
#[derive(Clone, Debug, Default)]
pub struct Ballot {
    shares: Vec<f64>,
    ranked: Vec<usize>,
    pool: Vec<usize>,
    tied: Vec<usize>,
}

impl Ballot {
    pub fn new() -> Self {
        Self::default()
    }

    /// Computes vote shares for ascending `sorted` positions.
    ///
    /// Randomness is consumed only for LeftRight groups of two or more.
    pub fn shares<R: Rng + ?Sized>(
        &mut self,
        sorted: &[f64],
        voters: &VoterModel,
        rule: TieBreakRule,
        rng: &mut R,
    ) -> &[f64] {
        debug_assert!(!sorted.is_empty());
        debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
        let k = sorted.len();
        self.shares.clear();
        self.shares.resize(k, 0.0);
        let mut i = 0;
        let mut prev: Option<f64> = None;
        while i < k {
            let p = sorted[i];
            let mut j = i + 1;
            while j < k && sorted[j] == p {
                j += 1;
            }
            let lo = match prev {
                Some(q) => voters.cdf(0.5 * (q + p)),
                None => 0.0,
            };
            let hi = if j < k {
                voters.cdf(0.5 * (p + sorted[j]))
            } else {
                1.0
            };
            let c = j - i;
            if c == 1 {
                self.shares[i] = hi - lo;
            } else {
                let at = voters.cdf(p);
                let (left, right) = (at - lo, hi - at);
                match rule {
                    TieBreakRule::EqualSplit => {
                        let each = (hi - lo) / c as f64;
                        self.shares[i..j].iter_mut().for_each(|s| *s = each);
                    }
                    TieBreakRule::LeftRight => {
                        let a = rng.random_range(0..c);
                        let mut b = rng.random_range(0..c - 1);
                        if b >= a {
                            b += 1;
                        }
                        self.shares[i + a] = left;
                        self.shares[i + b] = right;
                    }
                }
            }
            prev = Some(p);
            i = j;
        }
        &self.shares
    }

    /// Uniform choice among the candidates in `pool` whose share is within
    /// tolerance of the pool maximum.
    fn pick_from_pool<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let shares = &self.shares;
        let max = self
            .pool
            .iter()
            .map(|&i| shares[i])
            .fold(f64::NEG_INFINITY, f64::max);
        self.tied.clear();
        self.tied
            .extend(self.pool.iter().copied().filter(|&i| shares[i] >= max - SHARE_TIE_TOL));
        if self.tied.len() == 1 {
            self.tied[0]
        } else {
            self.tied[rng.random_range(0..self.tied.len())]
        }
    }

    /// Index of the plurality winner; tied maxima are broken uniformly.
    pub fn winner<R: Rng + ?Sized>(
        &mut self,
        sorted: &[f64],
        voters: &VoterModel,
        rule: TieBreakRule,
        rng: &mut R,
    ) -> usize {
        self.shares(sorted, voters, rule, rng);
        self.winner_of_shares(rng)
    }

    #[inline]
    fn winner_of_shares<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        // fast path: a unique maximum needs no allocation or randomness
        let shares = &self.shares;
        let mut best = 0;
        for i in 1..shares.len() {
            if shares[i] > shares[best] {
                best = i;
            }
        }
        let max = shares[best];
        let ties = shares.iter().filter(|&&s| s >= max - SHARE_TIE_TOL).count();
        if ties == 1 {
            best
        } else {
            self.pool.clear();
            self.pool.extend(0..shares.len());
            self.pick_from_pool(rng)
        }
    }

    /// Indices of the `h` highest shares in descending order.
    ///
    /// The first entry is drawn exactly as [`Ballot::winner`] would draw it.
    pub fn top_h<R: Rng + ?Sized>(
        &mut self,
        sorted: &[f64],
        voters: &VoterModel,
        rule: TieBreakRule,
        h: usize,
        rng: &mut R,
    ) -> &[usize] {
        debug_assert!(h >= 1 && h <= sorted.len());
        self.shares(sorted, voters, rule, rng);
        self.ranked.clear();
        let first = self.winner_of_shares(rng);
        self.ranked.push(first);
        self.pool.clear();
        self.pool.extend((0..sorted.len()).filter(|&i| i != first));
        while self.ranked.len() < h {
            let next = self.pick_from_pool(rng);
            self.ranked.push(next);
            self.pool.retain(|&i| i != next);
        }
        &self.ranked
    }
}

pub fn vote_shares<R: Rng + ?Sized>(
    slate: &Slate,
    voters: &VoterModel,
    rule: TieBreakRule,
    rng: &mut R,
) -> ShareVector {
    let mut ballot = Ballot::new();
    ballot.shares(slate.positions(), voters, rule, rng);
    ShareVector(ballot.shares)
}

/// Winner index and position.
pub fn plurality_winner<R: Rng + ?Sized>(
    slate: &Slate,
    voters: &VoterModel,
    rule: TieBreakRule,
    rng: &mut R,
) -> (usize, f64) {
    let i = Ballot::new().winner(slate.positions(), voters, rule, rng);
    (i, slate.positions()[i])
}

/// Positions of the `h` best-placed candidates, best first.
pub fn top_h_by_share<R: Rng + ?Sized>(
    slate: &Slate,
    voters: &VoterModel,
    h: usize,
    rule: TieBreakRule,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if h == 0 || h > slate.len() {
        return Err(Error::param("h", format!("must lie in 1..={}, got {h}", slate.len())));
    }
    let mut ballot = Ballot::new();
    Ok(ballot
        .top_h(slate.positions(), voters, rule, h, rng)
        .iter()
        .map(|&i| slate.positions()[i])
        .collect())
}
