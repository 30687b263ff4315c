//! Counter-based random streams.
//!
//! Every election owns an independent stream addressed by
//! `(master_seed, trial, generation, election)`. The `i`-th output of a stream
//! is a pure function of that address and `i`, so results do not depend on
//! how elections are scheduled across threads.
//!
//! Output word `i` is `mix(mix(block | i) ^ trial_key)` where `block` packs the
//! generation (16 bits) and election index (28 bits) above a 20-bit draw
//! counter. `mix` is the SplitMix64 finalizer, a bijection on `u64`, so two
//! distinct draws inside one trial can never produce correlated inputs.

use rand_core::{impls, RngCore, SeedableRng};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

const COUNTER_BITS: u32 = 20;
const ELECTION_BITS: u32 = 28;
const GENERATION_BITS: u32 = 16;

/// Largest election index a stream can address.
pub const MAX_ELECTIONS: u64 = 1 << ELECTION_BITS;
/// Largest generation index a stream can address.
pub const MAX_GENERATIONS: u64 = 1 << GENERATION_BITS;
/// Draws available to one stream before it wraps.
pub const MAX_DRAWS: u64 = 1 << COUNTER_BITS;

#[inline(always)]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Key shared by every stream of one trial.
#[inline]
pub fn trial_key(master_seed: u64, trial: u64) -> u64 {
    mix64(mix64(master_seed ^ GOLDEN_GAMMA) ^ trial.wrapping_mul(GOLDEN_GAMMA))
}

/// A keyed counter-based generator.
#[derive(Clone, Debug)]
pub struct CounterRng {
    key: u64,
    block: u64,
    counter: u64,
}

impl CounterRng {
    /// Stream for one election of one generation of one trial.
    ///
    /// Panics if `generation` or `election` exceed the addressable range;
    /// configurations are validated against [`MAX_GENERATIONS`] and
    /// [`MAX_ELECTIONS`] before a run starts.
    #[inline]
    pub fn for_election(master_seed: u64, trial: u64, generation: u64, election: u64) -> Self {
        Self::with_trial_key(trial_key(master_seed, trial), generation, election)
    }

    #[inline]
    pub fn with_trial_key(key: u64, generation: u64, election: u64) -> Self {
        assert!(generation < MAX_GENERATIONS, "generation {generation} out of range");
        assert!(election < MAX_ELECTIONS, "election {election} out of range");
        CounterRng {
            key,
            block: (generation << (ELECTION_BITS + COUNTER_BITS)) | (election << COUNTER_BITS),
            counter: 0,
        }
    }

    /// Number of 64-bit words drawn so far.
    pub fn draws(&self) -> u64 {
        self.counter
    }
}

impl RngCore for CounterRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        let word = self.block | (self.counter & (MAX_DRAWS - 1));
        self.counter += 1;
        mix64(mix64(word) ^ self.key)
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        impls::fill_bytes_via_next(self, dst)
    }
}

impl SeedableRng for CounterRng {
    type Seed = [u8; 8];

    fn from_seed(seed: Self::Seed) -> Self {
        Self::with_trial_key(trial_key(u64::from_le_bytes(seed), u64::MAX), 0, 0)
    }

    fn seed_from_u64(state: u64) -> Self {
        Self::from_seed(state.to_le_bytes())
    }
}
