//! Counter-based deterministic PRNG.
//!
//! Every random draw in this crate flows through [`Prng`], a SplitMix64-style
//! generator: the state is a 64-bit counter advanced by a Weyl constant and
//! hashed per draw. The same seed produces the same stream on every platform.
//!
//! Sub-stream derivation: `Prng::substream(seed, STREAM_ID)` seeds a fresh
//! generator with `seed ^ STREAM_ID`. Stream ids are fixed, well-spread
//! constants (below), so the env, initialization, exploration, and model
//! streams of one run never share draws.

/// Stream id for environment dynamics (reset noise).
pub const STREAM_ENV: u64 = 0x45AF_37C1_9B6E_D201;
/// Stream id for network weight initialization.
pub const STREAM_INIT: u64 = 0x8C2D_11F0_63A9_4E17;
/// Stream id for exploration (action selection and batch sampling).
pub const STREAM_EXPLORE: u64 = 0x2F90_BC55_E1D8_7A43;
/// Stream id for world-model sampling (reparameterized draws).
pub const STREAM_MODEL: u64 = 0xD713_A2E8_4C0F_95B6;
/// Stream id for data shuffling (pair extraction, minibatch order).
pub const STREAM_DATA: u64 = 0x6E48_F9A3_02B7_C1D5;

const WEYL: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seedable deterministic generator; `Copy` so evaluations can replay a
/// stream by value (used by the finite-difference oracles in tests).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prng {
    state: u64,
}

impl Prng {
    pub fn new(seed: u64) -> Self {
        Prng { state: seed }
    }

    /// Independent sub-stream: seed XOR stream-id.
    pub fn substream(seed: u64, stream_id: u64) -> Self {
        Prng::new(seed ^ stream_id)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(WEYL);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1), 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Uniform in [lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in [0, n). Modulo bias is below 2^-53 for any n used here.
    pub fn usize_below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    /// Standard normal via Box-Muller (no spare caching: the state stays a pure counter).
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform(); // (0, 1]
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.usize_below(i + 1);
            items.swap(i, j);
        }
    }
}
