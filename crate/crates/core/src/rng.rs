//! Portable seeded random streams.
//!
//! Every random draw in the crate goes through [`SplitMix64`] (Steele, Lea &
//! Flood, "Fast splittable pseudorandom number generators", 2014) so that any
//! implementation can reproduce the same sequence from the reference constants:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! return z ^ (z >> 31)
//! ```
//!
//! Uniform indices in `[0, n)` are drawn with the multiply-shift reduction
//! `(u64 * n) >> 64` on one 64-bit output per draw.
//!
//! Two sub-streams are derived from a user seed: grid initialization uses
//! `SplitMix64::new(seed)`, training-sample selection uses
//! `SplitMix64::new(seed ^ TRAINING_STREAM_SALT)`.

/// XOR salt separating the training-sample stream from the initialization stream.
pub const TRAINING_STREAM_SALT: u64 = 0xD1B5_4A32_D192_ED03;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Stream used to pick the initial model vectors.
    pub fn init_stream(seed: u64) -> Self {
        Self::new(seed)
    }

    /// Stream used to pick the pixel presented at each training iteration.
    pub fn training_stream(seed: u64) -> Self {
        Self::new(seed ^ TRAINING_STREAM_SALT)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform index in `[0, n)`. `n` must be non-zero.
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((u128::from(self.next_u64()) * n as u128) >> 64) as usize
    }
}
