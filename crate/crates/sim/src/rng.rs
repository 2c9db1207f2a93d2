//! The simulation's single random stream.
//!
//! The generator is SplitMix64. With a 64-bit state `s` initialised to the
//! scenario seed, each draw is
//!
//! ```text
//! s = s + 0x9e3779b97f4a7c15            (mod 2^64)
//! z = s
//! z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//! z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//! return z ^ (z >> 31)
//! ```
//!
//! Everything else is derived from raw draws by the rules in this module, so
//! a run can be reproduced bit for bit on any platform.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::prob::Probability;

#[derive(Debug, Clone)]
pub struct SimRng(SplitMix64);

impl SimRng {
    pub fn new(seed: u64) -> Self {
        Self(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform integer in `0..n` by rejection: draws below `2^64 mod n` are
    /// discarded, then the draw is reduced modulo `n`.
    ///
    /// # Panics
    /// If `n` is zero.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let reject_under = n.wrapping_neg() % n;
        loop {
            let x = self.next_u64();
            if x >= reject_under {
                return x % n;
            }
        }
    }

    /// Uniform integer in `lo..=hi`.
    pub fn in_range(&mut self, lo: i64, hi: i64) -> i64 {
        let span = hi.abs_diff(lo);
        if span == u64::MAX {
            return self.next_u64() as i64;
        }
        lo.wrapping_add(self.below(span + 1) as i64)
    }

    /// True with probability exactly `p`: one draw of `below(den) < num` on
    /// the reduced fraction. Probabilities 0 and 1 consume no draw.
    pub fn chance(&mut self, p: Probability) -> bool {
        let (num, den) = p.parts();
        if num == 0 {
            false
        } else if num == den {
            true
        } else {
            self.below(den) < num
        }
    }

    /// Uniform choice from a slice.
    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> Option<&'a T> {
        if items.is_empty() {
            return None;
        }
        Some(&items[self.below(items.len() as u64) as usize])
    }

    /// 32 bytes from four draws, each laid out big-endian.
    pub fn bytes32(&mut self) -> [u8; 32] {
        let mut out = [0u8; 32];
        for chunk in out.chunks_exact_mut(8) {
            chunk.copy_from_slice(&self.next_u64().to_be_bytes());
        }
        out
    }
}
