//! Seeded, splittable pseudorandomness.
//!
//! Every sampling operation in this crate takes an explicit `&mut SplitRng`;
//! there is no global randomness. Child generators derived with the same
//! master seed and the same index path are identical regardless of the order
//! in which they are created, which keeps parallel experiment campaigns
//! byte-reproducible.

use alloc::vec::Vec;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A splittable ChaCha12-backed random source.
#[derive(Clone, Debug)]
pub struct SplitRng {
    inner: ChaCha12Rng,
}

impl SplitRng {
    pub fn seed_from(seed: u64) -> Self {
        Self::derive(seed, &[])
    }

    /// Derive a generator from a master seed and an index path, e.g.
    /// `(master, [mutant_id, trial_index])`. The derivation is a pure
    /// function of its arguments.
    pub fn derive(master: u64, ids: &[u64]) -> Self {
        let mut s = master ^ 0x51ab_de3f_9c1d_b924;
        let mut words = [0u8; 32];
        for &id in ids {
            s ^= splitmix64(&mut s).wrapping_add(id.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        }
        let mut st = s;
        for chunk in words.chunks_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut st).to_le_bytes());
        }
        SplitRng {
            inner: ChaCha12Rng::from_seed(words),
        }
    }

    /// Split off an independent child generator, advancing this one.
    pub fn split(&mut self) -> Self {
        let mut words = [0u8; 32];
        self.inner.fill_bytes(&mut words);
        SplitRng {
            inner: ChaCha12Rng::from_seed(words),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw from `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / ((1u64 << 53) as f64))
    }

    /// Uniform integer in `[0, n)`. `n` must be nonzero.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Bernoulli draw with success probability `p`.
    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// Sample an index from a discrete distribution given by `weights`
    /// (need not be normalised). Returns `None` for an empty or zero table.
    pub fn pick_weighted(&mut self, weights: &[f64]) -> Option<usize> {
        let total: f64 = weights.iter().sum();
        if weights.is_empty() || total <= 0.0 {
            return None;
        }
        let mut u = self.next_f64() * total;
        for (i, &w) in weights.iter().enumerate() {
            u -= w;
            if u < 0.0 {
                return Some(i);
            }
        }
        Some(weights.len() - 1)
    }

    /// `k` distinct values below `n`, in draw order.
    pub fn distinct_below(&mut self, n: u64, k: usize) -> Vec<u64> {
        debug_assert!(k as u64 <= n);
        let mut out = Vec::with_capacity(k);
        while out.len() < k {
            let v = self.below(n);
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }
}
