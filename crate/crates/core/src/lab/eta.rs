//! Keyed stranger randomization.
//!
//! η_{x,y} values are produced lazily from (seed, canonical pair) through a
//! SplitMix64 finalizer chain, so no O(n²) table is materialized, the same
//! pair always sees the same value, and concurrent evaluation is stateless.

use crate::util::splitmix64;

/// Deterministic source of i.i.d.-quality Uniform(0,1) labels on unordered
/// pairs. Optionally one pair can be pinned to a fixed value, which the
/// conditional distribution checks rely on.
#[derive(Debug, Clone, Copy)]
pub struct EtaSampler {
    seed: u64,
    pin: Option<(usize, usize, f64)>,
}

impl EtaSampler {
    pub fn new(seed: u64) -> Self {
        Self { seed, pin: None }
    }

    /// Same stream as `new(seed)` except η on `pair` is forced to `value`.
    pub fn pinned(seed: u64, pair: (usize, usize), value: f64) -> Self {
        let (a, b) = pair;
        Self {
            seed,
            pin: Some((a.min(b), a.max(b), value)),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// η_{x,y} = η_{y,x} ∈ (0, 1).
    #[inline]
    pub fn value(&self, x: usize, y: usize) -> f64 {
        let (lo, hi) = (x.min(y), x.max(y));
        if let Some((pl, ph, v)) = self.pin {
            if pl == lo && ph == hi {
                return v;
            }
        }
        let h = splitmix64(
            splitmix64(self.seed ^ (lo as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
                ^ (hi as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f),
        );
        ((h >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }
}
