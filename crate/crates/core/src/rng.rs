//! Small self-contained PRNG (splitmix64).
//!
//! Checks must reproduce bit-identically across runs, platforms, and thread
//! schedules, so the generator is pinned here instead of depending on an
//! external crate whose stream might change between versions. Trial `i` of a
//! sampled check draws from `Rng::substream(seed, i)`, which makes every trial
//! independent of evaluation order.

#[derive(Clone, Debug)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    /// Generator for the `index`-th substream of `seed`.
    pub fn substream(seed: u64, index: u64) -> Self {
        let mut r = Rng(seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        r.next_u64();
        r
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..n`. `n` must be nonzero.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        // Lemire's multiply-shift; bias is negligible for the small n used here.
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    pub fn bool(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_streams() {
        let a: Vec<u64> = (0..5).map(|i| Rng::substream(7, i).next_u64()).collect();
        let b: Vec<u64> = (0..5).map(|i| Rng::substream(7, i).next_u64()).collect();
        assert_eq!(a, b);
        let c: Vec<u64> = (0..5).map(|i| Rng::substream(8, i).next_u64()).collect();
        assert_ne!(a, c);
    }

    #[test]
    fn below_in_range() {
        let mut r = Rng::new(1);
        for _ in 0..1000 {
            assert!(r.below(7) < 7);
        }
    }
}
