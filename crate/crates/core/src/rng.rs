//! Deterministic randomness.
//!
//! All randomness in the crate flows from one explicit 64-bit seed through
//! counter-based splitting, so every run is reproducible bit for bit. The
//! generator is SplitMix64; keyed streams are derived by mixing tag words
//! into the seed rather than by consuming generator state, which keeps
//! independent subsystems independent of evaluation order.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// SplitMix64 stream.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Derive an independent stream from `seed` and a sequence of tag words.
    pub fn derive(seed: u64, tags: &[u64]) -> Self {
        let mut s = mix(seed ^ GOLDEN);
        for &t in tags {
            s = mix(s.wrapping_add(GOLDEN) ^ mix(t));
        }
        SplitMix64::new(s)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform in `[0, bound)` by rejection; `bound` must be nonzero.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Keyed pseudorandom permutation of `[0, n)`.
///
/// A four-round Feistel network over the smallest even-bit domain covering
/// `n`, with cycle-walking to restrict to `[0, n)`. Both directions are
/// O(1) time and memory, so permutation-model expanders never store their
/// permutations explicitly.
#[derive(Clone, Debug)]
pub struct FeistelPermutation {
    n: u64,
    half_bits: u32,
    keys: [u64; 4],
}

impl FeistelPermutation {
    pub fn new(n: u64, seed: u64) -> Self {
        assert!(n > 0);
        let bits = 64 - (n - 1).leading_zeros();
        let half_bits = bits.div_ceil(2).max(1);
        let mut rng = SplitMix64::derive(seed, &[n, 0x0fe1_57e1]);
        let keys = [rng.next_u64(), rng.next_u64(), rng.next_u64(), rng.next_u64()];
        FeistelPermutation { n, half_bits, keys }
    }

    #[inline]
    fn round(&self, k: usize, half: u64) -> u64 {
        mix(self.keys[k] ^ half.wrapping_mul(GOLDEN)) & ((1u64 << self.half_bits) - 1)
    }

    fn encrypt_once(&self, v: u64) -> u64 {
        let mask = (1u64 << self.half_bits) - 1;
        let (mut l, mut r) = (v >> self.half_bits, v & mask);
        for k in 0..4 {
            let (nl, nr) = (r, l ^ self.round(k, r));
            l = nl;
            r = nr;
        }
        (l << self.half_bits) | r
    }

    fn decrypt_once(&self, v: u64) -> u64 {
        let mask = (1u64 << self.half_bits) - 1;
        let (mut l, mut r) = (v >> self.half_bits, v & mask);
        for k in (0..4).rev() {
            let (nl, nr) = (r ^ self.round(k, l), l);
            l = nl;
            r = nr;
        }
        (l << self.half_bits) | r
    }

    /// Image of `v` under the permutation; `v < n`.
    pub fn apply(&self, v: u64) -> u64 {
        debug_assert!(v < self.n);
        let mut x = self.encrypt_once(v);
        while x >= self.n {
            x = self.encrypt_once(x);
        }
        x
    }

    /// Preimage of `v`; `v < n`.
    pub fn invert(&self, v: u64) -> u64 {
        debug_assert!(v < self.n);
        let mut x = self.decrypt_once(v);
        while x >= self.n {
            x = self.decrypt_once(x);
        }
        x
    }
}
