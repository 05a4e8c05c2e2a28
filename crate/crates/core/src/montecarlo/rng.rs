//! Counter-based random streams.
//!
//! Every stream is a pure function of `(seed, trial, stream)`: output `i` is
//! the SplitMix64 finalizer applied to `key + i·γ`. Trials can therefore run in
//! any order, on any number of threads, and still see identical numbers.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct StreamRng {
    key: u64,
    counter: u64,
}

impl StreamRng {
    pub fn new(seed: u64, trial: u64, stream: u64) -> Self {
        let key = mix64(mix64(mix64(seed ^ 0x5851_F42D_4C95_7F2D) ^ trial).wrapping_add(stream));
        Self { key, counter: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(
            self.key
                .wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)),
        )
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer on `[0, 2^bits)`, `bits ≤ 64`.
    #[inline]
    pub fn next_bits(&mut self, bits: u32) -> u64 {
        debug_assert!(bits <= 64);
        match bits {
            0 => 0,
            64 => self.next_u64(),
            b => self.next_u64() >> (64 - b),
        }
    }
}
