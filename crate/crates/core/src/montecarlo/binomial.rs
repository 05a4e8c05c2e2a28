//! Exact arithmetic for `Binomial(n, 1/2)`.
//!
//! For `n ≤ 64` every outcome probability is `C(n, k) / 2^n`, so drawing `n`
//! uniform bits and inverting the integer CDF reproduces the law exactly. The
//! same integer table backs the exact tail probabilities used as oracles.

use super::rng::StreamRng;

/// Largest `n` for which `2^n` (and every cumulative count) fits in `u128`.
const EXACT_MAX_N: u64 = 126;

/// Largest `n` sampled by table inversion.
pub const INVERSION_MAX_N: u64 = 64;

/// `C(n, k)` for `k = 0..=n`, exact for `n ≤ 126`.
pub fn binomial_row(n: u64) -> Vec<u128> {
    assert!(
        n <= EXACT_MAX_N,
        "exact binomial row limited to n <= {EXACT_MAX_N}"
    );
    // Pascal's rule keeps every intermediate below 2^126.
    let mut row = vec![0u128; n as usize + 1];
    row[0] = 1;
    for i in 1..=n as usize {
        for k in (1..=i).rev() {
            row[k] += row[k - 1];
        }
    }
    row
}

/// `Pr{Binomial(n, 1/2) = k}`.
pub fn pmf_half(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= EXACT_MAX_N {
        binomial_row(n)[k as usize] as f64 / (2.0f64).powi(n as i32)
    } else {
        let (nf, kf) = (n as f64, k as f64);
        (libm::lgamma(nf + 1.0)
            - libm::lgamma(kf + 1.0)
            - libm::lgamma(nf - kf + 1.0)
            - nf * std::f64::consts::LN_2)
            .exp()
    }
}

/// `Pr{Binomial(n, 1/2) ≤ k}`.
pub fn cdf_half(n: u64, k: u64) -> f64 {
    if k >= n {
        return 1.0;
    }
    if n <= EXACT_MAX_N {
        let count: u128 = binomial_row(n)[..=k as usize].iter().sum();
        count as f64 / (2.0f64).powi(n as i32)
    } else {
        (0..=k).map(|j| pmf_half(n, j)).sum::<f64>().min(1.0)
    }
}

/// Sampler for `Binomial(n, 1/2)`.
#[derive(Debug, Clone)]
pub struct BinomialHalf {
    n: u64,
    /// Cumulative counts out of `2^n`; empty when sampling by bit counting.
    cumulative: Vec<u128>,
}

impl BinomialHalf {
    pub fn new(n: u64) -> Self {
        let cumulative = if n <= INVERSION_MAX_N {
            binomial_row(n)
                .into_iter()
                .scan(0u128, |acc, c| {
                    *acc += c;
                    Some(*acc)
                })
                .collect()
        } else {
            Vec::new()
        };
        Self { n, cumulative }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn sample(&self, rng: &mut StreamRng) -> u64 {
        if self.cumulative.is_empty() {
            // n > 64: popcount of n fair bits, still exact.
            let mut left = self.n;
            let mut ones = 0u64;
            while left >= 64 {
                ones += rng.next_u64().count_ones() as u64;
                left -= 64;
            }
            ones + rng.next_bits(left as u32).count_ones() as u64
        } else {
            let r = rng.next_bits(self.n as u32) as u128;
            self.cumulative.partition_point(|&c| c <= r) as u64
        }
    }
}
