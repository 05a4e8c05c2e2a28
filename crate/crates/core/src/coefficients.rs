//! McDiarmid and downward-variation coefficients, and the effective sample
//! size of clustered data.

use serde::{Deserialize, Serialize};

use crate::bounds::BoundParams;
use crate::error::{invalid, Result};

/// Cluster sizes of a block-independent sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSpec {
    sizes: Vec<u64>,
}

impl ClusterSpec {
    /// Sizes must be nonempty and strictly positive. Empty clusters are
    /// rejected rather than dropped because they would change the count.
    pub fn new(sizes: Vec<u64>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(invalid("cluster spec needs at least one cluster"));
        }
        if let Some(pos) = sizes.iter().position(|&s| s == 0) {
            return Err(invalid(format!("cluster {pos} has size zero")));
        }
        Ok(Self { sizes })
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    /// Number of clusters.
    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    /// Total number of observations.
    pub fn n(&self) -> u64 {
        self.sizes.iter().sum()
    }

    /// Mean cluster size `a_n`.
    pub fn mean_size(&self) -> f64 {
        self.n() as f64 / self.k() as f64
    }

    /// Population variance of cluster sizes `s_n²` (divides by the cluster count).
    pub fn size_variance(&self) -> f64 {
        let mean = self.mean_size();
        self.sizes
            .iter()
            .map(|&s| {
                let dev = s as f64 - mean;
                dev * dev
            })
            .sum::<f64>()
            / self.k() as f64
    }

    /// Effective sample size `ν_n = K / (1 + s_n²/a_n²)`.
    pub fn nu(&self) -> f64 {
        let mean = self.mean_size();
        self.k() as f64 / (1.0 + self.size_variance() / (mean * mean))
    }
}

/// Open interval `(lo, hi)` bounding the range of a function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeSpec {
    lo: f64,
    hi: f64,
}

impl RangeSpec {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(invalid(format!("degenerate range ({lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub fn unit() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// The cases in which a closed-form downward-variation coefficient is known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DownwardVariationCase {
    /// Finite parameter set, one range per parameter value.
    FiniteTheta(Vec<RangeSpec>),
    /// Real parameter, monotone in the parameter.
    MonotoneReal(RangeSpec),
    /// Parameter in `[0, 1]`, differentiable with `−∂f/∂θ ≤ k_lip`.
    LipschitzDifferentiable { range: RangeSpec, k_lip: f64 },
    /// Parameter in `[0, 1]`, downward difference quotients bounded by `k_lip`.
    LipschitzOneSided { range: RangeSpec, k_lip: f64 },
}

/// `C_f = n² / Σ(b_i − a_i)²` for an average of `n` bounded functions.
pub fn mcdiarmid_from_ranges(ranges: &[RangeSpec]) -> Result<f64> {
    if ranges.is_empty() {
        return Err(invalid("need at least one range"));
    }
    let n = ranges.len() as f64;
    let sum_sq: f64 = ranges.iter().map(|r| r.width() * r.width()).sum();
    Ok(n * n / sum_sq)
}

/// `C_f = n² / Σ size_k²` for a clustered average of `[0, 1]`-valued functions.
///
/// Equals `ν_n`: with `n = K a`, `Σ size² = K(s² + a²)`, so
/// `n²/Σ size² = K a² / (s² + a²) = K / (1 + s²/a²)`.
pub fn mcdiarmid_from_clusters(spec: &ClusterSpec) -> f64 {
    let n = spec.n() as f64;
    let sum_sq: f64 = spec.sizes().iter().map(|&s| (s as f64) * (s as f64)).sum();
    let c = n * n / sum_sq;
    debug_assert!(((c - spec.nu()) / c).abs() < 1e-9);
    c
}

/// `D_f` for each of the closed-form cases.
pub fn downward_variation(case: &DownwardVariationCase) -> Result<f64> {
    match case {
        DownwardVariationCase::FiniteTheta(ranges) => {
            if ranges.is_empty() {
                return Err(invalid("finite parameter set must be nonempty"));
            }
            let total: f64 = ranges.iter().map(RangeSpec::width).sum();
            Ok(total * total)
        }
        DownwardVariationCase::MonotoneReal(range) => Ok(range.width() * range.width()),
        DownwardVariationCase::LipschitzDifferentiable { range, k_lip }
        | DownwardVariationCase::LipschitzOneSided { range, k_lip } => {
            if !(k_lip.is_finite() && *k_lip >= 0.0) {
                return Err(invalid(format!(
                    "Lipschitz constant must be >= 0, got {k_lip}"
                )));
            }
            let total = range.width() + k_lip;
            Ok(total * total)
        }
    }
}

/// Time domain of a two-sample comparison of averaged trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeDomain {
    /// All of `[0, 1]`, every trajectory `k_lip`-Lipschitz.
    Continuous { k_lip: f64 },
    /// A finite set of `points` time instants; no smoothness needed.
    Finite { points: usize },
}

/// Coefficients for `f − g` where both are averages over `n_units`
/// independent units of `[0, 1]`-valued trajectories.
///
/// `c = n/4` always. Continuous time gives `c·d = n(1 + K)²`; a finite grid of
/// `K_T` points gives `c·d = n·K_T²`.
pub fn lipschitz_difference_params(n_units: usize, domain: TimeDomain) -> Result<BoundParams> {
    if n_units == 0 {
        return Err(invalid("need at least one unit"));
    }
    let c = n_units as f64 / 4.0;
    let d = match domain {
        TimeDomain::Continuous { k_lip } => {
            if !(k_lip.is_finite() && k_lip >= 0.0) {
                return Err(invalid(format!(
                    "Lipschitz constant must be >= 0, got {k_lip}"
                )));
            }
            4.0 * (1.0 + k_lip) * (1.0 + k_lip)
        }
        TimeDomain::Finite { points } => {
            if points == 0 {
                return Err(invalid("finite time grid must be nonempty"));
            }
            4.0 * (points as f64) * (points as f64)
        }
    };
    BoundParams::new(c, d)
}
