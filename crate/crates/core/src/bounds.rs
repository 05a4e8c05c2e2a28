//! Closed-form pieces of the sub-Gaussian sup-deviation bounds.
//!
//! Every bound is stated for a randomized function with McDiarmid coefficient
//! `c` and downward-variation coefficient `d`, and depends on the product
//! `x = c·d > 1` through three functions:
//!
//! * the residual `R(x) = √(2/ln 2) · ln((π/2)^{1/4}(2√ln x + 1)) / √ln x`,
//! * the two-sided denominator `L(x) = 1 + √(log₄ x) + R(x)`,
//! * the one-sided shift `S(x) = √(ln x) + R*(x)` with `R*(x) = √(ln 2 / 2)·R(x)`.
//!
//! Two-sided: `Pr{ √c/L(x) · sup|F − 𝐅| > ε } ≤ 2e^{−2ε²}`.
//! One-sided: `Pr{ √c · sup(F − 𝐅)^± − S(x) > ε } ≤ e^{−2ε²}`.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numeric::{erf, golden_section_min};

/// `√(ln 2 / 2)`: the ratio `R*(x) / R(x)`, and the ε at which `2e^{−2ε²} = 1`.
pub const SQRT_HALF_LN2: f64 = 0.588_705_011_257_737_3;

/// McDiarmid coefficient `c` paired with the downward-variation coefficient `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    c: f64,
    d: f64,
}

impl BoundParams {
    /// Both coefficients must be positive and their product must exceed one.
    pub fn new(c: f64, d: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(domain(format!(
                "McDiarmid coefficient must be positive, got {c}"
            )));
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(domain(format!(
                "downward-variation coefficient must be positive, got {d}"
            )));
        }
        let product = c * d;
        if product <= 1.0 {
            return Err(Error::Inapplicable { product });
        }
        Ok(Self { c, d })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// The argument `c·d` fed to `L`, `S` and `R`.
    pub fn product(&self) -> f64 {
        self.c * self.d
    }

    /// Maps an observed sup-deviation onto the ε scale of the bound.
    ///
    /// Two-sided: `√c · sup / L(c·d)`. One-sided: `√c · sup − S(c·d)`, which may
    /// be negative; callers clamp at zero when evaluating the tail.
    pub fn normalize(&self, side: TailSide, sup: f64) -> f64 {
        let x = self.product();
        match side {
            TailSide::TwoSided => self.c.sqrt() * sup / denominator_unchecked(x),
            TailSide::PlusSide | TailSide::MinusSide => {
                self.c.sqrt() * sup - one_sided_shift_unchecked(x)
            }
        }
    }

    /// Inverse of [`BoundParams::normalize`]: the sup-deviation sitting at `eps`.
    pub fn sup_at(&self, side: TailSide, eps: f64) -> f64 {
        let x = self.product();
        match side {
            TailSide::TwoSided => eps * denominator_unchecked(x) / self.c.sqrt(),
            TailSide::PlusSide | TailSide::MinusSide => {
                (eps + one_sided_shift_unchecked(x)) / self.c.sqrt()
            }
        }
    }

    /// Upper bound on the probability of a sup-deviation at least as large as `sup`.
    pub fn p_upper(&self, side: TailSide, sup: f64) -> f64 {
        tail_bound_raw(side, self.normalize(side, sup).max(0.0)).min(1.0)
    }

    /// Uncapped version of [`BoundParams::p_upper`], for diagnostics.
    pub fn p_raw(&self, side: TailSide, sup: f64) -> f64 {
        tail_bound_raw(side, self.normalize(side, sup).max(0.0))
    }
}

/// Which deviation the supremum is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TailSide {
    /// `sup |F − G|`
    #[serde(rename = "two")]
    TwoSided,
    /// `sup (F − G)^+`
    #[serde(rename = "plus")]
    PlusSide,
    /// `sup (F − G)^-`
    #[serde(rename = "minus")]
    MinusSide,
}

impl TailSide {
    pub const ALL: [TailSide; 3] = [TailSide::TwoSided, TailSide::PlusSide, TailSide::MinusSide];

    pub fn as_str(&self) -> &'static str {
        match self {
            TailSide::TwoSided => "two",
            TailSide::PlusSide => "plus",
            TailSide::MinusSide => "minus",
        }
    }

    /// The side seen from the other sample: plus and minus swap.
    pub fn flipped(&self) -> TailSide {
        match self {
            TailSide::TwoSided => TailSide::TwoSided,
            TailSide::PlusSide => TailSide::MinusSide,
            TailSide::MinusSide => TailSide::PlusSide,
        }
    }

    /// Tail multiplier: 2 for two-sided bounds, 1 for one-sided.
    fn multiplier(&self) -> f64 {
        match self {
            TailSide::TwoSided => 2.0,
            _ => 1.0,
        }
    }
}

impl fmt::Display for TailSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TailSide {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two" | "two-sided" => Ok(TailSide::TwoSided),
            "plus" => Ok(TailSide::PlusSide),
            "minus" => Ok(TailSide::MinusSide),
            other => Err(domain(format!(
                "unknown side '{other}', expected one of two, plus, minus"
            ))),
        }
    }
}

fn check_x(x: f64, what: &str) -> Result<()> {
    if x.is_nan() || x <= 1.0 {
        return Err(domain(format!("{what} requires x > 1, got {x}")));
    }
    Ok(())
}

fn residual_unchecked(x: f64) -> f64 {
    let root_ln = x.ln().sqrt();
    (2.0 / LN_2).sqrt() * ((PI / 2.0).powf(0.25) * (2.0 * root_ln + 1.0)).ln() / root_ln
}

fn residual_star_unchecked(x: f64) -> f64 {
    let root_ln = x.ln().sqrt();
    ((PI / 2.0).powf(0.25) * (2.0 * root_ln + 1.0)).ln() / root_ln
}

fn denominator_unchecked(x: f64) -> f64 {
    1.0 + (x.ln() / (2.0 * LN_2)).sqrt() + residual_unchecked(x)
}

fn one_sided_shift_unchecked(x: f64) -> f64 {
    x.ln().sqrt() + residual_star_unchecked(x)
}

/// Residual term `R(x)` of the two-sided denominator. Vanishes as `x → ∞`.
pub fn residual(x: f64) -> Result<f64> {
    check_x(x, "residual")?;
    Ok(residual_unchecked(x))
}

/// `R*(x) = √(ln 2 / 2)·R(x) = ln((π/2)^{1/4}(2√ln x + 1)) / √ln x`.
pub fn residual_star(x: f64) -> Result<f64> {
    check_x(x, "residual_star")?;
    Ok(residual_star_unchecked(x))
}

/// Two-sided denominator `L(x) = 1 + √(log₄ x) + R(x)`.
pub fn denominator(x: f64) -> Result<f64> {
    check_x(x, "denominator")?;
    Ok(denominator_unchecked(x))
}

/// One-sided shift `S(x) = √(ln x) + R*(x)`.
pub fn one_sided_shift(x: f64) -> Result<f64> {
    check_x(x, "one_sided_shift")?;
    Ok(one_sided_shift_unchecked(x))
}

fn tail_bound_raw(side: TailSide, eps: f64) -> f64 {
    side.multiplier() * (-2.0 * eps * eps).exp()
}

/// Sub-Gaussian tail `2e^{−2ε²}` (two-sided) or `e^{−2ε²}` (one-sided), capped at 1.
///
/// The ε here is already on the normalized scale; see [`BoundParams::normalize`].
pub fn tail_bound(side: TailSide, eps: f64) -> Result<f64> {
    Ok(tail_bound_uncapped(side, eps)?.min(1.0))
}

/// [`tail_bound`] without the cap at one.
pub fn tail_bound_uncapped(side: TailSide, eps: f64) -> Result<f64> {
    if eps.is_nan() || eps < 0.0 {
        return Err(domain(format!("eps must be nonnegative, got {eps}")));
    }
    Ok(tail_bound_raw(side, eps))
}

/// ε at which the tail bound equals `alpha`.
pub fn critical_eps(side: TailSide, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(((side.multiplier() / alpha).ln() / 2.0).sqrt())
}

/// Smallest sup-deviation at which the p-value bound reaches `alpha`.
///
/// Two-sided: `√(ln(2/α)/2) · L(c·d) / √c`. One-sided: `(√(ln(1/α)/2) + S(c·d)) / √c`.
pub fn critical_statistic(params: &BoundParams, side: TailSide, alpha: f64) -> Result<f64> {
    Ok(params.sup_at(side, critical_eps(side, alpha)?))
}

/// Entropy function restricted to the family `H(u) = e^{pu} − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyEval {
    pub x: f64,
    /// Minimizing exponent.
    pub p_star: f64,
    /// `1 + √(ln 2 / 2) · min_p Φ(x, p)`.
    pub value: f64,
    /// `1 + √(log₄ x) + R(x)`; always at least `value`.
    pub upper_bound: f64,
}

const LN_SQRT_PI: f64 = 0.572_364_942_924_700_1;
const TWO_POW_THREE_HALVES: f64 = 2.828_427_124_746_190_3;

/// `ln I(p)` where `I(p) = √π e^{p²/8} p² (1 + erf(p/2^{3/2})) / 2^{3/2}` is the
/// tail integral `∫_p^∞ e^{−2 h⁻¹(u)²} du` for `h(u) = p e^{pu}`.
fn ln_tail_integral(p: f64) -> f64 {
    LN_SQRT_PI + p * p / 8.0 + 2.0 * p.ln() + (1.0 + erf(p / TWO_POW_THREE_HALVES)).ln()
        - 1.5 * LN_2
}

/// Objective `Φ(x, p) = ln(√x (p + I(p)) + 1) / p` for `p > 0`.
pub fn entropy_objective(x: f64, p: f64) -> f64 {
    let root_x = x.sqrt();
    if p * p / 8.0 > 500.0 {
        // e^{p²/8} overflows; factor I(p) out of the logarithm.
        let ln_i = ln_tail_integral(p);
        let rest = (p + 1.0 / root_x) * (-ln_i).exp();
        (root_x.ln() + ln_i + rest.ln_1p()) / p
    } else {
        let tail = ln_tail_integral(p).exp();
        (root_x * (p + tail)).ln_1p() / p
    }
}

const SCAN_POINTS: usize = 64;
const SCAN_LO: f64 = 1e-3;
const P_TOL: f64 = 1e-8;

/// Minimizes the entropy objective over `p > 0`.
///
/// A 64-point log-spaced scan over `[1e-3, 6√ln x]` locates the basin, then
/// golden-section search refines it to `1e-8` in `p`. Below `x = π/2` the
/// objective increases from `p = 0⁺` and the minimizer sits at the left end of
/// the scan.
pub fn entropy_exact_expfamily(x: f64) -> Result<EntropyEval> {
    check_x(x, "entropy_exact_expfamily")?;
    let hi = (6.0 * x.ln().sqrt()).max(10.0 * SCAN_LO);
    let ratio = (hi / SCAN_LO).powf(1.0 / (SCAN_POINTS - 1) as f64);
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| SCAN_LO * ratio.powi(i as i32))
        .collect();

    let (best, _) = grid
        .iter()
        .map(|&p| entropy_objective(x, p))
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
        );

    if best == SCAN_POINTS - 1 {
        return Err(Error::Convergence(format!(
            "entropy objective still decreasing at p = {hi} for x = {x}"
        )));
    }
    let lo = grid[best.saturating_sub(1)];
    let up = grid[best + 1];
    let (p_star, phi) = golden_section_min(|p| entropy_objective(x, p), lo, up, P_TOL);
    if !phi.is_finite() {
        return Err(Error::Convergence(format!(
            "non-finite objective at x = {x}"
        )));
    }

    Ok(EntropyEval {
        x,
        p_star,
        value: 1.0 + SQRT_HALF_LN2 * phi,
        upper_bound: denominator_unchecked(x),
    })
}
