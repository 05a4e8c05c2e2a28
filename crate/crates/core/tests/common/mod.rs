//! Shared oracles and fuzz generators for the integration tests.
#![allow(dead_code)]

use bvks::empirical::{ecdf_from_values, StepCdf};
use bvks::montecarlo::rng::StreamRng;
use bvks::TailSide;

/// Dense lattice spacing used by the brute-force sup oracle.
pub const GRID_STEP: f64 = 1e-4;
pub const GRID_POINTS: u32 = 10_000;

pub fn lattice(i: u32) -> f64 {
    i as f64 / GRID_POINTS as f64
}

/// Sample of `1..=max_len` points drawn from the lattice `{i/10⁴}`, with
/// occasional heavy ties.
pub fn lattice_sample(rng: &mut StreamRng, max_len: u64) -> Vec<f64> {
    let len = 1 + rng.next_u64() % max_len;
    let coarse = rng.next_u64().is_multiple_of(4);
    (0..len)
        .map(|_| {
            if coarse {
                lattice((rng.next_u64() % 5) as u32 * 2_500)
            } else {
                lattice((rng.next_u64() % (GRID_POINTS as u64 + 1)) as u32)
            }
        })
        .collect()
}

/// Sup distance by evaluating both step functions at every lattice point.
/// Exact when every jump lies on the lattice.
pub fn dense_grid_sup(f: &StepCdf, g: &StepCdf, side: TailSide) -> f64 {
    let (mut plus, mut minus) = (0.0f64, 0.0f64);
    for i in 0..=GRID_POINTS {
        let x = lattice(i);
        let diff = f.eval(x) - g.eval(x);
        plus = plus.max(diff);
        minus = minus.max(-diff);
    }
    match side {
        TailSide::TwoSided => plus.max(minus),
        TailSide::PlusSide => plus,
        TailSide::MinusSide => minus,
    }
}

/// Nondecreasing right-continuous step function on `[0, 1]` into `[0, 1]`:
/// value `levels[i]` on `[breaks[i], breaks[i+1])`, with `breaks[0] = 0` and
/// an implicit final break at 1.
#[derive(Debug, Clone)]
pub struct MonotoneStep {
    pub breaks: Vec<f64>,
    pub levels: Vec<f64>,
}

impl MonotoneStep {
    pub fn random(rng: &mut StreamRng) -> Self {
        let pieces = 1 + (rng.next_u64() % 12) as usize;
        let mut breaks: Vec<f64> = (1..pieces).map(|_| rng.next_f64()).collect();
        breaks.push(0.0);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut levels: Vec<f64> = (0..breaks.len()).map(|_| rng.next_f64()).collect();
        levels.sort_by(f64::total_cmp);
        if rng.next_u64().is_multiple_of(3) {
            *levels.last_mut().unwrap() = 1.0;
        }
        Self { breaks, levels }
    }

    fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breaks.iter().enumerate().map(|(i, &a)| {
            let b = self.breaks.get(i + 1).copied().unwrap_or(1.0);
            (a, b, self.levels[i])
        })
    }

    /// `sup_t (f(t) − t)^+`, attained at the left end of some piece.
    pub fn sup_excess(&self) -> f64 {
        self.pieces().map(|(a, _, c)| c - a).fold(0.0, f64::max)
    }
}

/// Both sides of the triangular inequality for `H(u) = e^{pu} − 1`:
/// `(H(α·sup (f(t) − t)^+), α·∫₀¹ h(α·(f(x) − x)^+) dx)`.
///
/// On a piece `[a, b)` at level `c` the integrand is `p·e^{pα(c−x)}` for
/// `x < c` and the constant `p` beyond, so the integral is a sum of closed
/// forms.
pub fn triangular_sides(f: &MonotoneStep, alpha: f64, p: f64) -> (f64, f64) {
    let lhs = (p * alpha * f.sup_excess()).exp_m1();
    let mut rhs = 0.0;
    for (a, b, c) in f.pieces() {
        let u = b.min(c);
        if u > a {
            rhs += (p * alpha * (c - a)).exp() - (p * alpha * (c - u)).exp();
        }
        let flat = b - a.max(c);
        if flat > 0.0 {
            rhs += alpha * p * flat;
        }
    }
    (lhs, rhs)
}

/// Random step CDF built from a lattice sample.
pub fn random_cdf(rng: &mut StreamRng, max_len: u64) -> StepCdf {
    ecdf_from_values(&lattice_sample(rng, max_len)).unwrap()
}
