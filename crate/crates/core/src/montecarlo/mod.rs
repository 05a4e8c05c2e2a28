//! Monte Carlo and exact-enumeration harness for the bounds.
//!
//! * the binomial-grid construction that defeats a cluster-naive Massart bound,
//! * coverage of the deflated statistics on iid uniform data,
//! * the fixed-`n` slice of the sharpness construction.
//!
//! All randomness comes from [`rng::StreamRng`] keyed by `(seed, trial,
//! stream)`. Trials run in parallel and are reduced by counting, so a report
//! depends only on its configuration.

pub mod binomial;
pub mod rng;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{denominator, tail_bound, BoundParams, TailSide};
use crate::empirical::{ecdf_from_values, sup_distance_reference};
use crate::error::{domain, invalid, Result};

use binomial::{cdf_half, pmf_half, BinomialHalf};
use rng::StreamRng;

/// Default violation threshold, in binomial standard errors.
pub const DEFAULT_SIGMAS: f64 = 3.0;

/// Largest grid size the sharpness experiment will simulate.
pub const MAX_GRID_CELLS: u64 = 10_000_000;

fn default_sigmas() -> f64 {
    DEFAULT_SIGMAS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Units per draw (binomial trials, or iid sample size).
    pub n: u64,
    /// Grid cells; one for experiments without a grid.
    pub m: u64,
    pub trials: u64,
    pub seed: u64,
    pub eps_grid: Vec<f64>,
    /// Violation threshold in standard errors.
    #[serde(default = "default_sigmas")]
    pub sigmas: f64,
}

impl SimConfig {
    pub fn new(n: u64, m: u64, trials: u64, seed: u64, eps_grid: Vec<f64>) -> Result<Self> {
        let config = Self {
            n,
            m,
            trials,
            seed,
            eps_grid,
            sigmas: DEFAULT_SIGMAS,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(invalid("n and m must be positive"));
        }
        if self.trials == 0 {
            return Err(invalid("need at least one trial"));
        }
        if self.eps_grid.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(invalid("eps grid must contain nonnegative finite values"));
        }
        if self.eps_grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("eps grid must be sorted ascending"));
        }
        if !(self.sigmas.is_finite() && self.sigmas >= 0.0) {
            return Err(invalid("violation threshold must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    /// Threshold on the reported statistic.
    pub eps: f64,
    /// Grid size, for experiments that sweep it.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<u64>,
    /// What the row measures, when a report mixes events.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<String>,
    pub empirical: f64,
    pub bound: f64,
    pub stderr: f64,
    pub violation: bool,
    /// Exact probability of the event, when known in closed form.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<f64>,
    /// Frequency of the undeflated (Massart-scaled) statistic exceeding `eps`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub comparison: Option<f64>,
}

impl SimRow {
    fn new(eps: f64, hits: u64, trials: u64, bound: f64, sigmas: f64) -> Self {
        let empirical = hits as f64 / trials as f64;
        let stderr = (empirical * (1.0 - empirical) / trials as f64).sqrt();
        Self {
            eps,
            m: None,
            label: None,
            empirical,
            bound,
            stderr,
            violation: empirical > bound + sigmas * stderr,
            exact: None,
            comparison: None,
        }
    }

    /// `|empirical − exact| ≤ k·se`, with `se` taken from the exact
    /// probability over `trials`; false when no exact value is known.
    pub fn agrees_with_exact(&self, k: f64, trials: u64) -> bool {
        self.exact.is_some_and(|p| {
            let se = (p * (1.0 - p) / trials as f64).sqrt();
            (self.empirical - p).abs() <= k * se
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    /// Definition of the simulated statistic.
    pub statistic: String,
    pub config: SimConfig,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub side: Option<TailSide>,
    pub rows: Vec<SimRow>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notices: Vec<String>,
}

impl SimReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.violation).count()
    }
}

/// Outcome of one binomial-grid draw, in integer units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridDraw {
    /// `max_j |2U_j − n|`.
    pub max_twice_dev: u64,
    /// `min_j U_j`.
    pub min_count: u64,
}

fn grid_draw(sampler: &BinomialHalf, m: u64, rng: &mut StreamRng) -> GridDraw {
    let n = sampler.n();
    let mut max_twice_dev = 0;
    let mut min_count = u64::MAX;
    for _ in 0..m {
        let u = sampler.sample(rng);
        max_twice_dev = max_twice_dev.max((2 * u).abs_diff(n));
        min_count = min_count.min(u);
    }
    GridDraw {
        max_twice_dev,
        min_count,
    }
}

fn grid_sup_value(n: u64, m: u64, max_twice_dev: u64) -> f64 {
    max_twice_dev as f64 / (2.0 * n as f64 * m as f64)
}

/// One draw of the grid statistic `max_j |U_j − n/2| / (n·m)`, where the
/// `U_j ~ Binomial(n, 1/2)` are independent.
pub fn binomial_grid_sup(n: u64, m: u64, seed: u64) -> Result<f64> {
    binomial_grid_sup_trial(n, m, seed, 0)
}

/// As [`binomial_grid_sup`], for an arbitrary trial index of the stream.
pub fn binomial_grid_sup_trial(n: u64, m: u64, seed: u64, trial: u64) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(invalid("n and m must be positive"));
    }
    let sampler = BinomialHalf::new(n);
    let draw = grid_draw(&sampler, m, &mut StreamRng::new(seed, trial, 0));
    Ok(grid_sup_value(n, m, draw.max_twice_dev))
}

fn grid_draws(n: u64, m: u64, trials: u64, seed: u64, stream: u64) -> Vec<GridDraw> {
    let sampler = BinomialHalf::new(n);
    (0..trials)
        .into_par_iter()
        .map(|t| grid_draw(&sampler, m, &mut StreamRng::new(seed, t, stream)))
        .collect()
}

/// Empirical distribution of the grid statistic: `(value, count)` sorted by value.
pub fn binomial_grid_histogram(n: u64, m: u64, trials: u64, seed: u64) -> Result<Vec<(f64, u64)>> {
    if n == 0 || m == 0 || trials == 0 {
        return Err(invalid("n, m and trials must be positive"));
    }
    let mut counts = vec![0u64; n as usize + 1];
    for draw in grid_draws(n, m, trials, seed, 0) {
        counts[draw.max_twice_dev as usize] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(dev, c)| (grid_sup_value(n, m, dev as u64), c))
        .collect())
}

/// `Pr{|Binomial(n, 1/2)/n − 1/2| > eps}`.
pub fn exact_cell_exceedance(n: u64, eps: f64) -> f64 {
    let limit = 2.0 * eps * n as f64;
    (0..=n)
        .filter(|&k| ((2 * k).abs_diff(n) as f64) > limit)
        .map(|k| pmf_half(n, k))
        .sum()
}

/// Estimates `Pr{max_j |U_j/n − 1/2| > eps}` for each grid size in `m_list`
/// and sets it against the bound `2e^{−2n·eps²}` that Massart's inequality
/// would give if it ignored the grid. The growth toward 1 as `m` increases
/// shows up as violation flags.
pub fn conjecture_refutation_experiment(
    n: u64,
    m_list: &[u64],
    eps: f64,
    trials: u64,
    seed: u64,
) -> Result<SimReport> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(domain(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    if m_list.is_empty() || m_list.contains(&0) {
        return Err(invalid("grid sizes must be positive and nonempty"));
    }
    let config = SimConfig::new(n, *m_list.iter().max().unwrap(), trials, seed, vec![eps])?;
    let cell = exact_cell_exceedance(n, eps);
    let naive = (2.0 * (-2.0 * n as f64 * eps * eps).exp()).min(1.0);
    let limit = 2.0 * eps * n as f64;

    let rows = m_list
        .iter()
        .enumerate()
        .map(|(stream, &m)| {
            let hits = grid_draws(n, m, trials, seed, stream as u64)
                .iter()
                .filter(|d| d.max_twice_dev as f64 > limit)
                .count() as u64;
            let mut row = SimRow::new(eps, hits, trials, naive, config.sigmas);
            row.m = Some(m);
            row.exact = Some(1.0 - (1.0 - cell).powf(m as f64));
            row
        })
        .collect();

    Ok(SimReport {
        statistic: "max_j |U_j/n - 1/2|".into(),
        config,
        side: None,
        rows,
        notices: Vec::new(),
    })
}

fn uniform_cdf(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Coverage of the deflated statistic on iid uniform samples of size `n`.
///
/// Two-sided rows count `√n·D/L(n) > eps` against `2e^{−2ε²}`; one-sided rows
/// count `√n·D± − S(n) > eps` against `e^{−2ε²}`. The comparison column counts
/// the raw `√n·D > eps`.
pub fn iid_coverage(
    n: u64,
    trials: u64,
    seed: u64,
    eps_grid: &[f64],
    side: TailSide,
) -> Result<SimReport> {
    if n < 2 {
        return Err(invalid("coverage needs n >= 2"));
    }
    if trials < 100 {
        return Err(invalid("coverage needs at least 100 trials"));
    }
    let config = SimConfig::new(n, 1, trials, seed, eps_grid.to_vec())?;
    let params = BoundParams::new(n as f64, 1.0)?;
    let root_n = (n as f64).sqrt();

    let stats: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = StreamRng::new(seed, t, 0);
            let values: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
            let f = ecdf_from_values(&values).expect("uniform draws are finite");
            let d = sup_distance_reference(&f, uniform_cdf, side, &[]);
            (params.normalize(side, d), root_n * d)
        })
        .collect();

    let rows = config
        .eps_grid
        .iter()
        .map(|&eps| {
            let hits = stats.iter().filter(|(s, _)| *s > eps).count() as u64;
            let raw_hits = stats.iter().filter(|(_, r)| *r > eps).count() as u64;
            let bound = tail_bound(side, eps).expect("eps grid validated");
            let mut row = SimRow::new(eps, hits, trials, bound, config.sigmas);
            row.comparison = Some(raw_hits as f64 / trials as f64);
            row
        })
        .collect();

    let statistic = match side {
        TailSide::TwoSided => "sqrt(n)*sup|F_n - F|/L(n)",
        TailSide::PlusSide => "sqrt(n)*sup(F_n - F)^+ - S(n)",
        TailSide::MinusSide => "sqrt(n)*sup(F_n - F)^- - S(n)",
    };
    Ok(SimReport {
        statistic: statistic.into(),
        config,
        side: Some(side),
        rows,
        notices: Vec::new(),
    })
}

/// Grid size and cutoff of the sharpness construction for fixed `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessGrid {
    /// `k(n) = round(L·n)`.
    pub k: u64,
    /// `Pr{Binomial(n, 1/2) ≤ k}`.
    pub cell_prob: f64,
    /// `⌈1 / cell_prob⌉` before capping.
    pub m_uncapped: f64,
    pub m: u64,
    pub truncated: bool,
}

pub fn sharpness_grid(n: u64, l_target: f64) -> Result<SharpnessGrid> {
    if !(l_target > 0.0 && l_target < 0.5) {
        return Err(domain(format!("L must lie in (0, 1/2), got {l_target}")));
    }
    let k = (l_target * n as f64).round() as u64;
    if k == 0 || 2 * k >= n {
        return Err(domain(format!(
            "k(n) = round(L*n) = {k} must satisfy 0 < k < n/2 (n = {n})"
        )));
    }
    let cell_prob = cdf_half(n, k);
    let m_uncapped = (1.0 / cell_prob).ceil();
    let truncated = m_uncapped > MAX_GRID_CELLS as f64;
    Ok(SharpnessGrid {
        k,
        cell_prob,
        m_uncapped,
        m: if truncated {
            MAX_GRID_CELLS
        } else {
            m_uncapped as u64
        },
        truncated,
    })
}

/// Fixed-`n` slice of the sharpness construction.
///
/// Uses `m_n = ⌈1/Pr{B(n,1/2) ≤ k}⌉` cells so that some cell falls to `k` or
/// below with probability about `1 − e^{−1}`. Reports that event and the
/// exceedances `√n·max_j|U_j/n − 1/2| > (1+δ)√n(1/2 − L)` for
/// `δ ∈ {−0.1, 0, 0.1}`, each against the bound the main inequality gives at
/// `C·D = n·m_n²`.
pub fn sharpness_experiment(n: u64, l_target: f64, trials: u64, seed: u64) -> Result<SimReport> {
    let grid = sharpness_grid(n, l_target)?;
    let root_n = (n as f64).sqrt();
    let l_nm = denominator(n as f64 * (grid.m as f64).powi(2))?;
    let bound_at = |threshold: f64| (2.0 * (-2.0 * (threshold / l_nm).powi(2)).exp()).min(1.0);

    let deltas = [-0.1, 0.0, 0.1];
    let thresholds: Vec<f64> = deltas
        .iter()
        .map(|d| (1.0 + d) * root_n * (0.5 - l_target))
        .collect();
    let min_threshold = root_n * (0.5 - grid.k as f64 / n as f64);
    let mut eps_grid = thresholds.clone();
    eps_grid.sort_by(f64::total_cmp);
    let config = SimConfig::new(n, grid.m, trials, seed, eps_grid)?;

    let draws = grid_draws(n, grid.m, trials, seed, 0);
    let mut rows = Vec::new();

    let hits = draws.iter().filter(|d| d.min_count <= grid.k).count() as u64;
    let mut row = SimRow::new(
        min_threshold,
        hits,
        trials,
        bound_at(min_threshold),
        config.sigmas,
    );
    row.m = Some(grid.m);
    row.label = Some(format!("min_j U_j <= {}", grid.k));
    row.exact = Some(1.0 - (1.0 - grid.cell_prob).powf(grid.m as f64));
    rows.push(row);

    for (delta, threshold) in deltas.iter().zip(thresholds) {
        let hits = draws
            .iter()
            .filter(|d| root_n * d.max_twice_dev as f64 / (2.0 * n as f64) > threshold)
            .count() as u64;
        let mut row = SimRow::new(threshold, hits, trials, bound_at(threshold), config.sigmas);
        row.m = Some(grid.m);
        row.label = Some(format!("delta = {delta}"));
        rows.push(row);
    }

    let mut notices = Vec::new();
    if grid.truncated {
        notices.push(format!(
            "m_n = {} truncated to {MAX_GRID_CELLS}",
            grid.m_uncapped
        ));
    }
    Ok(SimReport {
        statistic: "sqrt(n)*max_j |U_j/n - 1/2|".into(),
        config,
        side: None,
        rows,
        notices,
    })
}
