//! Kolmogorov–Smirnov style tests built on the non-asymptotic bounds.
//!
//! Every test reports an upper bound on the p-value, never an asymptotic
//! approximation, together with the critical statistic at each requested
//! significance level.

use serde::{Deserialize, Serialize};

use crate::bounds::{critical_statistic, denominator, one_sided_shift, BoundParams, TailSide};
use crate::coefficients::{lipschitz_difference_params, RangeSpec, TimeDomain};
use crate::empirical::{
    ecdf, lipschitz_sup_interval, sup_distance_reference, sup_distance_two_sample, ClusteredSample,
    TrajectoryPanel,
};
use crate::error::{domain, invalid, Error, Result};

/// Significance levels used when none are requested.
pub const DEFAULT_ALPHAS: [f64; 3] = [0.01, 0.05, 0.1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    OneSampleClustered,
    TwoSampleClustered,
    LipschitzTwoSample,
    FiniteGridTwoSample,
    FiniteTheta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValue {
    pub alpha: f64,
    pub value: f64,
}

/// Result of a sup-statistic test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome {
    pub test: TestKind,
    /// Observed sup-deviation; for continuous-time Lipschitz tests this is the
    /// conservative upper end of the certified interval.
    pub statistic: f64,
    /// Lower end of the certified interval, when the statistic is an enclosure.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub statistic_lower: Option<f64>,
    pub side: TailSide,
    pub c: f64,
    pub d: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub xi: Option<f64>,
    /// p-value upper bound, capped at 1.
    pub p_upper: f64,
    /// The bound before capping; absent for the two-sample product form.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_raw: Option<f64>,
    pub critical: Vec<CriticalValue>,
    pub conservative: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notices: Vec<String>,
}

impl KsOutcome {
    pub fn params(&self) -> BoundParams {
        BoundParams::new(self.c, self.d).expect("outcome built from valid params")
    }

    /// Reject at level `alpha` when the p-value bound falls below it.
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_upper < alpha
    }

    pub fn critical_at(&self, alpha: f64) -> Option<f64> {
        self.critical
            .iter()
            .find(|cv| cv.alpha == alpha)
            .map(|cv| cv.value)
    }
}

fn check_alphas(alphas: &[f64]) -> Result<()> {
    if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
        return Err(domain(format!("alpha must lie in (0, 1), got {a}")));
    }
    Ok(())
}

fn single_params_outcome(
    test: TestKind,
    statistic: f64,
    side: TailSide,
    params: BoundParams,
    alphas: &[f64],
) -> Result<KsOutcome> {
    check_alphas(alphas)?;
    let critical = alphas
        .iter()
        .map(|&alpha| {
            Ok(CriticalValue {
                alpha,
                value: critical_statistic(&params, side, alpha)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KsOutcome {
        test,
        statistic,
        statistic_lower: None,
        side,
        c: params.c(),
        d: params.d(),
        nu: None,
        xi: None,
        p_upper: params.p_upper(side, statistic),
        p_raw: Some(params.p_raw(side, statistic)),
        critical,
        conservative: false,
        notices: Vec::new(),
    })
}

fn effective_size(sample: &ClusteredSample, which: &str) -> Result<f64> {
    let nu = sample.cluster_spec().nu();
    if nu <= 1.0 {
        return Err(Error::Inapplicable { product: nu });
    }
    if !nu.is_finite() {
        return Err(invalid(format!(
            "effective sample size of {which} is not finite"
        )));
    }
    Ok(nu)
}

fn iid_notice(sample: &ClusteredSample, which: &str) -> Option<String> {
    (!sample.is_labelled())
        .then(|| format!("{which}: no cluster labels, each observation treated as its own cluster"))
}

/// Clustered one-sample test against a continuous reference CDF.
///
/// Uses `C = ν_n` and `D = 1` (monotone `[0, 1]`-valued indicators).
pub fn one_sample_clustered<R>(
    sample: &ClusteredSample,
    reference: R,
    side: TailSide,
    alphas: &[f64],
) -> Result<KsOutcome>
where
    R: Fn(f64) -> f64,
{
    let nu = effective_size(sample, "sample")?;
    let f = ecdf(sample);
    let mut last = 0.0;
    for &x in f.jumps() {
        let r = reference(x);
        if !(0.0..=1.0).contains(&r) || r < last {
            return Err(invalid(format!(
                "reference CDF is not a nondecreasing [0, 1] function (value {r} at {x})"
            )));
        }
        last = r;
    }
    let statistic = sup_distance_reference(&f, &reference, side, &[]);
    let params = BoundParams::new(nu, 1.0)?;
    let mut outcome = single_params_outcome(
        TestKind::OneSampleClustered,
        statistic,
        side,
        params,
        alphas,
    )?;
    outcome.nu = Some(nu);
    outcome.notices.extend(iid_notice(sample, "sample"));
    Ok(outcome)
}

/// Tail bound for one clustered sample's contribution to a two-sample
/// deviation of `eps`, which must exceed `eps/2` on at least one side.
fn half_eps_tail(size: f64, side: TailSide, eps: f64) -> f64 {
    match side {
        TailSide::TwoSided => {
            let scaled = eps / denominator(size).expect("effective size exceeds 1");
            (2.0 * (-(size / 2.0) * scaled * scaled).exp()).min(1.0)
        }
        TailSide::PlusSide | TailSide::MinusSide => {
            let shift = one_sided_shift(size).expect("effective size exceeds 1");
            let t = (size.sqrt() * eps / 2.0 - shift).max(0.0);
            (-2.0 * t * t).exp()
        }
    }
}

/// p-value bound of the two-sample clustered test at deviation `eps`.
pub fn two_sample_p_upper(nu: f64, xi: f64, side: TailSide, eps: f64) -> f64 {
    let keep_f = 1.0 - half_eps_tail(nu, side, eps);
    let keep_g = 1.0 - half_eps_tail(xi, side, eps);
    (1.0 - keep_f.max(0.0) * keep_g.max(0.0)).clamp(0.0, 1.0)
}

/// Smallest deviation at which [`two_sample_p_upper`] drops to `alpha`,
/// located by bisection on the (nonincreasing) bound.
pub fn two_sample_critical(nu: f64, xi: f64, side: TailSide, alpha: f64) -> Result<f64> {
    check_alphas(&[alpha])?;
    let p = |eps: f64| two_sample_p_upper(nu, xi, side, eps);
    let mut hi = 1.0;
    while p(hi) >= alpha {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Convergence(format!(
                "no two-sample critical value for alpha = {alpha}"
            )));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-15 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p(mid) < alpha {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Two-sample clustered test of `𝐅 = 𝐆` (two-sided), `𝐅 ≤ 𝐆` (plus side)
/// or `𝐅 ≥ 𝐆` (minus side) for independent samples.
///
/// Two-sided bound: `1 − (1 − 2e^{−(ν/2)(ε/L(ν))²})(1 − 2e^{−(ξ/2)(ε/L(ξ))²})`
/// with each factor floored at 0. One-sided bound replaces each tail with
/// `e^{−2 max(0, √ν·ε/2 − S(ν))²}`.
pub fn two_sample_clustered(
    sample_f: &ClusteredSample,
    sample_g: &ClusteredSample,
    side: TailSide,
    alphas: &[f64],
) -> Result<KsOutcome> {
    check_alphas(alphas)?;
    let nu = effective_size(sample_f, "first sample")?;
    let xi = effective_size(sample_g, "second sample")?;
    let statistic = sup_distance_two_sample(&ecdf(sample_f), &ecdf(sample_g), side);
    let critical = alphas
        .iter()
        .map(|&alpha| {
            Ok(CriticalValue {
                alpha,
                value: two_sample_critical(nu, xi, side, alpha)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut notices = Vec::new();
    notices.extend(iid_notice(sample_f, "first sample"));
    notices.extend(iid_notice(sample_g, "second sample"));
    Ok(KsOutcome {
        test: TestKind::TwoSampleClustered,
        statistic,
        statistic_lower: None,
        side,
        c: nu,
        d: 1.0,
        nu: Some(nu),
        xi: Some(xi),
        p_upper: two_sample_p_upper(nu, xi, side, statistic),
        p_raw: None,
        critical,
        conservative: false,
        notices,
    })
}

/// How the time axis of a trajectory comparison is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeMode {
    /// Supremum over all of `[0, 1]`; uses the declared Lipschitz constant.
    Continuous,
    /// Supremum over the observed grid only.
    Grid,
}

/// Two-sample test for averaged sample-Lipschitz processes sharing one
/// randomization.
///
/// In continuous mode the statistic is the upper end of the certified sup
/// enclosure and the outcome is flagged conservative.
pub fn lipschitz_two_sample(
    panel_f: &TrajectoryPanel,
    panel_g: &TrajectoryPanel,
    mode: TimeMode,
    alphas: &[f64],
) -> Result<KsOutcome> {
    let interval = lipschitz_sup_interval(panel_f, panel_g)?;
    let n = panel_f.n_units();
    let (test, domain, statistic) = match mode {
        TimeMode::Continuous => (
            TestKind::LipschitzTwoSample,
            TimeDomain::Continuous {
                k_lip: panel_f.k_lip(),
            },
            interval.upper,
        ),
        TimeMode::Grid => (
            TestKind::FiniteGridTwoSample,
            TimeDomain::Finite {
                points: panel_f.times().len(),
            },
            interval.lower,
        ),
    };
    let params = lipschitz_difference_params(n, domain)?;
    let mut outcome = single_params_outcome(test, statistic, TailSide::TwoSided, params, alphas)?;
    if mode == TimeMode::Continuous {
        outcome.statistic_lower = Some(interval.lower);
        outcome.conservative = true;
    }
    Ok(outcome)
}

/// Test over a finite parameter set: `D = max |observed − expected|` with
/// `c·(Σ widths)²` as the bound argument.
pub fn finite_theta_test(
    stats: &[(f64, f64)],
    ranges: &[RangeSpec],
    c: f64,
    side: TailSide,
    alphas: &[f64],
) -> Result<KsOutcome> {
    if stats.is_empty() {
        return Err(invalid("need at least one statistic"));
    }
    if stats.len() != ranges.len() {
        return Err(invalid(format!(
            "{} statistics but {} ranges",
            stats.len(),
            ranges.len()
        )));
    }
    if stats.iter().any(|(o, e)| !(o.is_finite() && e.is_finite())) {
        return Err(invalid("statistics must be finite"));
    }
    let total: f64 = ranges.iter().map(RangeSpec::width).sum();
    let params = BoundParams::new(c, total * total)?;
    let plus = stats.iter().map(|(o, e)| o - e).fold(0.0, f64::max);
    let minus = stats.iter().map(|(o, e)| e - o).fold(0.0, f64::max);
    let statistic = match side {
        TailSide::TwoSided => plus.max(minus),
        TailSide::PlusSide => plus,
        TailSide::MinusSide => minus,
    };
    single_params_outcome(TestKind::FiniteTheta, statistic, side, params, alphas)
}
