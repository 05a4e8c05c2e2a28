//! Empirical CDFs of clustered samples and exact sup-distance statistics.
//!
//! A right-continuous step function is constant on every interval
//! `[u_i, u_{i+1})` between consecutive jump points, so the supremum over ℝ of
//! the difference of two such functions is attained at one of the union of
//! their jump points (and it is zero left of the first jump and right of the
//! last). Against a continuous nondecreasing reference the positive part peaks
//! at a jump, where the step function has just moved up, and the negative part
//! peaks in the left limit at a jump, where the reference has risen the most
//! while the step function has not yet moved.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bounds::TailSide;
use crate::coefficients::ClusterSpec;
use crate::error::{invalid, Result};

/// Real-valued observations tagged with the cluster they belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredSample {
    values: Vec<f64>,
    cluster_of: Vec<usize>,
    labels: Vec<String>,
    labelled: bool,
}

impl ClusteredSample {
    /// Builds a sample from `(value, cluster label)` pairs. Clusters are
    /// numbered in order of first appearance.
    pub fn new<S: AsRef<str>>(observations: impl IntoIterator<Item = (f64, S)>) -> Result<Self> {
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut labels = Vec::new();
        let mut values = Vec::new();
        let mut cluster_of = Vec::new();
        for (i, (value, label)) in observations.into_iter().enumerate() {
            if !value.is_finite() {
                return Err(invalid(format!("observation {i} is not finite: {value}")));
            }
            let label = label.as_ref();
            let id = match index.get(label) {
                Some(&id) => id,
                None => {
                    let id = labels.len();
                    index.insert(label.to_owned(), id);
                    labels.push(label.to_owned());
                    id
                }
            };
            values.push(value);
            cluster_of.push(id);
        }
        if values.is_empty() {
            return Err(invalid("sample is empty"));
        }
        Ok(Self {
            values,
            cluster_of,
            labels,
            labelled: true,
        })
    }

    /// Every observation in its own cluster.
    pub fn iid(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        let values: Vec<f64> = values.into_iter().collect();
        let mut sample = Self::new(values.iter().enumerate().map(|(i, &v)| (v, i.to_string())))?;
        sample.labelled = false;
        Ok(sample)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Cluster index of each observation.
    pub fn cluster_ids(&self) -> &[usize] {
        &self.cluster_of
    }

    pub fn cluster_labels(&self) -> &[String] {
        &self.labels
    }

    /// False when the sample was built without cluster labels.
    pub fn is_labelled(&self) -> bool {
        self.labelled
    }

    pub fn cluster_spec(&self) -> ClusterSpec {
        let mut sizes = vec![0u64; self.labels.len()];
        for &id in &self.cluster_of {
            sizes[id] += 1;
        }
        ClusterSpec::new(sizes).expect("every cluster has at least one observation")
    }
}

/// Right-continuous nondecreasing step function from 0 to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepCdf {
    jumps: Vec<f64>,
    values: Vec<f64>,
}

impl StepCdf {
    /// `values[i]` is the level on `[jumps[i], jumps[i+1])`; the level before
    /// the first jump is 0 and the last value must be 1.
    pub fn new(jumps: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if jumps.is_empty() || jumps.len() != values.len() {
            return Err(invalid(
                "step function needs matching nonempty jumps and values",
            ));
        }
        if jumps.iter().any(|x| !x.is_finite()) {
            return Err(invalid("jump points must be finite"));
        }
        if jumps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("jump points must be strictly increasing"));
        }
        if values[0] < 0.0 || values.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("levels must be nondecreasing from 0"));
        }
        if *values.last().unwrap() != 1.0 {
            return Err(invalid("final level must be 1"));
        }
        Ok(Self { jumps, values })
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn levels(&self) -> &[f64] {
        &self.values
    }

    /// Value at `r` (right-continuous).
    pub fn eval(&self, r: f64) -> f64 {
        let idx = self.jumps.partition_point(|&x| x <= r);
        if idx == 0 {
            0.0
        } else {
            self.values[idx - 1]
        }
    }

    /// Limit from the left at `r`.
    pub fn left_limit(&self, r: f64) -> f64 {
        let idx = self.jumps.partition_point(|&x| x < r);
        if idx == 0 {
            0.0
        } else {
            self.values[idx - 1]
        }
    }
}

/// Empirical CDF: jump of `(tie multiplicity)/n` at each distinct value.
pub fn ecdf(sample: &ClusteredSample) -> StepCdf {
    ecdf_from_values(sample.values()).expect("sample is nonempty and finite")
}

/// Empirical CDF of raw values.
pub fn ecdf_from_values(values: &[f64]) -> Result<StepCdf> {
    if values.is_empty() {
        return Err(invalid("sample is empty"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid("sample values must be finite"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut jumps = Vec::new();
    let mut levels = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        if i + 1 < sorted.len() && sorted[i + 1] == v {
            continue;
        }
        jumps.push(v);
        levels.push((i + 1) as f64 / n);
    }
    Ok(StepCdf {
        jumps,
        values: levels,
    })
}

fn pick(side: TailSide, plus: f64, minus: f64) -> f64 {
    match side {
        TailSide::TwoSided => plus.max(minus),
        TailSide::PlusSide => plus,
        TailSide::MinusSide => minus,
    }
}

/// Positive and negative parts of `sup (F − G)` over ℝ.
pub fn sup_deviation_parts(f: &StepCdf, g: &StepCdf) -> (f64, f64) {
    let (mut plus, mut minus) = (0.0f64, 0.0f64);
    let (mut i, mut j) = (0, 0);
    let (mut level_f, mut level_g) = (0.0, 0.0);
    // Merge walk over the union of jump points; shared points advance both.
    while i < f.jumps.len() || j < g.jumps.len() {
        let next_f = f.jumps.get(i).copied().unwrap_or(f64::INFINITY);
        let next_g = g.jumps.get(j).copied().unwrap_or(f64::INFINITY);
        // Left limit at the next point equals the current levels.
        let before = level_f - level_g;
        plus = plus.max(before);
        minus = minus.max(-before);
        if next_f <= next_g {
            level_f = f.values[i];
            i += 1;
        }
        if next_g <= next_f {
            level_g = g.values[j];
            j += 1;
        }
        let at = level_f - level_g;
        plus = plus.max(at);
        minus = minus.max(-at);
    }
    (plus, minus)
}

/// Exact `sup_r |F(r) − G(r)|`, or its positive / negative part.
pub fn sup_distance_two_sample(f: &StepCdf, g: &StepCdf, side: TailSide) -> f64 {
    let (plus, minus) = sup_deviation_parts(f, g);
    pick(side, plus, minus)
}

/// Exact sup distance between a step function and a continuous nondecreasing
/// reference CDF.
///
/// `extra_points` adds candidate evaluation points, for references that are
/// only piecewise continuous.
pub fn sup_distance_reference<R>(
    f: &StepCdf,
    reference: R,
    side: TailSide,
    extra_points: &[f64],
) -> f64
where
    R: Fn(f64) -> f64,
{
    let (mut plus, mut minus) = (0.0f64, 0.0f64);
    let mut below = 0.0;
    for (&x, &level) in f.jumps.iter().zip(&f.values) {
        let r = reference(x);
        plus = plus.max(level - r);
        minus = minus.max(r - below);
        below = level;
    }
    for &x in extra_points {
        let r = reference(x);
        plus = plus.max(f.eval(x) - r);
        minus = minus.max(r - f.eval(x)).max(r - f.left_limit(x));
    }
    pick(side, plus, minus)
}

/// Per-unit trajectories on a shared time grid in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPanel {
    times: Vec<f64>,
    units: Vec<Vec<f64>>,
    k_lip: f64,
}

const LIPSCHITZ_SLACK: f64 = 1e-9;

impl TrajectoryPanel {
    /// `units[i][t]` is unit `i` at `times[t]`. Each trajectory must be
    /// consistent with the declared Lipschitz constant.
    pub fn new(times: Vec<f64>, units: Vec<Vec<f64>>, k_lip: f64) -> Result<Self> {
        if times.is_empty() {
            return Err(invalid("time grid is empty"));
        }
        if units.is_empty() {
            return Err(invalid("panel has no units"));
        }
        if !(k_lip.is_finite() && k_lip >= 0.0) {
            return Err(invalid(format!(
                "Lipschitz constant must be >= 0, got {k_lip}"
            )));
        }
        if times.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(invalid("times must lie in [0, 1]"));
        }
        if let Some(w) = times.windows(2).position(|w| w[0] >= w[1]) {
            return Err(invalid(format!(
                "times must be strictly increasing: {} then {}",
                times[w],
                times[w + 1]
            )));
        }
        let mut worst: Option<(usize, usize, f64)> = None;
        for (u, traj) in units.iter().enumerate() {
            if traj.len() != times.len() {
                return Err(invalid(format!(
                    "unit {} has {} values for {} times",
                    u + 1,
                    traj.len(),
                    times.len()
                )));
            }
            if let Some(v) = traj.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(invalid(format!(
                    "unit {} has value {v} outside [0, 1]",
                    u + 1
                )));
            }
            for t in 1..times.len() {
                let rise = (traj[t] - traj[t - 1]).abs();
                let dt = times[t] - times[t - 1];
                if rise > k_lip * dt + LIPSCHITZ_SLACK {
                    let slope = rise / dt;
                    if worst.is_none_or(|(_, _, s)| slope > s) {
                        worst = Some((u, t, slope));
                    }
                }
            }
        }
        if let Some((u, t, slope)) = worst {
            return Err(invalid(format!(
                "unit {} between t = {} and t = {} has slope {slope} > {k_lip}",
                u + 1,
                times[t - 1],
                times[t]
            )));
        }
        Ok(Self {
            times,
            units,
            k_lip,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn units(&self) -> &[Vec<f64>] {
        &self.units
    }

    pub fn n_units(&self) -> usize {
        self.units.len()
    }

    pub fn k_lip(&self) -> f64 {
        self.k_lip
    }

    /// Effective grid spacing: the widest gap between neighbouring times,
    /// with the uncovered ends `[0, t_0]` and `[t_last, 1]` counted double
    /// since their supremum can sit at the far end rather than a midpoint.
    pub fn delta(&self) -> f64 {
        let first = self.times[0];
        let last = *self.times.last().unwrap();
        self.times
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(2.0 * first.max(1.0 - last), f64::max)
    }

    /// Cross-unit average at each grid time.
    pub fn mean_path(&self) -> Vec<f64> {
        let n = self.units.len() as f64;
        (0..self.times.len())
            .map(|t| self.units.iter().map(|u| u[t]).sum::<f64>() / n)
            .collect()
    }
}

/// Certified enclosure of `sup_{t∈[0,1]} |F(t) − G(t)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupInterval {
    pub lower: f64,
    pub upper: f64,
}

/// Grid maximum of `|mean_f − mean_g|` and that maximum plus the worst-case
/// rise of a `2K`-Lipschitz function across half a grid cell.
pub fn lipschitz_sup_interval(f: &TrajectoryPanel, g: &TrajectoryPanel) -> Result<SupInterval> {
    if f.times != g.times {
        return Err(invalid("panels must share the same time grid"));
    }
    if f.n_units() != g.n_units() {
        return Err(invalid(format!(
            "panels must have the same unit count ({} vs {})",
            f.n_units(),
            g.n_units()
        )));
    }
    if f.k_lip != g.k_lip {
        return Err(invalid(format!(
            "panels declare different Lipschitz constants ({} vs {})",
            f.k_lip, g.k_lip
        )));
    }
    let lower = f
        .mean_path()
        .iter()
        .zip(g.mean_path())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(SupInterval {
        lower,
        upper: lower + (2.0 * f.k_lip) * f.delta() / 2.0,
    })
}
