//! Result types emitted by the CLI and their JSON, CSV and table renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::bounds::TailSide;
use crate::hypothesis::{CriticalValue, KsOutcome};
use crate::montecarlo::SimReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    /// Point on the normalized scale.
    pub eps: f64,
    /// Sup-deviation that normalizes to `eps`.
    pub statistic: f64,
    pub p_upper: f64,
    pub p_raw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTable {
    pub c: f64,
    pub d: f64,
    pub side: TailSide,
    pub rows: Vec<BoundRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalTable {
    pub c: f64,
    pub d: f64,
    pub side: TailSide,
    pub critical: Vec<CriticalValue>,
}

/// Anything a command can produce.
#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    Bound(BoundTable),
    Critical(CriticalTable),
    Test(KsOutcome),
    Sim(SimReport),
}

impl Report {
    pub fn notices(&self) -> &[String] {
        match self {
            Report::Test(o) => &o.notices,
            Report::Sim(r) => &r.notices,
            _ => &[],
        }
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
            Format::Table => Ok(self.to_table()),
        }
    }

    fn to_json(&self) -> Result<String, CliError> {
        let text = match self {
            Report::Bound(t) => serde_json::to_string_pretty(t),
            Report::Critical(t) => serde_json::to_string_pretty(t),
            Report::Test(o) => serde_json::to_string_pretty(o),
            Report::Sim(r) => serde_json::to_string_pretty(r),
        }
        .map_err(|e| CliError::Input(format!("cannot serialize result: {e}")))?;
        Ok(text + "\n")
    }

    fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        match self {
            Report::Bound(t) => {
                w.write_record(["eps", "bound"]).map_err(io)?;
                for r in &t.rows {
                    w.write_record([r.eps.to_string(), r.p_upper.to_string()])
                        .map_err(io)?;
                }
            }
            Report::Critical(t) => {
                w.write_record(["alpha", "critical"]).map_err(io)?;
                for cv in &t.critical {
                    w.write_record([cv.alpha.to_string(), cv.value.to_string()])
                        .map_err(io)?;
                }
            }
            Report::Test(o) => {
                w.write_record(["alpha", "critical", "statistic", "p_upper", "reject"])
                    .map_err(io)?;
                for cv in &o.critical {
                    w.write_record([
                        cv.alpha.to_string(),
                        cv.value.to_string(),
                        o.statistic.to_string(),
                        o.p_upper.to_string(),
                        o.rejects(cv.alpha).to_string(),
                    ])
                    .map_err(io)?;
                }
            }
            Report::Sim(r) => {
                w.write_record(["eps", "empirical", "bound", "stderr", "violation"])
                    .map_err(io)?;
                for row in &r.rows {
                    w.write_record([
                        row.eps.to_string(),
                        row.empirical.to_string(),
                        row.bound.to_string(),
                        row.stderr.to_string(),
                        row.violation.to_string(),
                    ])
                    .map_err(io)?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }

    fn to_table(&self) -> String {
        let mut s = String::new();
        match self {
            Report::Bound(t) => {
                let _ = writeln!(s, "c = {}, d = {}, side = {}", t.c, t.d, t.side);
                let _ = writeln!(
                    s,
                    "{:>10} {:>14} {:>12} {:>12}",
                    "eps", "statistic", "p_upper", "p_raw"
                );
                for r in &t.rows {
                    let _ = writeln!(
                        s,
                        "{:>10.4} {:>14.6} {:>12.6} {:>12.6}",
                        r.eps, r.statistic, r.p_upper, r.p_raw
                    );
                }
            }
            Report::Critical(t) => {
                let _ = writeln!(s, "c = {}, d = {}, side = {}", t.c, t.d, t.side);
                let _ = writeln!(s, "{:>8} {:>14}", "alpha", "critical");
                for cv in &t.critical {
                    let _ = writeln!(s, "{:>8} {:>14.6}", cv.alpha, cv.value);
                }
            }
            Report::Test(o) => {
                let _ = writeln!(s, "test        {:?}", o.test);
                let _ = writeln!(s, "side        {}", o.side);
                match o.statistic_lower {
                    Some(lo) => {
                        let _ = writeln!(
                            s,
                            "statistic   {:.6} (certified range {lo:.6} .. {:.6})",
                            o.statistic, o.statistic
                        );
                    }
                    None => {
                        let _ = writeln!(s, "statistic   {:.6}", o.statistic);
                    }
                }
                if let Some(nu) = o.nu {
                    let _ = writeln!(s, "nu          {nu:.4}");
                }
                if let Some(xi) = o.xi {
                    let _ = writeln!(s, "xi          {xi:.4}");
                }
                let _ = writeln!(s, "c, d        {}, {}", o.c, o.d);
                let _ = writeln!(s, "p_upper     {:.6}", o.p_upper);
                if o.conservative {
                    let _ = writeln!(s, "(conservative)");
                }
                let _ = writeln!(s, "{:>8} {:>12} {:>7}", "alpha", "critical", "reject");
                for cv in &o.critical {
                    let _ = writeln!(
                        s,
                        "{:>8} {:>12.6} {:>7}",
                        cv.alpha,
                        cv.value,
                        o.rejects(cv.alpha)
                    );
                }
            }
            Report::Sim(r) => {
                let _ = writeln!(s, "{}", r.statistic);
                let _ = writeln!(
                    s,
                    "n = {}, m = {}, trials = {}, seed = {}",
                    r.config.n, r.config.m, r.config.trials, r.config.seed
                );
                let _ = writeln!(
                    s,
                    "{:>18} {:>9} {:>10} {:>10} {:>10} {:>10} {:>9}",
                    "row", "eps", "empirical", "bound", "stderr", "exact", "violation"
                );
                for row in &r.rows {
                    let name = match (&row.label, row.m) {
                        (Some(l), _) => l.clone(),
                        (None, Some(m)) => format!("m = {m}"),
                        (None, None) => String::new(),
                    };
                    let exact = row.exact.map_or("-".to_string(), |p| format!("{p:.6}"));
                    let _ = writeln!(
                        s,
                        "{:>18} {:>9.4} {:>10.6} {:>10.6} {:>10.6} {:>10} {:>9}",
                        name, row.eps, row.empirical, row.bound, row.stderr, exact, row.violation
                    );
                }
            }
        }
        s
    }
}
