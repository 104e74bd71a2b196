//! Sweep results and log-log rate fits.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Ordinary least-squares fit of log2(error) against a control variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Half-width of the 95% confidence interval of the slope.
    pub half_width: f64,
    pub points: usize,
}

/// Minimum number of rows for a rate fit.
pub const MIN_FIT_ROWS: usize = 4;

pub fn fit_rate(rows: &[(f64, f64)]) -> Result<RateFit> {
    if rows.len() < MIN_FIT_ROWS {
        return Err(Error::TooFewRows { needed: MIN_FIT_ROWS, found: rows.len() });
    }
    if let Some(&(_, e)) = rows.iter().find(|(_, e)| !(*e > 0.0)) {
        return Err(Error::NonpositiveError(e));
    }
    let n = rows.len() as f64;
    let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1.log2()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("control variable is constant".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let dof = n - 2.0;
    let se = (sse / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof).map_err(|e| Error::InvalidArgument(e.to_string()))?.inverse_cdf(0.975);
    Ok(RateFit { slope, intercept, half_width: t * se, points: rows.len() })
}

/// Machine-readable verdict of one acceptance rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceCheck {
    pub rule: String,
    pub passed: bool,
    pub detail: String,
}

/// Tabular sweep output: named columns, numeric rows, an optional rate fit
/// and the acceptance verdicts of the producing experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub experiment: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub fit: Option<RateFit>,
    #[serde(default)]
    pub config: serde_json::Value,
    pub version: String,
    #[serde(default)]
    pub acceptance: Vec<AcceptanceCheck>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl ConvergenceReport {
    pub fn new(experiment: &str, columns: &[&str]) -> Self {
        ConvergenceReport {
            experiment: experiment.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            fit: None,
            config: serde_json::Value::Null,
            version: env!("CARGO_PKG_VERSION").into(),
            acceptance: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn check(&mut self, rule: &str, passed: bool, detail: String) {
        self.acceptance.push(AcceptanceCheck { rule: rule.into(), passed, detail });
    }

    pub fn passed(&self) -> bool {
        self.acceptance.iter().all(|c| c.passed)
    }

    pub fn all_finite(&self) -> bool {
        self.rows.iter().flatten().all(|v| v.is_finite())
    }

    /// CSV with a header row and floats at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_float(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// 17 significant digits; integral values print without exponent.
pub fn format_float(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:.16e}")
    }
}
