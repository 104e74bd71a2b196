use crate::error::{HarnessError, HarnessResult};
use koopman_core::report::ConvergenceReport;
use std::path::{Path, PathBuf};

/// Writes `<dir>/<experiment>.csv` and `<dir>/<experiment>.json` and returns
/// both paths.
pub fn write_report(report: &ConvergenceReport, dir: &Path) -> HarnessResult<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Write { path: dir.into(), source })?;
    let csv = dir.join(format!("{}.csv", report.experiment));
    let json = dir.join(format!("{}.json", report.experiment));
    std::fs::write(&csv, report.to_csv()).map_err(|source| HarnessError::Write { path: csv.clone(), source })?;
    let mut text = serde_json::to_string_pretty(report).expect("reports serialize");
    text.push('\n');
    std::fs::write(&json, text).map_err(|source| HarnessError::Write { path: json.clone(), source })?;
    Ok((csv, json))
}

pub fn read_report(path: &Path) -> HarnessResult<ConvergenceReport> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Read { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| HarnessError::Json { path: path.into(), source })
}
