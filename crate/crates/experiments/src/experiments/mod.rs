//! The experiment catalogue. Every experiment builds a report whose
//! acceptance checks carry its pass/fail verdicts.

mod estimators;
mod measures;
mod multiscale;
mod spectral;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, HarnessResult};
use koopman_core::basis::MultiscaleBasis;
use koopman_core::report::ConvergenceReport;

pub struct Experiment {
    pub name: &'static str,
    pub summary: &'static str,
    runner: fn(&ExperimentConfig) -> HarnessResult<ConvergenceReport>,
}

const CATALOGUE: &[Experiment] = &[
    Experiment {
        name: "haar-projection-rate",
        summary: "L2 error of Haar projections of f(x)=x against level, fitted slope and closed form",
        runner: multiscale::haar_projection_rate,
    },
    Experiment {
        name: "not-pm-counterexample",
        summary: "mass the k=1 Fourier dual projection gives [0, pi] for a uniform law on [pi, 2pi]",
        runner: measures::not_pm_counterexample,
    },
    Experiment {
        name: "spectral-truncation",
        summary: "heat-kernel truncation errors against the spectral-space bound on random inputs",
        runner: spectral::spectral_truncation,
    },
    Experiment {
        name: "edmd-erm-equivalence",
        summary: "EDMD on indicator dictionaries against the ERM estimator and the closed form",
        runner: estimators::edmd_erm_equivalence,
    },
    Experiment {
        name: "ac-domination",
        summary: "empirical Hilbert-Schmidt deviation frequencies against the accuracy-confidence bound",
        runner: spectral::ac_domination,
    },
    Experiment {
        name: "bias-variance",
        summary: "Monte Carlo error of the sample-based heat operator across truncation levels",
        runner: spectral::bias_variance,
    },
    Experiment {
        name: "ifs-contraction",
        summary: "W1 distances between successive Sierpinski iterates and their ratios",
        runner: measures::ifs_contraction,
    },
    Experiment {
        name: "probability-preservation",
        summary: "positivity and mass of the cell-average projector against a truncated Fourier projection",
        runner: measures::probability_preservation,
    },
    Experiment {
        name: "effective-samples",
        summary: "effective sample counts of an exponentially mixing chain",
        runner: estimators::effective_samples,
    },
    Experiment {
        name: "warped-factorization",
        summary: "warped-basis coefficients of f against plain Haar coefficients of f composed with the warp",
        runner: multiscale::warped_factorization,
    },
    Experiment {
        name: "equilibrated-edmd",
        summary: "indicator EDMD with the level tied to the sample count, median error against m",
        runner: estimators::equilibrated_edmd,
    },
];

pub fn catalogue() -> &'static [Experiment] {
    CATALOGUE
}

/// Runs the configured experiment. The report echoes the config and always
/// carries a finiteness check besides the experiment's own rules.
pub fn run(cfg: &ExperimentConfig) -> HarnessResult<ConvergenceReport> {
    cfg.validate()?;
    let exp = CATALOGUE
        .iter()
        .find(|e| e.name == cfg.experiment)
        .ok_or_else(|| HarnessError::UnknownExperiment(cfg.experiment.clone()))?;
    let mut report = (exp.runner)(cfg)?;
    report.config = serde_json::to_value(cfg).expect("configs serialize");
    let finite = report.all_finite();
    report.check("every row is finite", finite, format!("{} rows", report.rows.len()));
    Ok(report)
}

pub(crate) fn parse_basis(cfg: &ExperimentConfig, default: &str) -> HarnessResult<MultiscaleBasis> {
    let name = cfg.basis.as_deref().unwrap_or(default);
    match name {
        "haar1d" => Ok(MultiscaleBasis::haar1d()),
        "haar2d" => Ok(MultiscaleBasis::haar_tensor(2)?),
        "haar3d" => Ok(MultiscaleBasis::haar_tensor(3)?),
        "triangle" => Ok(MultiscaleBasis::triangle()),
        other => Err(HarnessError::Config(format!("unknown basis '{other}'"))),
    }
}

pub(crate) fn require_basis(cfg: &ExperimentConfig, allowed: &[&str]) -> HarnessResult<()> {
    match cfg.basis.as_deref() {
        Some(b) if !allowed.contains(&b) => Err(HarnessError::Config(format!(
            "{} supports the bases {allowed:?}, not '{b}'",
            cfg.experiment
        ))),
        _ => Ok(()),
    }
}

pub(crate) fn require_system(cfg: &ExperimentConfig, allowed: impl Fn(&str) -> bool, what: &str) -> HarnessResult<()> {
    match cfg.system.as_deref() {
        Some(s) if !allowed(s) => Err(HarnessError::Config(format!("{} needs {what}, got '{s}'", cfg.experiment))),
        _ => Ok(()),
    }
}
