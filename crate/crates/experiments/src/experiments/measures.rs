use super::require_system;
use crate::config::ExperimentConfig;
use crate::error::HarnessResult;
use koopman_core::measures::{dual_project_spectral, probability_project, wasserstein1, DiscreteMeasure};
use koopman_core::quadrature::composite_gauss5;
use koopman_core::report::ConvergenceReport;
use koopman_core::rng::trial_rng;
use koopman_core::spectral::fourier_eigensystem;
use koopman_core::transfer::{pf_pushforward_measure, system_registry};
use rand::Rng;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

/// Columns: value, expected, abs_err.
pub(super) fn not_pm_counterexample(cfg: &ExperimentConfig) -> HarnessResult<ConvergenceReport> {
    let tol = cfg.tolerance("value", 1e-10);
    let system = Arc::new(fourier_eigensystem(1)?);
    let nu = DiscreteMeasure::with_density(|_| 1.0 / PI, (PI, 2.0 * PI));
    let value = dual_project_spectral(&nu, system, 2)?.measure_of_interval(0.0, PI)?;
    let expected = -4.0 / (PI * PI);
    let mut report = ConvergenceReport::new("not-pm-counterexample", &["value", "expected", "abs_err"]);
    report.push(vec![value, expected, (value - expected).abs()]);
    report.check(
        &format!("projected mass of [0, pi] within {tol:e} of -4/pi^2"),
        (value - expected).abs() <= tol,
        format!("{value:.16e}"),
    );
    report.check("projection is not a probability measure", value < 0.0, format!("negative mass {value:.6}"));
    report.notes.push("not a probability measure: the projection assigns negative mass to [0, pi]".into());
    Ok(report)
}

/// Columns: k, atoms, w1_step, ratio, where w1_step is the distance between
/// the (k+1)-th and k-th iterates and ratio divides it by the previous step.
pub(super) fn ifs_contraction(cfg: &ExperimentConfig) -> HarnessResult<ConvergenceReport> {
    require_system(cfg, |s| s == "sierpinski", "the sierpinski system")?;
    let sys = system_registry("sierpinski")?;
    let ks = cfg.levels_or(2, 8);
    let bound = cfg.tolerance("ratio", 0.55);
    let merge = cfg.tolerance("consolidate", 1e-12);
    let last = *ks.end() as usize + 1;
    let mut iterates = vec![DiscreteMeasure::dirac(&[0.0, 0.0])];
    for _ in 0..last {
        let next = pf_pushforward_measure(&sys, iterates.last().unwrap())?.consolidate(merge);
        iterates.push(next);
    }
    let first = (*ks.start()).max(1) as usize;
    let steps: Vec<f64> = (first - 1..=last - 1)
        .map(|k| wasserstein1(&iterates[k + 1], &iterates[k]))
        .collect::<Result<_, _>>()?;
    let mut report = ConvergenceReport::new("ifs-contraction", &["k", "atoms", "w1_step", "ratio"]);
    for k in ks.clone() {
        let k = k as usize;
        if k < first {
            continue;
        }
        let step = steps[k - first + 1];
        let ratio = step / steps[k - first];
        report.push(vec![k as f64, iterates[k + 1].len() as f64, step, ratio]);
    }
    let worst = report.column("ratio").unwrap().into_iter().fold(0.0, f64::max);
    report.check(
        &format!("every step ratio at most {bound}"),
        worst <= bound,
        format!("largest ratio {worst:.12}, declared contraction {}", sys.contraction_factor().unwrap_or(f64::NAN)),
    );
    Ok(report)
}

/// Columns: case, min_value, mass_drift, fourier_min.
pub(super) fn probability_preservation(cfg: &ExperimentConfig) -> HarnessResult<ConvergenceReport> {
    let cases = cfg.trials_or(100);
    let level = *cfg.levels_or(5, 5).end();
    let drift_tol = cfg.tolerance("mass_drift", 1e-10);
    let fourier_k = 3usize;
    let system = Arc::new(fourier_eigensystem(fourier_k)?);
    let rows: Vec<HarnessResult<Vec<f64>>> = (0..cases)
        .into_par_iter()
        .map(|case| {
            let mut rng = trial_rng(cfg.seed, case as u64);
            let floor = rng.gen_range(0.01..0.5);
            let amp = rng.gen_range(0.5..3.0);
            let centre = rng.gen_range(0.1..0.9);
            let width = rng.gen_range(0.02..0.3);
            let tilt = rng.gen_range(0.0..2.0);
            let raw = move |x: f64| floor + amp * (-((x - centre) / width).powi(2)).exp();
            let mu = move |x: f64| 1.0 + tilt * x;
            let z = composite_gauss5(|x| raw(x) * mu(x), 0.0, 1.0, 1 << (level + 8));
            let h = move |x: f64| raw(x) / z;
            let p = probability_project(h, mu, level, level + 8)?;
            let min_value = p.values.iter().copied().fold(f64::INFINITY, f64::min);
            let drift = (p.total_mass() - 1.0).abs();
            // the same law carried to the circle, expanded in 1, cos, sin up to fourier_k
            let g = move |t: f64| h(t / (2.0 * PI)) * mu(t / (2.0 * PI)) / (2.0 * PI);
            let nu = DiscreteMeasure::with_density(g, (0.0, 2.0 * PI));
            let dual = dual_project_spectral(&nu, system.clone(), 2 * fourier_k)?;
            let mut fourier_min = f64::INFINITY;
            for i in 0..512 {
                let t = 2.0 * PI * (i as f64 + 0.5) / 512.0;
                fourier_min = fourier_min.min(1.0 / (2.0 * PI) + dual.density_at(&[t])?);
            }
            Ok(vec![case as f64, min_value, drift, fourier_min])
        })
        .collect();
    let mut report =
        ConvergenceReport::new("probability-preservation", &["case", "min_value", "mass_drift", "fourier_min"]);
    for r in rows {
        report.push(r?);
    }
    let min_value = report.column("min_value").unwrap().into_iter().fold(f64::INFINITY, f64::min);
    let drift = report.column("mass_drift").unwrap().into_iter().fold(0.0, f64::max);
    let negatives = report.column("fourier_min").unwrap().iter().filter(|v| **v < 0.0).count();
    report.check("cell-average projection is nonnegative", min_value >= 0.0, format!("smallest value {min_value:.3e}"));
    report.check(
        &format!("mass drift at most {drift_tol:e}"),
        drift <= drift_tol,
        format!("largest drift {drift:.3e}"),
    );
    report.check(
        "Fourier projection turns negative in at least one case",
        negatives > 0,
        format!("{negatives} of {cases} cases negative"),
    );
    report.notes.push(format!("level {level}; Fourier contrast keeps frequencies up to {fourier_k}"));
    Ok(report)
}
