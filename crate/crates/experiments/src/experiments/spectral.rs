use super::require_system;
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, HarnessResult};
use koopman_core::report::ConvergenceReport;
use koopman_core::rng::trial_rng;
use koopman_core::sampling::{accuracy_confidence, expected_error_sweep, hs_deviations, AccuracyConfidence};
use koopman_core::spectral::{apply_spectral, spectral_seminorm, truncate_spectral, SpectralOperator};
use koopman_core::transfer::{system_registry, DynamicalSystem};
use rand::Rng;

fn heat(cfg: &ExperimentConfig) -> HarnessResult<(DynamicalSystem, SpectralOperator)> {
    require_system(cfg, |s| s.starts_with("heat("), "a heat(h) system")?;
    let sys = system_registry(&cfg.system_or("heat(0.1)"))?;
    let op = sys.spectral().cloned().ok_or_else(|| HarnessError::Config("system has no spectral form".into()))?;
    Ok((sys, op))
}

fn omega(sys: &DynamicalSystem) -> (f64, f64) {
    (sys.domain.lo[0], sys.domain.hi[0])
}

/// Columns: n, r, cases, violations, max_ratio, where n = 2^level functions
/// are kept and max_ratio is the largest error / bound.
pub(super) fn spectral_truncation(cfg: &ExperimentConfig) -> HarnessResult<ConvergenceReport> {
    let (_, op) = heat(cfg)?;
    let cases = cfg.trials_or(50);
    let lam = op.system.eigenvalues().to_vec();
    let len = op.len();
    let inputs: Vec<Vec<f64>> = (0..cases)
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t as u64);
            (0..len).map(|i| rng.gen_range(-1.0..1.0) / (i + 1) as f64).collect()
        })
        .collect();
    let mut report = ConvergenceReport::new("spectral-truncation", &["n", "r", "cases", "violations", "max_ratio"]);
    for level in cfg.levels_or(1, 4) {
        let n = 1usize << level;
        if n >= len {
            return Err(HarnessError::Config(format!("truncation {n} leaves nothing to discard ({len} functions)")));
        }
        let trunc = truncate_spectral(&op, n)?;
        for r in [1.0, 2.0] {
            let mut violations = 0;
            let mut max_ratio: f64 = 0.0;
            for c in &inputs {
                let full = apply_spectral(&op, c)?;
                let kept = apply_spectral(&trunc, c)?;
                let err = full.iter().zip(&kept).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                let bound = lam[n].powf(r / 2.0) * spectral_seminorm(&full, &lam, r)?;
                if err > bound {
                    violations += 1;
                }
                max_ratio = max_ratio.max(err / bound);
            }
            report.push(vec![n as f64, r, cases as f64, violations as f64, max_ratio]);
        }
    }
    let total: f64 = report.column("violations").unwrap().iter().sum();
    report.check("no input violates the truncation bound", total == 0.0, format!("{total} violations"));
    Ok(report)
}

/// Columns: m, eps, ac, empirical, sigma, threshold.
pub(super) fn ac_domination(cfg: &ExperimentConfig) -> HarnessResult<ConvergenceReport> {
    let (sys, op) = heat(cfg)?;
    let j = *cfg.levels_or(4, 4).end() as usize;
    let trials = cfg.trials_or(500);
    let ac = AccuracyConfidence::for_operator(&op)?;
    let multipliers = [1.1, 1.25, 1.5, 2.0, 3.0];
    let mut report = ConvergenceReport::new("ac-domination", &["m", "eps", "ac", "empirical", "sigma", "threshold"]);
    for m in cfg.samples_or(&[100, 400]) {
        let devs = hs_deviations(&op, 2 * j, m, trials, cfg.seed ^ m as u64, omega(&sys))?;
        let th = ac.threshold(j, m);
        for k in multipliers {
            let eps = k * th;
            let bound = accuracy_confidence(&ac, eps, j, m);
            let freq = devs.iter().filter(|d| **d > eps).count() as f64 / trials as f64;
            let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
            report.push(vec![m as f64, eps, bound, freq, sigma, th]);
        }
    }
    let worst = report
        .rows
        .iter()
        .map(|r| (r[3] - r[2] - 3.0 * r[4]) / r[2].max(f64::MIN_POSITIVE))
        .fold(f64::NEG_INFINITY, f64::max);
    let ok = report.rows.iter().all(|r| r[3] <= r[2] + 3.0 * r[4]);
    report.check(
        "empirical frequency never exceeds the bound by more than 3 binomial sigma",
        ok,
        format!("largest relative excess {worst:.3e}"),
    );
    report.notes.push(format!(
        "j = {j} ({} modes); pbar = {:.6}, alpha = {:.6}, beta = {:.6}",
        2 * j,
        ac.pbar,
        ac.alpha,
        ac.beta
    ));
    Ok(report)
}

/// Sample count and trial count of the large-m runs that estimate the bias
/// floor.
const FLOOR_SAMPLES: usize = 100_000;
const FLOOR_TRIALS: usize = 100;

/// Columns: j, m, mean_err2, std_err, bias2, variance, envelope. Rows with
/// m = 100000 are the bias-floor runs.
pub(super) fn bias_variance(cfg: &ExperimentConfig) -> HarnessResult<ConvergenceReport> {
    let (sys, op) = heat(cfg)?;
    let js: Vec<usize> = cfg.levels_or(1, 8).map(|j| j as usize).collect();
    if js.len() < 3 || js[0] == 0 {
        return Err(HarnessError::Config("bias-variance needs at least three levels starting at 1 or above".into()));
    }
    let trials = cfg.trials_or(500);
    let floor_tol = cfg.tolerance("bias_floor", 0.10);
    let mut f = vec![0.0; op.len()];
    f[0] = 1.0;
    f[2] = 0.5;
    f[4] = 0.25;
    let ms = cfg.samples_or(&[200]);
    let mut report = expected_error_sweep(&op, &f, &js, &ms, trials, cfg.seed, 1.0, omega(&sys))?;
    report.experiment = "bias-variance".into();
    for m in &ms {
        let errs: Vec<f64> = report.rows.iter().filter(|r| r[1] == *m as f64).map(|r| r[2]).collect();
        let (arg, _) = errs.iter().enumerate().fold((0, f64::INFINITY), |b, (i, e)| if *e < b.1 { (i, *e) } else { b });
        let interior = arg > 0 && arg + 1 < errs.len();
        let rising = errs[arg..].windows(2).all(|w| w[1] >= w[0]);
        report.check(
            &format!("m = {m}: minimum at an interior level"),
            interior,
            format!("minimum at j = {}", js[arg]),
        );
        report.check(&format!("m = {m}: error grows past the minimum"), rising, format!("{errs:?}"));
    }
    let floor_js: Vec<usize> = js.iter().copied().filter(|&j| j <= 2).collect();
    let floor = expected_error_sweep(&op, &f, &floor_js, &[FLOOR_SAMPLES], FLOOR_TRIALS, cfg.seed ^ 0xF1, 1.0, omega(&sys))?;
    let mut worst: f64 = 0.0;
    for r in floor.rows {
        worst = worst.max((r[2] - r[4]).abs() / r[4]);
        report.push(r);
    }
    report.check(
        &format!("large-m error within {floor_tol} of the bias floor"),
        worst <= floor_tol,
        format!("largest relative gap {worst:.3e} at m = {FLOOR_SAMPLES}"),
    );
    report.notes.push("f = (cos x + 0.5 cos 2x + 0.25 cos 3x) / sqrt(pi); j counts frequencies, so 2j modes are kept".into());
    Ok(report)
}
