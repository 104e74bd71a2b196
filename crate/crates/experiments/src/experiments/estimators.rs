use super::require_system;
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, HarnessResult};
use koopman_core::edmd::{
    aligned_schedule, default_rule, edmd_apply, equilibrated_sweep, erm_estimate, fit_edmd, piecewise_constant_matrix,
    Dictionary,
};
use koopman_core::report::{fit_rate, ConvergenceReport};
use koopman_core::rng::trial_rng;
use koopman_core::sampling::{effective_samples as effective, SampleSet};
use koopman_core::transfer::system_registry;
use rand::Rng;
use rayon::prelude::*;

/// Columns: j, sets, max_apply_gap, max_matrix_gap.
pub(super) fn edmd_erm_equivalence(cfg: &ExperimentConfig) -> HarnessResult<ConvergenceReport> {
    let sets = cfg.trials_or(200);
    let levels: Vec<u32> = cfg.levels_or(0, 4).collect();
    let max_m = *cfg.samples_or(&[64]).iter().max().unwrap();
    let tol = cfg.tolerance("agreement", 1e-10);
    // per sample set: the two gaps for every level
    let gaps: Vec<HarnessResult<Vec<(f64, f64)>>> = (0..sets)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t as u64);
            let m = rng.gen_range(1..=max_m);
            let pairs: Vec<(f64, f64)> = (0..m).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
            let z = SampleSet::from_pairs(&pairs);
            levels
                .iter()
                .map(|&j| {
                    let dict = Dictionary::indicators(j);
                    let n = dict.len();
                    let model = fit_edmd(&dict, &z)?;
                    let matrix_gap = (&model.koopman - piecewise_constant_matrix(&z, j)).abs().max();
                    // one point per cell edge and centre, plus the sample starts
                    let mut points: Vec<f64> =
                        (0..2 * n + 1).map(|i| i as f64 / (2 * n) as f64).collect();
                    points.extend(&z.xs);
                    let mut apply_gap: f64 = 0.0;
                    for i in 0..n {
                        let mut c = vec![0.0; n];
                        c[i] = 1.0;
                        let f = |y: f64| if dict.cell_of(y) == Some(i) { 1.0 } else { 0.0 };
                        let erm = erm_estimate(&z, f, j);
                        for &x in &points {
                            apply_gap = apply_gap.max((edmd_apply(&model, &dict, &c, x)? - erm.eval(x)).abs());
                        }
                    }
                    Ok((apply_gap, matrix_gap))
                })
                .collect()
        })
        .collect();
    let gaps: Vec<Vec<(f64, f64)>> = gaps.into_iter().collect::<HarnessResult<_>>()?;
    let mut report = ConvergenceReport::new("edmd-erm-equivalence", &["j", "sets", "max_apply_gap", "max_matrix_gap"]);
    for (li, j) in levels.iter().enumerate() {
        let apply = gaps.iter().map(|g| g[li].0).fold(0.0, f64::max);
        let matrix = gaps.iter().map(|g| g[li].1).fold(0.0, f64::max);
        report.push(vec![*j as f64, sets as f64, apply, matrix]);
    }
    let apply = report.column("max_apply_gap").unwrap().into_iter().fold(0.0, f64::max);
    let matrix = report.column("max_matrix_gap").unwrap().into_iter().fold(0.0, f64::max);
    report.check(&format!("EDMD and ERM agree pointwise within {tol:e}"), apply <= tol, format!("largest gap {apply:.3e}"));
    report.check(
        &format!("pseudoinverse matrix matches the closed form within {tol:e}"),
        matrix <= tol,
        format!("largest entry gap {matrix:.3e}"),
    );
    report.notes.push(format!("sample sets of 1..={max_m} uniform pairs on [0, 1]; dictionaries are cell indicators"));
    Ok(report)
}

/// Columns: m, e, ratio. Rows list powers of ten; the e(m) <= m rule is
/// checked for every m in 1..=max.
pub(super) fn effective_samples(cfg: &ExperimentConfig) -> HarnessResult<ConvergenceReport> {
    let b = cfg.tolerance("b", 8.0);
    let c = cfg.tolerance("c", 1.0);
    let max_m = *cfg.samples_or(&[100_000]).iter().max().unwrap() as u64;
    let mut report = ConvergenceReport::new("effective-samples", &["m", "e", "ratio"]);
    let mut m = 1u64;
    while m <= max_m {
        let e = effective(m, b, c)?;
        report.push(vec![m as f64, e as f64, e as f64 / m as f64]);
        m *= 10;
    }
    let violations = (1..=max_m)
        .into_par_iter()
        .map(|m| effective(m, b, c).map(|e| (e > m) as u64))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    report.check(
        &format!("e(m) <= m for every m in 1..={max_m}"),
        violations == 0,
        format!("{violations} violations"),
    );
    if b == 8.0 && c == 1.0 && max_m >= 1000 {
        let e = effective(1000, b, c)?;
        report.check("e(1000) = 31 for b = 8, c = 1", e == 31, format!("e(1000) = {e}"));
    }
    Ok(report)
}

/// Columns: m, j, mean_err2, median_err2, std_err2, control, with control =
/// log2(m / ln m). The fit regresses log2 of the median on the control.
pub(super) fn equilibrated_edmd(cfg: &ExperimentConfig) -> HarnessResult<ConvergenceReport> {
    require_system(cfg, |s| s.starts_with("x_alpha("), "an x_alpha(a) system")?;
    let sys = system_registry(&cfg.system_or("x_alpha(2)"))?;
    let smooth = 1.0;
    let target = -2.0 * smooth / (2.0 * smooth + 1.0);
    let slope_tol = cfg.tolerance("slope", 0.15);
    let rule = default_rule(smooth);
    let ms = match &cfg.samples {
        Some(ms) => ms.clone(),
        None => aligned_schedule(&rule, cfg.levels_or(2, 6)),
    };
    if ms.len() < koopman_core::report::MIN_FIT_ROWS {
        return Err(HarnessError::Config("equilibrated-edmd needs at least four sample counts".into()));
    }
    let mut report = equilibrated_sweep(&sys, |y| y, &ms, &rule, cfg.trials_or(16), cfg.seed, 16)?;
    let rows: Vec<(f64, f64)> = report.rows.iter().map(|r| (r[5], r[3])).collect();
    let fit = fit_rate(&rows)?;
    report.fit = Some(fit);
    let median = report.column("median_err2").unwrap();
    report.check(
        "median error strictly decreasing in m",
        median.windows(2).all(|w| w[1] < w[0]),
        format!("{median:?}"),
    );
    let span = ms.iter().max().unwrap() / ms.iter().min().unwrap();
    report.check("sample counts span at least a decade", span >= 10, format!("max / min = {span}"));
    report.check(
        &format!("slope within {slope_tol} of {target:.4}"),
        (fit.slope - target).abs() <= slope_tol,
        format!("slope {:.6} +- {:.2e}", fit.slope, fit.half_width),
    );
    report.notes.push(
        "f(x) = x, starts uniform on [0, 1]; squared L2 error against a 2^16-point oracle; level j(m) = floor(log2((m / ln m)^(1/3)))"
            .into(),
    );
    Ok(report)
}
