use super::{parse_basis, require_basis};
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, HarnessResult};
use koopman_core::basis::{fwt, project, projection_error, BasisIndex, NormKind, GUARD_MARGIN};
use koopman_core::report::{fit_rate, ConvergenceReport};
use koopman_core::warped::{CoordinateWarp, WarpedBasis};

/// Columns: j, l2_error, closed_form, rel_dev.
pub(super) fn haar_projection_rate(cfg: &ExperimentConfig) -> HarnessResult<ConvergenceReport> {
    require_basis(cfg, &["haar1d", "haar2d", "haar3d"])?;
    let basis = parse_basis(cfg, "haar1d")?;
    let levels = cfg.levels_or(2, 8);
    let d = basis.dim() as u32;
    if d * (levels.end() + GUARD_MARGIN) > 26 {
        return Err(HarnessError::Config("reference grid too large; lower the level range".into()));
    }
    let slope_tol = cfg.tolerance("slope", 0.05);
    let rel_tol = cfg.tolerance("closed_form", 0.01);
    let mut report = ConvergenceReport::new("haar-projection-rate", &["j", "l2_error", "closed_form", "rel_dev"]);
    let f = |x: &[f64]| x[0];
    for j in levels {
        let err = projection_error(f, &basis, j, NormKind::L2, j + GUARD_MARGIN)?;
        // a linear function loses h^2/12 of squared mass per unit length
        let exact = 2f64.powi(-(j as i32)) / 12f64.sqrt();
        report.push(vec![j as f64, err, exact, (err - exact).abs() / exact]);
    }
    let rows: Vec<(f64, f64)> = report.rows.iter().map(|r| (r[0], r[1])).collect();
    let fit = fit_rate(&rows)?;
    report.fit = Some(fit);
    report.check(
        &format!("fitted slope within {slope_tol} of -1"),
        (fit.slope + 1.0).abs() <= slope_tol,
        format!("slope {:.6} +- {:.2e}", fit.slope, fit.half_width),
    );
    let worst = report.column("rel_dev").unwrap().into_iter().fold(0.0, f64::max);
    report.check(
        &format!("every level within {rel_tol} relative of 2^-j/sqrt(12)"),
        worst <= rel_tol,
        format!("largest relative deviation {worst:.3e}"),
    );
    Ok(report)
}

/// Columns: level, translate, warped, reference, abs_err. The coarse
/// function is listed at level -1.
pub(super) fn warped_factorization(cfg: &ExperimentConfig) -> HarnessResult<ConvergenceReport> {
    require_basis(cfg, &["haar1d"])?;
    let levels = cfg.levels_or(0, 4);
    let top = *levels.end();
    let tol = cfg.tolerance("coefficient", 1e-8);
    let system = cfg.system_or("x_alpha(0.5)");
    let alpha = system
        .strip_prefix("x_alpha(")
        .and_then(|r| r.strip_suffix(')'))
        .and_then(|a| a.trim().parse::<f64>().ok())
        .ok_or_else(|| HarnessError::Config(format!("warped-factorization needs an x_alpha(a) system, got '{system}'")))?;
    let warp = CoordinateWarp::power(alpha)?;
    let wb = WarpedBasis::new(koopman_core::basis::MultiscaleBasis::haar1d(), warp.clone())?;
    let f = |t: f64| (3.0 * t).cos() + t * t;
    // reference: plain Haar coefficients of f o w from a fine midpoint projection
    let fw = |x: &[f64]| f(warp.inverse(x[0]));
    let quad = 22u32.max(top + 1 + GUARD_MARGIN);
    let reference = fwt(&project(fw, &wb.base, top + 1, quad)?, &wb.base)?;
    let mut report =
        ConvergenceReport::new("warped-factorization", &["level", "translate", "warped", "reference", "abs_err"]);
    let mut indices = vec![BasisIndex::coarse(1)];
    for j in levels {
        indices.extend((0..1i64 << j).map(|k| BasisIndex::wavelet(j as i32, &[k])));
    }
    let pairing_quad = koopman_core::warped::MIN_WARPED_QUADRATURE.max(top + 2);
    for idx in &indices {
        let got = wb.pairing(f, idx, pairing_quad)?;
        let want = reference.get(idx);
        report.push(vec![idx.level as f64, idx.translate[0] as f64, got, want, (got - want).abs()]);
    }
    let worst = report.column("abs_err").unwrap().into_iter().fold(0.0, f64::max);
    report.check(
        &format!("every coefficient within {tol:e}"),
        worst <= tol,
        format!("{} coefficients, largest gap {worst:.3e}", indices.len()),
    );
    report.notes.push(format!("warp x -> x^{alpha}, f(t) = cos(3t) + t^2"));
    Ok(report)
}
