//! Sample-based operator estimators, the accuracy-confidence function and
//! Monte Carlo checks of their deviation probabilities.

use crate::error::{Error, Result};
use crate::report::ConvergenceReport;
use crate::rng::{mix64, trial_rng, TrialRng};
use crate::spectral::SpectralOperator;
use crate::transfer::DynamicalSystem;
use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    /// Independent starts x_i from the initial law, y_i one step from x_i.
    IidInitial,
    /// One trajectory: x_{i+1} = y_i.
    SamplePath,
}

/// Input-output pairs; coordinates are stored row-major with stride `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub dim: usize,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub mode: SamplingMode,
    pub seed: u64,
}

impl SampleSet {
    /// Builds a 1-D sample set from explicit pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        SampleSet {
            dim: 1,
            xs: pairs.iter().map(|p| p.0).collect(),
            ys: pairs.iter().map(|p| p.1).collect(),
            mode: SamplingMode::IidInitial,
            seed: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.xs.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn x(&self, i: usize) -> &[f64] {
        &self.xs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn y(&self, i: usize) -> &[f64] {
        &self.ys[i * self.dim..(i + 1) * self.dim]
    }
}

/// Draws `m` pairs. `initial` samples the starting law (the start of the
/// trajectory in path mode). The result depends only on (system, mode,
/// initial, m, seed).
pub fn draw_samples<I>(sys: &DynamicalSystem, mode: SamplingMode, initial: I, m: usize, seed: u64) -> Result<SampleSet>
where
    I: Fn(&mut TrialRng) -> Vec<f64>,
{
    let mut rng = trial_rng(seed, 0);
    let dim = sys.dim();
    let mut xs = Vec::with_capacity(m * dim);
    let mut ys = Vec::with_capacity(m * dim);
    let mut x = initial(&mut rng);
    for _ in 0..m {
        if mode == SamplingMode::IidInitial && !xs.is_empty() {
            x = initial(&mut rng);
        }
        let y = sys.step(&x, &mut rng)?;
        xs.extend_from_slice(&x);
        ys.extend_from_slice(&y);
        x = y;
    }
    Ok(SampleSet { dim, xs, ys, mode, seed })
}

/// Empirical coefficients (|omega| / m) sum_i u_a(x_i) f(x_i) for a < `modes`.
pub fn empirical_coefficients<F: Fn(f64) -> f64>(
    op: &SpectralOperator,
    modes: usize,
    xs: &[f64],
    f: F,
    omega: f64,
) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return Err(Error::EmptySamples);
    }
    if modes > op.len() {
        return Err(Error::DimensionMismatch { expected: op.len(), found: modes });
    }
    let mut c = vec![0.0; modes];
    for &x in xs {
        let fx = f(x);
        let u = op.system.eval_all(x);
        for a in 0..modes {
            c[a] += u[a] * fx;
        }
    }
    let scale = omega / xs.len() as f64;
    c.iter_mut().for_each(|v| *v *= scale);
    Ok(c)
}

/// (|omega| / m) sum_i p_n(x, x_i) f(x_i), with p_n the kernel of `op`
/// truncated to its first `modes` eigenfunctions and x_i the sample starts.
pub fn sample_operator_apply<F: Fn(f64) -> f64>(
    op: &SpectralOperator,
    modes: usize,
    z: &SampleSet,
    f: F,
    x: f64,
    omega: f64,
) -> Result<f64> {
    if z.dim != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: z.dim });
    }
    let est = empirical_coefficients(op, modes, &z.xs, f, omega)?;
    let p = op.dense_matrix();
    let u = op.system.eval_all(x);
    let mut s = 0.0;
    for a in 0..modes {
        for b in 0..modes {
            s += p[(a, b)] * u[a] * est[b];
        }
    }
    Ok(s)
}

/// Constants of the accuracy-confidence function for a kernel bounded by
/// `pbar`: alpha = 4 sqrt(ln 2) pbar, beta = 1 / (16 pbar^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyConfidence {
    pub pbar: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl AccuracyConfidence {
    pub fn new(pbar: f64) -> Result<Self> {
        if !(pbar > 0.0) {
            return Err(Error::InvalidArgument(format!("kernel bound must be positive, got {pbar}")));
        }
        Ok(AccuracyConfidence { pbar, alpha: 4.0 * 2f64.ln().sqrt() * pbar, beta: 1.0 / (16.0 * pbar * pbar) })
    }

    pub fn for_operator(op: &SpectralOperator) -> Result<Self> {
        Self::new(op.kernel_sup_bound())
    }

    /// alpha sqrt(j / m): below it the bound is vacuous.
    pub fn threshold(&self, j: usize, m: usize) -> f64 {
        self.alpha * (j as f64 / m as f64).sqrt()
    }

    /// Epsilon at which the bound equals `level` (for level <= 1).
    pub fn epsilon_at(&self, level: f64, j: usize, m: usize) -> f64 {
        ((2.0 / level).ln() * j as f64 / (self.beta * m as f64)).sqrt()
    }
}

/// 1 when eps <= alpha sqrt(j/m), else 2 exp(-beta m eps^2 / j).
pub fn accuracy_confidence(ac: &AccuracyConfidence, eps: f64, j: usize, m: usize) -> f64 {
    if eps <= ac.threshold(j, m) {
        1.0
    } else {
        (2.0 * (-ac.beta * m as f64 * eps * eps / j as f64).exp()).min(1.0)
    }
}

/// Hilbert-Schmidt deviation between the truncated operator and its sample
/// version, both restricted to the first `modes` eigenfunctions, for each
/// trial. Samples are uniform on [lo, hi). Trials run in parallel and the
/// result is in trial order.
pub fn hs_deviations(
    op: &SpectralOperator,
    modes: usize,
    m: usize,
    trials: usize,
    seed: u64,
    omega: (f64, f64),
) -> Result<Vec<f64>> {
    if modes == 0 || modes > op.len() {
        return Err(Error::DimensionMismatch { expected: op.len(), found: modes });
    }
    if m == 0 {
        return Err(Error::EmptySamples);
    }
    let p = op.dense_matrix().view((0, 0), (modes, modes)).into_owned();
    let (lo, hi) = omega;
    let scale = (hi - lo) / m as f64;
    Ok((0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let mut gram = DMatrix::<f64>::zeros(modes, modes);
            for _ in 0..m {
                let x = rng.gen_range(lo..hi);
                let u = op.system.eval_all(x);
                for a in 0..modes {
                    for b in a..modes {
                        gram[(a, b)] += u[a] * u[b];
                    }
                }
            }
            for a in 0..modes {
                for b in a..modes {
                    gram[(a, b)] *= scale;
                    gram[(b, a)] = gram[(a, b)];
                }
                gram[(a, a)] -= 1.0;
            }
            (&p * gram).norm()
        })
        .collect())
}

/// Fraction of trials whose deviation exceeds `eps`.
pub fn mc_bad_set_probability(
    op: &SpectralOperator,
    modes: usize,
    m: usize,
    eps: f64,
    trials: usize,
    seed: u64,
    omega: (f64, f64),
) -> Result<f64> {
    let devs = hs_deviations(op, modes, m, trials, seed, omega)?;
    Ok(devs.iter().filter(|d| **d > eps).count() as f64 / trials as f64)
}

/// e(m) = floor(m / ceil((8m/b)^{1/(c+1)})).
pub fn effective_samples(m: u64, b: f64, c: f64) -> Result<u64> {
    if m == 0 || !(b > 0.0) || !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("need m >= 1, b > 0, c > 0; got {m}, {b}, {c}")));
    }
    let x = 8.0 * m as f64 / b;
    let root = x.powf(1.0 / (c + 1.0));
    let mut k = root.ceil().max(1.0);
    // guard against a root that lands a rounding error above an integer
    if k > 1.0 && (k - 1.0).powf(c + 1.0) >= x * (1.0 - 1e-14) {
        k -= 1.0;
    }
    Ok(m / k as u64)
}

/// Monte Carlo mean of ||P f - P_{j,z} f||^2 for every frequency count j in
/// `js` (2j modes) and sample count m in `ms`. `f` is given by its
/// eigen-coefficients. Samples are uniform on `omega`; for fixed (m, trial)
/// all j share one sample set.
///
/// Columns: j, m, mean_err2, std_err, bias2, variance, envelope, where the
/// envelope is lambda_{2j}^r + j/m.
#[allow(clippy::too_many_arguments)]
pub fn expected_error_sweep(
    op: &SpectralOperator,
    f: &[f64],
    js: &[usize],
    ms: &[usize],
    trials: usize,
    seed: u64,
    r: f64,
    omega: (f64, f64),
) -> Result<ConvergenceReport> {
    let n = op.len();
    if f.len() > n {
        return Err(Error::DimensionMismatch { expected: n, found: f.len() });
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let jmax = *js.iter().max().ok_or_else(|| Error::InvalidArgument("empty level range".into()))?;
    if 2 * jmax > n {
        return Err(Error::DimensionMismatch { expected: n, found: 2 * jmax });
    }
    let mut c = f.to_vec();
    c.resize(n, 0.0);
    let p = op.dense_matrix();
    let target = &p * nalgebra::DVector::from_column_slice(&c);
    let eval_f = |x: f64| -> f64 { op.system.eval_all(x).iter().zip(&c).map(|(u, v)| u * v).sum() };
    let lambda = op.system.eigenvalues();
    let mut report =
        ConvergenceReport::new("expected-error-sweep", &["j", "m", "mean_err2", "std_err", "bias2", "variance", "envelope"]);
    for &m in ms {
        let stream = mix64(seed ^ (m as u64).wrapping_mul(0x9E37_79B9));
        let per_trial: Vec<Vec<f64>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(stream, t as u64);
                let xs: Vec<f64> = (0..m).map(|_| rng.gen_range(omega.0..omega.1)).collect();
                let est = empirical_coefficients(op, 2 * jmax, &xs, eval_f, omega.1 - omega.0).expect("m > 0");
                js.iter()
                    .map(|&j| {
                        let k = 2 * j;
                        (0..n)
                            .map(|a| {
                                let approx: f64 = if a < k { (0..k).map(|b| p[(a, b)] * est[b]).sum() } else { 0.0 };
                                (target[a] - approx).powi(2)
                            })
                            .sum()
                    })
                    .collect()
            })
            .collect();
        for (ji, &j) in js.iter().enumerate() {
            let errs: Vec<f64> = per_trial.iter().map(|row| row[ji]).collect();
            let mean = errs.iter().sum::<f64>() / trials as f64;
            let var = errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (trials.max(2) - 1) as f64;
            let k = 2 * j;
            let truncated: Vec<f64> = (0..n)
                .map(|a| if a < k { (0..k).map(|b| p[(a, b)] * c[b]).sum() } else { 0.0 })
                .collect();
            let bias2: f64 = (0..n).map(|a| (target[a] - truncated[a]).powi(2)).sum();
            let lam = lambda.get(k).copied().unwrap_or(0.0);
            report.push(vec![
                j as f64,
                m as f64,
                mean,
                (var / trials as f64).sqrt(),
                bias2,
                mean - bias2,
                lam.powf(r) + j as f64 / m as f64,
            ]);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::heat_kernel_operator;
    use crate::transfer::system_registry;
    use std::f64::consts::PI;

    #[test]
    fn ac_examples() {
        let ac = AccuracyConfidence::new(1.0).unwrap();
        assert!((accuracy_confidence(&ac, 1.0, 4, 100) - 2.0 * (-1.5625f64).exp()).abs() < 1e-15);
        assert!((accuracy_confidence(&ac, 1.0, 4, 100) - 0.419_222).abs() < 1e-6);
        let t = ac.threshold(4, 100);
        assert_eq!(accuracy_confidence(&ac, 0.5 * t, 4, 100), 1.0);
        assert!((2.0 * (-ac.beta * ac.alpha * ac.alpha).exp() - 1.0).abs() < 1e-14);
        let just_above = accuracy_confidence(&ac, t * (1.0 + 1e-12), 4, 100);
        assert!((just_above - 1.0).abs() < 1e-10);
    }

    #[test]
    fn effective_sample_examples() {
        assert_eq!(effective_samples(1000, 8.0, 1.0).unwrap(), 31);
        assert_eq!(effective_samples(1, 8.0, 1.0).unwrap(), 1);
        // 8m/b = 16 is a perfect square: ceil must not round up to 5
        assert_eq!(effective_samples(16, 8.0, 1.0).unwrap(), 4);
        assert!(effective_samples(0, 8.0, 1.0).is_err());
    }

    #[test]
    fn deterministic_draws() {
        let sys = system_registry("x_alpha(2)").unwrap();
        let init = |r: &mut TrialRng| vec![r.gen::<f64>()];
        let z = draw_samples(&sys, SamplingMode::IidInitial, init, 50, 9).unwrap();
        for i in 0..z.len() {
            assert_eq!(z.y(i)[0], z.x(i)[0].powi(2));
        }
        assert_eq!(z, draw_samples(&sys, SamplingMode::IidInitial, init, 50, 9).unwrap());
        let path = draw_samples(&sys, SamplingMode::SamplePath, |_| vec![0.9], 4, 1).unwrap();
        for i in 1..4 {
            assert_eq!(path.x(i), path.y(i - 1));
            assert_eq!(path.y(i)[0], path.x(i)[0].powi(2));
        }
        assert_eq!(path.x(0), &[0.9]);
    }

    #[test]
    fn single_sample_operator() {
        let op = heat_kernel_operator(0.1, 4).unwrap();
        let z = SampleSet::from_pairs(&[(1.0, 1.0)]);
        let f = |x: f64| x.sin() + 0.5;
        let got = sample_operator_apply(&op, 4, &z, f, 2.0, 2.0 * PI).unwrap();
        let kernel = crate::spectral::truncate_spectral(&op, 4).unwrap().kernel(2.0, 1.0);
        assert!((got - 2.0 * PI * kernel * f(1.0)).abs() < 1e-14);
        assert_eq!(sample_operator_apply(&op, 4, &z, |_| 0.0, 2.0, 2.0 * PI).unwrap(), 0.0);
        let empty = SampleSet::from_pairs(&[]);
        assert_eq!(sample_operator_apply(&op, 4, &empty, f, 2.0, 2.0 * PI), Err(Error::EmptySamples));
    }

    #[test]
    fn bad_set_extremes() {
        let op = heat_kernel_operator(0.1, 8).unwrap();
        let ac = AccuracyConfidence::for_operator(&op).unwrap();
        let omega = (0.0, 2.0 * PI);
        assert_eq!(mc_bad_set_probability(&op, 8, 50, 0.0, 100, 1, omega).unwrap(), 1.0);
        let huge = 2.0 * 4.0 * ac.pbar * 2.0 * PI;
        assert_eq!(mc_bad_set_probability(&op, 8, 50, huge, 100, 1, omega).unwrap(), 0.0);
    }
}
