//! Eigen-expansions: the Fourier system of the periodic heat problem,
//! Nystrom eigensystems of kernel integral operators, spectral seminorms and
//! operators that are diagonal or dense in an eigenbasis.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

pub type Kernel = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenSource {
    AnalyticFourier,
    Nystrom,
}

#[derive(Clone)]
enum Functions {
    /// Index 2(k-1) is cos(kx)/sqrt(pi), index 2(k-1)+1 is sin(kx)/sqrt(pi).
    Fourier,
    Nystrom { kernel: Kernel, nodes: Vec<f64>, weights: Vec<f64>, values: DMatrix<f64> },
}

/// Eigenvalues in nonincreasing order with their orthonormal eigenfunctions.
#[derive(Clone)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    functions: Functions,
}

impl fmt::Debug for EigenSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EigenSystem")
            .field("source", &self.source())
            .field("eigenvalues", &self.eigenvalues)
            .finish()
    }
}

/// Fourier system on the circle [0, 2pi) with Lebesgue measure: pairs
/// cos(kx)/sqrt(pi), sin(kx)/sqrt(pi) for k = 1..=k_max, eigenvalue 1/k^2.
/// Constants are left out.
pub fn fourier_eigensystem(k_max: usize) -> Result<EigenSystem> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let eigenvalues = (1..=k_max).flat_map(|k| [1.0 / (k * k) as f64; 2]).collect();
    Ok(EigenSystem { eigenvalues, functions: Functions::Fourier })
}

/// Top `count` eigenpairs of the integral operator with kernel `kernel`,
/// discretized on `nodes` with quadrature `weights`. The weights enter as
/// sqrt(w_i) K(x_i, x_j) sqrt(w_j) so the discrete problem stays symmetric.
pub fn nystrom_eigensystem(
    kernel: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    nodes: &[f64],
    weights: &[f64],
    count: usize,
) -> Result<EigenSystem> {
    let n = nodes.len();
    if weights.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: weights.len() });
    }
    if count == 0 || count > n {
        return Err(Error::InvalidArgument(format!("count {count} not in 1..={n}")));
    }
    if weights.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::InvalidArgument("quadrature weights must be positive".into()));
    }
    let sw: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let raw = DMatrix::from_fn(n, n, |i, j| kernel(nodes[i], nodes[j]));
    let scale = raw.amax().max(f64::MIN_POSITIVE);
    let asym = (0..n)
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .map(|(i, j)| (raw[(i, j)] - raw[(j, i)]).abs())
        .fold(0.0, f64::max);
    if asym > 1e-10 * scale {
        return Err(Error::AsymmetricKernel(asym));
    }
    let a = DMatrix::from_fn(n, n, |i, j| sw[i] * 0.5 * (raw[(i, j)] + raw[(j, i)]) * sw[j]);
    let eig = SymmetricEigen::try_new(a, 1e-14, 10_000).ok_or(Error::EigenSolveFailed)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    order.truncate(count);
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let values = DMatrix::from_fn(n, count, |r, c| eig.eigenvectors[(r, order[c])] / sw[r]);
    Ok(EigenSystem {
        eigenvalues,
        functions: Functions::Nystrom {
            kernel: Arc::new(kernel),
            nodes: nodes.to_vec(),
            weights: weights.to_vec(),
            values,
        },
    })
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn source(&self) -> EigenSource {
        match self.functions {
            Functions::Fourier => EigenSource::AnalyticFourier,
            Functions::Nystrom { .. } => EigenSource::Nystrom,
        }
    }

    /// Frequency and cos/sin flag of a Fourier index.
    pub fn fourier_mode(i: usize) -> (usize, bool) {
        (i / 2 + 1, i.is_multiple_of(2))
    }

    /// Value of eigenfunction `i` at `x`. Nystrom functions use the natural
    /// extension u(x) = (1/lambda) sum_j w_j K(x, x_j) u(x_j).
    pub fn eval(&self, i: usize, x: f64) -> f64 {
        match &self.functions {
            Functions::Fourier => {
                let (k, cos) = Self::fourier_mode(i);
                let t = k as f64 * x;
                (if cos { t.cos() } else { t.sin() }) / PI.sqrt()
            }
            Functions::Nystrom { kernel, nodes, weights, values } => {
                let lam = self.eigenvalues[i];
                let s: f64 = (0..nodes.len()).map(|j| weights[j] * kernel(x, nodes[j]) * values[(j, i)]).sum();
                s / lam
            }
        }
    }

    /// Values of every eigenfunction at `x`.
    pub fn eval_all(&self, x: f64) -> Vec<f64> {
        match &self.functions {
            Functions::Fourier => {
                let norm = 1.0 / PI.sqrt();
                let mut out = Vec::with_capacity(self.len());
                for k in 1..=self.len() / 2 {
                    let (s, c) = (k as f64 * x).sin_cos();
                    out.push(c * norm);
                    out.push(s * norm);
                }
                out
            }
            _ => (0..self.len()).map(|i| self.eval(i, x)).collect(),
        }
    }

    /// Integral of eigenfunction `i` over [a, b]; exact for the Fourier
    /// system, Gauss quadrature otherwise.
    pub fn integral(&self, i: usize, a: f64, b: f64) -> f64 {
        match &self.functions {
            Functions::Fourier => {
                let (k, cos) = Self::fourier_mode(i);
                let k = k as f64;
                let prim = |x: f64| if cos { (k * x).sin() / k } else { -(k * x).cos() / k };
                (prim(b) - prim(a)) / PI.sqrt()
            }
            _ => crate::quadrature::composite_gauss5(|x| self.eval(i, x), a, b, 64),
        }
    }

    /// Grid values of the Nystrom eigenvectors, normalized in the discrete
    /// weighted inner product.
    pub fn grid_values(&self) -> Option<(&[f64], &[f64], &DMatrix<f64>)> {
        match &self.functions {
            Functions::Nystrom { nodes, weights, values, .. } => Some((nodes, weights, values)),
            _ => None,
        }
    }
}

/// (sum_i lambda_i^{-r} c_i^2)^{1/2}.
pub fn spectral_seminorm(c: &[f64], lambda: &[f64], r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!("r must be nonnegative, got {r}")));
    }
    if c.len() > lambda.len() {
        return Err(Error::DimensionMismatch { expected: lambda.len(), found: c.len() });
    }
    let mut s = 0.0;
    for (i, (&ci, &li)) in c.iter().zip(lambda).enumerate() {
        if ci == 0.0 {
            continue;
        }
        if li <= 0.0 {
            if r == 0.0 {
                s += ci * ci;
                continue;
            }
            return Err(Error::ZeroEigenvalue(i));
        }
        s += li.powf(-r) * ci * ci;
    }
    Ok(s.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorCoefficients {
    Diagonal(Vec<f64>),
    /// Entry (m, n) maps the n-th input coefficient to the m-th output.
    Dense(DMatrix<f64>),
}

/// Operator expressed in the eigenbasis of `system`.
#[derive(Debug, Clone)]
pub struct SpectralOperator {
    pub system: Arc<EigenSystem>,
    pub coeffs: OperatorCoefficients,
    pub self_adjoint: bool,
}

impl SpectralOperator {
    pub fn diagonal(system: Arc<EigenSystem>, p: Vec<f64>) -> Result<Self> {
        if p.len() != system.len() {
            return Err(Error::DimensionMismatch { expected: system.len(), found: p.len() });
        }
        Ok(SpectralOperator { system, coeffs: OperatorCoefficients::Diagonal(p), self_adjoint: true })
    }

    /// Dense operator; it is flagged self-adjoint exactly when the matrix is
    /// symmetric to 1e-12 relative.
    pub fn dense(system: Arc<EigenSystem>, m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != system.len() || m.ncols() != system.len() {
            return Err(Error::DimensionMismatch { expected: system.len(), found: m.nrows().max(m.ncols()) });
        }
        let tol = 1e-12 * m.amax().max(f64::MIN_POSITIVE);
        let self_adjoint = (&m - m.transpose()).amax() <= tol;
        Ok(SpectralOperator { system, coeffs: OperatorCoefficients::Dense(m), self_adjoint })
    }

    pub fn len(&self) -> usize {
        self.system.len()
    }

    pub fn is_empty(&self) -> bool {
        self.system.is_empty()
    }

    pub fn dense_matrix(&self) -> DMatrix<f64> {
        match &self.coeffs {
            OperatorCoefficients::Diagonal(p) => DMatrix::from_diagonal(&DVector::from_column_slice(p)),
            OperatorCoefficients::Dense(m) => m.clone(),
        }
    }

    pub fn hilbert_schmidt_norm(&self) -> f64 {
        match &self.coeffs {
            OperatorCoefficients::Diagonal(p) => p.iter().map(|v| v * v).sum::<f64>().sqrt(),
            OperatorCoefficients::Dense(m) => m.norm(),
        }
    }

    /// Kernel sum_i p_i u_i(x) u_i(y) of a diagonal operator, or
    /// sum_{m,n} p_{m,n} u_m(x) u_n(y) of a dense one.
    pub fn kernel(&self, x: f64, y: f64) -> f64 {
        let ux = self.system.eval_all(x);
        let uy = self.system.eval_all(y);
        match &self.coeffs {
            OperatorCoefficients::Diagonal(p) => (0..p.len()).map(|i| p[i] * ux[i] * uy[i]).sum(),
            OperatorCoefficients::Dense(m) => {
                let mut s = 0.0;
                for a in 0..m.nrows() {
                    for b in 0..m.ncols() {
                        s += m[(a, b)] * ux[a] * uy[b];
                    }
                }
                s
            }
        }
    }

    /// Upper bound on sup |kernel|. For the Fourier system with equal weight
    /// on each cos/sin pair this is attained on the diagonal.
    pub fn kernel_sup_bound(&self) -> f64 {
        match (&self.coeffs, self.system.source()) {
            (OperatorCoefficients::Diagonal(p), EigenSource::AnalyticFourier) => {
                p.chunks(2).map(|c| c.iter().fold(0.0f64, |m, v| m.max(v.abs()))).sum::<f64>() / PI
            }
            _ => {
                let sup: Vec<f64> = match self.system.grid_values() {
                    Some((_, _, values)) => (0..self.len()).map(|i| values.column(i).amax().powi(2)).collect(),
                    None => vec![1.0 / PI; self.len()],
                };
                let m = self.dense_matrix();
                let mut s = 0.0;
                for a in 0..self.len() {
                    for b in 0..self.len() {
                        s += m[(a, b)].abs() * (sup[a] * sup[b]).sqrt();
                    }
                }
                s
            }
        }
    }
}

/// Heat-semigroup step on the circle: p_{k,i} = exp(-h k^2) on the Fourier
/// system with frequencies 1..=k_max.
pub fn heat_kernel_operator(h: f64, k_max: usize) -> Result<SpectralOperator> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step size must be positive, got {h}")));
    }
    let system = Arc::new(fourier_eigensystem(k_max)?);
    let p = (1..=k_max).flat_map(|k| [(-h * (k * k) as f64).exp(); 2]).collect();
    SpectralOperator::diagonal(system, p)
}

/// Keeps the eigen-indices i < n (the leading n x n block for dense form);
/// all other coefficients become zero.
pub fn truncate_spectral(op: &SpectralOperator, n: usize) -> Result<SpectralOperator> {
    if n == 0 {
        return Err(Error::InvalidArgument("truncation rank must be at least 1".into()));
    }
    let coeffs = match &op.coeffs {
        OperatorCoefficients::Diagonal(p) => {
            OperatorCoefficients::Diagonal(p.iter().enumerate().map(|(i, v)| if i < n { *v } else { 0.0 }).collect())
        }
        OperatorCoefficients::Dense(m) => {
            OperatorCoefficients::Dense(DMatrix::from_fn(m.nrows(), m.ncols(), |a, b| {
                if a < n && b < n {
                    m[(a, b)]
                } else {
                    0.0
                }
            }))
        }
    };
    Ok(SpectralOperator { system: op.system.clone(), coeffs, self_adjoint: op.self_adjoint })
}

/// Coefficients of op(f) from those of f; shorter inputs are zero-padded.
pub fn apply_spectral(op: &SpectralOperator, c: &[f64]) -> Result<Vec<f64>> {
    if c.len() > op.len() {
        return Err(Error::DimensionMismatch { expected: op.len(), found: c.len() });
    }
    Ok(match &op.coeffs {
        OperatorCoefficients::Diagonal(p) => (0..op.len()).map(|i| p[i] * c.get(i).copied().unwrap_or(0.0)).collect(),
        OperatorCoefficients::Dense(m) => (0..op.len())
            .map(|a| c.iter().enumerate().map(|(b, v)| m[(a, b)] * v).sum())
            .collect(),
    })
}

/// (sum_m (sum_n p_{m,n} lambda_n^{-r/2})^2)^{1/2}. For diagonal operators this
/// is (sum_i lambda_i^{-r} p_i^2)^{1/2}.
pub fn nonsa_seminorm(op: &SpectralOperator, lambda: &[f64], r: f64) -> Result<f64> {
    if lambda.len() < op.len() {
        return Err(Error::DimensionMismatch { expected: op.len(), found: lambda.len() });
    }
    let w = |n: usize| -> Result<f64> {
        if lambda[n] <= 0.0 {
            return Err(Error::ZeroEigenvalue(n));
        }
        Ok(lambda[n].powf(-r / 2.0))
    };
    let mut total = 0.0;
    match &op.coeffs {
        OperatorCoefficients::Diagonal(p) => {
            for (n, v) in p.iter().enumerate() {
                if *v != 0.0 {
                    total += (v * w(n)?).powi(2);
                }
            }
        }
        OperatorCoefficients::Dense(m) => {
            for a in 0..m.nrows() {
                let mut row = 0.0;
                for b in 0..m.ncols() {
                    if m[(a, b)] != 0.0 {
                        row += m[(a, b)] * w(b)?;
                    }
                }
                total += row * row;
            }
        }
    }
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_eigenvalues() {
        let s = fourier_eigensystem(2).unwrap();
        assert_eq!(s.eigenvalues(), &[1.0, 1.0, 0.25, 0.25]);
        assert!((s.eval(0, 0.0) - 1.0 / PI.sqrt()).abs() < 1e-15);
        assert_eq!(s.eval(1, 0.0), 0.0);
    }

    #[test]
    fn heat_coefficients() {
        let op = heat_kernel_operator(0.1, 3).unwrap();
        let OperatorCoefficients::Diagonal(p) = &op.coeffs else { panic!() };
        assert!((p[0] - 0.904_837_418_035_959_6).abs() < 1e-15);
        assert!((p[3] - 0.670_320_046_035_639_3).abs() < 1e-15);
        let tiny = heat_kernel_operator(1e-12, 3).unwrap();
        let OperatorCoefficients::Diagonal(p) = &tiny.coeffs else { panic!() };
        assert!(p.iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn seminorm_examples() {
        assert_eq!(spectral_seminorm(&[1.0], &[1.0], 3.0).unwrap(), 1.0);
        assert!((spectral_seminorm(&[0.0, 1.0], &[1.0, 0.25], 2.0).unwrap() - 4.0).abs() < 1e-14);
        assert!((spectral_seminorm(&[3.0, 4.0], &[1.0, 0.25], 0.0).unwrap() - 5.0).abs() < 1e-14);
        assert_eq!(spectral_seminorm(&[0.0, 1.0], &[1.0, 0.0], 1.0), Err(Error::ZeroEigenvalue(1)));
    }

    #[test]
    fn nonsa_examples() {
        let sys = Arc::new(fourier_eigensystem(1).unwrap());
        let ones = SpectralOperator::dense(sys.clone(), DMatrix::from_element(2, 2, 1.0)).unwrap();
        assert!((nonsa_seminorm(&ones, &[1.0, 0.25], 1.0).unwrap() - 18f64.sqrt()).abs() < 1e-14);
        let zero = SpectralOperator::dense(sys.clone(), DMatrix::zeros(2, 2)).unwrap();
        assert_eq!(nonsa_seminorm(&zero, &[1.0, 0.25], 1.0).unwrap(), 0.0);
        let diag = SpectralOperator::diagonal(sys.clone(), vec![0.5, 0.3]).unwrap();
        let want = (0.25f64 + 0.09 * 16.0).sqrt();
        assert!((nonsa_seminorm(&diag, &[1.0, 0.25], 2.0).unwrap() - want).abs() < 1e-14);
        let as_dense = SpectralOperator::dense(sys, diag.dense_matrix()).unwrap();
        assert!((nonsa_seminorm(&as_dense, &[1.0, 0.25], 2.0).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn apply_examples() {
        let sys = Arc::new(fourier_eigensystem(1).unwrap());
        let swap = SpectralOperator::dense(sys.clone(), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert!(swap.self_adjoint);
        assert_eq!(apply_spectral(&swap, &[1.0, 0.0]).unwrap(), vec![0.0, 1.0]);
        let id = SpectralOperator::diagonal(sys, vec![1.0, 1.0]).unwrap();
        assert_eq!(apply_spectral(&id, &[0.3, -2.0]).unwrap(), vec![0.3, -2.0]);
        assert!(apply_spectral(&id, &[1.0, 2.0, 3.0]).is_err());
        let heat = heat_kernel_operator(0.1, 2).unwrap();
        let out = apply_spectral(&heat, &[1.0]).unwrap();
        assert!((out[0] - (-0.1f64).exp()).abs() < 1e-15 && out[1..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn truncation_keeps_leading_indices() {
        let heat = heat_kernel_operator(0.1, 3).unwrap();
        let full = truncate_spectral(&heat, heat.len()).unwrap();
        assert_eq!(full.coeffs, heat.coeffs);
        let t = truncate_spectral(&heat, 2).unwrap();
        let f = [0.0, 0.0, 1.0];
        let a = apply_spectral(&heat, &f).unwrap();
        let b = apply_spectral(&t, &f).unwrap();
        let err: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        assert!((err - (-0.4f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn asymmetric_kernel_is_refused() {
        let nodes = [0.1, 0.5, 0.9];
        let r = nystrom_eigensystem(|x, y| x + 2.0 * y, &nodes, &[1.0 / 3.0; 3], 2);
        assert!(matches!(r, Err(Error::AsymmetricKernel(_))));
    }
}
