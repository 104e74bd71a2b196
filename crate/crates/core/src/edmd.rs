//! Extended dynamic mode decomposition, its closed form on dyadic indicator
//! dictionaries, the partition-wise ERM estimator and the equilibrated sweep.

use crate::basis::{BasisIndex, CoefficientField, Family};
use crate::error::{Error, Result};
use crate::report::ConvergenceReport;
use crate::rng::{mix64, TrialRng};
use crate::sampling::{draw_samples, SampleSet, SamplingMode};
use crate::transfer::{koopman_apply, DynamicalSystem};
use nalgebra::DMatrix;
use rayon::prelude::*;
use std::fmt;
use std::sync::Arc;

pub type Observable = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Functions {
    /// 1 on the k-th of 2^level equal half-open cells of [lo, hi]; hi itself
    /// belongs to the last cell.
    Indicators { level: u32, lo: f64, hi: f64 },
    Custom(Vec<Observable>),
}

/// A finite family of scalar observables on an interval.
#[derive(Clone)]
pub struct Dictionary {
    functions: Functions,
}

impl fmt::Debug for Dictionary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.functions {
            Functions::Indicators { level, lo, hi } => write!(f, "Dictionary::Indicators({level} on [{lo}, {hi}])"),
            Functions::Custom(v) => write!(f, "Dictionary::Custom({} functions)", v.len()),
        }
    }
}

impl Dictionary {
    pub fn indicators(level: u32) -> Self {
        Self::indicators_on(level, 0.0, 1.0)
    }

    pub fn indicators_on(level: u32, lo: f64, hi: f64) -> Self {
        Dictionary { functions: Functions::Indicators { level, lo, hi } }
    }

    pub fn custom(functions: Vec<Observable>) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::InvalidArgument("dictionary needs at least one function".into()));
        }
        Ok(Dictionary { functions: Functions::Custom(functions) })
    }

    pub fn len(&self) -> usize {
        match &self.functions {
            Functions::Indicators { level, .. } => 1 << level,
            Functions::Custom(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Level of an indicator dictionary, `None` for custom ones.
    pub fn indicator_level(&self) -> Option<u32> {
        match self.functions {
            Functions::Indicators { level, .. } => Some(level),
            Functions::Custom(_) => None,
        }
    }

    /// Cell of `x` for indicator dictionaries.
    pub fn cell_of(&self, x: f64) -> Option<usize> {
        match self.functions {
            Functions::Indicators { level, lo, hi } => {
                if !(lo..=hi).contains(&x) {
                    return None;
                }
                let n = 1usize << level;
                Some((((x - lo) / (hi - lo) * n as f64) as usize).min(n - 1))
            }
            Functions::Custom(_) => None,
        }
    }

    pub fn eval(&self, x: f64) -> Vec<f64> {
        match &self.functions {
            Functions::Indicators { .. } => {
                let mut v = vec![0.0; self.len()];
                if let Some(k) = self.cell_of(x) {
                    v[k] = 1.0;
                }
                v
            }
            Functions::Custom(fs) => fs.iter().map(|f| f(x)).collect(),
        }
    }

    /// For indicator dictionaries, checks that the functions sum to one on
    /// `points` uniform grid points. Custom dictionaries pass trivially.
    pub fn check_partition(&self, points: usize) -> Result<()> {
        if let Functions::Indicators { lo, hi, .. } = self.functions {
            for i in 0..=points {
                let x = lo + (hi - lo) * i as f64 / points as f64;
                let s: f64 = self.eval(x).iter().sum();
                if s != 1.0 {
                    return Err(Error::InvalidArgument(format!("indicators sum to {s} at {x}")));
                }
            }
        }
        Ok(())
    }

    fn data_matrix(&self, pts: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.len(), pts.len());
        for (j, &x) in pts.iter().enumerate() {
            for (i, v) in self.eval(x).into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }
}

/// Dictionary evaluated on the sample inputs and outputs (n x m each) and the
/// fitted n x n matrix.
#[derive(Debug, Clone)]
pub struct EDMDModel {
    pub phi_x: DMatrix<f64>,
    pub phi_y: DMatrix<f64>,
    pub koopman: DMatrix<f64>,
}

impl EDMDModel {
    /// Frobenius norm of M Phi(X) Phi(X)^T - Phi(Y) Phi(X)^T.
    pub fn normal_residual(&self) -> f64 {
        let g = &self.phi_x * self.phi_x.transpose();
        let a = &self.phi_y * self.phi_x.transpose();
        (&self.koopman * g - a).norm()
    }
}

/// Relative eigenvalue cutoff on the Gram matrix Phi(X) Phi(X)^T, i.e. a
/// relative singular-value cutoff of 1e-6 on Phi(X).
pub const RANK_CUTOFF: f64 = 1e-12;

/// M = Phi(Y) Phi(X)^+ with Phi(X)^+ = Phi(X)^T G^+, where G^+ comes from a
/// symmetric eigendecomposition of the Gram matrix. nalgebra's SVD does not
/// reliably reconstruct the sparse 0/1 data matrices of indicator
/// dictionaries, so it is avoided here.
pub fn fit_edmd(dict: &Dictionary, z: &SampleSet) -> Result<EDMDModel> {
    if z.is_empty() {
        return Err(Error::EmptySamples);
    }
    if z.dim != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: z.dim });
    }
    let phi_x = dict.data_matrix(&z.xs);
    let phi_y = dict.data_matrix(&z.ys);
    let gram = &phi_x * phi_x.transpose();
    let eig = nalgebra::SymmetricEigen::try_new(gram, f64::EPSILON, 0).ok_or(Error::EigenSolveFailed)?;
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b));
    let inv = eig.eigenvalues.map(|l| if lmax > 0.0 && l > RANK_CUTOFF * lmax { 1.0 / l } else { 0.0 });
    let gram_pinv = &eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose();
    let koopman = &phi_y * phi_x.transpose() * gram_pinv;
    Ok(EDMDModel { phi_x, phi_y, koopman })
}

/// phi(x)^T M^T c.
pub fn edmd_apply(model: &EDMDModel, dict: &Dictionary, c: &[f64], x: f64) -> Result<f64> {
    let n = model.koopman.nrows();
    if c.len() != n || dict.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: if c.len() != n { c.len() } else { dict.len() } });
    }
    let phi = dict.eval(x);
    let mc = &model.koopman.transpose() * nalgebra::DVector::from_column_slice(c);
    Ok(phi.iter().zip(mc.iter()).map(|(a, b)| a * b).sum())
}

/// Values of a function that is constant on each of the 2^level cells of
/// [lo, hi].
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    pub level: u32,
    pub lo: f64,
    pub hi: f64,
    pub values: Vec<f64>,
}

impl PiecewiseConstant {
    pub fn eval(&self, x: f64) -> f64 {
        let dict = Dictionary::indicators_on(self.level, self.lo, self.hi);
        dict.cell_of(x).map_or(0.0, |k| self.values[k])
    }

    /// Coefficients against the orthonormal level-`level` Haar scaling
    /// functions, for the unit interval.
    pub fn to_field(&self) -> CoefficientField {
        let s = (-(self.level as f64) / 2.0).exp2();
        CoefficientField::from_entries(
            Family::Haar1d,
            self.values.iter().enumerate().map(|(k, v)| (BasisIndex::scaling(self.level as i32, &[k as i64]), v * s)),
        )
    }
}

fn cell_averages(dict: &Dictionary, xs: &[f64], labels: impl Iterator<Item = f64>) -> Vec<f64> {
    let n = dict.len();
    let mut sum = vec![0.0; n];
    let mut count = vec![0usize; n];
    for (&x, y) in xs.iter().zip(labels) {
        if let Some(k) = dict.cell_of(x) {
            sum[k] += y;
            count[k] += 1;
        }
    }
    sum.iter().zip(&count).map(|(s, &c)| if c == 0 { 0.0 } else { s / c as f64 }).collect()
}

/// Closed-form EDMD on level-`level` indicators of [0, 1] for the function
/// with cell values `c`: the average over x-samples in each cell of
/// c(cell of y), zero on cells without x-samples.
pub fn edmd_piecewise_constant(z: &SampleSet, level: u32, c: &[f64]) -> Result<PiecewiseConstant> {
    let dict = Dictionary::indicators(level);
    if c.len() != dict.len() {
        return Err(Error::DimensionMismatch { expected: dict.len(), found: c.len() });
    }
    let labels = z.ys.iter().map(|&y| dict.cell_of(y).map_or(0.0, |k| c[k]));
    Ok(PiecewiseConstant { level, lo: 0.0, hi: 1.0, values: cell_averages(&dict, &z.xs, labels) })
}

/// Closed-form EDMD matrix on level-`level` indicators of [0, 1]: entry
/// (i, k) is the fraction of samples starting in cell k that land in cell i,
/// and column k is zero when no sample starts there.
pub fn piecewise_constant_matrix(z: &SampleSet, level: u32) -> DMatrix<f64> {
    let dict = Dictionary::indicators(level);
    let n = dict.len();
    let mut m = DMatrix::zeros(n, n);
    let mut count = vec![0usize; n];
    for (&x, &y) in z.xs.iter().zip(&z.ys) {
        if let (Some(k), Some(i)) = (dict.cell_of(x), dict.cell_of(y)) {
            m[(i, k)] += 1.0;
            count[k] += 1;
        }
    }
    for (k, &c) in count.iter().enumerate() {
        if c > 0 {
            m.column_mut(k).scale_mut(1.0 / c as f64);
        }
    }
    m
}

/// Least-squares fit of labels f(y_l) by level-`level` piecewise constants in
/// x: per-cell averages, zero on empty cells.
pub fn erm_estimate<F: Fn(f64) -> f64>(z: &SampleSet, f: F, level: u32) -> PiecewiseConstant {
    let dict = Dictionary::indicators(level);
    let values = cell_averages(&dict, &z.xs, z.ys.iter().map(|&y| f(y)));
    PiecewiseConstant { level, lo: 0.0, hi: 1.0, values }
}

/// Default equilibration rule floor(log2((m / ln m)^{1/(2r+1)})), at least 0.
pub fn default_rule(r: f64) -> impl Fn(usize) -> u32 + Send + Sync {
    move |m: usize| {
        if m < 3 {
            return 0;
        }
        let m = m as f64;
        ((m / m.ln()).log2() / (2.0 * r + 1.0)).floor().max(0.0) as u32
    }
}

/// Smallest m at which `rule` reaches each level in `levels`; each entry is
/// the first m of a new level, so no two rows share a level.
pub fn aligned_schedule<R: Fn(usize) -> u32>(rule: R, levels: std::ops::RangeInclusive<u32>) -> Vec<usize> {
    let mut out = Vec::new();
    let mut m = 2usize;
    for j in levels {
        // exponential search then bisection on the monotone rule
        let mut hi = m.max(2);
        while rule(hi) < j {
            hi *= 2;
        }
        let mut lo = hi / 2;
        while lo + 1 < hi {
            let mid = (lo + hi) / 2;
            if rule(mid) >= j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(hi);
        m = hi;
    }
    out
}

/// Sweep of the ERM (equivalently indicator EDMD) estimator with the level
/// chosen by `rule(m)`. Starts are uniform on [0, 1]; the error is the squared
/// L2 distance to the Koopman image of `f`, evaluated on 2^`oracle_level`
/// midpoints.
///
/// Columns: m, j, mean_err2, median_err2, std_err2, control, where control is
/// log2(m / ln m).
pub fn equilibrated_sweep<F, R>(
    sys: &DynamicalSystem,
    f: F,
    ms: &[usize],
    rule: R,
    trials: usize,
    seed: u64,
    oracle_level: u32,
) -> Result<ConvergenceReport>
where
    F: Fn(f64) -> f64 + Sync,
    R: Fn(usize) -> u32,
{
    if ms.is_empty() || trials == 0 {
        return Err(Error::InvalidArgument("need a nonempty schedule and at least one trial".into()));
    }
    if sys.dim() != 1 {
        return Err(Error::UnsupportedSystem(sys.name.clone()));
    }
    let n = 1usize << oracle_level;
    let h = 1.0 / n as f64;
    let grid: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
    let target = grid.iter().map(|&x| koopman_apply(sys, |y| f(y[0]), &[x])).collect::<Result<Vec<f64>>>()?;
    let mut report = ConvergenceReport::new(
        "equilibrated-edmd",
        &["m", "j", "mean_err2", "median_err2", "std_err2", "control"],
    );
    for &m in ms {
        let j = rule(m);
        if j > oracle_level {
            return Err(Error::LevelTooDeep { level: j as i32, max: oracle_level as i32 });
        }
        let stream = mix64(seed ^ (m as u64).wrapping_mul(0xD134_2543_DE82_EF95));
        let mut errs: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|t| -> Result<f64> {
                let z = draw_samples(sys, SamplingMode::IidInitial, uniform_start, m, crate::rng::trial_seed(stream, t as u64))?;
                let g = erm_estimate(&z, &f, j);
                Ok(grid.iter().zip(&target).map(|(&x, &u)| (u - g.eval(x)).powi(2)).sum::<f64>() * h)
            })
            .collect::<Result<Vec<f64>>>()?;
        let mean = errs.iter().sum::<f64>() / trials as f64;
        let sd = (errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (trials.max(2) - 1) as f64).sqrt();
        errs.sort_by(f64::total_cmp);
        let median =
            if trials % 2 == 1 { errs[trials / 2] } else { 0.5 * (errs[trials / 2 - 1] + errs[trials / 2]) };
        let mf = m as f64;
        report.push(vec![mf, j as f64, mean, median, sd, (mf / mf.ln()).log2()]);
    }
    Ok(report)
}

fn uniform_start(rng: &mut TrialRng) -> Vec<f64> {
    use rand::Rng;
    vec![rng.gen::<f64>()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::system_registry;

    fn three() -> SampleSet {
        SampleSet::from_pairs(&[(0.1, 0.3), (0.2, 0.7), (0.8, 0.9)])
    }

    #[test]
    fn three_sample_instance() {
        let d = Dictionary::indicators(1);
        let model = fit_edmd(&d, &three()).unwrap();
        let g = &model.phi_x * model.phi_x.transpose();
        assert_eq!(g, DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]));
        let c = [0.0, 1.0];
        assert!((edmd_apply(&model, &d, &c, 0.25).unwrap() - 0.5).abs() < 1e-12);
        assert!((edmd_apply(&model, &d, &c, 0.75).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(edmd_apply(&model, &d, &[0.0, 0.0], 0.3).unwrap(), 0.0);
        assert_eq!(edmd_piecewise_constant(&three(), 1, &c).unwrap().values, vec![0.5, 1.0]);
        let f = |y: f64| if y >= 0.5 { 1.0 } else { 0.0 };
        assert_eq!(erm_estimate(&three(), f, 1).values, vec![0.5, 1.0]);
        assert!(model.normal_residual() < 1e-12);
    }

    #[test]
    fn single_sample_and_empty_cells() {
        let z = SampleSet::from_pairs(&[(0.1, 0.9)]);
        let model = fit_edmd(&Dictionary::indicators(2), &z).unwrap();
        let nonzero: Vec<f64> = model.koopman.iter().copied().filter(|v| *v != 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert!((nonzero[0] - 1.0).abs() < 1e-12);
        let p = edmd_piecewise_constant(&z, 2, &[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(p.values, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(fit_edmd(&Dictionary::indicators(1), &SampleSet::from_pairs(&[])).unwrap_err(), Error::EmptySamples);
    }

    #[test]
    fn identity_system_reproduces_dictionary() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (0.05 + 0.1 * i as f64, 0.05 + 0.1 * i as f64)).collect();
        let z = SampleSet::from_pairs(&pts);
        let fs: Vec<Observable> = vec![Arc::new(|_| 1.0), Arc::new(|x| x), Arc::new(|x| x * x)];
        let d = Dictionary::custom(fs).unwrap();
        let model = fit_edmd(&d, &z).unwrap();
        assert!((&model.koopman * &model.phi_x - &model.phi_x).norm() < 1e-10);
        let c = [0.5, -1.0, 2.0];
        let x = 0.35;
        assert!((edmd_apply(&model, &d, &c, x).unwrap() - (0.5 - x + 2.0 * x * x)).abs() < 1e-10);
    }

    #[test]
    fn indicator_partition() {
        assert!(Dictionary::indicators(3).check_partition(1000).is_ok());
        assert_eq!(Dictionary::indicators(3).cell_of(1.0), Some(7));
    }

    #[test]
    fn field_conversion() {
        let p = PiecewiseConstant { level: 1, lo: 0.0, hi: 1.0, values: vec![0.5, 1.0] };
        let field = p.to_field();
        let basis = crate::basis::MultiscaleBasis::haar1d();
        for x in [0.2, 0.7] {
            assert!((crate::basis::reconstruct(&field, &basis, &[x]).unwrap() - p.eval(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn rule_and_schedule() {
        let rule = default_rule(1.0);
        let ms = aligned_schedule(&rule, 2..=4);
        for (j, &m) in (2..=4).zip(&ms) {
            assert_eq!(rule(m), j);
            assert!(rule(m - 1) < j);
        }
    }

    #[test]
    fn exact_cells_converge() {
        // under the identity map a level-2 step function is its own image
        let sys = system_registry("identity").unwrap();
        let f = |y: f64| ((y * 4.0).floor().min(3.0)) + 1.0;
        let rep = equilibrated_sweep(&sys, f, &[200, 400], |_| 2, 4, 3, 10).unwrap();
        for e in rep.column("mean_err2").unwrap() {
            assert!(e < 1e-20);
        }
    }
}
