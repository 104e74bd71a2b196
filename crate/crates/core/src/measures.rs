//! Signed and probability measures: point masses with an optional density
//! part, dual projections onto multiscale or spectral bases, the
//! positivity-preserving cell-average projection and W1 distances.

use crate::basis::{fwt, project, BasisIndex, CoefficientField, Family, MultiscaleBasis, GUARD_MARGIN};
use crate::error::{Error, Result};
use crate::quadrature::{composite_gauss5, gauss5};
use crate::spectral::EigenSystem;
use crate::transport;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// Absolutely continuous part on an interval of the real line.
#[derive(Clone)]
pub struct Density {
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub support: (f64, f64),
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Density(on [{}, {}])", self.support.0, self.support.1)
    }
}

impl Density {
    /// Integral of density times `g` over `[a, b]` intersected with the support.
    fn integrate_against<G: Fn(f64) -> f64>(&self, g: G, a: f64, b: f64, panels: usize) -> f64 {
        let lo = a.max(self.support.0);
        let hi = b.min(self.support.1);
        if hi <= lo {
            return 0.0;
        }
        composite_gauss5(|x| (self.f)(x) * g(x), lo, hi, panels)
    }
}

/// Signed measure made of weighted atoms plus an optional 1-D density part.
/// Atom coordinates are stored row-major with stride `dim`.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    pub dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
    pub density: Option<Density>,
}

impl DiscreteMeasure {
    pub fn atoms(dim: usize, points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 || points.len() != weights.len() * dim {
            return Err(Error::DimensionMismatch { expected: weights.len() * dim, found: points.len() });
        }
        Ok(DiscreteMeasure { dim, points, weights, density: None })
    }

    pub fn dirac(point: &[f64]) -> Self {
        DiscreteMeasure { dim: point.len(), points: point.to_vec(), weights: vec![1.0], density: None }
    }

    /// Measure with density `f` on `support` and no atoms.
    pub fn with_density(f: impl Fn(f64) -> f64 + Send + Sync + 'static, support: (f64, f64)) -> Self {
        DiscreteMeasure {
            dim: 1,
            points: Vec::new(),
            weights: Vec::new(),
            density: Some(Density { f: Arc::new(f), support }),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty() && self.density.is_none()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.points.chunks(self.dim).zip(self.weights.iter().copied())
    }

    pub fn total_mass(&self) -> f64 {
        let atoms: f64 = self.weights.iter().sum();
        atoms + self.density.as_ref().map_or(0.0, |d| d.integrate_against(|_| 1.0, d.support.0, d.support.1, 256))
    }

    /// Total variation of the atomic part.
    pub fn tv_norm(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    /// Nonnegative atoms, no density part, unit mass to 1e-12.
    pub fn is_probability(&self) -> bool {
        self.density.is_none()
            && !self.weights.is_empty()
            && self.weights.iter().all(|w| *w >= 0.0)
            && (self.total_mass() - 1.0).abs() <= 1e-12
    }

    /// Merges atoms whose coordinates agree to within `tol` (grid bucketing).
    pub fn consolidate(&self, tol: f64) -> DiscreteMeasure {
        let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut points = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for (p, w) in self.iter() {
            let key: Vec<i64> = p.iter().map(|v| (v / tol).round() as i64).collect();
            match index.get(&key) {
                Some(&i) => weights[i] += w,
                None => {
                    index.insert(key, weights.len());
                    points.extend_from_slice(p);
                    weights.push(w);
                }
            }
        }
        DiscreteMeasure { dim: self.dim, points, weights, density: self.density.clone() }
    }
}

/// Dual coefficients nu_k = integral of the k-th basis function against nu.
#[derive(Debug, Clone)]
pub enum DualCoefficients {
    Multiscale { basis: MultiscaleBasis, coeffs: CoefficientField },
    Spectral { system: Arc<EigenSystem>, coeffs: Vec<f64> },
}

impl DualCoefficients {
    /// Density of the projected measure at `x`.
    pub fn density_at(&self, x: &[f64]) -> Result<f64> {
        match self {
            DualCoefficients::Multiscale { basis, coeffs } => crate::basis::reconstruct(coeffs, basis, x),
            DualCoefficients::Spectral { system, coeffs } => {
                let u = system.eval_all(x[0]);
                Ok(coeffs.iter().zip(&u).map(|(c, v)| c * v).sum())
            }
        }
    }

    /// Mass the projected measure gives to the interval [a, b] (1-D only).
    pub fn measure_of_interval(&self, a: f64, b: f64) -> Result<f64> {
        match self {
            DualCoefficients::Spectral { system, coeffs } => {
                Ok(coeffs.iter().enumerate().map(|(i, c)| c * system.integral(i, a, b)).sum())
            }
            DualCoefficients::Multiscale { basis, coeffs } => {
                if basis.family != Family::Haar1d {
                    return Err(Error::FamilyMismatch { expected: Family::Haar1d.label(), found: basis.family.label() });
                }
                let overlap = |lo: f64, hi: f64| (b.min(hi) - a.max(lo)).max(0.0);
                let mut s = 0.0;
                for (idx, c) in coeffs.iter() {
                    let level = idx.level.max(0);
                    let h = 2f64.powi(-level);
                    let lo = idx.translate[0] as f64 * h;
                    let amp = 2f64.powf(level as f64 / 2.0);
                    s += c * amp
                        * if idx.is_scaling() {
                            overlap(lo, lo + h)
                        } else {
                            overlap(lo, lo + h / 2.0) - overlap(lo + h / 2.0, lo + h)
                        };
                }
                Ok(s)
            }
        }
    }
}

/// Dual projection onto a multiscale basis: the coarse coefficient and the
/// wavelet coefficients of levels 0..=`level`. Atoms contribute
/// weight * psi(point); a density part is integrated with Gauss rules on the
/// dyadic cells of level `level + 1 + GUARD_MARGIN`.
pub fn dual_project(nu: &DiscreteMeasure, basis: &MultiscaleBasis, level: u32) -> Result<DualCoefficients> {
    if nu.dim != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), found: nu.dim });
    }
    let mut indices = basis.multiscale_indices(level + 1)?;
    indices.sort();
    let mut coeffs = CoefficientField::new(basis.family);
    for idx in &indices {
        coeffs.insert(idx.clone(), 0.0);
    }
    for (p, w) in nu.iter() {
        if !basis.family.contains(p) {
            return Err(Error::OutsideDomain(p.to_vec()));
        }
        for idx in &indices {
            let v = basis.eval_unchecked(idx, p);
            if v != 0.0 {
                let cur = coeffs.get(idx);
                coeffs.insert(idx.clone(), cur + w * v);
            }
        }
    }
    if let Some(d) = &nu.density {
        if basis.family != Family::Haar1d {
            return Err(Error::FamilyMismatch { expected: Family::Haar1d.label(), found: basis.family.label() });
        }
        let fine = level + 1 + GUARD_MARGIN;
        let n = 1usize << fine;
        let h = 1.0 / n as f64;
        let single = CoefficientField::from_entries(
            Family::Haar1d,
            (0..1usize << (level + 1)).map(|k| {
                let per = n >> (level + 1);
                let s: f64 = (k * per..(k + 1) * per)
                    .map(|i| d.integrate_against(|_| 1.0, i as f64 * h, (i + 1) as f64 * h, 1))
                    .sum();
                (BasisIndex::scaling(level as i32 + 1, &[k as i64]), s * 2f64.powf((level + 1) as f64 / 2.0))
            }),
        );
        for (idx, v) in fwt(&single, basis)?.iter() {
            let cur = coeffs.get(idx);
            coeffs.insert(idx.clone(), cur + v);
        }
    }
    Ok(DualCoefficients::Multiscale { basis: *basis, coeffs })
}

/// Dual projection onto the first `count` eigenfunctions of `system`.
pub fn dual_project_spectral(nu: &DiscreteMeasure, system: Arc<EigenSystem>, count: usize) -> Result<DualCoefficients> {
    if nu.dim != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: nu.dim });
    }
    if count > system.len() {
        return Err(Error::DimensionMismatch { expected: system.len(), found: count });
    }
    let mut coeffs = vec![0.0; count];
    for (p, w) in nu.iter() {
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c += w * system.eval(i, p[0]);
        }
    }
    if let Some(d) = &nu.density {
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c += d.integrate_against(|x| system.eval(i, x), d.support.0, d.support.1, 64);
        }
    }
    Ok(DualCoefficients::Spectral { system, coeffs })
}

/// |<nu, (I - Pi_level) f>| with Pi_level the projection onto the level-`level`
/// scaling space, computed at quadrature level `quad_level`.
pub fn weak_star_error<F: Fn(&[f64]) -> f64>(
    nu: &DiscreteMeasure,
    basis: &MultiscaleBasis,
    level: u32,
    f: F,
    quad_level: u32,
) -> Result<f64> {
    let pf = project(&f, basis, level, quad_level)?;
    let fam = basis.family;
    let amp = fam.cell_volume(level).powf(-0.5);
    let approx = |x: &[f64]| {
        let c = fam.locate(level, x);
        pf.get(&BasisIndex::from_cell(level as i32, &c, fam.dim(), crate::basis::IndexKind::Scaling { up: c.up })) * amp
    };
    let mut s = 0.0;
    for (p, w) in nu.iter() {
        if !fam.contains(p) {
            return Err(Error::OutsideDomain(p.to_vec()));
        }
        s += w * (f(p) - approx(p));
    }
    if let Some(d) = &nu.density {
        let n = 1usize << quad_level;
        let h = 1.0 / n as f64;
        for i in 0..n {
            s += d.integrate_against(|x| f(&[x]) - approx(&[x]), i as f64 * h, (i + 1) as f64 * h, 1);
        }
    }
    Ok(s.abs())
}

/// Piecewise-constant density relative to a reference measure.
#[derive(Debug, Clone, PartialEq)]
pub struct CellDensity {
    pub level: u32,
    pub values: Vec<f64>,
    /// Reference mass of every cell.
    pub cell_mass: Vec<f64>,
}

impl CellDensity {
    pub fn total_mass(&self) -> f64 {
        self.values.iter().zip(&self.cell_mass).map(|(v, m)| v * m).sum()
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.values[Family::Haar1d.locate(self.level, &[x]).k[0] as usize]
    }
}

/// Cell averages (integral of h over the cell w.r.t. mu) / mu(cell) on the
/// dyadic cells of [0, 1], where mu has density `mu_density` against
/// Lebesgue measure. Integrals use 5-point Gauss rules on the cells of level
/// `quad_level`.
pub fn probability_project<H, M>(h: H, mu_density: M, level: u32, quad_level: u32) -> Result<CellDensity>
where
    H: Fn(f64) -> f64,
    M: Fn(f64) -> f64,
{
    if quad_level < level {
        return Err(Error::QuadratureTooCoarse { quad: quad_level, level, needed: level });
    }
    let n = 1usize << quad_level;
    let per = 1usize << (quad_level - level);
    let dx = 1.0 / n as f64;
    let cells = 1usize << level;
    let mut values = Vec::with_capacity(cells);
    let mut cell_mass = Vec::with_capacity(cells);
    for k in 0..cells {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in k * per..(k + 1) * per {
            let (a, b) = (i as f64 * dx, (i + 1) as f64 * dx);
            num += gauss5(|x| h(x) * mu_density(x), a, b);
            den += gauss5(&mu_density, a, b);
        }
        if !(den > 0.0) {
            return Err(Error::EmptyCell(k));
        }
        if num < 0.0 {
            return Err(Error::InvalidArgument(format!("density is negative on cell {k}")));
        }
        values.push(num / den);
        cell_mass.push(den);
    }
    Ok(CellDensity { level, values, cell_mass })
}

/// Wasserstein-1 distance with Euclidean ground cost between two
/// probability measures made of atoms.
pub fn wasserstein1(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    for (name, m) in [("first", mu), ("second", nu)] {
        if !m.is_probability() {
            return Err(Error::NotProbability(format!("{name} argument")));
        }
    }
    if mu.dim != nu.dim {
        return Err(Error::DimensionMismatch { expected: mu.dim, found: nu.dim });
    }
    transport::w1_euclidean(&mu.points, &mu.weights, &nu.points, &nu.weights, mu.dim)
}
