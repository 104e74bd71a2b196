//! Orthonormal multiscale bases: Haar on the interval, tensor Haar on the
//! unit cube and Haar multiwavelets on the unit triangle.

mod field;
mod geometry;
mod seminorm;
mod transform;

pub use field::{CoefficientField, FieldEntry};
pub use geometry::{Cell, Family};
pub use seminorm::{arq_seminorm, Seminorm};
pub use transform::{fwt, ifwt, project, projection_error, reconstruct, NormKind, QuadratureGrid};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Levels at or above this bound are refused by enumeration and evaluation.
pub const DEFAULT_MAX_LEVEL: u32 = 24;

/// Recommended gap between a projection level and its quadrature level.
pub const GUARD_MARGIN: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexKind {
    /// Scaling function; for the triangle family `up` picks the cell half.
    Scaling { up: bool },
    /// Wavelet member `member` (1-based) living on a parent cell. For tensor
    /// Haar the member is the corner bitmask e; for the triangle family
    /// `up` records the parent's orientation.
    Wavelet { member: u8, up: bool },
}

/// Index of one basis function. Level -1 holds the coarse scaling function
/// so that a multiscale expansion reads as a sum over wavelet levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisIndex {
    pub level: i32,
    pub translate: Vec<i64>,
    pub kind: IndexKind,
}

impl BasisIndex {
    pub fn scaling(level: i32, translate: &[i64]) -> Self {
        BasisIndex { level, translate: translate.to_vec(), kind: IndexKind::Scaling { up: true } }
    }

    pub fn wavelet(level: i32, translate: &[i64]) -> Self {
        Self::member(level, translate, 1)
    }

    /// Tensor-Haar corner e or triangle member i on an upward parent.
    pub fn member(level: i32, translate: &[i64], member: u8) -> Self {
        BasisIndex { level, translate: translate.to_vec(), kind: IndexKind::Wavelet { member, up: true } }
    }

    pub fn triangle_cell(level: i32, translate: [i64; 2], up: bool) -> Self {
        BasisIndex { level, translate: translate.to_vec(), kind: IndexKind::Scaling { up } }
    }

    pub fn triangle_member(level: i32, translate: [i64; 2], member: u8, up: bool) -> Self {
        BasisIndex { level, translate: translate.to_vec(), kind: IndexKind::Wavelet { member, up } }
    }

    /// The coarsest scaling function, stored at level -1.
    pub fn coarse(dim: usize) -> Self {
        BasisIndex { level: -1, translate: vec![0; dim], kind: IndexKind::Scaling { up: true } }
    }

    pub fn is_scaling(&self) -> bool {
        matches!(self.kind, IndexKind::Scaling { .. })
    }

    pub(crate) fn cell(&self) -> Cell {
        let mut k = [0i64; 3];
        for (s, v) in k.iter_mut().zip(&self.translate) {
            *s = *v;
        }
        let up = match self.kind {
            IndexKind::Scaling { up } | IndexKind::Wavelet { up, .. } => up,
        };
        Cell::new(k, up)
    }

    pub(crate) fn from_cell(level: i32, cell: &Cell, dim: usize, kind: IndexKind) -> Self {
        BasisIndex { level, translate: cell.k[..dim].to_vec(), kind }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiscaleBasis {
    pub family: Family,
    pub max_level: u32,
}

impl MultiscaleBasis {
    pub fn new(family: Family) -> Self {
        MultiscaleBasis { family, max_level: DEFAULT_MAX_LEVEL }
    }

    pub fn haar1d() -> Self {
        Self::new(Family::Haar1d)
    }

    pub fn haar_tensor(dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidArgument(format!("tensor dimension {dim} not in 1..=3")));
        }
        Ok(Self::new(Family::HaarTensor { dim }))
    }

    pub fn triangle() -> Self {
        Self::new(Family::Triangle)
    }

    pub fn with_max_level(mut self, max_level: u32) -> Self {
        self.max_level = max_level;
        self
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    /// Number of wavelet members per parent cell.
    pub fn members(&self) -> usize {
        self.family.arity() - 1
    }

    fn check_level(&self, level: i32) -> Result<()> {
        if level > self.max_level as i32 {
            return Err(Error::LevelTooDeep { level, max: self.max_level as i32 });
        }
        Ok(())
    }

    /// Whether `idx` names a function of this basis.
    pub fn admissible(&self, idx: &BasisIndex) -> bool {
        let d = self.dim();
        if idx.translate.len() != d || idx.level < -1 || idx.level > self.max_level as i32 {
            return false;
        }
        let tri = self.family == Family::Triangle;
        match idx.kind {
            IndexKind::Scaling { up } => {
                if idx.level == -1 {
                    return up && idx.translate.iter().all(|&v| v == 0);
                }
                (tri || up) && self.family.is_cell(idx.level as u32, &idx.cell())
            }
            IndexKind::Wavelet { member, up } => {
                idx.level >= 0
                    && member >= 1
                    && (member as usize) <= self.members()
                    && (tri || up)
                    && self.family.is_cell(idx.level as u32, &idx.cell())
            }
        }
    }

    fn check_index(&self, idx: &BasisIndex) -> Result<()> {
        self.check_level(idx.level)?;
        if !self.admissible(idx) {
            return Err(Error::InadmissibleIndex(format!("{idx:?} for {}", self.family.label())));
        }
        Ok(())
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if !self.family.contains(x) {
            return Err(Error::OutsideDomain(x.to_vec()));
        }
        Ok(())
    }

    /// Value of basis function `idx` at `x`.
    pub fn eval(&self, idx: &BasisIndex, x: &[f64]) -> Result<f64> {
        self.check_index(idx)?;
        self.check_point(x)?;
        Ok(self.eval_unchecked(idx, x))
    }

    pub(crate) fn eval_unchecked(&self, idx: &BasisIndex, x: &[f64]) -> f64 {
        let fam = &self.family;
        match idx.kind {
            IndexKind::Scaling { .. } => {
                let level = idx.level.max(0) as u32;
                if fam.locate(level, x) == idx.cell() {
                    fam.cell_volume(level).powf(-0.5)
                } else {
                    0.0
                }
            }
            IndexKind::Wavelet { member, .. } => {
                let level = idx.level as u32;
                let child = fam.locate(level + 1, x);
                let (parent, pos) = fam.parent(&child);
                if parent != idx.cell() {
                    return 0.0;
                }
                let f = fam.filter()[member as usize][pos];
                match fam {
                    // +-2^{jd/2} without the rounding of filter times amplitude
                    Family::Triangle => f * fam.cell_volume(level + 1).powf(-0.5),
                    _ => f.signum() * 2f64.powf((level as usize * fam.dim()) as f64 / 2.0),
                }
            }
        }
    }

    /// Scaling and wavelet index sets of level `level`.
    pub fn index_sets(&self, level: u32) -> Result<(Vec<BasisIndex>, Vec<BasisIndex>)> {
        self.check_level(level as i32)?;
        let fam = &self.family;
        let d = self.dim();
        let mut scaling = Vec::with_capacity(fam.cell_count(level));
        let mut wavelets = Vec::with_capacity(fam.cell_count(level) * self.members());
        for i in 0..fam.cell_count(level) {
            let c = fam.cell_at(level, i);
            scaling.push(BasisIndex::from_cell(level as i32, &c, d, IndexKind::Scaling { up: c.up }));
            for m in 1..=self.members() as u8 {
                wavelets.push(BasisIndex::from_cell(
                    level as i32,
                    &c,
                    d,
                    IndexKind::Wavelet { member: m, up: c.up },
                ));
            }
        }
        Ok((scaling, wavelets))
    }

    /// Multiscale enumeration of the level-`level` space: the coarse function
    /// followed by the wavelets of levels 0..level-1.
    pub fn multiscale_indices(&self, level: u32) -> Result<Vec<BasisIndex>> {
        self.check_level(level as i32)?;
        let mut out = vec![BasisIndex::coarse(self.dim())];
        for l in 0..level {
            out.extend(self.index_sets(l)?.1);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn haar_values() {
        let b = MultiscaleBasis::haar1d();
        assert_eq!(b.eval(&BasisIndex::scaling(0, &[0]), &[0.3]).unwrap(), 1.0);
        let psi = BasisIndex::wavelet(1, &[0]);
        assert!((b.eval(&psi, &[0.1]).unwrap() - SQRT_2).abs() < 1e-15);
        assert!((b.eval(&psi, &[0.3]).unwrap() + SQRT_2).abs() < 1e-15);
        assert_eq!(b.eval(&psi, &[0.7]).unwrap(), 0.0);
        assert_eq!(b.eval(&BasisIndex::coarse(1), &[1.0]).unwrap(), 1.0);
    }

    #[test]
    fn triangle_first_member_near_origin() {
        let b = MultiscaleBasis::triangle();
        let psi1 = BasisIndex::triangle_member(0, [0, 0], 1, true);
        // (phi_C1 - phi_C4)/sqrt2 with |C1| = 1/8
        assert!((b.eval(&psi1, &[0.1, 0.1]).unwrap() - 2.0).abs() < 1e-14);
        assert!((b.eval(&psi1, &[0.3, 0.3]).unwrap() + 2.0).abs() < 1e-14);
        assert_eq!(b.eval(&psi1, &[0.6, 0.1]).unwrap(), 0.0);
    }

    #[test]
    fn index_set_sizes() {
        let (s, w) = MultiscaleBasis::haar1d().index_sets(3).unwrap();
        assert_eq!((s.len(), w.len()), (8, 8));
        let (s, _) = MultiscaleBasis::haar_tensor(2).unwrap().index_sets(1).unwrap();
        assert_eq!(s.len(), 4);
        let (s, w) = MultiscaleBasis::triangle().index_sets(0).unwrap();
        assert_eq!((s.len(), w.len()), (1, 3));
        assert_eq!(MultiscaleBasis::triangle().multiscale_indices(2).unwrap().len(), 16);
    }

    #[test]
    fn errors_are_reported() {
        let b = MultiscaleBasis::haar1d().with_max_level(5);
        assert!(matches!(b.eval(&BasisIndex::wavelet(1, &[2]), &[0.5]), Err(Error::InadmissibleIndex(_))));
        assert!(matches!(b.eval(&BasisIndex::wavelet(6, &[0]), &[0.5]), Err(Error::LevelTooDeep { .. })));
        assert!(matches!(b.eval(&BasisIndex::wavelet(1, &[0]), &[1.5]), Err(Error::OutsideDomain(_))));
        assert!(matches!(b.index_sets(6), Err(Error::LevelTooDeep { .. })));
        let t = MultiscaleBasis::triangle();
        assert!(t.eval(&BasisIndex::triangle_cell(1, [1, 0], false), &[0.1, 0.1]).is_err());
        assert!(t.eval(&BasisIndex::coarse(2), &[0.7, 0.7]).is_err());
    }
}
