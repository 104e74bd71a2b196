use super::{BasisIndex, CoefficientField, Family, IndexKind, MultiscaleBasis};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L2,
    Linf,
}

/// Composite one-point rule on the level-`level` partition: one node per
/// cell (midpoint or centroid), weight equal to the cell volume.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub family: Family,
    pub level: u32,
    pub weight: f64,
    points: Vec<f64>,
}

impl QuadratureGrid {
    pub fn new(family: Family, level: u32) -> Self {
        let n = family.cell_count(level);
        let mut points = Vec::with_capacity(n * family.dim());
        for i in 0..n {
            points.extend(family.centroid(level, &family.cell_at(level, i)));
        }
        QuadratureGrid { family, level, weight: family.cell_volume(level), points }
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.family.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.family.dim();
        &self.points[i * d..(i + 1) * d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks(self.family.dim())
    }

    /// Quadrature of `f` over the domain.
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.points().map(f).sum::<f64>() * self.weight
    }
}

fn check_quadrature(level: u32, quad_level: u32) -> Result<()> {
    if quad_level < level {
        return Err(Error::QuadratureTooCoarse { quad: quad_level, level, needed: level });
    }
    Ok(())
}

/// Cell integrals of `f` over the level-`level` partition, by the one-point
/// rule at `quad_level`.
fn cell_integrals<F: Fn(&[f64]) -> f64>(family: Family, f: &F, level: u32, quad_level: u32) -> Vec<f64> {
    let grid = QuadratureGrid::new(family, quad_level);
    let ancestors = family.ancestor_map(quad_level, level);
    let mut sums = vec![0.0; family.cell_count(level)];
    for (i, x) in grid.points().enumerate() {
        sums[ancestors[i]] += f(x);
    }
    sums.iter_mut().for_each(|s| *s *= grid.weight);
    sums
}

/// Single-scale projection onto the level-`level` space: coefficients
/// (f, phi_{level,k}) computed with the one-point rule at `quad_level`.
pub fn project<F: Fn(&[f64]) -> f64>(
    f: F,
    basis: &MultiscaleBasis,
    level: u32,
    quad_level: u32,
) -> Result<CoefficientField> {
    check_quadrature(level, quad_level)?;
    if quad_level > basis.max_level {
        return Err(Error::LevelTooDeep { level: quad_level as i32, max: basis.max_level as i32 });
    }
    let fam = basis.family;
    let amp = fam.cell_volume(level).powf(-0.5);
    let sums = cell_integrals(fam, &f, level, quad_level);
    let mut out = CoefficientField::new(fam);
    out.truncated = true;
    for (i, s) in sums.into_iter().enumerate() {
        let c = fam.cell_at(level, i);
        out.insert(BasisIndex::from_cell(level as i32, &c, fam.dim(), IndexKind::Scaling { up: c.up }), s * amp);
    }
    Ok(out)
}

fn check_family(field: &CoefficientField, basis: &MultiscaleBasis) -> Result<()> {
    if field.family != basis.family {
        return Err(Error::FamilyMismatch { expected: basis.family.label(), found: field.family.label() });
    }
    Ok(())
}

/// Forward fast wavelet transform of a single-scale field. The output holds
/// the coarse coefficient at level -1 and the wavelets of levels 0..J-1.
pub fn fwt(field: &CoefficientField, basis: &MultiscaleBasis) -> Result<CoefficientField> {
    check_family(field, basis)?;
    let top = field
        .single_scale_level()
        .ok_or_else(|| Error::InvalidArgument("fwt expects a single-scale field".into()))?;
    let fam = basis.family;
    let d = fam.dim();
    let filter = fam.filter();
    let mut values: Vec<f64> = (0..fam.cell_count(top))
        .map(|i| {
            let c = fam.cell_at(top, i);
            field.get(&BasisIndex::from_cell(top as i32, &c, d, IndexKind::Scaling { up: c.up }))
        })
        .collect();
    let mut out = CoefficientField::new(fam);
    out.truncated = field.truncated;
    for level in (0..top).rev() {
        let mut coarse = vec![0.0; fam.cell_count(level)];
        for (i, slot) in coarse.iter_mut().enumerate() {
            let p = fam.cell_at(level, i);
            let kids: Vec<f64> = fam.children(&p).iter().map(|c| values[fam.cell_index(level + 1, c)]).collect();
            let dot = |row: &[f64]| row.iter().zip(&kids).map(|(a, b)| a * b).sum::<f64>();
            *slot = dot(&filter[0]);
            for (m, row) in filter.iter().enumerate().skip(1) {
                out.insert(
                    BasisIndex::from_cell(level as i32, &p, d, IndexKind::Wavelet { member: m as u8, up: p.up }),
                    dot(row),
                );
            }
        }
        values = coarse;
    }
    out.insert(BasisIndex::coarse(d), values[0]);
    Ok(out)
}

/// Inverse transform: synthesizes the single-scale field at `level` from a
/// multiscale field. Wavelets at levels >= `level` are ignored.
pub fn ifwt(field: &CoefficientField, basis: &MultiscaleBasis, level: u32) -> Result<CoefficientField> {
    check_family(field, basis)?;
    if !field.is_multiscale() {
        return Err(Error::InvalidArgument("ifwt expects a multiscale field".into()));
    }
    let fam = basis.family;
    let d = fam.dim();
    let filter = fam.filter();
    let mut values = vec![field.get(&BasisIndex::coarse(d))];
    for l in 0..level {
        let mut fine = vec![0.0; fam.cell_count(l + 1)];
        for (i, &s) in values.iter().enumerate() {
            let p = fam.cell_at(l, i);
            let mut coeffs = vec![s];
            for m in 1..filter.len() {
                coeffs.push(field.get(&BasisIndex::from_cell(
                    l as i32,
                    &p,
                    d,
                    IndexKind::Wavelet { member: m as u8, up: p.up },
                )));
            }
            for (pos, c) in fam.children(&p).iter().enumerate() {
                fine[fam.cell_index(l + 1, c)] = (0..filter.len()).map(|m| filter[m][pos] * coeffs[m]).sum();
            }
        }
        values = fine;
    }
    let mut out = CoefficientField::new(fam);
    out.truncated = field.truncated;
    for (i, v) in values.into_iter().enumerate() {
        let c = fam.cell_at(level, i);
        out.insert(BasisIndex::from_cell(level as i32, &c, d, IndexKind::Scaling { up: c.up }), v);
    }
    Ok(out)
}

/// Pointwise value of the expansion held by `field`.
pub fn reconstruct(field: &CoefficientField, basis: &MultiscaleBasis, x: &[f64]) -> Result<f64> {
    check_family(field, basis)?;
    let mut s = 0.0;
    for (idx, v) in field.iter() {
        if v != 0.0 {
            s += v * basis.eval(idx, x)?;
        }
    }
    Ok(s)
}

/// Distance from `f` to the level-`level` space, measured on the
/// `ref_level` grid. Requires `ref_level >= level + 6`.
pub fn projection_error<F: Fn(&[f64]) -> f64>(
    f: F,
    basis: &MultiscaleBasis,
    level: u32,
    norm: NormKind,
    ref_level: u32,
) -> Result<f64> {
    let needed = level + super::GUARD_MARGIN;
    if ref_level < needed {
        return Err(Error::QuadratureTooCoarse { quad: ref_level, level, needed });
    }
    let fam = basis.family;
    let grid = QuadratureGrid::new(fam, ref_level);
    let ancestors = fam.ancestor_map(ref_level, level);
    let values: Vec<f64> = grid.points().map(&f).collect();
    let mut means = vec![0.0; fam.cell_count(level)];
    for (v, a) in values.iter().zip(&ancestors) {
        means[*a] += v;
    }
    let per_cell = (fam.cell_count(ref_level) / fam.cell_count(level)) as f64;
    means.iter_mut().for_each(|m| *m /= per_cell);
    let resid = values.iter().zip(&ancestors).map(|(v, a)| v - means[*a]);
    Ok(match norm {
        NormKind::L2 => (resid.map(|r| r * r).sum::<f64>() * grid.weight).sqrt(),
        NormKind::Linf => resid.fold(0.0, |m: f64, r| m.max(r.abs())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_projection_at_level_one() {
        let b = MultiscaleBasis::haar1d();
        let c = project(|x| x[0], &b, 1, 7).unwrap();
        let s = 2f64.sqrt();
        assert!((c.get(&BasisIndex::scaling(1, &[0])) * s - 0.25).abs() < 1e-14);
        assert!((c.get(&BasisIndex::scaling(1, &[1])) * s - 0.75).abs() < 1e-14);
    }

    #[test]
    fn coarse_quadrature_is_refused() {
        let b = MultiscaleBasis::haar1d();
        assert!(matches!(project(|x| x[0], &b, 4, 3), Err(Error::QuadratureTooCoarse { .. })));
        assert!(matches!(
            projection_error(|x| x[0], &b, 4, NormKind::L2, 9),
            Err(Error::QuadratureTooCoarse { .. })
        ));
    }

    #[test]
    fn constant_field_has_no_details() {
        let b = MultiscaleBasis::haar_tensor(2).unwrap();
        let c = project(|_| 1.0, &b, 3, 3).unwrap();
        let w = fwt(&c, &b).unwrap();
        for (idx, v) in w.iter() {
            if idx.level >= 0 {
                assert!(v.abs() < 1e-14);
            }
        }
        assert!((w.get(&BasisIndex::coarse(2)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn family_mismatch_is_an_error() {
        let c = project(|_| 1.0, &MultiscaleBasis::haar1d(), 2, 2).unwrap();
        assert!(matches!(fwt(&c, &MultiscaleBasis::triangle()), Err(Error::FamilyMismatch { .. })));
    }
}
