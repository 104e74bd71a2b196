//! Warped Haar wavelets: base functions composed with a coordinate change,
//! orthonormal under the jacobian-weighted inner product.

use crate::basis::{BasisIndex, CoefficientField, Family, IndexKind, MultiscaleBasis};
use crate::error::{Error, Result};
use crate::quadrature::gauss5;
use std::fmt;
use std::sync::Arc;

type Map = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Coordinate change between the warped interval and [0, 1].
///
/// `forward` sends a warped coordinate to the base interval, `inverse` goes
/// back, `jacobian` is |d forward / d x~|. All three are analytic closures.
#[derive(Clone)]
pub struct CoordinateWarp {
    forward: Map,
    inverse: Map,
    jacobian: Map,
    domain: (f64, f64),
    label: String,
}

impl fmt::Debug for CoordinateWarp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoordinateWarp({} on [{}, {}])", self.label, self.domain.0, self.domain.1)
    }
}

impl CoordinateWarp {
    pub fn new(
        forward: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inverse: impl Fn(f64) -> f64 + Send + Sync + 'static,
        jacobian: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: (f64, f64),
        label: &str,
    ) -> Self {
        CoordinateWarp {
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
            jacobian: Arc::new(jacobian),
            domain,
            label: label.to_string(),
        }
    }

    pub fn identity() -> Self {
        Self::new(|x| x, |x| x, |_| 1.0, (0.0, 1.0), "identity")
    }

    /// Warp induced by the map x -> x^alpha on [0, 1]: the warped coordinate
    /// is x~ = x^alpha, so forward(x~) = x~^{1/alpha}.
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidArgument(format!("power warp needs alpha > 0, got {alpha}")));
        }
        let e = 1.0 / alpha;
        Ok(Self::new(
            move |t| t.powf(e),
            move |x| x.powf(alpha),
            move |t| e * t.powf(e - 1.0),
            (0.0, 1.0),
            &format!("power({alpha})"),
        ))
    }

    pub fn forward(&self, t: f64) -> f64 {
        (self.forward)(t)
    }

    pub fn inverse(&self, x: f64) -> f64 {
        (self.inverse)(x)
    }

    pub fn jacobian(&self, t: f64) -> f64 {
        (self.jacobian)(t)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }
}

#[derive(Debug, Clone)]
pub struct WarpedBasis {
    pub base: MultiscaleBasis,
    pub warp: CoordinateWarp,
}

/// Lowest quadrature level accepted by the weighted routines.
pub const MIN_WARPED_QUADRATURE: u32 = 10;

impl WarpedBasis {
    pub fn new(base: MultiscaleBasis, warp: CoordinateWarp) -> Result<Self> {
        if base.family != Family::Haar1d {
            return Err(Error::FamilyMismatch { expected: Family::Haar1d.label(), found: base.family.label() });
        }
        Ok(WarpedBasis { base, warp })
    }

    fn base_point(&self, t: f64) -> Result<f64> {
        let (a, b) = self.warp.domain;
        if !(t >= a && t <= b) {
            return Err(Error::OutsideDomain(vec![t]));
        }
        Ok(self.warp.forward(t).clamp(0.0, 1.0))
    }

    /// psi~_idx(t) = psi_idx(forward(t)).
    pub fn eval(&self, idx: &BasisIndex, t: f64) -> Result<f64> {
        let x = self.base_point(t)?;
        self.base.eval(idx, &[x])
    }

    /// Jacobian-weighted integral of `g` over the warped domain. The base
    /// interval is cut into 2^`level` cells whose preimages are integrated
    /// with the 5-point Gauss rule, so breakpoints of warped Haar functions up
    /// to level `level - 1` are never straddled and nodes never touch the
    /// preimage endpoints.
    pub fn weighted_integral<G: Fn(f64) -> f64>(&self, g: G, level: u32) -> f64 {
        let n = 1usize << level;
        let h = 1.0 / n as f64;
        (0..n)
            .map(|k| {
                let lo = self.warp.inverse(k as f64 * h);
                let hi = self.warp.inverse((k + 1) as f64 * h);
                gauss5(|t| g(t) * self.warp.jacobian(t), lo, hi)
            })
            .sum()
    }

    fn check_quadrature(&self, needed: u32, quad_level: u32) -> Result<()> {
        let needed = needed.max(MIN_WARPED_QUADRATURE);
        if quad_level < needed {
            return Err(Error::QuadratureTooCoarse { quad: quad_level, level: needed, needed });
        }
        Ok(())
    }

    fn resolution(idx: &BasisIndex) -> u32 {
        match idx.kind {
            IndexKind::Scaling { .. } => idx.level.max(0) as u32,
            IndexKind::Wavelet { .. } => idx.level as u32 + 1,
        }
    }

    /// Weighted inner product of two warped basis functions.
    pub fn weighted_inner(&self, a: &BasisIndex, b: &BasisIndex, quad_level: u32) -> Result<f64> {
        self.check_quadrature(Self::resolution(a).max(Self::resolution(b)), quad_level)?;
        for idx in [a, b] {
            if !self.base.admissible(idx) {
                return Err(Error::InadmissibleIndex(format!("{idx:?}")));
            }
        }
        Ok(self.weighted_integral(
            |t| {
                let x = self.warp.forward(t).clamp(0.0, 1.0);
                self.base.eval_unchecked(a, &[x]) * self.base.eval_unchecked(b, &[x])
            },
            quad_level,
        ))
    }

    /// Weighted pairing (f, psi~_idx).
    pub fn pairing<F: Fn(f64) -> f64>(&self, f: F, idx: &BasisIndex, quad_level: u32) -> Result<f64> {
        self.check_quadrature(Self::resolution(idx), quad_level)?;
        if !self.base.admissible(idx) {
            return Err(Error::InadmissibleIndex(format!("{idx:?}")));
        }
        Ok(self.weighted_integral(
            |t| f(t) * self.base.eval_unchecked(idx, &[self.warp.forward(t).clamp(0.0, 1.0)]),
            quad_level,
        ))
    }
}

/// Single-scale warped projection: coefficients (f, phi~_{level,k}) under the
/// weighted pairing.
pub fn warped_project<F: Fn(f64) -> f64>(
    f: F,
    wb: &WarpedBasis,
    level: u32,
    quad_level: u32,
) -> Result<CoefficientField> {
    if quad_level < level {
        return Err(Error::QuadratureTooCoarse { quad: quad_level, level, needed: level });
    }
    wb.check_quadrature(level, quad_level)?;
    let n = 1usize << quad_level;
    let per = 1usize << (quad_level - level);
    let h = 1.0 / n as f64;
    let amp = 2f64.powf(level as f64 / 2.0);
    let mut out = CoefficientField::new(Family::Haar1d);
    out.truncated = true;
    for k in 0..(1usize << level) {
        let mut s = 0.0;
        for i in k * per..(k + 1) * per {
            let lo = wb.warp.inverse(i as f64 * h);
            let hi = wb.warp.inverse((i + 1) as f64 * h);
            s += gauss5(|t| f(t) * wb.warp.jacobian(t), lo, hi);
        }
        out.insert(BasisIndex::scaling(level as i32, &[k as i64]), s * amp);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_warp_values() {
        let wb = WarpedBasis::new(MultiscaleBasis::haar1d(), CoordinateWarp::power(0.5).unwrap()).unwrap();
        let psi = BasisIndex::wavelet(0, &[0]);
        assert!((wb.eval(&psi, 0.6).unwrap() - 1.0).abs() < 1e-15);
        assert!((wb.eval(&psi, 0.8).unwrap() + 1.0).abs() < 1e-15);
        assert!(wb.eval(&psi, 1.2).is_err());
    }

    #[test]
    fn warp_round_trip() {
        for alpha in [0.5, 1.0, 2.0] {
            let w = CoordinateWarp::power(alpha).unwrap();
            for i in 0..=100 {
                let x = i as f64 / 100.0;
                assert!((w.forward(w.inverse(x)) - x).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn weighted_gram_entries() {
        let wb = WarpedBasis::new(MultiscaleBasis::haar1d(), CoordinateWarp::power(0.5).unwrap()).unwrap();
        let s = BasisIndex::scaling(0, &[0]);
        assert!((wb.weighted_inner(&s, &s, 10).unwrap() - 1.0).abs() < 1e-6);
        let a = BasisIndex::wavelet(0, &[0]);
        let b = BasisIndex::wavelet(1, &[0]);
        assert!(wb.weighted_inner(&a, &b, 10).unwrap().abs() < 1e-6);
        assert!(wb.weighted_inner(&a, &b, 9).is_err());
    }

    #[test]
    fn constant_projects_to_domain_mass() {
        let wb = WarpedBasis::new(MultiscaleBasis::haar1d(), CoordinateWarp::power(0.5).unwrap()).unwrap();
        let c = warped_project(|_| 1.0, &wb, 0, 10).unwrap();
        assert!((c.get(&BasisIndex::scaling(0, &[0])) - 1.0).abs() < 1e-12);
    }
}
