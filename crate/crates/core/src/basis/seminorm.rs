use super::{fwt, CoefficientField, MultiscaleBasis};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Approximation-space seminorm of a finite expansion. `truncated` is set when
/// the field stands in for an infinite expansion, in which case `value` is the
/// partial sum over the represented levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seminorm {
    pub value: f64,
    pub truncated: bool,
}

/// (sum_j [2^{rj} ||Q_j f||]^q)^{1/q}, or the supremum when `q` is infinite.
/// The coarse level -1 is weighted as level 0. Single-scale fields are
/// transformed first.
pub fn arq_seminorm(c: &CoefficientField, basis: &MultiscaleBasis, r: f64, q: f64) -> Result<Seminorm> {
    if c.is_empty() {
        return Err(Error::EmptyField);
    }
    if !(r > 0.0) || !(q >= 1.0) {
        return Err(Error::InvalidArgument(format!("need r > 0 and q >= 1, got r={r}, q={q}")));
    }
    let transformed;
    let field = if c.is_multiscale() {
        c
    } else if c.single_scale_level().is_some() {
        transformed = fwt(c, basis)?;
        &transformed
    } else {
        return Err(Error::InvalidArgument("field mixes scaling levels".into()));
    };
    let mut buckets: BTreeMap<i32, f64> = BTreeMap::new();
    for (idx, v) in field.iter() {
        *buckets.entry(idx.level.max(0)).or_default() += v * v;
    }
    let terms = buckets.iter().map(|(&j, &s)| 2f64.powf(r * j as f64) * s.sqrt());
    let value = if q.is_infinite() {
        terms.fold(0.0, f64::max)
    } else {
        terms.map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q)
    };
    Ok(Seminorm { value, truncated: field.truncated })
}
