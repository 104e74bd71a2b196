use super::{BasisIndex, Family, IndexKind};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Finitely supported expansion in a multiscale basis.
///
/// `truncated` marks fields that stand in for an infinite expansion, e.g. the
/// projection of a general function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "FieldRecord", into = "FieldRecord")]
pub struct CoefficientField {
    pub family: Family,
    pub truncated: bool,
    entries: BTreeMap<BasisIndex, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldEntry {
    pub level: i32,
    pub translate: Vec<i64>,
    pub kind: IndexKind,
    pub value: f64,
}

#[derive(Serialize, Deserialize)]
struct FieldRecord {
    family: Family,
    #[serde(default)]
    truncated: bool,
    entries: Vec<FieldEntry>,
}

impl From<FieldRecord> for CoefficientField {
    fn from(r: FieldRecord) -> Self {
        let mut f = CoefficientField::new(r.family);
        f.truncated = r.truncated;
        for e in r.entries {
            f.insert(BasisIndex { level: e.level, translate: e.translate, kind: e.kind }, e.value);
        }
        f
    }
}

impl From<CoefficientField> for FieldRecord {
    fn from(f: CoefficientField) -> Self {
        FieldRecord {
            family: f.family,
            truncated: f.truncated,
            entries: f
                .entries
                .into_iter()
                .map(|(i, value)| FieldEntry { level: i.level, translate: i.translate, kind: i.kind, value })
                .collect(),
        }
    }
}

impl CoefficientField {
    pub fn new(family: Family) -> Self {
        CoefficientField { family, truncated: false, entries: BTreeMap::new() }
    }

    pub fn from_entries(family: Family, entries: impl IntoIterator<Item = (BasisIndex, f64)>) -> Self {
        let mut f = Self::new(family);
        for (i, v) in entries {
            f.insert(i, v);
        }
        f
    }

    pub fn insert(&mut self, idx: BasisIndex, value: f64) {
        self.entries.insert(idx, value);
    }

    pub fn get(&self, idx: &BasisIndex) -> f64 {
        self.entries.get(idx).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisIndex, f64)> {
        self.entries.iter().map(|(i, v)| (i, *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.values().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Level of a single-scale field: all entries are scaling functions of one
    /// level >= 0.
    pub fn single_scale_level(&self) -> Option<u32> {
        let mut level = None;
        for idx in self.entries.keys() {
            if !idx.is_scaling() || idx.level < 0 {
                return None;
            }
            match level {
                None => level = Some(idx.level),
                Some(l) if l != idx.level => return None,
                _ => {}
            }
        }
        level.map(|l| l as u32)
    }

    /// Whether the field is a multiscale expansion: the coarse function at
    /// level -1 plus wavelets.
    pub fn is_multiscale(&self) -> bool {
        self.entries.keys().all(|i| !i.is_scaling() || i.level == -1)
    }

    /// Multiscale truncation: keeps the coarse function and the wavelets of
    /// levels below `level`, i.e. the projection onto the level-`level` space.
    pub fn truncate(&self, level: u32) -> CoefficientField {
        let mut out = CoefficientField::new(self.family);
        out.truncated = self.truncated;
        for (i, v) in self.iter() {
            if i.level < level as i32 {
                out.insert(i.clone(), v);
            }
        }
        out
    }

    /// Entry-wise difference `self - other`.
    pub fn sub(&self, other: &CoefficientField) -> CoefficientField {
        let mut out = self.clone();
        for (i, v) in other.iter() {
            let cur = out.get(i);
            out.insert(i.clone(), cur - v);
        }
        out
    }
}
