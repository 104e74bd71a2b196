//! Cell geometry shared by the basis families: enumeration, point location,
//! parent/child relations and the two-scale filters.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

/// Which multiscale family a basis or field belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Family {
    Haar1d,
    HaarTensor { dim: usize },
    Triangle,
}

/// A cell of the level-j partition. Haar cells are always `up`; triangle
/// cells are the lower-left (`up`) or upper-right half of the dyadic square
/// with corner `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub k: [i64; 3],
    pub up: bool,
}

impl Cell {
    pub fn new(k: [i64; 3], up: bool) -> Self {
        Cell { k, up }
    }
}

impl Family {
    pub fn dim(&self) -> usize {
        match self {
            Family::Haar1d => 1,
            Family::HaarTensor { dim } => *dim,
            Family::Triangle => 2,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Family::Haar1d => "haar1d".into(),
            Family::HaarTensor { dim } => format!("haar-tensor({dim})"),
            Family::Triangle => "triangle-multiwavelet".into(),
        }
    }

    /// Number of children of every cell, which is also the filter size.
    pub fn arity(&self) -> usize {
        match self {
            Family::Triangle => 4,
            _ => 1 << self.dim(),
        }
    }

    pub fn cell_count(&self, level: u32) -> usize {
        match self {
            Family::Triangle => 1usize << (2 * level),
            _ => 1usize << (level as usize * self.dim()),
        }
    }

    pub fn cell_volume(&self, level: u32) -> f64 {
        match self {
            Family::Triangle => 2f64.powi(-2 * level as i32 - 1),
            _ => 2f64.powi(-(level as i32) * self.dim() as i32),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            Family::Triangle => x[0] >= 0.0 && x[1] >= 0.0 && x[0] + x[1] <= 1.0,
            _ => x.iter().all(|&v| (0.0..=1.0).contains(&v)),
        }
    }

    /// Whether `cell` belongs to the level-`level` partition.
    pub fn is_cell(&self, level: u32, cell: &Cell) -> bool {
        let n = 1i64 << level;
        let d = self.dim();
        if cell.k[d..].iter().any(|&v| v != 0) || cell.k[..d].iter().any(|&v| v < 0) {
            return false;
        }
        match self {
            Family::Triangle => {
                let s = cell.k[0] + cell.k[1];
                if cell.up {
                    s < n
                } else {
                    s <= n - 2
                }
            }
            _ => cell.up && cell.k[..d].iter().all(|&v| v < n),
        }
    }

    /// Position of `cell` in the canonical enumeration of its level.
    pub fn cell_index(&self, level: u32, cell: &Cell) -> usize {
        let n = 1i64 << level;
        match self {
            Family::Triangle => {
                let (k1, k2) = (cell.k[0], cell.k[1]);
                if cell.up {
                    (k2 * n - k2 * (k2 - 1) / 2 + k1) as usize
                } else {
                    let ups = n * (n + 1) / 2;
                    (ups + k2 * (n - 1) - k2 * (k2 - 1) / 2 + k1) as usize
                }
            }
            _ => {
                let mut idx = 0i64;
                for i in (0..self.dim()).rev() {
                    idx = idx * n + cell.k[i];
                }
                idx as usize
            }
        }
    }

    /// Inverse of [`Family::cell_index`].
    pub fn cell_at(&self, level: u32, mut idx: usize) -> Cell {
        let n = 1usize << level;
        match self {
            Family::Triangle => {
                let ups = n * (n + 1) / 2;
                let (up, width) = if idx < ups { (true, n) } else { (false, n - 1) };
                if !up {
                    idx -= ups;
                }
                let mut k2 = 0;
                let mut row = width;
                while idx >= row {
                    idx -= row;
                    k2 += 1;
                    row -= 1;
                }
                Cell::new([idx as i64, k2 as i64, 0], up)
            }
            _ => {
                let mut k = [0i64; 3];
                for slot in k.iter_mut().take(self.dim()) {
                    *slot = (idx % n) as i64;
                    idx /= n;
                }
                Cell::new(k, true)
            }
        }
    }

    /// Cell of level `level` containing `x`. Cells are half-open; points on
    /// the outer boundary fall into the adjacent interior cell.
    pub fn locate(&self, level: u32, x: &[f64]) -> Cell {
        let n = 1i64 << level;
        let scale = n as f64;
        match self {
            Family::Triangle => {
                let s = [x[0] * scale, x[1] * scale];
                let mut k = [
                    (s[0].floor() as i64).clamp(0, n - 1),
                    (s[1].floor() as i64).clamp(0, n - 1),
                ];
                while k[0] + k[1] > n - 1 {
                    if k[0] >= k[1] {
                        k[0] -= 1;
                    } else {
                        k[1] -= 1;
                    }
                }
                let frac = (s[0] - k[0] as f64) + (s[1] - k[1] as f64);
                let up = frac < 1.0 || k[0] + k[1] > n - 2;
                Cell::new([k[0], k[1], 0], up)
            }
            _ => {
                let mut k = [0i64; 3];
                for (slot, v) in k.iter_mut().zip(x) {
                    *slot = ((v * scale).floor() as i64).clamp(0, n - 1);
                }
                Cell::new(k, true)
            }
        }
    }

    /// Children of `cell` at the next level, in filter-column order.
    pub fn children(&self, cell: &Cell) -> Vec<Cell> {
        let k = cell.k;
        match self {
            Family::Triangle => {
                let b = [2 * k[0], 2 * k[1], 0];
                let at = |dx: i64, dy: i64, up: bool| Cell::new([b[0] + dx, b[1] + dy, 0], up);
                if cell.up {
                    vec![at(0, 0, true), at(1, 0, true), at(0, 1, true), at(0, 0, false)]
                } else {
                    vec![at(1, 1, false), at(0, 1, false), at(1, 0, false), at(1, 1, true)]
                }
            }
            _ => {
                let d = self.dim();
                (0..1usize << d)
                    .map(|c| {
                        let mut kk = [0i64; 3];
                        for i in 0..d {
                            kk[i] = 2 * k[i] + ((c >> i) & 1) as i64;
                        }
                        Cell::new(kk, true)
                    })
                    .collect()
            }
        }
    }

    /// Parent of `cell` and the position of `cell` among the parent's children.
    pub fn parent(&self, cell: &Cell) -> (Cell, usize) {
        let p = [cell.k[0] >> 1, cell.k[1] >> 1, cell.k[2] >> 1];
        let r = [cell.k[0] & 1, cell.k[1] & 1, cell.k[2] & 1];
        match self {
            Family::Triangle => {
                let pos_up = |u: bool| Cell::new(p, u);
                match (cell.up, r[0], r[1]) {
                    (true, 0, 0) => (pos_up(true), 0),
                    (true, 1, 0) => (pos_up(true), 1),
                    (true, 0, 1) => (pos_up(true), 2),
                    (true, _, _) => (pos_up(false), 3),
                    (false, 0, 0) => (pos_up(true), 3),
                    (false, 1, 1) => (pos_up(false), 0),
                    (false, 0, 1) => (pos_up(false), 1),
                    (false, _, _) => (pos_up(false), 2),
                }
            }
            _ => {
                let pos = (0..self.dim()).map(|i| (r[i] as usize) << i).sum();
                (Cell::new(p, true), pos)
            }
        }
    }

    /// Orthogonal two-scale filter: row 0 builds the parent scaling function
    /// from the children, rows 1.. build the wavelet members.
    pub fn filter(&self) -> Vec<Vec<f64>> {
        match self {
            Family::Triangle => {
                let s = FRAC_1_SQRT_2;
                vec![
                    vec![0.5, 0.5, 0.5, 0.5],
                    vec![s, 0.0, 0.0, -s],
                    vec![0.0, s, -s, 0.0],
                    vec![0.5, -0.5, -0.5, 0.5],
                ]
            }
            _ => {
                let d = self.dim();
                let n = 1usize << d;
                let amp = 2f64.powf(-(d as f64) / 2.0);
                (0..n)
                    .map(|e| {
                        (0..n)
                            .map(|c| if (e & c).count_ones() % 2 == 1 { -amp } else { amp })
                            .collect()
                    })
                    .collect()
            }
        }
    }

    /// Quadrature node of a cell: its centroid.
    pub fn centroid(&self, level: u32, cell: &Cell) -> Vec<f64> {
        let h = 2f64.powi(-(level as i32));
        match self {
            Family::Triangle => {
                let off = if cell.up { 1.0 / 3.0 } else { 2.0 / 3.0 };
                vec![(cell.k[0] as f64 + off) * h, (cell.k[1] as f64 + off) * h]
            }
            _ => (0..self.dim()).map(|i| (cell.k[i] as f64 + 0.5) * h).collect(),
        }
    }

    /// Level-`level` ancestor index for every cell of level `fine`, in the
    /// canonical order of the fine level.
    pub fn ancestor_map(&self, fine: u32, level: u32) -> Vec<usize> {
        (0..self.cell_count(fine))
            .map(|i| {
                let mut c = self.cell_at(fine, i);
                for _ in level..fine {
                    c = self.parent(&c).0;
                }
                self.cell_index(level, &c)
            })
            .collect()
    }
}
