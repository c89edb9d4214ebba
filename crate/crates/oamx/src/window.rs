//! Finite OAM windows and window-indexed matrices.
//!
//! A window is an inclusive interval of OAM values. Together with the mode
//! count d it fixes a finite basis, ordered lexicographically by (ℓ, mode):
//! index(ℓ, m) = (ℓ − lo)·d + m. Networks containing OAM shifts map one
//! window onto another, so the dense representation of a network is a
//! rectangular isometry between two windows.

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::BasisLabel;

/// Inclusive interval [lo, hi] of OAM values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OamWindow {
    lo: i64,
    hi: i64,
}

impl OamWindow {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!(
                "empty OAM window [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    /// Number of OAM values in the window.
    pub fn oam_len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    /// Basis dimension for mode count d.
    pub fn dim(&self, d: usize) -> usize {
        self.oam_len() * d
    }

    pub fn contains(&self, ell: i64) -> bool {
        (self.lo..=self.hi).contains(&ell)
    }

    /// Flat basis index of (ℓ, mode), if ℓ lies in the window.
    pub fn index_of(&self, label: BasisLabel, d: usize) -> Option<usize> {
        if !self.contains(label.ell) || label.mode >= d {
            return None;
        }
        Some((label.ell - self.lo) as usize * d + label.mode)
    }

    /// Basis label at a flat index.
    pub fn label_at(&self, index: usize, d: usize) -> BasisLabel {
        BasisLabel::new(self.lo + (index / d) as i64, index % d)
    }

    /// All basis labels in order.
    pub fn labels(&self, d: usize) -> Vec<BasisLabel> {
        (0..self.dim(d)).map(|i| self.label_at(i, d)).collect()
    }

    /// The window translated by n.
    pub fn shifted(&self, n: i64) -> Self {
        Self {
            lo: self.lo + n,
            hi: self.hi + n,
        }
    }

    /// Smallest window containing both.
    pub fn hull(&self, other: Self) -> Self {
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn grown_to(&self, ell: i64) -> Self {
        Self {
            lo: self.lo.min(ell),
            hi: self.hi.max(ell),
        }
    }
}

/// Dense matrix of a network between two OAM windows.
///
/// Shape is (output.dim(d), input.dim(d)). Columns are indexed by input-window
/// labels and rows by output-window labels. When every input ket's trajectory
/// stays representable the matrix is an isometry: M†M = I on the input basis.
#[derive(Clone, Debug)]
pub struct WindowedMatrix {
    pub input: OamWindow,
    pub output: OamWindow,
    pub d: usize,
    pub matrix: Array2<Complex64>,
}

impl WindowedMatrix {
    /// Max-norm of M†M − I over the input basis.
    pub fn unitarity_residual(&self) -> f64 {
        let gram = conj_transpose(self.matrix.view()).dot(&self.matrix);
        let n = gram.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                worst = worst.max((gram[[i, j]] - expected).norm());
            }
        }
        worst
    }

    pub fn entry(&self, out: BasisLabel, inp: BasisLabel) -> Option<Complex64> {
        let r = self.output.index_of(out, self.d)?;
        let c = self.input.index_of(inp, self.d)?;
        Some(self.matrix[[r, c]])
    }

    /// Submatrix with rows taken from output labels and columns from input
    /// labels, in the order given.
    pub fn restrict(&self, rows: &[BasisLabel], cols: &[BasisLabel]) -> Result<Array2<Complex64>> {
        let mut out = Array2::zeros((rows.len(), cols.len()));
        for (i, row) in rows.iter().enumerate() {
            let r = self.output.index_of(*row, self.d).ok_or(Error::WindowEscape {
                ell: row.ell,
                shifted: row.ell,
                lo: self.output.lo,
                hi: self.output.hi,
            })?;
            for (j, col) in cols.iter().enumerate() {
                let c = self.input.index_of(*col, self.d).ok_or(Error::WindowEscape {
                    ell: col.ell,
                    shifted: col.ell,
                    lo: self.input.lo,
                    hi: self.input.hi,
                })?;
                out[[i, j]] = self.matrix[[r, c]];
            }
        }
        Ok(out)
    }
}

pub fn conj_transpose(m: ArrayView2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|z| z.conj())
}

/// Max-norm entrywise difference.
pub fn max_abs_diff(a: ArrayView2<Complex64>, b: ArrayView2<Complex64>) -> f64 {
    assert_eq!(a.dim(), b.dim(), "shape mismatch in matrix comparison");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Max-norm difference after aligning a single global phase.
///
/// The phase is fixed on the largest-magnitude entry of `b`: the comparison
/// is max |a − g·b| with g = a[idx]/b[idx] normalized to unit modulus. Stable
/// as long as the matrices are not near zero.
pub fn max_abs_diff_up_to_phase(a: ArrayView2<Complex64>, b: ArrayView2<Complex64>) -> f64 {
    assert_eq!(a.dim(), b.dim(), "shape mismatch in matrix comparison");
    let mut idx = (0, 0);
    let mut best = 0.0;
    for ((i, j), v) in b.indexed_iter() {
        if v.norm() > best {
            best = v.norm();
            idx = (i, j);
        }
    }
    if best == 0.0 {
        return max_abs_diff(a, b);
    }
    let g = a[[idx.0, idx.1]] / b[[idx.0, idx.1]];
    let g = if g.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { g / g.norm() };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - g * y).norm())
        .fold(0.0, f64::max)
}

/// Max-norm of U†U − I; the unitarity residual of a square matrix.
pub fn unitarity_residual(u: ArrayView2<Complex64>) -> f64 {
    let gram = conj_transpose(u).dot(&u);
    let mut worst: f64 = 0.0;
    for ((i, j), v) in gram.indexed_iter() {
        let expected = if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        worst = worst.max((v - expected).norm());
    }
    worst
}
