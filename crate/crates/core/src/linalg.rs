//! Dense symmetric eigen-solves and a small compressed-sparse-column matrix.
//!
//! Every ladder operator, `T_i` and `R^(n)` is sparse with a handful of
//! entries per column, and `P^(n)` has at most `n!`. Levels too large to
//! hold densely (`m^n` in the hundreds of thousands) only ever go through
//! [`CscMatrix`].

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Eigenvalues of a symmetric matrix in ascending order.
///
/// The input is symmetrized as `(M + Mᵀ) / 2` first.
pub fn sym_eigs(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let s = symmetrized(m)?;
    if s.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut values: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigenpairs of a symmetric matrix, eigenvalues ascending and the matching
/// eigenvectors as columns.
pub fn sym_eigen(m: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let s = symmetrized(m)?;
    let n = s.nrows();
    if n == 0 {
        return Ok((DVector::zeros(0), DMatrix::zeros(0, 0)));
    }
    let eig = s.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

fn symmetrized(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            actual: m.ncols(),
        });
    }
    Ok((m + m.transpose()) * 0.5)
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

/// Spectral norm via the smaller of the two Gram products.
pub fn spectral_norm(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0.0);
    }
    let gram = if m.nrows() <= m.ncols() {
        m * m.transpose()
    } else {
        m.transpose() * m
    };
    let top = sym_eigs(&gram)?.last().copied().unwrap_or(0.0);
    Ok(crate::math::sqrt(top.max(0.0)))
}

/// Compressed sparse column matrix of `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct CscMatrix {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CscMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            col_ptr: alloc::vec![0; ncols + 1],
            row_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            col_ptr: (0..=n).collect(),
            row_idx: (0..n).collect(),
            values: alloc::vec![1.0; n],
        }
    }

    /// Builds a matrix column by column. `fill(j, entries)` pushes
    /// `(row, value)` pairs for column `j`; duplicates are summed and exact
    /// zeros dropped.
    pub fn from_columns(
        nrows: usize,
        ncols: usize,
        mut fill: impl FnMut(usize, &mut Vec<(usize, f64)>),
    ) -> Self {
        let mut col_ptr = Vec::with_capacity(ncols + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        let mut scratch = Vec::new();
        col_ptr.push(0);
        for j in 0..ncols {
            scratch.clear();
            fill(j, &mut scratch);
            scratch.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < scratch.len() {
                let row = scratch[k].0;
                debug_assert!(row < nrows);
                let mut v = 0.0;
                while k < scratch.len() && scratch[k].0 == row {
                    v += scratch[k].1;
                    k += 1;
                }
                if v != 0.0 {
                    row_idx.push(row);
                    values.push(v);
                }
            }
            col_ptr.push(row_idx.len());
        }
        Self {
            nrows,
            ncols,
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        Self::from_columns(m.nrows(), m.ncols(), |j, out| {
            for (i, &v) in m.column(j).iter().enumerate() {
                out.push((i, v));
            }
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Row indices and values stored in column `j`.
    pub fn column(&self, j: usize) -> (&[usize], &[f64]) {
        let r = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_idx[r.clone()], &self.values[r])
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.nrows, self.ncols);
        for j in 0..self.ncols {
            let (rows, vals) = self.column(j);
            for (&i, &v) in rows.iter().zip(vals) {
                out[(i, j)] += v;
            }
        }
        out
    }

    pub fn transpose(&self) -> CscMatrix {
        let mut counts = alloc::vec![0usize; self.nrows + 1];
        for &i in &self.row_idx {
            counts[i + 1] += 1;
        }
        for i in 0..self.nrows {
            counts[i + 1] += counts[i];
        }
        let col_ptr = counts.clone();
        let mut next = counts;
        let mut row_idx = alloc::vec![0; self.nnz()];
        let mut values = alloc::vec![0.0; self.nnz()];
        for j in 0..self.ncols {
            let (rows, vals) = self.column(j);
            for (&i, &v) in rows.iter().zip(vals) {
                let slot = next[i];
                row_idx[slot] = j;
                values[slot] = v;
                next[i] += 1;
            }
        }
        CscMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            col_ptr,
            row_idx,
            values,
        }
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &CscMatrix) -> CscMatrix {
        assert_eq!(self.ncols, rhs.nrows, "sparse product shape mismatch");
        let mut acc = alloc::vec![0.0; self.nrows];
        let mut mark = alloc::vec![usize::MAX; self.nrows];
        let mut touched: Vec<usize> = Vec::new();
        let mut col_ptr = Vec::with_capacity(rhs.ncols + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for j in 0..rhs.ncols {
            touched.clear();
            let (rk, rv) = rhs.column(j);
            for (&k, &b) in rk.iter().zip(rv) {
                let (ri, lv) = self.column(k);
                for (&i, &a) in ri.iter().zip(lv) {
                    if mark[i] != j {
                        mark[i] = j;
                        acc[i] = 0.0;
                        touched.push(i);
                    }
                    acc[i] += a * b;
                }
            }
            touched.sort_unstable();
            for &i in &touched {
                if acc[i] != 0.0 {
                    row_idx.push(i);
                    values.push(acc[i]);
                }
            }
            col_ptr.push(row_idx.len());
        }
        CscMatrix {
            nrows: self.nrows,
            ncols: rhs.ncols,
            col_ptr,
            row_idx,
            values,
        }
    }

    /// `self + alpha · other`.
    pub fn add_scaled(&self, alpha: f64, other: &CscMatrix) -> CscMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        CscMatrix::from_columns(self.nrows, self.ncols, |j, out| {
            let (r, v) = self.column(j);
            out.extend(r.iter().copied().zip(v.iter().copied()));
            let (r, v) = other.column(j);
            out.extend(r.iter().copied().zip(v.iter().map(|x| alpha * x)));
        })
    }

    pub fn scaled(&self, alpha: f64) -> CscMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    /// `I_m ⊗ self`: `m` copies of `self` down the diagonal, matching the
    /// lexicographic layout in which the first tensor factor varies slowest.
    pub fn kron_identity_left(&self, m: usize) -> CscMatrix {
        let (r, c) = (self.nrows, self.ncols);
        CscMatrix::from_columns(m * r, m * c, |j, out| {
            let (block, inner) = (j / c, j % c);
            let (rows, vals) = self.column(inner);
            out.extend(rows.iter().map(|&i| block * r + i).zip(vals.iter().copied()));
        })
    }

    /// Places `blocks` side by side.
    pub fn hstack(nrows: usize, blocks: &[&CscMatrix]) -> CscMatrix {
        let ncols = blocks.iter().map(|b| b.ncols).sum();
        let mut owner = Vec::with_capacity(ncols);
        for (k, b) in blocks.iter().enumerate() {
            assert_eq!(b.nrows, nrows, "hstack row mismatch");
            owner.extend((0..b.ncols).map(|j| (k, j)));
        }
        CscMatrix::from_columns(nrows, ncols, |j, out| {
            let (k, jj) = owner[j];
            let (rows, vals) = blocks[k].column(jj);
            out.extend(rows.iter().copied().zip(vals.iter().copied()));
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = alloc::vec![0.0; self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            let (rows, vals) = self.column(j);
            for (&i, &v) in rows.iter().zip(vals) {
                y[i] += v * xj;
            }
        }
        y
    }

    /// `out += selfᵀ · rhs` (both with the same row count).
    pub fn add_tr_mul_into(&self, rhs: &CscMatrix, out: &mut DMatrix<f64>) {
        assert_eq!(self.nrows, rhs.nrows);
        assert_eq!(out.shape(), (self.ncols, rhs.ncols));
        let rows_of_self = self.transpose();
        for j in 0..rhs.ncols {
            let (rk, rv) = rhs.column(j);
            for (&k, &b) in rk.iter().zip(rv) {
                let (cols, av) = rows_of_self.column(k);
                for (&c, &a) in cols.iter().zip(av) {
                    out[(c, j)] += a * b;
                }
            }
        }
    }
}
