use alloc::boxed::Box;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use once_cell::race::OnceBox;

use crate::error::{Error, Result};
use crate::kernel::QKernel;
use crate::linalg::{self, CscMatrix};
use crate::math;

/// Largest level dimension for which a dense Gram factorization is built.
pub const DENSE_LEVEL_CAP: usize = 4096;
/// Largest level dimension the space will index at all.
pub const LEVEL_DIM_CAP: usize = 1 << 24;

/// Smallest Gram eigenvalue, relative to the largest, accepted as positive.
const POSITIVITY_FLOOR: f64 = 1e-13;

/// `⊕_{k ≤ n_max} H^{⊗k}` over an `m`-point grid.
///
/// Sparse Gram operators and `R^(n)` are built on first use by the recursion
/// `P^(n+1) = (1 ⊗ P^(n)) R^(n+1)`; dense eigen-factorizations of `P^(n)`
/// are built on first use for levels up to [`DENSE_LEVEL_CAP`]. All caches
/// are write-once, so a space can be shared between threads.
pub struct TruncatedFockSpace {
    kernel: QKernel,
    n_max: usize,
    level_dims: Vec<usize>,
    offsets: Vec<usize>,
    total_dim: usize,
    r_ops: Vec<OnceBox<CscMatrix>>,
    r_mirror_ops: Vec<OnceBox<CscMatrix>>,
    grams: Vec<OnceBox<CscMatrix>>,
    factors: Vec<OnceBox<GramFactor>>,
}

impl core::fmt::Debug for TruncatedFockSpace {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("TruncatedFockSpace")
            .field("m", &self.m())
            .field("n_max", &self.n_max)
            .field("sup_q", &self.kernel.sup_q())
            .field("total_dim", &self.total_dim)
            .finish()
    }
}

impl TruncatedFockSpace {
    pub fn new(kernel: QKernel, n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::Config("n_max must be >= 1".into()));
        }
        let m = kernel.len();
        let mut level_dims = Vec::with_capacity(n_max + 1);
        let mut dim = 1usize;
        for k in 0..=n_max {
            if k > 0 {
                dim = dim
                    .checked_mul(m)
                    .filter(|&d| d <= LEVEL_DIM_CAP)
                    .ok_or(Error::ResourceLimit {
                        what: "level dimension",
                        requested: usize::MAX.min(m.saturating_pow(k as u32)),
                        cap: LEVEL_DIM_CAP,
                    })?;
            }
            level_dims.push(dim);
        }
        let mut offsets = Vec::with_capacity(n_max + 2);
        let mut acc = 0;
        for &d in &level_dims {
            offsets.push(acc);
            acc += d;
        }
        Ok(Self {
            kernel,
            n_max,
            level_dims,
            offsets,
            total_dim: acc,
            r_ops: cells(n_max),
            r_mirror_ops: cells(n_max),
            grams: cells(n_max),
            factors: cells(n_max),
        })
    }

    pub fn kernel(&self) -> &QKernel {
        &self.kernel
    }

    /// Number of grid points.
    pub fn m(&self) -> usize {
        self.kernel.len()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn level_dims(&self) -> &[usize] {
        &self.level_dims
    }

    pub fn level_dim(&self, k: usize) -> usize {
        self.level_dims[k]
    }

    /// Offset of level `k` in the flattened coefficient vector.
    pub fn offset(&self, k: usize) -> usize {
        self.offsets[k]
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub(crate) fn check_level(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            return Err(Error::IndexOutOfRange(alloc::format!(
                "level {n} > n_max = {}",
                self.n_max
            )));
        }
        Ok(())
    }

    /// Sparse `T_i^(n)`.
    pub fn swap_sparse(&self, n: usize, i: usize) -> Result<CscMatrix> {
        self.check_level(n)?;
        if n < 2 || i == 0 || i >= n {
            return Err(Error::IndexOutOfRange(alloc::format!(
                "T_{i} on level {n}"
            )));
        }
        Ok(swap_matrix(&self.kernel, n, i))
    }

    /// Sparse `R^(n) = 1 + T_1 + T_1 T_2 + ... + T_1 ⋯ T_{n-1}`.
    pub fn r_sparse(&self, n: usize) -> Result<&CscMatrix> {
        self.check_level(n)?;
        if n == 0 {
            return Err(Error::IndexOutOfRange("R^(0) is undefined".into()));
        }
        Ok(self.r_ops[n].get_or_init(|| {
            Box::new(partial_products(&self.kernel, n, (1..n).collect()))
        }))
    }

    /// Sparse mirror image of `R^(n)`:
    /// `1 + T_{n-1} + T_{n-1} T_{n-2} + ... + T_{n-1} ⋯ T_1`.
    pub fn r_mirror_sparse(&self, n: usize) -> Result<&CscMatrix> {
        self.check_level(n)?;
        if n == 0 {
            return Err(Error::IndexOutOfRange("R^(0) is undefined".into()));
        }
        Ok(self.r_mirror_ops[n].get_or_init(|| {
            Box::new(partial_products(&self.kernel, n, (1..n).rev().collect()))
        }))
    }

    /// Sparse `P^(n)`, built by the recursion from `P^(1) = 1`.
    pub fn gram_sparse(&self, n: usize) -> Result<&CscMatrix> {
        self.check_level(n)?;
        if let Some(p) = self.grams[n].get() {
            return Ok(p);
        }
        let p = match n {
            0 | 1 => CscMatrix::identity(self.level_dims[n]),
            _ => {
                let lower = self.gram_sparse(n - 1)?;
                lower.kron_identity_left(self.m()).mul(self.r_sparse(n)?)
            }
        };
        Ok(self.grams[n].get_or_init(|| Box::new(p)))
    }

    /// Dense eigen-factorization of `P^(n)`.
    pub fn gram_factor(&self, n: usize) -> Result<&GramFactor> {
        self.check_level(n)?;
        if let Some(f) = self.factors[n].get() {
            return Ok(f);
        }
        if self.level_dims[n] > DENSE_LEVEL_CAP {
            return Err(Error::ResourceLimit {
                what: "dense level dimension",
                requested: self.level_dims[n],
                cap: DENSE_LEVEL_CAP,
            });
        }
        let factor = GramFactor::new(n, self.gram_sparse(n)?.to_dense())?;
        Ok(self.factors[n].get_or_init(|| Box::new(factor)))
    }
}

fn cells<T>(n_max: usize) -> Vec<OnceBox<T>> {
    (0..=n_max).map(|_| OnceBox::new()).collect()
}

/// Index of `(x_1, ..., x_n)` with `x_1` varying slowest.
pub fn multi_index(m: usize, digits: &[usize]) -> usize {
    digits.iter().fold(0, |acc, &d| acc * m + d)
}

/// Inverse of [`multi_index`].
pub fn digits_of(m: usize, n: usize, mut index: usize) -> Vec<usize> {
    let mut out = alloc::vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = index % m;
        index /= m;
    }
    out
}

fn swap_matrix(kernel: &QKernel, n: usize, i: usize) -> CscMatrix {
    let m = kernel.len();
    let dim = m.pow(n as u32);
    // positions i and i + 1 (1-based) have strides m^(n-i) and m^(n-i-1)
    let hi = m.pow((n - i) as u32);
    let lo = m.pow((n - i - 1) as u32);
    CscMatrix::from_columns(dim, dim, |y, out| {
        let a = (y / hi) % m;
        let b = (y / lo) % m;
        let swapped = y - a * hi - b * lo + b * hi + a * lo;
        out.push((swapped, kernel.get(a, b)));
    })
}

/// `1 + T_{s_1} + T_{s_1} T_{s_2} + ...` along the given index sequence.
fn partial_products(kernel: &QKernel, n: usize, sequence: Vec<usize>) -> CscMatrix {
    let dim = kernel.len().pow(n as u32);
    let mut sum = CscMatrix::identity(dim);
    let mut running = CscMatrix::identity(dim);
    for i in sequence {
        running = running.mul(&swap_matrix(kernel, n, i));
        sum = sum.add_scaled(1.0, &running);
    }
    sum
}

/// Dense `P^(n)` with its symmetric eigen-decomposition `V Λ Vᵀ`.
#[derive(Clone, Debug)]
pub struct GramFactor {
    level: usize,
    matrix: DMatrix<f64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl GramFactor {
    pub fn new(level: usize, matrix: DMatrix<f64>) -> Result<Self> {
        let (eigenvalues, eigenvectors) = linalg::sym_eigen(&matrix)?;
        let min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let max = eigenvalues.iter().copied().fold(0.0, f64::max);
        if !(min > POSITIVITY_FLOOR * max.max(1.0)) {
            return Err(Error::PositivityViolation {
                level,
                min_eigenvalue: min,
            });
        }
        Ok(Self {
            level,
            matrix,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `λ_max / λ_min`.
    pub fn condition(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1] / self.eigenvalues[0]
    }

    fn spectral_mul(&self, x: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let mut t = self.eigenvectors.transpose() * x;
        for (k, mut row) in t.row_iter_mut().enumerate() {
            row *= f(self.eigenvalues[k]);
        }
        &self.eigenvectors * t
    }

    /// `P⁻¹ X`.
    pub fn inverse_mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.spectral_mul(x, |l| 1.0 / l)
    }

    /// `P^{1/2} X`.
    pub fn sqrt_mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.spectral_mul(x, math::sqrt)
    }

    /// `P^{-1/2} X`.
    pub fn inv_sqrt_mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.spectral_mul(x, |l| 1.0 / math::sqrt(l))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Grid;
    use crate::test_support::{constant_space, random_kernel};

    #[test]
    fn dimensions_and_offsets() {
        let s = constant_space(3, 0.2, 3);
        assert_eq!(s.level_dims(), &[1, 3, 9, 27]);
        assert_eq!(s.total_dim(), 40);
        assert_eq!(s.offset(2), 4);
        let g = Grid::interval_1d(0.0, 1.0, 2).unwrap();
        assert!(TruncatedFockSpace::new(QKernel::constant(&g, 0.1).unwrap(), 0).is_err());
        assert!(matches!(
            TruncatedFockSpace::new(QKernel::constant(&Grid::interval_1d(0.0, 1.0, 1000).unwrap(), 0.1).unwrap(), 3),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn multi_index_round_trip() {
        for idx in 0..64 {
            let d = digits_of(4, 3, idx);
            assert_eq!(multi_index(4, &d), idx);
        }
        assert_eq!(multi_index(3, &[1, 0, 2]), 11);
    }

    #[test]
    fn gram_factors_are_positive() {
        let s = TruncatedFockSpace::new(random_kernel(3, 9), 4).unwrap();
        for n in 0..=4 {
            let f = s.gram_factor(n).unwrap();
            assert!(f.min_eigenvalue() > 0.0);
            let x = DMatrix::identity(s.level_dim(n), s.level_dim(n));
            let back = f.sqrt_mul(&f.inv_sqrt_mul(&x));
            assert!(linalg::max_abs_diff(&back, &x) <= 1e-10);
            let inv = f.inverse_mul(f.matrix());
            assert!(linalg::max_abs_diff(&inv, &x) <= 1e-10);
        }
    }

    #[test]
    fn mirror_is_reversed_r() {
        let s = TruncatedFockSpace::new(random_kernel(2, 4), 3).unwrap();
        let rev = |y: usize| multi_index(2, &digits_of(2, 3, y).into_iter().rev().collect::<Vec<_>>());
        let u = CscMatrix::from_columns(8, 8, |y, out| out.push((rev(y), 1.0)));
        let conj = u.mul(s.r_sparse(3).unwrap()).mul(&u).to_dense();
        assert!(linalg::max_abs_diff(&conj, &s.r_mirror_sparse(3).unwrap().to_dense()) <= 1e-15);
    }
}
