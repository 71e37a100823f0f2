//! Left and right creation, annihilation and field operators.
//!
//! A grid function `h` enters through its coefficients `ε^{j/2} h(x)` in the
//! orthonormal basis `{e_x}`; the `*_basis` variants take `e_x` directly and
//! carry no smearing scale.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::operator::{q_adjoint, FockOperator};
use super::space::{TruncatedFockSpace, DENSE_LEVEL_CAP};
use crate::error::{Error, Result};
use crate::kernel::GridFunction;
use crate::linalg::CscMatrix;

/// Which end of the tensor product an operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

fn check_coeffs(space: &TruncatedFockSpace, c: &[f64]) -> Result<()> {
    if c.len() != space.m() {
        return Err(Error::DimensionMismatch {
            expected: space.m(),
            actual: c.len(),
        });
    }
    Ok(())
}

/// Creation block from level `k` to `k + 1`: `f ↦ c ⊗ f` (left) or
/// `f ↦ f ⊗ c` (right).
pub fn creation_block(space: &TruncatedFockSpace, side: Side, c: &[f64], k: usize) -> Result<CscMatrix> {
    check_coeffs(space, c)?;
    if k >= space.n_max() {
        return Err(Error::IndexOutOfRange(alloc::format!(
            "creation from level {k} leaves the truncation n_max = {}",
            space.n_max()
        )));
    }
    let m = space.m();
    let dim_k = space.level_dim(k);
    let support: Vec<(usize, f64)> = c.iter().copied().enumerate().filter(|e| e.1 != 0.0).collect();
    Ok(CscMatrix::from_columns(m * dim_k, dim_k, |y, out| {
        for &(x, v) in &support {
            let row = match side {
                Side::Left => x * dim_k + y,
                Side::Right => y * m + x,
            };
            out.push((row, v));
        }
    }))
}

/// Free annihilation block from level `k` to `k - 1`: contracts the first
/// (left) or last (right) tensor slot against `c`.
pub fn free_annihilation_block(space: &TruncatedFockSpace, side: Side, c: &[f64], k: usize) -> Result<CscMatrix> {
    check_coeffs(space, c)?;
    space.check_level(k)?;
    if k == 0 {
        return Err(Error::IndexOutOfRange("annihilation on the vacuum level".into()));
    }
    let m = space.m();
    let dim_lower = space.level_dim(k - 1);
    Ok(CscMatrix::from_columns(dim_lower, m * dim_lower, |z, out| {
        let (slot, rest) = match side {
            Side::Left => (z / dim_lower, z % dim_lower),
            Side::Right => (z % m, z / m),
        };
        out.push((rest, c[slot]));
    }))
}

/// Q-annihilation block from level `k` to `k - 1`.
///
/// Left: `l(c) R^(k)`. Right: `r(c) (1 + T_{k-1} + T_{k-1} T_{k-2} + ... )`,
/// the mirror image of `R^(k)` under reversal of tensor slots.
pub fn annihilation_block(space: &TruncatedFockSpace, side: Side, c: &[f64], k: usize) -> Result<CscMatrix> {
    let free = free_annihilation_block(space, side, c, k)?;
    let r = match side {
        Side::Left => space.r_sparse(k)?,
        Side::Right => space.r_mirror_sparse(k)?,
    };
    Ok(free.mul(r))
}

fn dense_guard(space: &TruncatedFockSpace, levels: impl Iterator<Item = usize>) -> Result<()> {
    for k in levels {
        if space.level_dim(k) > DENSE_LEVEL_CAP {
            return Err(Error::ResourceLimit {
                what: "dense level dimension",
                requested: space.level_dim(k),
                cap: DENSE_LEVEL_CAP,
            });
        }
    }
    Ok(())
}

fn creation_operator(space: &TruncatedFockSpace, side: Side, c: &[f64]) -> Result<FockOperator> {
    check_coeffs(space, c)?;
    dense_guard(space, 0..=space.n_max())?;
    let blocks = (0..space.n_max())
        .map(|k| creation_block(space, side, c, k).map(|b| (k, b.to_dense())))
        .collect::<Result<Vec<(usize, DMatrix<f64>)>>>()?;
    Ok(FockOperator::homogeneous(space, 1, blocks))
}

fn annihilation_operator(space: &TruncatedFockSpace, side: Side, c: &[f64]) -> Result<FockOperator> {
    check_coeffs(space, c)?;
    dense_guard(space, 0..=space.n_max())?;
    let blocks = (1..=space.n_max())
        .map(|k| annihilation_block(space, side, c, k).map(|b| (k, b.to_dense())))
        .collect::<Result<Vec<(usize, DMatrix<f64>)>>>()?;
    Ok(FockOperator::homogeneous(space, -1, blocks))
}

fn smeared(space: &TruncatedFockSpace, h: &GridFunction) -> Result<Vec<f64>> {
    h.check_len(space.m())?;
    Ok(h.coefficients(space.kernel().grid()))
}

fn unit(space: &TruncatedFockSpace, x: usize) -> Result<Vec<f64>> {
    if x >= space.m() {
        return Err(Error::IndexOutOfRange(alloc::format!(
            "grid index {x} >= m = {}",
            space.m()
        )));
    }
    let mut c = alloc::vec![0.0; space.m()];
    c[x] = 1.0;
    Ok(c)
}

/// `a⁺(h)`: `f ↦ h ⊗ f`.
pub fn create(space: &TruncatedFockSpace, h: &GridFunction) -> Result<FockOperator> {
    creation_operator(space, Side::Left, &smeared(space, h)?)
}

/// `a⁺(e_x)`.
pub fn create_basis(space: &TruncatedFockSpace, x: usize) -> Result<FockOperator> {
    creation_operator(space, Side::Left, &unit(space, x)?)
}

/// `a(h) = l(h) R^(n)` on level `n`.
pub fn annihilate(space: &TruncatedFockSpace, h: &GridFunction) -> Result<FockOperator> {
    annihilation_operator(space, Side::Left, &smeared(space, h)?)
}

/// `a(e_x)`.
pub fn annihilate_basis(space: &TruncatedFockSpace, x: usize) -> Result<FockOperator> {
    annihilation_operator(space, Side::Left, &unit(space, x)?)
}

/// `a_r⁺(h)`: `f ↦ f ⊗ h`.
pub fn right_create(space: &TruncatedFockSpace, h: &GridFunction) -> Result<FockOperator> {
    creation_operator(space, Side::Right, &smeared(space, h)?)
}

pub fn right_create_basis(space: &TruncatedFockSpace, x: usize) -> Result<FockOperator> {
    creation_operator(space, Side::Right, &unit(space, x)?)
}

/// `a_r(h)`, defined as the Q-adjoint of `a_r⁺(h)`.
pub fn right_annihilate(space: &TruncatedFockSpace, h: &GridFunction) -> Result<FockOperator> {
    q_adjoint(space, &right_create(space, h)?)
}

pub fn right_annihilate_basis(space: &TruncatedFockSpace, x: usize) -> Result<FockOperator> {
    q_adjoint(space, &right_create_basis(space, x)?)
}

/// `a_r(h)` from the closed form `r(h) (1 + T_{n-1} + ... + T_{n-1} ⋯ T_1)`,
/// without inverting any Gram operator.
pub fn right_annihilate_mirror(space: &TruncatedFockSpace, h: &GridFunction) -> Result<FockOperator> {
    annihilation_operator(space, Side::Right, &smeared(space, h)?)
}

/// `w(h) = a⁺(h) + a(h)`.
pub fn field(space: &TruncatedFockSpace, h: &GridFunction) -> Result<FockOperator> {
    Ok(&create(space, h)? + &annihilate(space, h)?)
}

pub fn field_basis(space: &TruncatedFockSpace, x: usize) -> Result<FockOperator> {
    Ok(&create_basis(space, x)? + &annihilate_basis(space, x)?)
}

/// `w_r(h) = a_r⁺(h) + a_r(h)`.
pub fn right_field(space: &TruncatedFockSpace, h: &GridFunction) -> Result<FockOperator> {
    Ok(&right_create(space, h)? + &right_annihilate(space, h)?)
}
