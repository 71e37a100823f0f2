//! Yang-Baxter operators `T_i^(n)`, their quasi-multiplicative extension
//! `φ_n`, and the Gram operators `P^(n)` and `R^(n)` as dense level maps.

use nalgebra::DMatrix;

use super::operator::LevelMap;
use super::space::{TruncatedFockSpace, DENSE_LEVEL_CAP};
use crate::error::{Error, Result};
use crate::linalg::CscMatrix;
use crate::symcomb::{self, Permutation, ReducedWord, PERMUTATION_CAP};

fn dense_level(space: &TruncatedFockSpace, n: usize, m: &CscMatrix) -> Result<LevelMap> {
    let dim = space.level_dim(n);
    if dim > DENSE_LEVEL_CAP {
        return Err(Error::ResourceLimit {
            what: "dense level dimension",
            requested: dim,
            cap: DENSE_LEVEL_CAP,
        });
    }
    Ok(LevelMap {
        from_level: n,
        to_level: n,
        matrix: m.to_dense(),
    })
}

/// `T_i^(n)`: `e_{x_1 ... x_n} ↦ Q(x_i, x_{i+1}) e_{... x_{i+1} x_i ...}`.
pub fn swap_op(space: &TruncatedFockSpace, n: usize, i: usize) -> Result<LevelMap> {
    let t = space.swap_sparse(n, i)?;
    dense_level(space, n, &t)
}

/// Sparse product `T_{i_1} ⋯ T_{i_k}` along a word.
pub fn word_product_sparse(space: &TruncatedFockSpace, n: usize, word: &ReducedWord) -> Result<CscMatrix> {
    space.check_level(n)?;
    if word.n != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: word.n,
        });
    }
    let mut acc = CscMatrix::identity(space.level_dim(n));
    for &i in &word.letters {
        acc = acc.mul(&space.swap_sparse(n, i)?);
    }
    Ok(acc)
}

fn check_degree(space: &TruncatedFockSpace, n: usize) -> Result<()> {
    space.check_level(n)?;
    if n > PERMUTATION_CAP {
        return Err(Error::ResourceLimit {
            what: "permutation degree",
            requested: n,
            cap: PERMUTATION_CAP,
        });
    }
    Ok(())
}

/// `φ_n(σ) = T_{i_1} ⋯ T_{i_k}` for a minimal word `π_{i_1} ⋯ π_{i_k}` of `σ`.
pub fn phi_op(space: &TruncatedFockSpace, n: usize, p: &Permutation) -> Result<LevelMap> {
    check_degree(space, n)?;
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: p.len(),
        });
    }
    if n <= 1 {
        return dense_level(space, n, &CscMatrix::identity(space.level_dim(n)));
    }
    let word = symcomb::reduced_word(p);
    dense_level(space, n, &word_product_sparse(space, n, &word)?)
}

/// `P^(n) = Σ_{σ ∈ S_n} φ_n(σ)` summed over all permutations; the oracle
/// for [`p_recursive`].
pub fn p_direct(space: &TruncatedFockSpace, n: usize) -> Result<LevelMap> {
    check_degree(space, n)?;
    let dim = space.level_dim(n);
    if n <= 1 {
        return dense_level(space, n, &CscMatrix::identity(dim));
    }
    if dim > DENSE_LEVEL_CAP {
        return Err(Error::ResourceLimit {
            what: "dense level dimension",
            requested: dim,
            cap: DENSE_LEVEL_CAP,
        });
    }
    let mut sum = DMatrix::zeros(dim, dim);
    for sigma in symcomb::enumerate_permutations(n)? {
        let word = symcomb::reduced_word(&sigma);
        let phi = word_product_sparse(space, n, &word)?;
        for j in 0..dim {
            let (rows, vals) = phi.column(j);
            for (&i, &v) in rows.iter().zip(vals) {
                sum[(i, j)] += v;
            }
        }
    }
    Ok(LevelMap {
        from_level: n,
        to_level: n,
        matrix: sum,
    })
}

/// `R^(n) = 1 + T_1 + T_1 T_2 + ... + T_1 ⋯ T_{n-1}`.
pub fn r_op(space: &TruncatedFockSpace, n: usize) -> Result<LevelMap> {
    let r = space.r_sparse(n)?;
    dense_level(space, n, r)
}

/// `P^(n)` via `P^(n+1) = (1 ⊗ P^(n)) R^(n+1)`, the production path.
pub fn p_recursive(space: &TruncatedFockSpace, n: usize) -> Result<LevelMap> {
    let p = space.gram_sparse(n)?;
    dense_level(space, n, p)
}
