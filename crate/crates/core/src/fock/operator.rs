use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::ops::{Add, Sub};

use nalgebra::{DMatrix, DVector};

use super::space::TruncatedFockSpace;
use crate::error::{Error, Result};
use crate::math;

/// A dense linear map from one tensor level to another.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelMap {
    pub from_level: usize,
    pub to_level: usize,
    pub matrix: DMatrix<f64>,
}

impl LevelMap {
    pub fn new(space: &TruncatedFockSpace, from_level: usize, to_level: usize, matrix: DMatrix<f64>) -> Result<Self> {
        space.check_level(from_level)?;
        space.check_level(to_level)?;
        let want = (space.level_dim(to_level), space.level_dim(from_level));
        if matrix.shape() != want {
            return Err(Error::DimensionMismatch {
                expected: want.0 * want.1,
                actual: matrix.nrows() * matrix.ncols(),
            });
        }
        Ok(Self {
            from_level,
            to_level,
            matrix,
        })
    }
}

/// Coefficients of a vector in the truncated space, one array per level.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    levels: Vec<DVector<f64>>,
}

impl FockVector {
    pub fn zeros(space: &TruncatedFockSpace) -> Self {
        Self {
            levels: space
                .level_dims()
                .iter()
                .map(|&d| DVector::zeros(d))
                .collect(),
        }
    }

    /// The vacuum `Ω`.
    pub fn vacuum(space: &TruncatedFockSpace) -> Self {
        let mut v = Self::zeros(space);
        v.levels[0][0] = 1.0;
        v
    }

    /// A vector supported on a single level.
    pub fn from_level(space: &TruncatedFockSpace, level: usize, coeffs: DVector<f64>) -> Result<Self> {
        space.check_level(level)?;
        if coeffs.len() != space.level_dim(level) {
            return Err(Error::DimensionMismatch {
                expected: space.level_dim(level),
                actual: coeffs.len(),
            });
        }
        let mut v = Self::zeros(space);
        v.levels[level] = coeffs;
        Ok(v)
    }

    /// The basis tensor `e_{x_1} ⊗ ... ⊗ e_{x_k}`.
    pub fn basis(space: &TruncatedFockSpace, digits: &[usize]) -> Result<Self> {
        let k = digits.len();
        space.check_level(k)?;
        if digits.iter().any(|&x| x >= space.m()) {
            return Err(Error::IndexOutOfRange("grid index".into()));
        }
        let mut v = Self::zeros(space);
        v.levels[k][super::multi_index(space.m(), digits)] = 1.0;
        Ok(v)
    }

    pub fn from_flat(space: &TruncatedFockSpace, flat: &DVector<f64>) -> Result<Self> {
        if flat.len() != space.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.total_dim(),
                actual: flat.len(),
            });
        }
        let levels = (0..=space.n_max())
            .map(|k| flat.rows(space.offset(k), space.level_dim(k)).into_owned())
            .collect();
        Ok(Self { levels })
    }

    pub fn flat(&self) -> DVector<f64> {
        let total = self.levels.iter().map(|l| l.len()).sum();
        DVector::from_iterator(total, self.levels.iter().flat_map(|l| l.iter().copied()))
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, k: usize) -> &DVector<f64> {
        &self.levels[k]
    }

    pub fn level_mut(&mut self, k: usize) -> &mut DVector<f64> {
        &mut self.levels[k]
    }

    /// The coefficient of `Ω`.
    pub fn vacuum_coefficient(&self) -> f64 {
        self.levels[0][0]
    }

    pub fn is_zero_at(&self, k: usize) -> bool {
        self.levels[k].iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            levels: self.levels.iter().map(|l| l * alpha).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.levels
            .iter()
            .flat_map(|l| l.iter())
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }

    fn check_shape(&self, other: &FockVector) -> Result<()> {
        let same = self.levels.len() == other.levels.len()
            && self
                .levels
                .iter()
                .zip(&other.levels)
                .all(|(a, b)| a.len() == b.len());
        if !same {
            return Err(Error::DimensionMismatch {
                expected: self.levels.iter().map(|l| l.len()).sum(),
                actual: other.levels.iter().map(|l| l.len()).sum(),
            });
        }
        Ok(())
    }

    fn check_space(&self, space: &TruncatedFockSpace) -> Result<()> {
        if self.levels.len() != space.n_max() + 1
            || self
                .levels
                .iter()
                .zip(space.level_dims())
                .any(|(l, &d)| l.len() != d)
        {
            return Err(Error::DimensionMismatch {
                expected: space.total_dim(),
                actual: self.levels.iter().map(|l| l.len()).sum(),
            });
        }
        Ok(())
    }
}

impl Add for &FockVector {
    type Output = FockVector;

    fn add(self, rhs: &FockVector) -> FockVector {
        self.check_shape(rhs).expect("adding vectors of different spaces");
        FockVector {
            levels: self.levels.iter().zip(&rhs.levels).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &FockVector {
    type Output = FockVector;

    fn sub(self, rhs: &FockVector) -> FockVector {
        self.check_shape(rhs).expect("subtracting vectors of different spaces");
        FockVector {
            levels: self.levels.iter().zip(&rhs.levels).map(|(a, b)| a - b).collect(),
        }
    }
}

/// `⟨f, g⟩_Q = Σ_n ⟨f^(n), P^(n) g^(n)⟩_0`.
pub fn q_inner(space: &TruncatedFockSpace, f: &FockVector, g: &FockVector) -> Result<f64> {
    f.check_space(space)?;
    g.check_space(space)?;
    let mut total = 0.0;
    for k in 0..=space.n_max() {
        if f.is_zero_at(k) || g.is_zero_at(k) {
            continue;
        }
        let pg = space.gram_sparse(k)?.mul_vec(g.levels[k].as_slice());
        total += f.levels[k].iter().zip(&pg).map(|(a, b)| a * b).sum::<f64>();
    }
    Ok(total)
}

pub fn q_norm(space: &TruncatedFockSpace, f: &FockVector) -> Result<f64> {
    Ok(math::sqrt(q_inner(space, f, f)?.max(0.0)))
}

/// A block operator on the truncated space.
///
/// Besides its blocks an operator records which input levels are affected
/// by truncation: at an *overflow* level part of the true image lies above
/// `n_max` and was dropped; at an *inexact* level the image inside the
/// space is itself wrong, because a dropped intermediate would have come
/// back down. Level shifts are tracked so that compositions classify
/// correctly.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    dims: Vec<usize>,
    blocks: BTreeMap<(usize, usize), DMatrix<f64>>,
    overflow: BTreeSet<usize>,
    inexact: BTreeSet<usize>,
    min_shift: isize,
    max_shift: isize,
}

impl FockOperator {
    pub fn zero(space: &TruncatedFockSpace) -> Self {
        Self {
            dims: space.level_dims().to_vec(),
            blocks: BTreeMap::new(),
            overflow: BTreeSet::new(),
            inexact: BTreeSet::new(),
            min_shift: 0,
            max_shift: 0,
        }
    }

    pub fn identity(space: &TruncatedFockSpace) -> Self {
        let mut op = Self::zero(space);
        for (k, &d) in space.level_dims().iter().enumerate() {
            op.blocks.insert((k, k), DMatrix::identity(d, d));
        }
        op
    }

    /// An operator with level shift `shift` whose blocks are given for the
    /// input levels listed; input levels whose image would leave the space
    /// are recorded as overflow.
    pub(crate) fn homogeneous(
        space: &TruncatedFockSpace,
        shift: isize,
        blocks: impl IntoIterator<Item = (usize, DMatrix<f64>)>,
    ) -> Self {
        let mut op = Self::zero(space);
        op.min_shift = shift;
        op.max_shift = shift;
        for (from, m) in blocks {
            let to = (from as isize + shift) as usize;
            debug_assert_eq!(m.shape(), (op.dims[to], op.dims[from]));
            op.blocks.insert((from, to), m);
        }
        if shift > 0 {
            let n_max = space.n_max() as isize;
            op.overflow
                .extend(((n_max - shift + 1).max(0)..=n_max).map(|k| k as usize));
        }
        op
    }

    pub fn from_level_maps(space: &TruncatedFockSpace, maps: impl IntoIterator<Item = LevelMap>) -> Result<Self> {
        let mut op = Self::zero(space);
        let mut first = true;
        for lm in maps {
            let lm = LevelMap::new(space, lm.from_level, lm.to_level, lm.matrix)?;
            let shift = lm.to_level as isize - lm.from_level as isize;
            if first {
                op.min_shift = shift;
                op.max_shift = shift;
                first = false;
            }
            op.min_shift = op.min_shift.min(shift);
            op.max_shift = op.max_shift.max(shift);
            op.blocks
                .entry((lm.from_level, lm.to_level))
                .and_modify(|b| *b += &lm.matrix)
                .or_insert(lm.matrix);
        }
        Ok(op)
    }

    pub fn n_max(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn block(&self, from: usize, to: usize) -> Option<&DMatrix<f64>> {
        self.blocks.get(&(from, to))
    }

    /// Blocks keyed by `(from, to)`.
    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, usize), &DMatrix<f64>)> {
        self.blocks.iter()
    }

    pub fn level_maps(&self) -> Vec<LevelMap> {
        self.blocks
            .iter()
            .map(|(&(from_level, to_level), m)| LevelMap {
                from_level,
                to_level,
                matrix: m.clone(),
            })
            .collect()
    }

    pub fn overflow_levels(&self) -> &BTreeSet<usize> {
        &self.overflow
    }

    pub fn inexact_levels(&self) -> &BTreeSet<usize> {
        &self.inexact
    }

    /// Whether the image of input level `k` is exactly the untruncated one.
    pub fn is_exact_at(&self, k: usize) -> bool {
        !self.overflow.contains(&k) && !self.inexact.contains(&k)
    }

    /// Input levels on which the operator is truncation-exact.
    pub fn exact_levels(&self) -> Vec<usize> {
        (0..self.dims.len()).filter(|&k| self.is_exact_at(k)).collect()
    }

    pub fn min_shift(&self) -> isize {
        self.min_shift
    }

    pub fn max_shift(&self) -> isize {
        self.max_shift
    }

    /// Keeps only the blocks whose input level satisfies `keep`.
    pub fn restrict_domain(&self, keep: impl Fn(usize) -> bool) -> FockOperator {
        let mut out = self.clone();
        out.blocks.retain(|&(from, _), _| keep(from));
        out.overflow.retain(|&k| keep(k));
        out.inexact.retain(|&k| keep(k));
        out
    }

    /// The compression to input levels on which the operator is exact.
    pub fn exact_part(&self) -> FockOperator {
        let exact = self.exact_levels();
        self.restrict_domain(|k| exact.contains(&k))
    }

    pub fn scaled(&self, alpha: f64) -> FockOperator {
        let mut out = self.clone();
        out.blocks.values_mut().for_each(|b| *b *= alpha);
        out
    }

    fn check_same_space(&self, other: &FockOperator) {
        assert_eq!(self.dims, other.dims, "operators on different spaces");
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &FockOperator) -> FockOperator {
        self.check_same_space(rhs);
        let mut out = FockOperator {
            dims: self.dims.clone(),
            blocks: BTreeMap::new(),
            overflow: BTreeSet::new(),
            inexact: rhs.inexact.clone(),
            min_shift: self.min_shift + rhs.min_shift,
            max_shift: self.max_shift + rhs.max_shift,
        };
        for (&(k, l), b) in &rhs.blocks {
            if self.inexact.contains(&l) {
                out.inexact.insert(k);
            } else if self.overflow.contains(&l) {
                out.overflow.insert(k);
            }
            for (&(l2, r), a) in self.blocks.range((l, 0)..=(l, usize::MAX)) {
                debug_assert_eq!(l2, l);
                let prod = a * b;
                out.blocks
                    .entry((k, r))
                    .and_modify(|acc| *acc += &prod)
                    .or_insert(prod);
            }
        }
        for &k in &rhs.overflow {
            // dropped mass sat above n_max; it only re-enters if self lowers levels
            if self.min_shift < 0 {
                out.inexact.insert(k);
            } else {
                out.overflow.insert(k);
            }
        }
        let inexact = out.inexact.clone();
        out.overflow.retain(|k| !inexact.contains(k));
        out
    }

    fn combine(&self, other: &FockOperator, sign: f64) -> FockOperator {
        self.check_same_space(other);
        let mut out = self.clone();
        for (key, b) in &other.blocks {
            out.blocks
                .entry(*key)
                .and_modify(|acc| *acc += b * sign)
                .or_insert_with(|| b * sign);
        }
        out.inexact.extend(other.inexact.iter().copied());
        out.overflow.extend(other.overflow.iter().copied());
        let inexact = out.inexact.clone();
        out.overflow.retain(|k| !inexact.contains(k));
        if self.blocks.is_empty() && self.overflow.is_empty() {
            out.min_shift = other.min_shift;
            out.max_shift = other.max_shift;
        } else if !(other.blocks.is_empty() && other.overflow.is_empty()) {
            out.min_shift = self.min_shift.min(other.min_shift);
            out.max_shift = self.max_shift.max(other.max_shift);
        }
        out
    }

    /// Applies the operator; the flag is false if truncation dropped mass.
    pub fn apply(&self, v: &FockVector) -> Result<(FockVector, bool)> {
        if v.levels.len() != self.dims.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dims.len(),
                actual: v.levels.len(),
            });
        }
        let mut out = FockVector {
            levels: self.dims.iter().map(|&d| DVector::zeros(d)).collect(),
        };
        let mut exact = true;
        for (k, level) in v.levels.iter().enumerate() {
            if level.iter().all(|&x| x == 0.0) {
                continue;
            }
            if !self.is_exact_at(k) {
                exact = false;
            }
        }
        for (&(k, l), b) in &self.blocks {
            if v.levels[k].iter().all(|&x| x == 0.0) {
                continue;
            }
            out.levels[l] += b * &v.levels[k];
        }
        Ok((out, exact))
    }

    /// Dense matrix on the flattened space (row/column offsets per level).
    pub fn to_dense(&self, space: &TruncatedFockSpace) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(space.total_dim(), space.total_dim());
        for (&(k, l), b) in &self.blocks {
            out.view_mut((space.offset(l), space.offset(k)), b.shape())
                .copy_from(b);
        }
        out
    }

    /// Largest entrywise difference over the union of blocks.
    pub fn max_abs_diff(&self, other: &FockOperator) -> f64 {
        let diff = self.combine(other, -1.0);
        diff.blocks
            .values()
            .map(crate::linalg::max_abs)
            .fold(0.0, f64::max)
    }
}

impl Add for &FockOperator {
    type Output = FockOperator;

    fn add(self, rhs: &FockOperator) -> FockOperator {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &FockOperator {
    type Output = FockOperator;

    fn sub(self, rhs: &FockOperator) -> FockOperator {
        self.combine(rhs, -1.0)
    }
}

/// The adjoint with respect to the Q-inner product, blockwise
/// `(P^(k))⁻¹ Aᵀ P^(l)` for each block `A: k → l`.
///
/// Operators carrying inexact levels have no meaningful adjoint and are
/// rejected. Overflow levels are harmless: the dropped part of the image
/// corresponds to input levels of the adjoint outside the space.
pub fn q_adjoint(space: &TruncatedFockSpace, a: &FockOperator) -> Result<FockOperator> {
    if !a.inexact.is_empty() {
        return Err(Error::TruncationInexact {
            n_max: space.n_max(),
        });
    }
    let mut out = FockOperator::zero(space);
    out.min_shift = -a.max_shift;
    out.max_shift = -a.min_shift;
    for (&(k, l), b) in &a.blocks {
        let pl = space.gram_factor(l)?;
        let pk = space.gram_factor(k)?;
        let adj = pk.inverse_mul(&(b.transpose() * pl.matrix()));
        out.blocks
            .entry((l, k))
            .and_modify(|acc| *acc += &adj)
            .or_insert(adj);
    }
    Ok(out)
}

/// Result of applying a word of operators.
#[derive(Clone, Debug, PartialEq)]
pub struct WordOutcome {
    pub vector: FockVector,
    /// True when no step dropped mass above `n_max`.
    pub truncation_exact: bool,
}

/// Applies `ops[last]` first and `ops[0]` last, i.e. evaluates the written
/// product `ops[0] ⋯ ops[n-1]` on `v`.
pub fn apply_word(space: &TruncatedFockSpace, ops: &[FockOperator], v: &FockVector) -> Result<WordOutcome> {
    v.check_space(space)?;
    let mut current = v.clone();
    let mut exact = true;
    for op in ops.iter().rev() {
        let (next, ok) = op.apply(&current)?;
        exact &= ok;
        current = next;
    }
    Ok(WordOutcome {
        vector: current,
        truncation_exact: exact,
    })
}
