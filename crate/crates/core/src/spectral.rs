//! Q-operator norms, the operator estimates behind the spectral gap of
//! `N_d = Σ_i (w(g_i) − w_r(g_i))²`, and the gap report.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fock::{self, FockOperator, Side, TruncatedFockSpace};
use crate::kernel::{Grid, GridFunction};
use crate::linalg::{self, CscMatrix};
use crate::math;
use crate::TOL_NORM;

pub use crate::linalg::sym_eigs;

/// Whitening condition numbers are reported above this coupling strength.
pub const CONDITION_REPORT_Q: f64 = 0.8;
/// Slack on the vacuum residual of `N_d`.
pub const VACUUM_TOL: f64 = 1e-10;
/// Slack on the gap lower bound.
pub const GAP_TOL: f64 = 1e-8;

/// A measured Q-operator norm against its proven bound.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub name: String,
    pub measured_norm: f64,
    pub bound: f64,
    /// `bound − measured_norm`.
    pub margin: f64,
}

impl BoundReport {
    pub fn new(name: impl Into<String>, measured_norm: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured_norm,
            bound,
            margin: bound - measured_norm,
        }
    }

    pub fn passes(&self) -> bool {
        self.margin >= -TOL_NORM
    }
}

/// `1 / (1 − q)`.
pub fn c_constant(q: f64) -> f64 {
    1.0 / (1.0 - q)
}

/// Groups blocks into connected pieces of the bipartite input/output level
/// graph; the norm of the operator is the largest norm of a piece.
fn components(keys: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut groups: Vec<(Vec<usize>, Vec<usize>, Vec<(usize, usize)>)> = Vec::new();
    for &(from, to) in keys {
        let hits: Vec<usize> = groups
            .iter()
            .enumerate()
            .filter(|(_, g)| g.0.contains(&from) || g.1.contains(&to))
            .map(|(i, _)| i)
            .collect();
        let mut merged = (alloc::vec![from], alloc::vec![to], alloc::vec![(from, to)]);
        for &i in hits.iter().rev() {
            let g = groups.remove(i);
            merged.0.extend(g.0);
            merged.1.extend(g.1);
            merged.2.extend(g.2);
        }
        groups.push(merged);
    }
    groups
        .into_iter()
        .map(|mut g| {
            g.2.sort_unstable();
            g.2
        })
        .collect()
}

fn whitened_norm(space: &TruncatedFockSpace, blocks: &BTreeMap<(usize, usize), DMatrix<f64>>, keys: &[(usize, usize)]) -> Result<f64> {
    let mut ins: Vec<usize> = keys.iter().map(|k| k.0).collect();
    let mut outs: Vec<usize> = keys.iter().map(|k| k.1).collect();
    ins.sort_unstable();
    ins.dedup();
    outs.sort_unstable();
    outs.dedup();
    let offsets = |levels: &[usize]| {
        let mut acc = 0;
        levels
            .iter()
            .map(|&l| {
                let o = acc;
                acc += space.level_dim(l);
                (l, o)
            })
            .collect::<BTreeMap<usize, usize>>()
    };
    let in_off = offsets(&ins);
    let out_off = offsets(&outs);
    let rows: usize = outs.iter().map(|&l| space.level_dim(l)).sum();
    let cols: usize = ins.iter().map(|&l| space.level_dim(l)).sum();
    let mut b = DMatrix::zeros(rows, cols);
    for key in keys {
        let a = &blocks[key];
        let pin = space.gram_factor(key.0)?;
        let pout = space.gram_factor(key.1)?;
        // P_out^{1/2} A P_in^{-1/2}, using symmetry of P_in^{-1/2}
        let right = pin.inv_sqrt_mul(&a.transpose()).transpose();
        let w = pout.sqrt_mul(&right);
        b.view_mut((out_off[&key.1], in_off[&key.0]), w.shape()).copy_from(&w);
    }
    linalg::spectral_norm(&b)
}

/// `sup ‖A f‖_Q / ‖f‖_Q`, the largest singular value of
/// `P_out^{1/2} A P_in^{-1/2}`.
pub fn q_operator_norm(space: &TruncatedFockSpace, a: &FockOperator) -> Result<f64> {
    let blocks: BTreeMap<(usize, usize), DMatrix<f64>> = a.blocks().map(|(k, m)| (*k, m.clone())).collect();
    let keys: Vec<(usize, usize)> = blocks.keys().copied().collect();
    let mut worst = 0.0f64;
    for piece in components(&keys) {
        worst = worst.max(whitened_norm(space, &blocks, &piece)?);
    }
    Ok(worst)
}

/// Q-norm of a single sparse block `level from → level to`.
pub fn q_block_norm(space: &TruncatedFockSpace, from: usize, to: usize, block: &CscMatrix) -> Result<f64> {
    let mut blocks = BTreeMap::new();
    blocks.insert((from, to), block.to_dense());
    whitened_norm(space, &blocks, &[(from, to)])
}

/// `d` indicator functions of consecutive, disjoint blocks of grid points,
/// each of unit discrete `L²` norm. Block sizes differ by at most one.
pub fn disjoint_bumps(grid: &Grid, d: usize) -> Result<Vec<GridFunction>> {
    let m = grid.len();
    if d == 0 || d > m {
        return Err(Error::Config(alloc::format!("need 1 <= d <= m, got d = {d}, m = {m}")));
    }
    let (base, extra) = (m / d, m % d);
    let mut start = 0;
    Ok((0..d)
        .map(|i| {
            let size = base + usize::from(i < extra);
            let height = 1.0 / math::sqrt(grid.weight() * size as f64);
            let mut v = alloc::vec![0.0; m];
            v[start..start + size].fill(height);
            start += size;
            GridFunction(v)
        })
        .collect())
}

/// `C · (1 ⊗ P^(n)) − P^(n+1)` has smallest eigenvalue `≥ 0`; returns it.
pub fn gram_domination(space: &TruncatedFockSpace, n: usize) -> Result<f64> {
    if n + 1 > space.n_max() {
        return Err(Error::TruncationTooSmall {
            required: n + 1,
            n_max: space.n_max(),
        });
    }
    let c = c_constant(space.kernel().sup_q());
    let lifted = space.gram_sparse(n)?.kron_identity_left(space.m());
    let diff = lifted.scaled(c).add_scaled(-1.0, space.gram_sparse(n + 1)?);
    Ok(sym_eigs(&diff.to_dense())?[0])
}

fn check_unit(space: &TruncatedFockSpace, g: &GridFunction) -> Result<Vec<f64>> {
    if g.len() != space.m() {
        return Err(Error::DimensionMismatch {
            expected: space.m(),
            actual: g.len(),
        });
    }
    Ok(g.coefficients(space.kernel().grid()))
}

/// `f ↦ g ⊗ f ⊗ g` from level `n` to `n + 2`.
fn sandwich(space: &TruncatedFockSpace, c: &[f64], n: usize) -> CscMatrix {
    let m = space.m();
    let dim = space.level_dim(n);
    let support: Vec<(usize, f64)> = c.iter().copied().enumerate().filter(|e| e.1 != 0.0).collect();
    CscMatrix::from_columns(m * m * dim, dim, |y, out| {
        for &(a, ca) in &support {
            for &(b, cb) in &support {
                out.push(((a * dim + y) * m + b, ca * cb));
            }
        }
    })
}

/// Contraction of two adjacent tensor slots from level `n + 2` to `n`:
/// the first two (`Side::Left`) or the last two (`Side::Right`).
fn slot_contraction(space: &TruncatedFockSpace, side: Side, n: usize) -> CscMatrix {
    let m = space.m();
    let dim = space.level_dim(n);
    CscMatrix::from_columns(dim, m * m * dim, |z, out| {
        let (a, b, rest) = match side {
            Side::Left => (z / (m * dim), (z / dim) % m, z % dim),
            Side::Right => ((z / m) % m, z % m, z / (m * m)),
        };
        if a == b {
            out.push((rest, 1.0));
        }
    })
}

/// `L (T_2 ⋯ T_{n+1}) D` and `R (T_n ⋯ T_1) D` on level `n`, where `D f =
/// g ⊗ f ⊗ g` and `L`, `R` contract the first or last two slots; each
/// against the bound `q^n`.
pub fn contraction_check(space: &TruncatedFockSpace, g: &GridFunction, n: usize) -> Result<[BoundReport; 2]> {
    if n + 2 > space.n_max() {
        return Err(Error::TruncationTooSmall {
            required: n + 2,
            n_max: space.n_max(),
        });
    }
    let c = check_unit(space, g)?;
    let d = sandwich(space, &c, n);
    let top = n + 2;
    let mut left_word = CscMatrix::identity(space.level_dim(top));
    for i in 2..=n + 1 {
        left_word = left_word.mul(&space.swap_sparse(top, i)?);
    }
    let mut right_word = CscMatrix::identity(space.level_dim(top));
    for i in (1..=n).rev() {
        right_word = right_word.mul(&space.swap_sparse(top, i)?);
    }
    let xl = slot_contraction(space, Side::Left, n).mul(&left_word).mul(&d);
    let xr = slot_contraction(space, Side::Right, n).mul(&right_word).mul(&d);
    let bound = math::powi(space.kernel().sup_q(), n);
    Ok([
        BoundReport::new(alloc::format!("contraction_left_n{n}"), q_block_norm(space, n, n, &xl)?, bound),
        BoundReport::new(alloc::format!("contraction_right_n{n}"), q_block_norm(space, n, n, &xr)?, bound),
    ])
}

struct Ladders {
    create: FockOperator,
    annihilate: FockOperator,
    right_create: FockOperator,
    right_annihilate: FockOperator,
}

fn ladders(space: &TruncatedFockSpace, h: &GridFunction) -> Result<Ladders> {
    let right_create = fock::right_create(space, h)?;
    Ok(Ladders {
        create: fock::create(space, h)?,
        annihilate: fock::annihilate(space, h)?,
        right_annihilate: fock::q_adjoint(space, &right_create)?,
        right_create,
    })
}

fn check_family(space: &TruncatedFockSpace, hs: &[GridFunction]) -> Result<()> {
    if hs.is_empty() || hs.len() > space.m() {
        return Err(Error::Config(alloc::format!(
            "need 1 <= d <= m orthonormal functions, got d = {}, m = {}",
            hs.len(),
            space.m()
        )));
    }
    hs.iter().try_for_each(|h| check_unit(space, h).map(drop))
}

fn summed(space: &TruncatedFockSpace, terms: impl Iterator<Item = FockOperator>) -> FockOperator {
    terms.fold(FockOperator::zero(space), |acc, t| &acc + &t)
}

/// The eight sums `Σ_i X(h_i) Y(h_i)` of the lemma, each compressed to the
/// input levels where it is truncation-exact, against `C √d`.
pub fn lemma8_checks(space: &TruncatedFockSpace, hs: &[GridFunction]) -> Result<Vec<BoundReport>> {
    check_family(space, hs)?;
    let ops = hs.iter().map(|h| ladders(space, h)).collect::<Result<Vec<_>>>()?;
    type Pick = fn(&Ladders) -> (&FockOperator, &FockOperator);
    let items: [(&str, Pick); 8] = [
        ("create_right_create", |l| (&l.create, &l.right_create)),
        ("annihilate_right_annihilate", |l| (&l.annihilate, &l.right_annihilate)),
        ("create_right_annihilate", |l| (&l.create, &l.right_annihilate)),
        ("right_create_annihilate", |l| (&l.right_create, &l.annihilate)),
        ("annihilate_annihilate", |l| (&l.annihilate, &l.annihilate)),
        ("right_annihilate_right_annihilate", |l| (&l.right_annihilate, &l.right_annihilate)),
        ("create_annihilate", |l| (&l.create, &l.annihilate)),
        ("right_create_right_annihilate", |l| (&l.right_create, &l.right_annihilate)),
    ];
    let bound = c_constant(space.kernel().sup_q()) * math::sqrt(hs.len() as f64);
    items
        .iter()
        .map(|(name, pick)| {
            let sum = summed(space, ops.iter().map(|l| {
                let (x, y) = pick(l);
                x.compose(y)
            }));
            Ok(BoundReport::new(*name, q_operator_norm(space, &sum.exact_part())?, bound))
        })
        .collect()
}

/// `Σ_i (a(g_i) a⁺(g_i) − 1)` and its right-handed twin on the exact
/// levels, against `C q √d`.
pub fn ancr_check(space: &TruncatedFockSpace, gs: &[GridFunction]) -> Result<[BoundReport; 2]> {
    check_family(space, gs)?;
    let ops = gs.iter().map(|g| ladders(space, g)).collect::<Result<Vec<_>>>()?;
    let identity = FockOperator::identity(space);
    let left = summed(space, ops.iter().map(|l| &l.annihilate.compose(&l.create) - &identity));
    let right = summed(
        space,
        ops.iter().map(|l| &l.right_annihilate.compose(&l.right_create) - &identity),
    );
    let q = space.kernel().sup_q();
    let bound = c_constant(q) * q * math::sqrt(gs.len() as f64);
    Ok([
        BoundReport::new("ancr_left", q_operator_norm(space, &left.exact_part())?, bound),
        BoundReport::new("ancr_right", q_operator_norm(space, &right.exact_part())?, bound),
    ])
}

/// `2d(1 − q) − 2C√d q − 14C√d` with `C = 1/(1 − q)`.
pub fn krolak_lower_bound(d: usize, q: f64) -> f64 {
    let c = c_constant(q);
    let sd = math::sqrt(d as f64);
    2.0 * d as f64 * (1.0 - q) - 2.0 * c * sd * q - 14.0 * c * sd
}

/// The quadratic form `f ↦ Σ_i ‖(w(g_i) − w_r(g_i)) f‖_Q²` on levels
/// `0..n_max−1`, where every image is truncation-exact.
#[derive(Clone, Debug)]
pub struct NdForm {
    pub n_max: usize,
    /// Domain levels `0..n_max−1`, in order.
    pub levels: Vec<usize>,
    /// Blocks `F_{kl}` with `⟨f, F g⟩_0 = Σ_i ⟨M_i f, M_i g⟩_Q`; only levels
    /// of equal parity couple.
    pub blocks: BTreeMap<(usize, usize), DMatrix<f64>>,
    /// `‖Σ_i M_i M_i Ω‖_Q`.
    pub vacuum_residual: f64,
}

impl NdForm {
    /// The form on the listed levels as one dense matrix.
    pub fn matrix_on(&self, space: &TruncatedFockSpace, levels: &[usize]) -> DMatrix<f64> {
        let offs: Vec<usize> = levels
            .iter()
            .scan(0, |acc, &l| {
                let o = *acc;
                *acc += space.level_dim(l);
                Some(o)
            })
            .collect();
        let dim: usize = levels.iter().map(|&l| space.level_dim(l)).sum();
        let mut out = DMatrix::zeros(dim, dim);
        for (i, &k) in levels.iter().enumerate() {
            for (j, &l) in levels.iter().enumerate() {
                if let Some(b) = self.blocks.get(&(k, l)) {
                    out.view_mut((offs[i], offs[j]), b.shape()).copy_from(b);
                }
            }
        }
        out
    }

    /// `⟨f, N_d f⟩_Q` for `f` given per domain level.
    pub fn evaluate(&self, f: &[DVector<f64>]) -> f64 {
        self.blocks
            .iter()
            .filter(|((k, l), _)| *k < f.len() && *l < f.len())
            .map(|((k, l), b)| f[*k].dot(&(b * &f[*l])))
            .sum()
    }
}

/// `M = w(g) − w_r(g)` as sparse blocks keyed `(from, to)`, for input levels
/// `0..=top`; right annihilation uses the mirrored closed form.
fn difference_blocks(space: &TruncatedFockSpace, c: &[f64], top: usize) -> Result<BTreeMap<(usize, usize), CscMatrix>> {
    let mut out = BTreeMap::new();
    for k in 0..=top {
        if k < space.n_max() {
            let up = fock::creation_block(space, Side::Left, c, k)?
                .add_scaled(-1.0, &fock::creation_block(space, Side::Right, c, k)?);
            out.insert((k, k + 1), up);
        }
        if k >= 1 {
            let down = fock::annihilation_block(space, Side::Left, c, k)?
                .add_scaled(-1.0, &fock::annihilation_block(space, Side::Right, c, k)?);
            out.insert((k, k - 1), down);
        }
    }
    Ok(out)
}

/// Assembles the `N_d` form for the functions `gs` (typically from
/// [`disjoint_bumps`]).
pub fn build_nd(space: &TruncatedFockSpace, gs: &[GridFunction]) -> Result<NdForm> {
    let n_max = space.n_max();
    if n_max < 2 {
        return Err(Error::TruncationTooSmall { required: 2, n_max });
    }
    check_family(space, gs)?;
    let top = n_max - 1;
    let mut blocks: BTreeMap<(usize, usize), DMatrix<f64>> = BTreeMap::new();
    let mut residual: Vec<Vec<f64>> = (0..=2).map(|l| alloc::vec![0.0; space.level_dim(l)]).collect();
    for g in gs {
        let c = check_unit(space, g)?;
        let m_blocks = difference_blocks(space, &c, top)?;
        for l in 0..=n_max {
            let into: Vec<(usize, &CscMatrix)> = m_blocks
                .iter()
                .filter(|((_, to), _)| *to == l)
                .map(|((from, _), b)| (*from, b))
                .collect();
            if into.is_empty() {
                continue;
            }
            let p = space.gram_sparse(l)?;
            for &(k2, b2) in &into {
                let pb = p.mul(b2);
                for &(k1, b1) in &into {
                    let acc = blocks
                        .entry((k1, k2))
                        .or_insert_with(|| DMatrix::zeros(space.level_dim(k1), space.level_dim(k2)));
                    b1.add_tr_mul_into(&pb, acc);
                }
            }
        }
        // M_i M_i Ω: Ω → level 1 → levels 0 and 2
        let once = m_blocks[&(0, 1)].mul_vec(&[1.0]);
        let down = m_blocks[&(1, 0)].mul_vec(&once);
        let up = m_blocks[&(1, 2)].mul_vec(&once);
        for (acc, v) in residual[0].iter_mut().zip(&down) {
            *acc += v;
        }
        for (acc, v) in residual[2].iter_mut().zip(&up) {
            *acc += v;
        }
    }
    for b in blocks.values_mut() {
        if b.is_square() {
            let s = (&*b + b.transpose()) * 0.5;
            *b = s;
        }
    }
    let mut vacuum_sq = residual[0].iter().map(|v| v * v).sum::<f64>();
    let p2 = space.gram_sparse(2)?.mul_vec(&residual[2]);
    vacuum_sq += residual[2].iter().zip(&p2).map(|(a, b)| a * b).sum::<f64>();
    Ok(NdForm {
        n_max,
        levels: (0..=top).collect(),
        blocks,
        vacuum_residual: math::sqrt(vacuum_sq.max(0.0)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    pub d: usize,
    pub q: f64,
    pub n_max: usize,
    pub m: usize,
    /// Smallest generalized eigenvalue of the form on levels `1..n_max−1`.
    pub lambda_min_complement: f64,
    pub lambda_min_odd: Option<f64>,
    pub lambda_min_even: Option<f64>,
    pub vacuum_residual: f64,
    pub krolak_bound: f64,
    /// Largest Gram condition number on the domain, when `q` exceeds
    /// [`CONDITION_REPORT_Q`].
    pub whitening_condition: Option<f64>,
    pub verdict: Verdict,
}

/// Smallest eigenvalue of the form on `levels` after whitening with
/// `P^{-1/2}` level by level.
fn whitened_min(space: &TruncatedFockSpace, form: &NdForm, levels: &[usize]) -> Result<f64> {
    let f = form.matrix_on(space, levels);
    let mut w = f;
    let mut off = 0;
    let offs: Vec<(usize, usize)> = levels
        .iter()
        .map(|&l| {
            let o = off;
            off += space.level_dim(l);
            (l, o)
        })
        .collect();
    // rows then columns: W F W with W = blockdiag(P_l^{-1/2})
    for &(l, o) in &offs {
        let dim = space.level_dim(l);
        let factor = space.gram_factor(l)?;
        let rows = w.rows(o, dim).into_owned();
        w.rows_mut(o, dim).copy_from(&factor.inv_sqrt_mul(&rows));
    }
    for &(l, o) in &offs {
        let dim = space.level_dim(l);
        let factor = space.gram_factor(l)?;
        let cols = w.columns(o, dim).transpose();
        w.columns_mut(o, dim).copy_from(&factor.inv_sqrt_mul(&cols).transpose());
    }
    Ok(sym_eigs(&w)?[0])
}

/// Gap report for a prepared form. Levels `1..n_max−1` split by parity,
/// since the form never couples levels of different parity.
pub fn nd_gap_report_for(space: &TruncatedFockSpace, form: &NdForm, d: usize) -> Result<GapReport> {
    let q = space.kernel().sup_q();
    let complement: Vec<usize> = form.levels.iter().copied().filter(|&l| l >= 1).collect();
    let odd: Vec<usize> = complement.iter().copied().filter(|l| l % 2 == 1).collect();
    let even: Vec<usize> = complement.iter().copied().filter(|l| l % 2 == 0).collect();
    let lambda_min_odd = if odd.is_empty() { None } else { Some(whitened_min(space, form, &odd)?) };
    let lambda_min_even = if even.is_empty() { None } else { Some(whitened_min(space, form, &even)?) };
    let lambda_min_complement = lambda_min_odd
        .into_iter()
        .chain(lambda_min_even)
        .fold(f64::INFINITY, f64::min);
    let whitening_condition = if q > CONDITION_REPORT_Q {
        let mut worst = 1.0f64;
        for &l in &form.levels {
            worst = worst.max(space.gram_factor(l)?.condition());
        }
        Some(worst)
    } else {
        None
    };
    let krolak_bound = krolak_lower_bound(d, q);
    let verdict = if form.vacuum_residual <= VACUUM_TOL && lambda_min_complement >= krolak_bound - GAP_TOL {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(GapReport {
        d,
        q,
        n_max: space.n_max(),
        m: space.m(),
        lambda_min_complement,
        lambda_min_odd,
        lambda_min_even,
        vacuum_residual: form.vacuum_residual,
        krolak_bound,
        whitening_condition,
        verdict,
    })
}

/// Builds `N_d` from `d` disjoint bumps and reports its gap.
pub fn nd_gap_report(space: &TruncatedFockSpace, d: usize) -> Result<GapReport> {
    let gs = disjoint_bumps(space.kernel().grid(), d)?;
    let form = build_nd(space, &gs)?;
    nd_gap_report_for(space, &form, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::QKernel;
    use approx::assert_abs_diff_eq;

    fn space(m: usize, q: f64, n_max: usize) -> TruncatedFockSpace {
        let g = Grid::interval_1d(0.0, 1.0, m).unwrap();
        TruncatedFockSpace::new(QKernel::constant(&g, q).unwrap(), n_max).unwrap()
    }

    #[test]
    fn krolak_arithmetic() {
        assert_abs_diff_eq!(krolak_lower_bound(49, 0.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(krolak_lower_bound(50, 0.0), 100.0 - 14.0 * 50f64.sqrt(), epsilon = 1e-12);
        assert!(krolak_lower_bound(4, 0.2) < 0.0);
    }

    #[test]
    fn bumps_are_orthonormal() {
        let g = Grid::interval_1d(0.0, 1.0, 7).unwrap();
        for d in [1, 3, 7] {
            let bs = disjoint_bumps(&g, d).unwrap();
            for (i, a) in bs.iter().enumerate() {
                for (j, b) in bs.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(a.inner(b, &g), expected, epsilon = 1e-12);
                }
            }
        }
        let full = disjoint_bumps(&g, 7).unwrap();
        assert_abs_diff_eq!(full[0].0[0], 1.0 / g.smearing_scale(), epsilon = 1e-12);
        assert!(disjoint_bumps(&g, 8).is_err());
    }

    #[test]
    fn identity_norm_is_one() {
        let s = space(2, 0.5, 2);
        assert_abs_diff_eq!(q_operator_norm(&s, &FockOperator::identity(&s)).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn two_level_creation_norm() {
        let q = 0.4;
        let s = space(3, q, 2);
        let h = disjoint_bumps(s.kernel().grid(), 1).unwrap().remove(0);
        let a = fock::create(&s, &h).unwrap().restrict_domain(|k| k <= 1);
        assert_abs_diff_eq!(q_operator_norm(&s, &a).unwrap(), (1.0 + q).sqrt(), epsilon = 1e-12);
        assert!(q_operator_norm(&s, &a).unwrap() <= 1.0 / (1.0 - q).sqrt() + 1e-9);
    }

    #[test]
    fn components_split_disjoint_levels() {
        let pieces = components(&[(0, 1), (1, 2), (2, 1)]);
        assert_eq!(pieces.len(), 2);
        let pieces = components(&[(0, 1), (2, 1)]);
        assert_eq!(pieces.len(), 1);
    }

    #[test]
    fn free_contraction_vanishes() {
        let s = space(3, 0.0, 3);
        let g = disjoint_bumps(s.kernel().grid(), 1).unwrap().remove(0);
        let [l, r] = contraction_check(&s, &g, 1).unwrap();
        assert_eq!(l.measured_norm, 0.0);
        assert_eq!(r.measured_norm, 0.0);
        assert!(contraction_check(&s, &g, 2).is_err());
    }

    #[test]
    fn nd_vacuum_residual_and_psd() {
        let s = space(2, 0.0, 3);
        let gs = disjoint_bumps(s.kernel().grid(), 1).unwrap();
        let form = build_nd(&s, &gs).unwrap();
        assert!(form.vacuum_residual <= 1e-12);
        let all = form.matrix_on(&s, &form.levels);
        assert!(sym_eigs(&all).unwrap()[0] >= -1e-10);
    }
}
