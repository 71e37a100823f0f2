//! Vacuum moments of creation, annihilation and field operators.
//!
//! [`wick_mixed_moment`] and [`wick_field_moment`] evaluate the
//! pair-partition formula by quadrature over the grid. [`matrix_vacuum_moment`]
//! computes the same numbers by building the operators and applying them to
//! the vacuum, and serves as the independent oracle.
//!
//! Positions are numbered in order of application: position 1 is the
//! rightmost factor, the first operator to act on `Ω`. A pair `(a, z)` with
//! `a < z` contributes only if position `a` is a creation and position `z`
//! an annihilation.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fock::{self, FockOperator, FockVector, TruncatedFockSpace};
use crate::kernel::{Grid, GridFunction, KernelSpec, QKernel};
use crate::math;
use crate::symcomb::{self, Pairing};

/// Largest degree accepted by [`traciality_check`] and [`convergence_report`].
pub const CYCLIC_DEGREE_CAP: usize = 6;
/// Largest number of grid refinements in a convergence study.
pub const REFINEMENT_CAP: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    /// `a⁺`, written `+`.
    Create,
    /// `a`, written `-`.
    Annihilate,
}

/// `(v_1, ..., v_n)`; `v_1` belongs to the first operator applied.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignPattern(pub Vec<Sign>);

impl SignPattern {
    /// Parses a string of `+` and `-` characters, position 1 first.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(Sign::Create),
                '-' => Ok(Sign::Annihilate),
                other => Err(Error::Config(alloc::format!("sign '{other}' is not '+' or '-'"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SignPattern)
    }

    /// All `2^n` patterns, ordered by the binary expansion with `+` as 0 and
    /// position 1 as the most significant digit.
    pub fn all(n: usize) -> Vec<SignPattern> {
        (0..1usize << n)
            .map(|bits| {
                SignPattern(
                    (0..n)
                        .map(|i| {
                            if bits >> (n - 1 - i) & 1 == 0 {
                                Sign::Create
                            } else {
                                Sign::Annihilate
                            }
                        })
                        .collect(),
                )
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Whether a pairing survives: creation at every opener, annihilation
    /// at every closer.
    pub fn admits(&self, v: &Pairing) -> bool {
        v.pairs()
            .iter()
            .all(|&(a, z)| self.0[a - 1] == Sign::Create && self.0[z - 1] == Sign::Annihilate)
    }
}

impl core::fmt::Display for SignPattern {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                Sign::Create => "+",
                Sign::Annihilate => "-",
            })?;
        }
        Ok(())
    }
}

/// Which vacuum moment to compute.
#[derive(Clone, Debug, PartialEq)]
pub enum Word {
    /// `a^{v_n}(f_n) ⋯ a^{v_1}(f_1)`.
    Mixed(SignPattern),
    /// `w(f_n) ⋯ w(f_1)`.
    Field,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    pub n: usize,
    pub word: String,
    pub value_wick: f64,
    pub value_matrix: Option<f64>,
    pub pairing_count: usize,
    pub kernel_digest: u64,
    pub grid_digest: u64,
}

impl MomentReport {
    pub fn deviation(&self) -> Option<f64> {
        self.value_matrix.map(|v| (v - self.value_wick).abs())
    }
}

fn check_fs(kernel: &QKernel, fs: &[GridFunction]) -> Result<()> {
    if fs.len() > symcomb::PAIRING_CAP {
        return Err(Error::ResourceLimit {
            what: "moment degree",
            requested: fs.len(),
            cap: symcomb::PAIRING_CAP,
        });
    }
    fs.iter().try_for_each(|f| f.check_len(kernel.len()))
}

/// `Σ_y Π_k g_k(y_k) Π_{(k,l) crossing} Q(y_k, y_l)` with
/// `g_k = ε^j f_{a_k} f_{z_k}`, by depth-first assignment of `y_1, y_2, ...`.
fn pairing_sum(kernel: &QKernel, fs: &[GridFunction], v: &Pairing) -> f64 {
    let w = kernel.grid().weight();
    let p = v.size();
    let weights: Vec<Vec<f64>> = v
        .pairs()
        .iter()
        .map(|&(a, z)| fs[a - 1].0.iter().zip(&fs[z - 1].0).map(|(x, y)| w * (x * y)).collect())
        .collect();
    // crossing partners of k among earlier pairs
    let mut partners: Vec<Vec<usize>> = alloc::vec![Vec::new(); p];
    for &(k, l) in v.crossings() {
        partners[l - 1].push(k - 1);
    }
    let mut assignment = alloc::vec![0usize; p];
    descend(kernel, &weights, &partners, &mut assignment, 0, 1.0)
}

fn descend(
    kernel: &QKernel,
    weights: &[Vec<f64>],
    partners: &[Vec<usize>],
    assignment: &mut [usize],
    k: usize,
    acc: f64,
) -> f64 {
    if k == weights.len() {
        return acc;
    }
    let mut total = 0.0;
    for (y, &g) in weights[k].iter().enumerate() {
        if g == 0.0 {
            continue;
        }
        let mut factor = acc * g;
        for &l in &partners[k] {
            factor *= kernel.get(assignment[l], y);
        }
        if factor == 0.0 {
            continue;
        }
        assignment[k] = y;
        total += descend(kernel, weights, partners, assignment, k + 1, factor);
    }
    total
}

/// Summation by recursive halving, so the result does not depend on how
/// the terms were produced.
fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

fn sum_over_pairings(kernel: &QKernel, fs: &[GridFunction], keep: impl Fn(&Pairing) -> bool + Sync) -> Result<(f64, usize)> {
    let pairings: Vec<Pairing> = symcomb::enumerate_pairings(fs.len())?
        .into_iter()
        .filter(|v| keep(v))
        .collect();
    #[cfg(feature = "parallel")]
    let terms: Vec<f64> = {
        use rayon::prelude::*;
        pairings.par_iter().map(|v| pairing_sum(kernel, fs, v)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let terms: Vec<f64> = pairings.iter().map(|v| pairing_sum(kernel, fs, v)).collect();
    Ok((pairwise_sum(&terms), pairings.len()))
}

/// `⟨a^{v_n}(f_n) ⋯ a^{v_1}(f_1) Ω, Ω⟩_Q` by the pair-partition formula.
pub fn wick_mixed_moment(kernel: &QKernel, fs: &[GridFunction], v: &SignPattern) -> Result<f64> {
    check_fs(kernel, fs)?;
    if v.len() != fs.len() {
        return Err(Error::DimensionMismatch {
            expected: fs.len(),
            actual: v.len(),
        });
    }
    Ok(sum_over_pairings(kernel, fs, |p| v.admits(p))?.0)
}

/// `⟨w(f_n) ⋯ w(f_1) Ω, Ω⟩_Q`: every pairing contributes once.
pub fn wick_field_moment(kernel: &QKernel, fs: &[GridFunction]) -> Result<f64> {
    check_fs(kernel, fs)?;
    Ok(sum_over_pairings(kernel, fs, |_| true)?.0)
}

/// `Σ_V q^{|crossings(V)|}` over pairings of `{1..n}`: the field moment of
/// a unit function under the constant kernel `q`.
pub fn crossing_polynomial(n: usize, q: f64) -> Result<f64> {
    let terms: Vec<f64> = symcomb::enumerate_pairings(n)?
        .iter()
        .map(|v| math::powi(q, v.crossings().len()))
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `(2p)! / (p! (p+1)!)`.
pub fn catalan(p: usize) -> u64 {
    (0..p as u64).fold(1u64, |c, k| c * 2 * (2 * k + 1) / (k + 2))
}

/// `⟨X Ω, Ω⟩_Q` by explicit linear algebra on the truncated space.
///
/// Components at a level higher than the number of operators still to act
/// cannot return to the vacuum and are discarded along the way, so the
/// computation is exact as soon as `n_max ≥ n / 2`. It fails with
/// [`Error::TruncationInexact`] if mass that could still return was cut.
pub fn matrix_vacuum_moment(space: &TruncatedFockSpace, fs: &[GridFunction], word: &Word) -> Result<f64> {
    check_fs(space.kernel(), fs)?;
    if let Word::Mixed(v) = word {
        if v.len() != fs.len() {
            return Err(Error::DimensionMismatch {
                expected: fs.len(),
                actual: v.len(),
            });
        }
    }
    let n = fs.len();
    let n_max = space.n_max();
    let mut state = FockVector::vacuum(space);
    for (i, f) in fs.iter().enumerate() {
        let op: FockOperator = match word {
            Word::Mixed(v) => match v.0[i] {
                Sign::Create => fock::create(space, f)?,
                Sign::Annihilate => fock::annihilate(space, f)?,
            },
            Word::Field => fock::field(space, f)?,
        };
        let remaining = n - i;
        for level in (remaining + 1)..=n_max {
            state.level_mut(level).fill(0.0);
        }
        if op.max_shift() > 0 && !state.is_zero_at(n_max) && n_max + 1 < remaining {
            return Err(Error::TruncationInexact { n_max });
        }
        state = op.apply(&state)?.0;
    }
    Ok(state.vacuum_coefficient())
}

/// Rank of the vectors `w(e_{x_1}) ⋯ w(e_{x_k}) Ω`, `k ≤ n_max`, all of
/// which are truncation-exact. The vacuum is cyclic on the truncated space
/// iff the rank equals `total_dim`.
pub fn cyclic_span_rank(space: &TruncatedFockSpace) -> Result<usize> {
    let fields = (0..space.m())
        .map(|x| fock::field_basis(space, x))
        .collect::<Result<Vec<_>>>()?;
    let mut frontier = alloc::vec![FockVector::vacuum(space)];
    let mut columns = alloc::vec![FockVector::vacuum(space).flat()];
    for _ in 0..space.n_max() {
        let mut next = Vec::with_capacity(frontier.len() * space.m());
        for v in &frontier {
            for w in &fields {
                let (out, exact) = w.apply(v)?;
                if !exact {
                    return Err(Error::TruncationInexact { n_max: space.n_max() });
                }
                columns.push(out.flat());
                next.push(out);
            }
        }
        frontier = next;
    }
    let mat = nalgebra::DMatrix::from_columns(&columns);
    let scale = mat.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(mat.rank(1e-10 * scale.max(1.0)))
}

/// Evaluates a moment by the pair-partition formula and, when a space is
/// supplied, by the matrix oracle.
pub fn moment_report(
    kernel: &QKernel,
    fs: &[GridFunction],
    word: &Word,
    space: Option<&TruncatedFockSpace>,
) -> Result<MomentReport> {
    check_fs(kernel, fs)?;
    let (value_wick, pairing_count) = match word {
        Word::Mixed(v) => {
            if v.len() != fs.len() {
                return Err(Error::DimensionMismatch {
                    expected: fs.len(),
                    actual: v.len(),
                });
            }
            sum_over_pairings(kernel, fs, |p| v.admits(p))?
        }
        Word::Field => sum_over_pairings(kernel, fs, |_| true)?,
    };
    let value_matrix = space.map(|s| matrix_vacuum_moment(s, fs, word)).transpose()?;
    Ok(MomentReport {
        n: fs.len(),
        word: match word {
            Word::Mixed(v) => alloc::format!("{v}"),
            Word::Field => "w".repeat(fs.len()),
        },
        value_wick,
        value_matrix,
        pairing_count,
        kernel_digest: kernel.digest(),
        grid_digest: kernel.grid().digest(),
    })
}

/// Largest `|τ(w(f_{σ^k(n)}) ⋯ w(f_{σ^k(1)})) − τ(w(f_n) ⋯ w(f_1))|` over
/// cyclic rotations `σ^k`.
pub fn traciality_check(kernel: &QKernel, fs: &[GridFunction]) -> Result<f64> {
    if fs.len() > CYCLIC_DEGREE_CAP {
        return Err(Error::ResourceLimit {
            what: "cyclic moment degree",
            requested: fs.len(),
            cap: CYCLIC_DEGREE_CAP,
        });
    }
    let base = wick_field_moment(kernel, fs)?;
    let mut worst = 0.0f64;
    for shift in 1..fs.len() {
        let mut rotated = fs.to_vec();
        rotated.rotate_left(shift);
        worst = worst.max((wick_field_moment(kernel, &rotated)? - base).abs());
    }
    Ok(worst)
}

/// Test functions with closed forms, resampled on every grid and then
/// normalized in the discrete `L²` norm of that grid.
#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    /// The constant function.
    Uniform,
    /// `exp(-|x - c|² / s²)`.
    Gaussian { center: Vec<f64>, width: f64 },
    /// `cos(k π x_1)`.
    Cosine { frequency: f64 },
}

impl TestFunction {
    pub fn sample(&self, grid: &Grid) -> GridFunction {
        let raw = match self {
            TestFunction::Uniform => GridFunction::from_fn(grid, |_| 1.0),
            TestFunction::Gaussian { center, width } => GridFunction::from_fn(grid, |x| {
                let d2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                math::exp(-d2 / (width * width))
            }),
            TestFunction::Cosine { frequency } => {
                GridFunction::from_fn(grid, |x| math::cos(frequency * core::f64::consts::PI * x[0]))
            }
        };
        raw.normalized(grid)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub m: usize,
    pub eps: f64,
    pub moment: f64,
    /// `|moment − previous moment|`, absent on the coarsest grid.
    pub difference: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn differences(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.difference).collect()
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.differences().windows(2).all(|w| w[1] < w[0])
    }

    pub fn non_increasing(&self) -> bool {
        self.differences().windows(2).all(|w| w[1] <= w[0])
    }
}

/// Field moment `τ(w(f_n) ⋯ w(f_1))` on `grid`, `refine(grid)`, ... with the
/// kernel and the test functions resampled on each grid.
pub fn convergence_report(
    kernel: &KernelSpec,
    grid: &Grid,
    fs: &[TestFunction],
    refinements: usize,
) -> Result<ConvergenceReport> {
    if refinements > REFINEMENT_CAP {
        return Err(Error::ResourceLimit {
            what: "grid refinements",
            requested: refinements,
            cap: REFINEMENT_CAP,
        });
    }
    if fs.len() > CYCLIC_DEGREE_CAP {
        return Err(Error::ResourceLimit {
            what: "convergence moment degree",
            requested: fs.len(),
            cap: CYCLIC_DEGREE_CAP,
        });
    }
    let mut current = grid.clone();
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(refinements + 1);
    for step in 0..=refinements {
        if step > 0 {
            current = current.refine()?;
        }
        let q = kernel.build(&current)?;
        let sampled: Vec<GridFunction> = fs.iter().map(|f| f.sample(&current)).collect();
        let moment = wick_field_moment(&q, &sampled)?;
        let difference = rows.last().map(|r| (moment - r.moment).abs());
        rows.push(ConvergenceRow {
            m: current.len(),
            eps: current.spacing(),
            moment,
            difference,
        });
    }
    Ok(ConvergenceReport { rows })
}
