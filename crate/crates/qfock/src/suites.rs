//! The four command suites. Each returns a [`SuiteResult`] whose rows are
//! checks against fixed tolerances or logged values.

use nalgebra::{DMatrix, DVector};
use qfock_core::fock::{self, FockVector, TruncatedFockSpace, DENSE_LEVEL_CAP};
use qfock_core::kernel::{Grid, GridFunction, KernelSpec, QKernel};
use qfock_core::linalg::{max_abs_diff, sym_eigs};
use qfock_core::moments::{
    self, convergence_report, crossing_polynomial, cyclic_span_rank, matrix_vacuum_moment, traciality_check,
    wick_field_moment, wick_mixed_moment, SignPattern, TestFunction, Word,
};
use qfock_core::spectral::{
    ancr_check, build_nd, contraction_check, disjoint_bumps, gram_domination, lemma8_checks, nd_gap_report_for,
    q_operator_norm, BoundReport,
};
use qfock_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ConfigError, FunctionSpec, RunConfig};
use crate::report::{Relation, SuiteResult};

/// Total dimension above which the verification suite lowers its truncation.
pub const VERIFY_DIM_BUDGET: usize = 1500;
/// Total dimension up to which the cyclicity rank is computed.
pub const CYCLIC_DIM_BUDGET: usize = 400;
/// Random triples drawn for the adjointness check.
pub const ADJOINT_TRIPLES: usize = 100;
/// Random test functions drawn for the creation norm bound.
pub const NORM_SAMPLES: usize = 20;

#[derive(Debug)]
pub enum RunError {
    /// Unusable configuration; exit code 2.
    Config(String),
    /// Numerical failure during a run; exit code 1.
    Runtime(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(s) | RunError::Runtime(s) => f.write_str(s),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.to_string())
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_)
            | Error::SupNorm { .. }
            | Error::Symmetry { .. }
            | Error::ResourceLimit { .. }
            | Error::DimensionMismatch { .. }
            | Error::TruncationTooSmall { .. } => RunError::Config(e.to_string()),
            _ => RunError::Runtime(e.to_string()),
        }
    }
}

type Run<T> = Result<T, RunError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Verify,
    Moments,
    Spectrum,
    Converge,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Verify => "verify",
            Suite::Moments => "moments",
            Suite::Spectrum => "spectrum",
            Suite::Converge => "converge",
        }
    }

    pub fn run(self, cfg: &RunConfig) -> Run<SuiteResult> {
        match self {
            Suite::Verify => run_verify(cfg),
            Suite::Moments => run_moments(cfg),
            Suite::Spectrum => run_spectrum(cfg),
            Suite::Converge => run_converge(cfg),
        }
    }
}

/// Seeded coefficients uniform in `[-1, 1]`, grid-normalized, drawn function
/// by function in grid order.
pub fn random_functions(grid: &Grid, count: usize, seed: u64) -> Vec<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| GridFunction((0..grid.len()).map(|_| rng.random_range(-1.0..=1.0)).collect()).normalized(grid))
        .collect()
}

/// The test functions `f_1, ..., f_n` selected by `spec`.
pub fn test_functions(spec: &FunctionSpec, grid: &Grid, n: usize, seed: u64) -> Run<Vec<GridFunction>> {
    Ok(match spec {
        FunctionSpec::Uniform => vec![TestFunction::Uniform.sample(grid); n],
        FunctionSpec::Bumps(k) => {
            let bumps = disjoint_bumps(grid, *k).map_err(|e| ConfigError::new("$.functions", e.to_string()))?;
            (0..n).map(|i| bumps[i % k].clone()).collect()
        }
        FunctionSpec::Random => random_functions(grid, n, seed),
    })
}

fn random_vector(space: &TruncatedFockSpace, rng: &mut ChaCha8Rng, top: bool) -> Run<FockVector> {
    let flat = DVector::from_fn(space.total_dim(), |_, _| rng.random_range(-1.0..=1.0));
    let mut v = FockVector::from_flat(space, &flat)?;
    if !top {
        v.level_mut(space.n_max()).fill(0.0);
    }
    let norm = fock::q_norm(space, &v)?;
    Ok(if norm > 0.0 { v.scaled(1.0 / norm) } else { v })
}

fn verify_truncation(kernel: &QKernel, n_max: usize) -> Run<usize> {
    let m = kernel.len();
    let mut total = 1usize;
    let mut level = 1usize;
    let mut n = 0;
    while n < n_max {
        level = level.saturating_mul(m);
        if level > DENSE_LEVEL_CAP || total.saturating_add(level) > VERIFY_DIM_BUDGET {
            break;
        }
        total += level;
        n += 1;
    }
    if n == 0 {
        return Err(RunError::Config(format!(
            "grid of {m} points is too large for the verification suite (dimension budget {VERIFY_DIM_BUDGET})"
        )));
    }
    Ok(n)
}

fn yang_baxter_residual(space: &TruncatedFockSpace, n: usize) -> Run<f64> {
    let mut worst = 0.0f64;
    for i in 1..n {
        for j in 1..n {
            let ti = space.swap_sparse(n, i)?;
            let tj = space.swap_sparse(n, j)?;
            if i.abs_diff(j) >= 2 {
                worst = worst.max(max_abs_diff(&ti.mul(&tj).to_dense(), &tj.mul(&ti).to_dense()));
            }
            if j == i + 1 {
                let a = ti.mul(&tj).mul(&ti).to_dense();
                let b = tj.mul(&ti).mul(&tj).to_dense();
                worst = worst.max(max_abs_diff(&a, &b));
            }
        }
    }
    Ok(worst)
}

fn commutation_residual(space: &TruncatedFockSpace) -> Run<f64> {
    let m = space.m();
    let mut worst = 0.0f64;
    let creators: Vec<_> = (0..m).map(|y| fock::create_basis(space, y)).collect::<Result<_, _>>()?;
    for x in 0..m {
        let a = fock::annihilate_basis(space, x)?;
        for (y, ap) in creators.iter().enumerate() {
            let lhs = &a.compose(ap) - &ap.compose(&a).scaled(space.kernel().get(x, y));
            let delta = if x == y { 1.0 } else { 0.0 };
            for k in 0..space.n_max() {
                let dim = space.level_dim(k);
                let expected = DMatrix::identity(dim, dim) * delta;
                let block = lhs.block(k, k).cloned().unwrap_or_else(|| DMatrix::zeros(dim, dim));
                worst = worst.max(max_abs_diff(&block, &expected));
            }
        }
    }
    Ok(worst)
}

/// Structural checks of the Fock construction on the configured kernel.
pub fn run_verify(cfg: &RunConfig) -> Run<SuiteResult> {
    let tol = cfg.tolerances;
    let kernel = cfg.kernel.build()?;
    let grid = kernel.grid().clone();
    let q = kernel.sup_q();
    let n_v = verify_truncation(&kernel, cfg.n_max)?;
    let space = TruncatedFockSpace::new(kernel, n_v)?;
    let mut out = SuiteResult::new(Suite::Verify.name(), &cfg.label, cfg.seed);
    if n_v < cfg.n_max {
        out.info("verify_n_max", n_v as f64, format!("lowered from {} to fit the dense budget", cfg.n_max));
    }

    if n_v >= 3 {
        let mut worst = 0.0f64;
        for n in 3..=n_v.min(4) {
            worst = worst.max(yang_baxter_residual(&space, n)?);
        }
        out.push("yang_baxter", Relation::Eq, worst, 0.0, tol.exact);
    } else {
        out.info("yang_baxter", 0.0, "needs n_max >= 3");
    }

    let mut min_eig = f64::INFINITY;
    for n in 0..=n_v.min(4) {
        min_eig = min_eig.min(sym_eigs(&fock::p_recursive(&space, n)?.matrix)?[0]);
    }
    out.push("gram_positivity", Relation::Gt, min_eig, 0.0, 0.0);

    let mut worst = 0.0f64;
    for n in 0..=n_v.min(5) {
        let d = fock::p_direct(&space, n)?.matrix;
        let r = fock::p_recursive(&space, n)?.matrix;
        worst = worst.max(max_abs_diff(&d, &r));
    }
    out.push("gram_recursion_vs_permutation_sum", Relation::Eq, worst, 0.0, tol.exact);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = 0.0f64;
    let hs = random_functions(&grid, ADJOINT_TRIPLES, cfg.seed ^ 0x5eed);
    for h in &hs {
        let f = random_vector(&space, &mut rng, false)?;
        let g = random_vector(&space, &mut rng, true)?;
        let lhs = fock::q_inner(&space, &fock::create(&space, h)?.apply(&f)?.0, &g)?;
        let rhs = fock::q_inner(&space, &f, &fock::annihilate(&space, h)?.apply(&g)?.0)?;
        worst = worst.max((lhs - rhs).abs());
    }
    out.push("adjointness", Relation::Le, worst, 0.0, tol.solve);

    out.push("commutation_relation", Relation::Le, commutation_residual(&space)?, 0.0, tol.solve);

    let bound = 1.0 / (1.0 - q).sqrt();
    let mut ratio = 0.0f64;
    for h in hs.iter().take(NORM_SAMPLES) {
        let norm = q_operator_norm(&space, &fock::create(&space, h)?.exact_part())?;
        ratio = ratio.max(norm / h.l2_norm(&grid));
    }
    out.push("creation_norm_bound", Relation::Le, ratio, bound, tol.norm);

    let mut mirror = 0.0f64;
    for h in hs.iter().take(NORM_SAMPLES) {
        let adj = fock::right_annihilate(&space, h)?;
        let closed = fock::right_annihilate_mirror(&space, h)?;
        mirror = mirror.max(adj.max_abs_diff(&closed));
    }
    out.push("right_annihilation_mirror_form", Relation::Le, mirror, 0.0, tol.solve);

    if n_v >= 2 {
        let mut dom = f64::INFINITY;
        for n in 0..=(n_v - 1).min(3) {
            dom = dom.min(gram_domination(&space, n)?);
        }
        out.push("gram_domination", Relation::Ge, dom, 0.0, tol.solve);
    }

    let top = (2 * n_v).min(moments::CYCLIC_DEGREE_CAP);
    let mut worst = 0.0f64;
    for n in 1..=top {
        let fs = random_functions(&grid, n, cfg.seed.wrapping_add(n as u64));
        let mut words: Vec<Word> = SignPattern::all(n).into_iter().map(Word::Mixed).collect();
        words.push(Word::Field);
        for word in &words {
            let wick = match word {
                Word::Mixed(v) => wick_mixed_moment(space.kernel(), &fs, v)?,
                Word::Field => wick_field_moment(space.kernel(), &fs)?,
            };
            let matrix = matrix_vacuum_moment(&space, &fs, word)?;
            worst = worst.max((wick - matrix).abs());
        }
    }
    out.push("wick_vs_matrix", Relation::Le, worst, 0.0, tol.norm);

    let mut worst = 0.0f64;
    for n in (2..=moments::CYCLIC_DEGREE_CAP).step_by(2) {
        let fs = random_functions(&grid, n, cfg.seed.wrapping_add(100 + n as u64));
        worst = worst.max(traciality_check(space.kernel(), &fs)?);
    }
    out.push("traciality", Relation::Le, worst, 0.0, tol.solve);

    if space.total_dim() <= CYCLIC_DIM_BUDGET && n_v <= moments::CYCLIC_DEGREE_CAP {
        let rank = cyclic_span_rank(&space)?;
        out.push("cyclicity_rank", Relation::Eq, rank as f64, space.total_dim() as f64, 0.0);
    } else {
        out.info("cyclicity_rank", 0.0, "skipped: dimension above budget");
    }
    Ok(out)
}

/// Vacuum moments of the configured functions: Wick sum against the matrix
/// oracle for every sign pattern and for the field word.
pub fn run_moments(cfg: &RunConfig) -> Run<SuiteResult> {
    let tol = cfg.tolerances;
    let kernel = cfg.kernel.build()?;
    let grid = kernel.grid().clone();
    let n = cfg.n;
    if n == 0 || n > qfock_core::symcomb::PAIRING_CAP {
        return Err(ConfigError::new("$.n", format!("need 1 <= n <= {}", qfock_core::symcomb::PAIRING_CAP)).into());
    }
    let fs = test_functions(&cfg.functions, &grid, n, cfg.seed)?;
    let mut out = SuiteResult::new(Suite::Moments.name(), &cfg.label, cfg.seed);

    // the oracle is exact once n_max >= n/2
    let oracle_levels = cfg.n_max.min((n / 2).max(1));
    let oracle_fits = (0..=oracle_levels).all(|k| grid.len().checked_pow(k as u32).is_some_and(|d| d <= DENSE_LEVEL_CAP));
    let oracle = if oracle_fits {
        Some(TruncatedFockSpace::new(kernel.clone(), oracle_levels)?)
    } else {
        out.info("matrix_oracle", 0.0, "skipped: level dimension above dense cap");
        None
    };

    let mut words: Vec<(String, Word)> =
        SignPattern::all(n).into_iter().map(|v| (format!("mixed[{v}]"), Word::Mixed(v))).collect();
    words.push(("field".into(), Word::Field));
    for (name, word) in &words {
        let wick = match word {
            Word::Mixed(v) => wick_mixed_moment(&kernel, &fs, v)?,
            Word::Field => wick_field_moment(&kernel, &fs)?,
        };
        if n % 2 == 1 {
            out.push_noted(name.as_str(), Relation::Eq, wick, 0.0, tol.exact, "odd");
            continue;
        }
        match oracle.as_ref().map(|s| matrix_vacuum_moment(s, &fs, word)) {
            Some(Ok(matrix)) => out.push(name.as_str(), Relation::Eq, wick, matrix, tol.norm),
            Some(Err(Error::TruncationInexact { .. })) => out.info(name.as_str(), wick, "truncation-inexact"),
            Some(Err(e)) => return Err(e.into()),
            None => out.info(name.as_str(), wick, "wick only"),
        }
    }

    if let (KernelSpec::Constant { q }, FunctionSpec::Uniform) = (&cfg.kernel.kernel, &cfg.functions) {
        let wick = wick_field_moment(&kernel, &fs)?;
        out.push("field_closed_form", Relation::Eq, wick, crossing_polynomial(n, *q)?, tol.exact);
    }
    Ok(out)
}

fn push_bounds(out: &mut SuiteResult, reports: &[BoundReport], tol: f64) {
    for r in reports {
        out.push(r.name.as_str(), Relation::Le, r.measured_norm, r.bound, tol);
    }
}

/// Gap of the `N_d` form together with the norm bounds it rests on.
pub fn run_spectrum(cfg: &RunConfig) -> Run<SuiteResult> {
    let tol = cfg.tolerances;
    let d = cfg.require_d()?;
    let kernel = cfg.kernel.build()?;
    if cfg.n_max < 2 {
        return Err(ConfigError::new("$.n_max", "spectrum needs n_max >= 2").into());
    }
    let space = TruncatedFockSpace::new(kernel, cfg.n_max)?;
    let gs = disjoint_bumps(space.kernel().grid(), d)?;
    let mut out = SuiteResult::new(Suite::Spectrum.name(), &cfg.label, cfg.seed);

    let form = build_nd(&space, &gs)?;
    let gap = nd_gap_report_for(&space, &form, d)?;
    out.push("vacuum_residual", Relation::Le, gap.vacuum_residual, 0.0, tol.vacuum);
    out.push("gap_lower_bound", Relation::Ge, gap.lambda_min_complement, gap.krolak_bound, tol.gap);
    out.info("krolak_bound", gap.krolak_bound, "");
    if let Some(v) = gap.lambda_min_odd {
        out.info("lambda_min_odd", v, "");
    }
    if let Some(v) = gap.lambda_min_even {
        out.info("lambda_min_even", v, "");
    }
    if let Some(c) = gap.whitening_condition {
        out.info("whitening_condition", c, "");
    }

    for n in 1..=cfg.n_max.saturating_sub(2).min(3) {
        push_bounds(&mut out, &contraction_check(&space, &gs[0], n)?, tol.norm);
    }

    let dense_ok = space.level_dim(cfg.n_max) <= DENSE_LEVEL_CAP;
    if dense_ok {
        push_bounds(&mut out, &lemma8_checks(&space, &gs)?, tol.norm);
        push_bounds(&mut out, &ancr_check(&space, &gs)?, tol.norm);
    } else {
        out.info("operator_bounds", 0.0, "skipped: top level dimension above dense cap");
    }
    Ok(out)
}

fn convergence_functions(spec: &FunctionSpec, (a, b): (f64, f64), n: usize, seed: u64) -> Vec<TestFunction> {
    let len = b - a;
    match spec {
        FunctionSpec::Uniform => vec![TestFunction::Uniform; n],
        FunctionSpec::Bumps(k) => (0..n)
            .map(|i| TestFunction::Gaussian {
                center: vec![a + len * ((i % k) as f64 + 0.5) / *k as f64],
                width: len / (2.0 * *k as f64),
            })
            .collect(),
        FunctionSpec::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| TestFunction::Gaussian {
                    center: vec![a + len * rng.random_range(0.0..=1.0)],
                    width: len / 4.0,
                })
                .collect()
        }
    }
}

/// Field moment under repeated grid halving. Passes when successive
/// differences never grow (differences below the exact tolerance count as 0).
pub fn run_converge(cfg: &RunConfig) -> Run<SuiteResult> {
    let tol = cfg.tolerances;
    let interval = cfg.require_interval()?;
    if matches!(cfg.kernel.kernel, KernelSpec::Matrix { .. }) {
        return Err(ConfigError::new("$.kernel.type", "matrix kernels cannot be resampled on refined grids").into());
    }
    let grid = cfg.kernel.grid()?;
    cfg.kernel.build()?;
    let fs = convergence_functions(&cfg.functions, interval, cfg.n, cfg.seed);
    let report = convergence_report(&cfg.kernel.kernel, &grid, &fs, cfg.refinements)?;
    let mut out = SuiteResult::new(Suite::Converge.name(), &cfg.label, cfg.seed);
    for row in &report.rows {
        out.info(format!("moment_m{}", row.m), row.moment, "");
        if let Some(diff) = row.difference {
            out.info(format!("difference_m{}", row.m), diff, "");
        }
    }
    let diffs: Vec<f64> = report
        .differences()
        .into_iter()
        .map(|x| if x <= tol.exact { 0.0 } else { x })
        .collect();
    let growth = diffs.windows(2).map(|w| w[1] - w[0]).fold(0.0f64, f64::max);
    out.push("differences_non_increasing", Relation::Le, growth, 0.0, 0.0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_small_verify_passes() {
        let cfg = RunConfig::preset("free-small").unwrap();
        let r = run_verify(&cfg).unwrap();
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
        assert!(r.records.iter().any(|x| x.name == "cyclicity_rank" && x.relation == Relation::Eq));
    }

    #[test]
    fn free_small_moments_give_catalan() {
        let cfg = RunConfig::preset("free-small").unwrap();
        let r = run_moments(&cfg).unwrap();
        assert!(r.pass);
        let closed = r.records.iter().find(|x| x.name == "field_closed_form").unwrap();
        assert!((closed.measured - 2.0).abs() < 1e-12);
    }

    #[test]
    fn odd_moments_flagged() {
        let mut cfg = RunConfig::preset("free-small").unwrap();
        cfg.n = 5;
        let r = run_moments(&cfg).unwrap();
        assert!(r.pass);
        assert!(r.records.iter().filter(|x| x.name != "field_closed_form").all(|x| x.note == "odd"));
    }

    #[test]
    fn verify_truncation_respects_budget() {
        let k = QKernel::constant(&Grid::interval_1d(0.0, 1.0, 50).unwrap(), 0.0).unwrap();
        assert_eq!(verify_truncation(&k, 3).unwrap(), 1);
        let k = QKernel::constant(&Grid::interval_1d(0.0, 1.0, 2).unwrap(), 0.0).unwrap();
        assert_eq!(verify_truncation(&k, 3).unwrap(), 3);
    }

    #[test]
    fn error_classes() {
        assert_eq!(RunError::from(Error::Config("x".into())).exit_code(), 2);
        assert_eq!(RunError::from(Error::TruncationInexact { n_max: 2 }).exit_code(), 1);
    }

    #[test]
    fn random_functions_are_normalized_and_seeded() {
        let g = Grid::interval_1d(0.0, 1.0, 5).unwrap();
        let a = random_functions(&g, 3, 9);
        assert_eq!(a, random_functions(&g, 3, 9));
        assert_ne!(a, random_functions(&g, 3, 10));
        for f in &a {
            assert!((f.l2_norm(&g) - 1.0).abs() < 1e-12);
        }
    }
}
