//! Prints one PASS/FAIL line per acceptance criterion and fails the target
//! if any criterion fails.

use std::process::Command;
use std::time::Instant;

use nalgebra::DVector;
use qfock::{run_spectrum, RunConfig};
use qfock_core::fock::{self, FockVector, TruncatedFockSpace};
use qfock_core::kernel::{Grid, GridFunction, KernelSpec, QKernel};
use qfock_core::linalg::{max_abs_diff, sym_eigs};
use qfock_core::moments::{
    catalan, convergence_report, matrix_vacuum_moment, traciality_check, wick_field_moment, wick_mixed_moment,
    SignPattern, TestFunction, Word,
};
use qfock_core::spectral::{ancr_check, contraction_check, disjoint_bumps, lemma8_checks, q_operator_norm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL_ORACLE: f64 = 1e-12;
const TOL_EXACT: f64 = 1e-12;
const TOL_ADJOINT: f64 = 1e-10;
const TOL_COMMUTATION: f64 = 1e-10;
const TOL_NORM: f64 = 1e-9;
const TOL_WICK: f64 = 1e-9;
const TOL_TRACE: f64 = 1e-10;
const TOL_VACUUM: f64 = 1e-10;
const TOL_GAP: f64 = 1e-8;

type Outcome = Result<String, String>;

fn grid(m: usize) -> Grid {
    Grid::interval_1d(0.0, 1.0, m).unwrap()
}

fn constant(m: usize, q: f64) -> QKernel {
    QKernel::constant(&grid(m), q).unwrap()
}

fn gaussian(m: usize) -> QKernel {
    QKernel::gaussian(&grid(m), 0.5, 0.2).unwrap()
}

fn space(k: QKernel, n_max: usize) -> TruncatedFockSpace {
    TruncatedFockSpace::new(k, n_max).unwrap()
}

fn random_functions(g: &Grid, count: usize, seed: u64) -> Vec<GridFunction> {
    qfock::suites::random_functions(g, count, seed)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gram_oracle() -> Outcome {
    let mut worst = 0.0f64;
    for m in 1..=3 {
        for k in [constant(m, 0.3), gaussian(m)] {
            let s = space(k, 5);
            for n in 0..=5 {
                let d = fock::p_direct(&s, n).unwrap().matrix;
                let r = fock::p_recursive(&s, n).unwrap().matrix;
                worst = worst.max(max_abs_diff(&d, &r));
            }
        }
    }
    check(worst <= TOL_ORACLE, format!("max entry difference {worst:.3e}"))
}

fn positivity() -> Outcome {
    let mut min_eig = f64::INFINITY;
    for m in 1..=3 {
        for k in [constant(m, 0.3), constant(m, -0.6), gaussian(m)] {
            let s = space(k, 4);
            for n in 0..=4 {
                min_eig = min_eig.min(sym_eigs(&fock::p_recursive(&s, n).unwrap().matrix).unwrap()[0]);
            }
        }
    }
    let mut spectrum_err = 0.0f64;
    for q in [0.0, 0.3, -0.5, 0.9] {
        let s = space(constant(2, q), 2);
        let eigs = sym_eigs(&fock::p_recursive(&s, 2).unwrap().matrix).unwrap();
        let mut expected = [1.0 - q, 1.0 + q, 1.0 + q, 1.0 + q];
        expected.sort_by(f64::total_cmp);
        for (a, b) in eigs.iter().zip(expected) {
            spectrum_err = spectrum_err.max((a - b).abs());
        }
    }
    check(
        min_eig > 0.0 && spectrum_err <= TOL_EXACT,
        format!("min eigenvalue {min_eig:.3e}, m=2 n=2 spectrum error {spectrum_err:.3e}"),
    )
}

fn yang_baxter() -> Outcome {
    let mut worst = 0.0f64;
    for m in 1..=3 {
        for k in [constant(m, 0.3), gaussian(m)] {
            let s = space(k, 4);
            for n in 3..=4 {
                for i in 1..n {
                    for j in 1..n {
                        let ti = s.swap_sparse(n, i).unwrap();
                        let tj = s.swap_sparse(n, j).unwrap();
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
            }
        }
    }
    check(worst <= TOL_EXACT, format!("max residual {worst:.3e}"))
}

fn random_vector(s: &TruncatedFockSpace, rng: &mut ChaCha8Rng) -> FockVector {
    let flat = DVector::from_fn(s.total_dim(), |_, _| rng.random_range(-1.0..=1.0));
    FockVector::from_flat(s, &flat).unwrap()
}

fn adjointness() -> Outcome {
    let mut worst = 0.0f64;
    for k in [constant(3, 0.3), gaussian(3)] {
        let s = space(k, 3);
        let g0 = s.kernel().grid().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for h in random_functions(&g0, 100, 11) {
            let mut f = random_vector(&s, &mut rng);
            f.level_mut(3).fill(0.0);
            let g = random_vector(&s, &mut rng);
            let lhs = fock::q_inner(&s, &fock::create(&s, &h).unwrap().apply(&f).unwrap().0, &g).unwrap();
            let rhs = fock::q_inner(&s, &f, &fock::annihilate(&s, &h).unwrap().apply(&g).unwrap().0).unwrap();
            worst = worst.max((lhs - rhs).abs());
        }
    }
    check(worst <= TOL_ADJOINT, format!("max |<a+f,g> - <f,ag>| {worst:.3e} over 2x100 triples"))
}

fn commutation() -> Outcome {
    let mut worst = 0.0f64;
    for m in 1..=3 {
        for k in [constant(m, 0.3), gaussian(m)] {
            let s = space(k, 3);
            for x in 0..m {
                let a = fock::annihilate_basis(&s, x).unwrap();
                for y in 0..m {
                    let ap = fock::create_basis(&s, y).unwrap();
                    let lhs = &a.compose(&ap) - &ap.compose(&a).scaled(s.kernel().get(x, y));
                    for lvl in 0..s.n_max() {
                        let dim = s.level_dim(lvl);
                        let id = nalgebra::DMatrix::identity(dim, dim) * if x == y { 1.0 } else { 0.0 };
                        let b = lhs.block(lvl, lvl).cloned().unwrap_or_else(|| nalgebra::DMatrix::zeros(dim, dim));
                        worst = worst.max(max_abs_diff(&b, &id));
                    }
                }
            }
        }
    }
    check(worst <= TOL_COMMUTATION, format!("max residual {worst:.3e}"))
}

fn norm_bound() -> Outcome {
    let mut worst_margin = f64::INFINITY;
    for q in [0.0, 0.3, 0.7] {
        let s = space(constant(3, q), 3);
        let g = s.kernel().grid().clone();
        for h in random_functions(&g, 50, 6).into_iter().enumerate().map(|(i, h)| GridFunction(h.0.iter().map(|x| x * (1.0 + i as f64 / 10.0)).collect())) {
            let norm = q_operator_norm(&s, &fock::create(&s, &h).unwrap().exact_part()).unwrap();
            let bound = h.l2_norm(&g) / (1.0 - q).sqrt();
            worst_margin = worst_margin.min(bound + TOL_NORM - norm);
        }
    }
    check(worst_margin >= 0.0, format!("smallest margin {worst_margin:.3e}"))
}

fn wick_oracle() -> Outcome {
    let mut worst = 0.0f64;
    for k in [constant(3, 0.3), gaussian(3)] {
        let s = space(k, 3);
        let g = s.kernel().grid().clone();
        for n in 1..=6 {
            let fs = random_functions(&g, n, 20 + n as u64);
            for v in SignPattern::all(n) {
                let wick = wick_mixed_moment(s.kernel(), &fs, &v).unwrap();
                let mat = matrix_vacuum_moment(&s, &fs, &Word::Mixed(v)).unwrap();
                worst = worst.max((wick - mat).abs());
            }
            let wick = wick_field_moment(s.kernel(), &fs).unwrap();
            worst = worst.max((wick - matrix_vacuum_moment(&s, &fs, &Word::Field).unwrap()).abs());
        }
    }
    let mut catalan_err = 0.0f64;
    let free = constant(3, 0.0);
    let unit = TestFunction::Uniform.sample(free.grid());
    for p in 1..=4 {
        let got = wick_field_moment(&free, &vec![unit.clone(); 2 * p]).unwrap();
        catalan_err = catalan_err.max((got - catalan(p) as f64).abs());
    }
    let mut fourth_err = 0.0f64;
    for q in [-0.5, 0.3, 0.7] {
        let k = constant(3, q);
        let got = wick_field_moment(&k, &vec![unit.clone(); 4]).unwrap();
        fourth_err = fourth_err.max((got - (2.0 + q)).abs());
    }
    check(
        worst <= TOL_WICK && catalan_err <= TOL_EXACT && fourth_err <= TOL_EXACT,
        format!("wick-matrix {worst:.3e}, catalan {catalan_err:.3e}, 2+q {fourth_err:.3e}"),
    )
}

fn traciality() -> Outcome {
    let mut worst = 0.0f64;
    for k in [constant(3, 0.3), gaussian(3)] {
        for n in 1..=6 {
            let fs = random_functions(k.grid(), n, 40 + n as u64);
            worst = worst.max(traciality_check(&k, &fs).unwrap());
        }
    }
    check(worst <= TOL_TRACE, format!("max cyclic deviation {worst:.3e}"))
}

fn convergence() -> Outcome {
    let fs = vec![
        TestFunction::Gaussian { center: vec![0.4], width: 0.25 },
        TestFunction::Gaussian { center: vec![0.6], width: 0.3 },
        TestFunction::Cosine { frequency: 1.0 },
        TestFunction::Uniform,
    ];
    let rep = convergence_report(&KernelSpec::Gaussian { q0: 0.5, length: 0.2 }, &grid(8), &fs, 2).unwrap();
    let ms: Vec<usize> = rep.rows.iter().map(|r| r.m).collect();
    check(
        ms == [8, 16, 32] && rep.strictly_decreasing(),
        format!("differences {:?} on m = {ms:?}", rep.differences()),
    )
}

fn section_bounds() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for m in [4, 8] {
        for q in [0.0, 0.3] {
            let s5 = space(constant(m, q), 5);
            let g = &disjoint_bumps(s5.kernel().grid(), 1).unwrap()[0];
            for n in 1..=3 {
                for r in contraction_check(&s5, g, n).unwrap() {
                    worst = worst.min(r.margin + TOL_NORM);
                    count += 1;
                }
            }
            let s = space(constant(m, q), 3);
            for d in [1, 2, 4] {
                let gs = disjoint_bumps(s.kernel().grid(), d).unwrap();
                let reports = lemma8_checks(&s, &gs).unwrap();
                if reports.len() != 8 {
                    return Err(format!("expected 8 lemma items, got {}", reports.len()));
                }
                for r in reports.iter().chain(ancr_check(&s, &gs).unwrap().iter()) {
                    worst = worst.min(r.margin + TOL_NORM);
                    count += 1;
                }
            }
        }
    }
    check(worst >= 0.0, format!("{count} bounds, smallest margin {worst:.3e}"))
}

fn spectral_gap() -> Outcome {
    let cfg = RunConfig::preset("krolak-binding").unwrap();
    let r = run_spectrum(&cfg).map_err(|e| e.to_string())?;
    let get = |name: &str| r.records.iter().find(|x| x.name == name).unwrap().clone();
    let vac = get("vacuum_residual");
    let gap = get("gap_lower_bound");
    check(
        vac.measured <= TOL_VACUUM && gap.measured >= gap.expected - TOL_GAP,
        format!("vacuum residual {:.3e}, lambda_min {:.6} >= {:.6}", vac.measured, gap.measured, gap.expected),
    )
}

fn determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_qfock");
    let run = |suite: &str, format: &str| {
        Command::new(exe)
            .args([suite, "--preset", "free-small", "--seed", "7", "--format", format])
            .output()
            .unwrap()
    };
    let mut compared = 0;
    for suite in ["verify", "moments", "spectrum", "converge"] {
        for format in ["json", "csv"] {
            let (a, b) = (run(suite, format), run(suite, format));
            if !a.status.success() || a.stdout.is_empty() || a.stdout != b.stdout {
                return Err(format!("{suite} {format}: reports differ or run failed"));
            }
            compared += 1;
        }
    }
    Ok(format!("{compared} report pairs byte-identical"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("gram-oracle equivalence", gram_oracle),
        ("strict positivity", positivity),
        ("yang-baxter identities", yang_baxter),
        ("adjointness", adjointness),
        ("commutation relation", commutation),
        ("creation norm bound", norm_bound),
        ("wick vs matrix oracle", wick_oracle),
        ("traciality", traciality),
        ("convergence study", convergence),
        ("operator bounds", section_bounds),
        ("spectral gap, binding regime", spectral_gap),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1} s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({secs:.1} s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
