mod common;

use common::{constant, gaussian, random_functions, space};
use qfock_core::kernel::{Grid, GridFunction, KernelSpec};
use qfock_core::moments::{
    catalan, convergence_report, crossing_polynomial, matrix_vacuum_moment, moment_report, traciality_check,
    wick_field_moment, wick_mixed_moment, SignPattern, TestFunction, Word,
};

fn unit(grid: &Grid) -> GridFunction {
    TestFunction::Uniform.sample(grid)
}

#[test]
fn wick_agrees_with_matrix_oracle() {
    for kernel in [constant(3, 0.4), gaussian(3)] {
        let s = space(kernel.clone(), 3);
        let fs = random_functions(kernel.grid(), 6, 9);
        for n in 0..=6 {
            let fs = &fs[..n];
            for v in SignPattern::all(n) {
                let wick = wick_mixed_moment(&kernel, fs, &v).unwrap();
                let mat = matrix_vacuum_moment(&s, fs, &Word::Mixed(v.clone())).unwrap();
                assert!((wick - mat).abs() <= 1e-9, "{v}: {wick} vs {mat}");
            }
            let wick = wick_field_moment(&kernel, fs).unwrap();
            let mat = matrix_vacuum_moment(&s, fs, &Word::Field).unwrap();
            assert!((wick - mat).abs() <= 1e-9, "field n={n}");
            let by_signs: f64 = SignPattern::all(n)
                .iter()
                .map(|v| wick_mixed_moment(&kernel, fs, v).unwrap())
                .sum();
            assert!((by_signs - wick).abs() <= 1e-12);
        }
    }
}

#[test]
fn odd_degrees_are_exactly_zero() {
    let k = gaussian(3);
    let s = space(k.clone(), 3);
    let fs = random_functions(k.grid(), 5, 1);
    for n in [1, 3, 5] {
        assert_eq!(wick_field_moment(&k, &fs[..n]).unwrap(), 0.0);
        assert_eq!(matrix_vacuum_moment(&s, &fs[..n], &Word::Field).unwrap(), 0.0);
    }
}

#[test]
fn free_moments_are_catalan() {
    let k = constant(4, 0.0);
    let f = unit(k.grid());
    for p in 0..=4usize {
        let fs = vec![f.clone(); 2 * p];
        let v = wick_field_moment(&k, &fs).unwrap();
        assert!((v - catalan(p) as f64).abs() <= 1e-12, "p={p}");
    }
}

#[test]
fn constant_kernel_crossing_polynomial() {
    for q in [0.3, -0.5, 0.8] {
        let k = constant(3, q);
        let f = unit(k.grid());
        for p in 1..=3usize {
            let fs = vec![f.clone(); 2 * p];
            let expected = crossing_polynomial(2 * p, q).unwrap();
            assert!((wick_field_moment(&k, &fs).unwrap() - expected).abs() <= 1e-12);
        }
        assert!((crossing_polynomial(4, q).unwrap() - (2.0 + q)).abs() <= 1e-15);
    }
}

#[test]
fn traciality() {
    for kernel in [constant(3, 0.6), gaussian(4)] {
        for n in [2, 4, 6] {
            let fs = random_functions(kernel.grid(), n, n as u64);
            let dev = traciality_check(&kernel, &fs).unwrap();
            if n == 2 {
                assert_eq!(dev, 0.0);
            }
            assert!(dev <= 1e-10);
        }
    }
}

#[test]
fn report_carries_both_values() {
    let k = constant(2, 0.25);
    let s = space(k.clone(), 2);
    let fs = vec![unit(k.grid()); 4];
    let r = moment_report(&k, &fs, &Word::Field, Some(&s)).unwrap();
    assert_eq!(r.pairing_count, 3);
    assert!((r.value_wick - 2.25).abs() <= 1e-12);
    assert!(r.deviation().unwrap() <= 1e-9);
    assert_eq!(r.kernel_digest, k.digest());
}

#[test]
fn gaussian_refinement_differences_shrink() {
    let g = Grid::interval_1d(0.0, 1.0, 8).unwrap();
    let fs = vec![
        TestFunction::Gaussian { center: vec![0.4], width: 0.25 },
        TestFunction::Gaussian { center: vec![0.6], width: 0.3 },
        TestFunction::Cosine { frequency: 1.0 },
        TestFunction::Uniform,
    ];
    let rep = convergence_report(&KernelSpec::Gaussian { q0: 0.5, length: 0.2 }, &g, &fs, 2).unwrap();
    assert_eq!(rep.rows.iter().map(|r| r.m).collect::<Vec<_>>(), [8, 16, 32]);
    assert!(rep.strictly_decreasing(), "{:?}", rep.differences());
    let odd = convergence_report(&KernelSpec::Gaussian { q0: 0.5, length: 0.2 }, &g, &fs[..3], 2).unwrap();
    assert!(odd.rows.iter().all(|r| r.moment == 0.0));
}
