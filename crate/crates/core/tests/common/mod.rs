#![allow(dead_code)]

use qfock_core::kernel::{Grid, GridFunction, QKernel};
use qfock_core::TruncatedFockSpace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn grid(m: usize) -> Grid {
    Grid::interval_1d(0.0, 1.0, m).unwrap()
}

pub fn random_kernel(m: usize, seed: u64) -> QKernel {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let v = r.random_range(-0.9..0.9);
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    QKernel::from_matrix(&grid(m), &rows).unwrap()
}

pub fn constant(m: usize, q: f64) -> QKernel {
    QKernel::constant(&grid(m), q).unwrap()
}

pub fn gaussian(m: usize) -> QKernel {
    QKernel::gaussian(&grid(m), 0.5, 0.2).unwrap()
}

pub fn space(kernel: QKernel, n_max: usize) -> TruncatedFockSpace {
    TruncatedFockSpace::new(kernel, n_max).unwrap()
}

pub fn random_functions(grid: &Grid, count: usize, seed: u64) -> Vec<GridFunction> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| GridFunction((0..grid.len()).map(|_| r.random_range(-1.0..1.0)).collect()))
        .collect()
}
