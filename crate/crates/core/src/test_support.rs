use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fock::TruncatedFockSpace;
use crate::kernel::{Grid, GridFunction, QKernel};

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric kernel with entries uniform in `(-0.9, 0.9)`.
pub(crate) fn random_kernel(m: usize, seed: u64) -> QKernel {
    let grid = Grid::interval_1d(0.0, 1.0, m).unwrap();
    let mut r = rng(seed);
    let mut rows = alloc::vec![alloc::vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let v = r.random_range(-0.9..0.9);
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    QKernel::from_matrix(&grid, &rows).unwrap()
}

pub(crate) fn constant_space(m: usize, q: f64, n_max: usize) -> TruncatedFockSpace {
    let grid = Grid::interval_1d(0.0, 1.0, m).unwrap();
    TruncatedFockSpace::new(QKernel::constant(&grid, q).unwrap(), n_max).unwrap()
}

pub(crate) fn random_function(grid: &Grid, seed: u64) -> GridFunction {
    let mut r = rng(seed);
    GridFunction((0..grid.len()).map(|_| r.random_range(-1.0..1.0)).collect::<Vec<_>>())
}
