//! Grids `U_ε`, grid functions, and the sampled coupling kernel `Q`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// How a grid was produced; only interval grids can be refined.
#[derive(Clone, Debug, PartialEq)]
pub enum GridKind {
    /// Cell midpoints of `(a, b)` split into `m` equal cells.
    Interval1d { a: f64, b: f64 },
    /// An explicit list of points.
    Points,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    kind: GridKind,
    dimension: usize,
    points: Vec<Vec<f64>>,
    spacing: f64,
    weight: f64,
}

impl Grid {
    /// `m` cell midpoints `a + (k - 1/2) ε` of `(a, b)` with `ε = (b - a) / m`.
    pub fn interval_1d(a: f64, b: f64, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config("grid needs m >= 1 points".into()));
        }
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Config(format!("interval ({a}, {b}) is empty")));
        }
        let eps = (b - a) / m as f64;
        let points = (0..m)
            .map(|k| alloc::vec![a + (k as f64 + 0.5) * eps])
            .collect();
        Ok(Self {
            kind: GridKind::Interval1d { a, b },
            dimension: 1,
            points,
            spacing: eps,
            weight: eps,
        })
    }

    /// An explicit point set in `R^j` with spacing `ε` (weight `ε^j`).
    pub fn from_points(dimension: usize, points: Vec<Vec<f64>>, spacing: f64) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Config("grid dimension must be >= 1".into()));
        }
        if points.is_empty() {
            return Err(Error::Config("grid needs at least one point".into()));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::Config(format!("grid spacing {spacing} must be positive")));
        }
        for (k, p) in points.iter().enumerate() {
            if p.len() != dimension {
                return Err(Error::Config(format!(
                    "point {k} has {} coordinates, expected {dimension}",
                    p.len()
                )));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::Config(format!("point {k} has a non-finite coordinate")));
            }
        }
        for i in 0..points.len() {
            for k in i + 1..points.len() {
                if points[i] == points[k] {
                    return Err(Error::Config(format!("points {i} and {k} coincide")));
                }
            }
        }
        let weight = math::pow(spacing, dimension as f64);
        Ok(Self {
            kind: GridKind::Points,
            dimension,
            points,
            spacing,
            weight,
        })
    }

    pub fn kind(&self) -> &GridKind {
        &self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.points[k]
    }

    /// `ε`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Quadrature weight `ε^j` attached to every point.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// `ε^{j/2}`, the scale carried by smeared ladder operators.
    pub fn smearing_scale(&self) -> f64 {
        math::sqrt(self.weight)
    }

    /// Halves the spacing of an interval grid.
    pub fn refine(&self) -> Result<Grid> {
        match self.kind {
            GridKind::Interval1d { a, b } => Grid::interval_1d(a, b, 2 * self.len()),
            GridKind::Points => Err(Error::Config(
                "only interval grids can be refined".into(),
            )),
        }
    }

    fn squared_distance(&self, x: usize, y: usize) -> f64 {
        self.points[x]
            .iter()
            .zip(&self.points[y])
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

/// Real function values sampled at the grid points.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction(pub Vec<f64>);

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(m: usize) -> Self {
        Self(alloc::vec![0.0; m])
    }

    /// `ε^{-j/2}` at point `x`, zero elsewhere: the grid function whose
    /// smeared coefficient vector is the basis vector `e_x`.
    pub fn basis(grid: &Grid, x: usize) -> Self {
        let mut v = alloc::vec![0.0; grid.len()];
        v[x] = 1.0 / grid.smearing_scale();
        Self(v)
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        Self(grid.points().iter().map(|p| f(p)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Discrete `L²` inner product `ε^j Σ f(x) g(x)`.
    pub fn inner(&self, other: &GridFunction, grid: &Grid) -> f64 {
        grid.weight() * self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn l2_norm(&self, grid: &Grid) -> f64 {
        math::sqrt(self.inner(self, grid))
    }

    /// Rescaled to unit discrete `L²` norm; the zero function is returned as is.
    pub fn normalized(&self, grid: &Grid) -> GridFunction {
        let norm = self.l2_norm(grid);
        if norm == 0.0 {
            return self.clone();
        }
        GridFunction(self.0.iter().map(|v| v / norm).collect())
    }

    /// Coefficients `ε^{j/2} f(x)` in the orthonormal basis `{e_x}`.
    pub fn coefficients(&self, grid: &Grid) -> Vec<f64> {
        let s = grid.smearing_scale();
        self.0.iter().map(|v| s * v).collect()
    }

    pub(crate) fn check_len(&self, m: usize) -> Result<()> {
        if self.0.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: self.0.len(),
            });
        }
        Ok(())
    }
}

/// Closed-form description of a kernel family, resampled on any grid.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelSpec {
    Constant { q: f64 },
    Gaussian { q0: f64, length: f64 },
    Matrix { values: Vec<Vec<f64>> },
}

impl KernelSpec {
    pub fn build(&self, grid: &Grid) -> Result<QKernel> {
        match self {
            KernelSpec::Constant { q } => QKernel::constant(grid, *q),
            KernelSpec::Gaussian { q0, length } => QKernel::gaussian(grid, *q0, *length),
            KernelSpec::Matrix { values } => QKernel::from_matrix(grid, values),
        }
    }
}

/// A symmetric coupling `Q(x, y)` sampled on a grid, with `sup |Q| < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct QKernel {
    grid: Grid,
    values: Vec<f64>,
    sup_q: f64,
}

fn check_strength(q: f64, location: &str) -> Result<()> {
    if !(q.abs() < 1.0) {
        return Err(Error::SupNorm {
            value: q.abs(),
            location: location.into(),
        });
    }
    Ok(())
}

impl QKernel {
    pub fn constant(grid: &Grid, q: f64) -> Result<Self> {
        check_strength(q, "q")?;
        let m = grid.len();
        Ok(Self {
            grid: grid.clone(),
            values: alloc::vec![q; m * m],
            sup_q: q.abs(),
        })
    }

    /// `q0 · exp(-|x - y|² / length²)`.
    pub fn gaussian(grid: &Grid, q0: f64, length: f64) -> Result<Self> {
        check_strength(q0, "q0")?;
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Config(format!("gaussian length {length} must be positive")));
        }
        let m = grid.len();
        let mut values = alloc::vec![0.0; m * m];
        for x in 0..m {
            for y in x..m {
                let v = q0 * math::exp(-grid.squared_distance(x, y) / (length * length));
                values[x * m + y] = v;
                values[y * m + x] = v;
            }
        }
        Ok(Self {
            grid: grid.clone(),
            values,
            sup_q: q0.abs(),
        })
    }

    /// Validates a user-supplied `m × m` matrix: exact symmetry and all
    /// entries strictly inside `(-1, 1)`.
    pub fn from_matrix(grid: &Grid, rows: &[Vec<f64>]) -> Result<Self> {
        let m = grid.len();
        if rows.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: rows.len(),
            });
        }
        let mut values = Vec::with_capacity(m * m);
        for row in rows {
            if row.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    actual: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        let mut sup_q: f64 = 0.0;
        for x in 0..m {
            for y in 0..m {
                let v = values[x * m + y];
                check_strength(v, &format!("[{x}][{y}]"))?;
                if v != values[y * m + x] {
                    return Err(Error::Symmetry {
                        row: x,
                        col: y,
                        upper: v,
                        lower: values[y * m + x],
                    });
                }
                sup_q = sup_q.max(v.abs());
            }
        }
        Ok(Self {
            grid: grid.clone(),
            values,
            sup_q,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Number of grid points `m`.
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// `Q(x, y)` for grid indices `x`, `y`.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[x * self.grid.len() + y]
    }

    /// `q = sup |Q|`.
    pub fn sup_q(&self) -> f64 {
        self.sup_q
    }

    /// The constant `C = 1 / (1 - q)` used in the operator estimates.
    pub fn c_constant(&self) -> f64 {
        1.0 / (1.0 - self.sup_q)
    }

    /// Row-major copy of the sampled values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Checks both type invariants; always true for a constructed kernel.
    pub fn check_invariants(&self) -> bool {
        let m = self.grid.len();
        (0..m).all(|x| {
            (0..m).all(|y| {
                let v = self.get(x, y);
                v == self.get(y, x) && v.abs() <= self.sup_q && v.abs() < 1.0
            })
        })
    }

    /// FNV-1a digest of the sampled values, for reports.
    pub fn digest(&self) -> u64 {
        fnv1a(self.values.iter().map(|v| v.to_bits()))
    }
}

impl Grid {
    /// FNV-1a digest of the point coordinates and weight, for reports.
    pub fn digest(&self) -> u64 {
        fnv1a(
            self.points
                .iter()
                .flat_map(|p| p.iter().map(|c| c.to_bits()))
                .chain(core::iter::once(self.weight.to_bits())),
        )
    }
}

fn fnv1a(words: impl Iterator<Item = u64>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for w in words {
        for b in w.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn interval_grids() {
        let g = Grid::interval_1d(0.0, 1.0, 1).unwrap();
        assert_eq!(g.points(), &[vec![0.5]]);
        assert_eq!(g.spacing(), 1.0);
        let g = Grid::interval_1d(0.0, 1.0, 4).unwrap();
        let xs: Vec<f64> = g.points().iter().map(|p| p[0]).collect();
        assert_eq!(xs, vec![0.125, 0.375, 0.625, 0.875]);
        assert_eq!(g.spacing(), 0.25);
        assert_eq!(Grid::interval_1d(0.0, 2.0, 4).unwrap().spacing(), 0.5);
        assert!(Grid::interval_1d(0.0, 1.0, 0).is_err());
        assert!(Grid::interval_1d(1.0, 0.0, 3).is_err());
    }

    #[test]
    fn refinement() {
        let g = Grid::interval_1d(0.0, 1.0, 2).unwrap();
        let r = g.refine().unwrap();
        assert_eq!(r.len(), 4);
        assert_eq!(r.spacing(), 0.25);
        assert_eq!(r.weight(), g.weight() / 2.0);
        assert_eq!(r.refine().unwrap().len(), 8);
        let pts = Grid::from_points(2, vec![vec![0.0, 0.0], vec![0.1, 0.0]], 0.1).unwrap();
        assert!(matches!(pts.refine(), Err(Error::Config(_))));
        assert!((pts.weight() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn point_grids_validate() {
        assert!(Grid::from_points(2, vec![vec![0.0, 0.0], vec![0.0, 0.0]], 0.1).is_err());
        assert!(Grid::from_points(2, vec![vec![0.0]], 0.1).is_err());
        assert!(Grid::from_points(1, vec![vec![0.0]], 0.0).is_err());
    }

    #[test]
    fn constant_kernels() {
        let g = Grid::interval_1d(0.0, 1.0, 2).unwrap();
        let k = QKernel::constant(&g, 0.0).unwrap();
        assert!(k.values().iter().all(|&v| v == 0.0));
        let k = QKernel::constant(&g, 0.5).unwrap();
        assert_eq!(k.values(), &[0.5; 4]);
        assert_eq!(k.sup_q(), 0.5);
        assert!(matches!(
            QKernel::constant(&g, 1.0),
            Err(Error::SupNorm { .. })
        ));
        assert!(QKernel::constant(&g, -1.0).is_err());
    }

    #[test]
    fn gaussian_kernels() {
        let g = Grid::from_points(1, vec![vec![0.0], vec![0.2]], 0.2).unwrap();
        let k = QKernel::gaussian(&g, 0.5, 0.2).unwrap();
        assert_eq!(k.get(0, 0), 0.5);
        assert!((k.get(0, 1) - 0.5 * libm::exp(-1.0)).abs() < 1e-15);
        assert_eq!(k.get(0, 1), k.get(1, 0));
        assert!(k.check_invariants());
        let z = QKernel::gaussian(&g, 0.0, 0.3).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
        assert!(QKernel::gaussian(&g, 0.5, 0.0).is_err());
    }

    #[test]
    fn gaussian_resampling_matches_closed_form() {
        let mut g = Grid::interval_1d(0.0, 1.0, 3).unwrap();
        for _ in 0..3 {
            let k = QKernel::gaussian(&g, -0.4, 0.3).unwrap();
            for x in 0..g.len() {
                for y in 0..g.len() {
                    let d = g.point(x)[0] - g.point(y)[0];
                    let want = -0.4 * libm::exp(-d * d / 0.09);
                    assert!((k.get(x, y) - want).abs() < 1e-16);
                }
            }
            g = g.refine().unwrap();
        }
    }

    #[test]
    fn matrix_kernels() {
        let g = Grid::interval_1d(0.0, 1.0, 2).unwrap();
        let k = QKernel::from_matrix(&g, &[vec![0.9, 0.0], vec![0.0, 0.9]]).unwrap();
        assert_eq!(k.sup_q(), 0.9);
        assert!(matches!(
            QKernel::from_matrix(&g, &[vec![0.1, 1.0], vec![1.0, 0.1]]),
            Err(Error::SupNorm { .. })
        ));
        assert!(matches!(
            QKernel::from_matrix(&g, &[vec![0.1, 0.2], vec![0.3, 0.1]]),
            Err(Error::Symmetry { .. })
        ));
        assert!(QKernel::from_matrix(&g, &[vec![0.1, 0.2]]).is_err());
    }

    #[test]
    fn grid_functions() {
        let g = Grid::interval_1d(0.0, 1.0, 4).unwrap();
        let f = GridFunction::new(vec![1.0, 1.0, 1.0, 1.0]);
        assert!((f.l2_norm(&g) - 1.0).abs() < 1e-15);
        let b = GridFunction::basis(&g, 2);
        assert_eq!(b.coefficients(&g), vec![0.0, 0.0, 1.0, 0.0]);
        let h = GridFunction::new(vec![3.0, 0.0, 4.0, 0.0]).normalized(&g);
        assert!((h.l2_norm(&g) - 1.0).abs() < 1e-15);
    }
}
