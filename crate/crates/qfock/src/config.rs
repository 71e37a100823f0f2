//! Run configuration: JSON parsing with JSON-path error locations, and the
//! built-in presets.

use std::fmt;
use std::path::{Path, PathBuf};

use qfock_core::kernel::{Grid, GridKind, KernelSpec, QKernel};
use serde_json::{Map, Value};

/// A configuration or validation failure, located by JSON path.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error at {}: {}", self.path, self.message)
    }
}

impl std::error::Error for ConfigError {}

type Parsed<T> = Result<T, ConfigError>;

#[derive(Clone, Debug, PartialEq)]
pub enum GridConfig {
    Interval1d { a: f64, b: f64, m: usize },
    Points { j: usize, points: Vec<Vec<f64>>, eps: f64 },
}

/// Contents of a kernel config file: a grid and a kernel on it.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelConfig {
    pub grid: GridConfig,
    pub kernel: KernelSpec,
}

impl KernelConfig {
    pub fn from_value(v: &Value, path: &str) -> Parsed<Self> {
        let obj = object(v, path)?;
        allow_keys(obj, path, &["grid", "kernel"])?;
        Ok(Self {
            grid: parse_grid(required(obj, path, "grid")?, &join(path, "grid"))?,
            kernel: parse_kernel(required(obj, path, "kernel")?, &join(path, "kernel"))?,
        })
    }

    pub fn from_file(file: &Path) -> Parsed<Self> {
        let v = read_json(file)?;
        Self::from_value(&v, "$")
    }

    pub fn grid(&self) -> Parsed<Grid> {
        match &self.grid {
            GridConfig::Interval1d { a, b, m } => Grid::interval_1d(*a, *b, *m),
            GridConfig::Points { j, points, eps } => Grid::from_points(*j, points.clone(), *eps),
        }
        .map_err(|e| ConfigError::new("$.grid", e.to_string()))
    }

    pub fn build(&self) -> Parsed<QKernel> {
        let grid = self.grid()?;
        self.kernel
            .build(&grid)
            .map_err(|e| ConfigError::new("$.kernel", e.to_string()))
    }

    pub fn is_interval(&self) -> bool {
        matches!(self.grid, GridConfig::Interval1d { .. })
    }
}

/// How the test functions `f_1, ..., f_n` are chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctionSpec {
    /// The normalized constant function, repeated.
    Uniform,
    /// `k` disjoint normalized bumps, used cyclically.
    Bumps(usize),
    /// Seeded random coefficients in `[-1, 1]`, each normalized.
    Random,
}

impl FunctionSpec {
    pub fn parse(s: &str, path: &str) -> Parsed<Self> {
        match s {
            "uniform" => Ok(FunctionSpec::Uniform),
            "random" => Ok(FunctionSpec::Random),
            _ => s
                .strip_prefix("bump_")
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k >= 1)
                .map(FunctionSpec::Bumps)
                .ok_or_else(|| {
                    ConfigError::new(path, format!("unknown functions '{s}' (expected uniform, bump_<k> or random)"))
                }),
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Uniform => f.write_str("uniform"),
            FunctionSpec::Bumps(k) => write!(f, "bump_{k}"),
            FunctionSpec::Random => f.write_str("random"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub exact: f64,
    pub solve: f64,
    pub norm: f64,
    pub vacuum: f64,
    pub gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            exact: qfock_core::TOL_EXACT,
            solve: qfock_core::TOL_SOLVE,
            norm: qfock_core::TOL_NORM,
            vacuum: qfock_core::spectral::VACUUM_TOL,
            gap: qfock_core::spectral::GAP_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Preset name or config file name, echoed in reports.
    pub label: String,
    pub kernel: KernelConfig,
    pub n_max: usize,
    pub d: Option<usize>,
    pub n: usize,
    pub refinements: usize,
    pub functions: FunctionSpec,
    pub seed: u64,
    pub tolerances: Tolerances,
}

const RUN_KEYS: &[&str] = &[
    "kernel_config",
    "grid",
    "kernel",
    "n_max",
    "d",
    "n",
    "refinements",
    "functions",
    "seed",
    "tolerances",
];

impl RunConfig {
    /// Parses a run config; `base` resolves a relative `kernel_config` path.
    pub fn from_value(v: &Value, base: Option<&Path>, label: &str) -> Parsed<Self> {
        let obj = object(v, "$")?;
        allow_keys(obj, "$", RUN_KEYS)?;
        let kernel = match obj.get("kernel_config") {
            Some(p) => {
                if obj.contains_key("grid") || obj.contains_key("kernel") {
                    return Err(ConfigError::new("$", "give either kernel_config or grid + kernel, not both"));
                }
                let rel = string(p, "$.kernel_config")?;
                let file: PathBuf = match base {
                    Some(dir) => dir.join(rel),
                    None => PathBuf::from(rel),
                };
                KernelConfig::from_file(&file)
                    .map_err(|e| ConfigError::new(format!("{} ({})", e.path, file.display()), e.message))?
            }
            None => {
                let mut inline = Map::new();
                for key in ["grid", "kernel"] {
                    inline.insert(key.into(), required(obj, "$", key)?.clone());
                }
                KernelConfig::from_value(&Value::Object(inline), "$")?
            }
        };
        let tolerances = match obj.get("tolerances") {
            Some(t) => parse_tolerances(t, "$.tolerances")?,
            None => Tolerances::default(),
        };
        let n_max = optional_usize(obj, "$", "n_max")?.unwrap_or(3);
        if n_max == 0 {
            return Err(ConfigError::new("$.n_max", "must be >= 1"));
        }
        Ok(Self {
            label: label.into(),
            kernel,
            n_max,
            d: optional_usize(obj, "$", "d")?,
            n: optional_usize(obj, "$", "n")?.unwrap_or(4),
            refinements: optional_usize(obj, "$", "refinements")?.unwrap_or(2),
            functions: match obj.get("functions") {
                Some(f) => FunctionSpec::parse(string(f, "$.functions")?, "$.functions")?,
                None => FunctionSpec::Uniform,
            },
            seed: match obj.get("seed") {
                Some(s) => s
                    .as_u64()
                    .ok_or_else(|| ConfigError::new("$.seed", "expected a nonnegative integer"))?,
                None => 0,
            },
            tolerances,
        })
    }

    pub fn from_file(file: &Path) -> Parsed<Self> {
        let v = read_json(file)?;
        let label = file
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::from_value(&v, file.parent(), &label)
    }

    pub fn preset(name: &str) -> Parsed<Self> {
        let text = match name {
            "free-small" => FREE_SMALL,
            "krolak-binding" => KROLAK_BINDING,
            other => {
                return Err(ConfigError::new(
                    "--preset",
                    format!("unknown preset '{other}' (expected free-small or krolak-binding)"),
                ))
            }
        };
        let v: Value = serde_json::from_str(text).expect("built-in preset is valid JSON");
        Self::from_value(&v, None, name)
    }

    /// `d`, required by the spectrum suite.
    pub fn require_d(&self) -> Parsed<usize> {
        let d = self.d.ok_or_else(|| ConfigError::new("$.d", "required by this suite"))?;
        let m = self.kernel.grid()?.len();
        if d == 0 || d > m {
            return Err(ConfigError::new("$.d", format!("need 1 <= d <= m = {m}, got {d}")));
        }
        Ok(d)
    }

    /// The interval `(a, b)` of a 1-d grid, required by the convergence suite.
    pub fn require_interval(&self) -> Parsed<(f64, f64)> {
        let grid = self.kernel.grid()?;
        match grid.kind() {
            GridKind::Interval1d { a, b } => Ok((*a, *b)),
            GridKind::Points => Err(ConfigError::new("$.grid", "convergence study needs an interval1d grid")),
        }
    }
}

/// Zero kernel on two points: every check is exactly computable.
pub const FREE_SMALL: &str = r#"{
  "grid": {"type": "interval1d", "a": 0.0, "b": 1.0, "m": 2},
  "kernel": {"type": "constant", "q": 0.0},
  "n_max": 3,
  "d": 1,
  "n": 4,
  "refinements": 2,
  "functions": "uniform",
  "seed": 0
}"#;

/// `q = 0`, `d = m = 50`, `n_max = 3`: the regime in which the gap lower
/// bound is positive.
pub const KROLAK_BINDING: &str = r#"{
  "grid": {"type": "interval1d", "a": 0.0, "b": 1.0, "m": 50},
  "kernel": {"type": "constant", "q": 0.0},
  "n_max": 3,
  "d": 50,
  "n": 4,
  "refinements": 2,
  "functions": "uniform",
  "seed": 0
}"#;

fn read_json(file: &Path) -> Parsed<Value> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| ConfigError::new("$", format!("cannot read {}: {e}", file.display())))?;
    serde_json::from_str(&text).map_err(|e| ConfigError::new("$", format!("invalid JSON in {}: {e}", file.display())))
}

fn join(path: &str, key: &str) -> String {
    format!("{path}.{key}")
}

fn object<'a>(v: &'a Value, path: &str) -> Parsed<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| ConfigError::new(path, "expected an object"))
}

fn allow_keys(obj: &Map<String, Value>, path: &str, allowed: &[&str]) -> Parsed<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(ConfigError::new(join(path, k), "unknown key")),
        None => Ok(()),
    }
}

fn required<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Parsed<&'a Value> {
    obj.get(key).ok_or_else(|| ConfigError::new(join(path, key), "missing"))
}

fn number(v: &Value, path: &str) -> Parsed<f64> {
    v.as_f64().ok_or_else(|| ConfigError::new(path, "expected a number"))
}

fn string<'a>(v: &'a Value, path: &str) -> Parsed<&'a str> {
    v.as_str().ok_or_else(|| ConfigError::new(path, "expected a string"))
}

fn count(v: &Value, path: &str) -> Parsed<usize> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| ConfigError::new(path, "expected a nonnegative integer"))
}

fn optional_usize(obj: &Map<String, Value>, path: &str, key: &str) -> Parsed<Option<usize>> {
    obj.get(key).map(|v| count(v, &join(path, key))).transpose()
}

fn number_at(obj: &Map<String, Value>, path: &str, key: &str) -> Parsed<f64> {
    number(required(obj, path, key)?, &join(path, key))
}

fn matrix(v: &Value, path: &str) -> Parsed<Vec<Vec<f64>>> {
    v.as_array()
        .ok_or_else(|| ConfigError::new(path, "expected an array of rows"))?
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let rp = format!("{path}[{i}]");
            row.as_array()
                .ok_or_else(|| ConfigError::new(&rp, "expected an array"))?
                .iter()
                .enumerate()
                .map(|(j, x)| number(x, &format!("{rp}[{j}]")))
                .collect()
        })
        .collect()
}

fn parse_grid(v: &Value, path: &str) -> Parsed<GridConfig> {
    let obj = object(v, path)?;
    match string(required(obj, path, "type")?, &join(path, "type"))? {
        "interval1d" => {
            allow_keys(obj, path, &["type", "a", "b", "m"])?;
            let m = count(required(obj, path, "m")?, &join(path, "m"))?;
            if m == 0 {
                return Err(ConfigError::new(join(path, "m"), "must be >= 1"));
            }
            Ok(GridConfig::Interval1d {
                a: number_at(obj, path, "a")?,
                b: number_at(obj, path, "b")?,
                m,
            })
        }
        "points" => {
            allow_keys(obj, path, &["type", "j", "points", "eps"])?;
            Ok(GridConfig::Points {
                j: count(required(obj, path, "j")?, &join(path, "j"))?,
                points: matrix(required(obj, path, "points")?, &join(path, "points"))?,
                eps: number_at(obj, path, "eps")?,
            })
        }
        other => Err(ConfigError::new(join(path, "type"), format!("unknown grid type '{other}'"))),
    }
}

fn parse_kernel(v: &Value, path: &str) -> Parsed<KernelSpec> {
    let obj = object(v, path)?;
    match string(required(obj, path, "type")?, &join(path, "type"))? {
        "constant" => {
            allow_keys(obj, path, &["type", "q"])?;
            Ok(KernelSpec::Constant {
                q: number_at(obj, path, "q")?,
            })
        }
        "gaussian" => {
            allow_keys(obj, path, &["type", "q0", "length"])?;
            Ok(KernelSpec::Gaussian {
                q0: number_at(obj, path, "q0")?,
                length: number_at(obj, path, "length")?,
            })
        }
        "matrix" => {
            allow_keys(obj, path, &["type", "values"])?;
            Ok(KernelSpec::Matrix {
                values: matrix(required(obj, path, "values")?, &join(path, "values"))?,
            })
        }
        other => Err(ConfigError::new(join(path, "type"), format!("unknown kernel type '{other}'"))),
    }
}

fn parse_tolerances(v: &Value, path: &str) -> Parsed<Tolerances> {
    let obj = object(v, path)?;
    allow_keys(obj, path, &["exact", "solve", "norm", "vacuum", "gap"])?;
    let mut t = Tolerances::default();
    for (key, slot) in [
        ("exact", &mut t.exact),
        ("solve", &mut t.solve),
        ("norm", &mut t.norm),
        ("vacuum", &mut t.vacuum),
        ("gap", &mut t.gap),
    ] {
        if let Some(x) = obj.get(key) {
            let p = join(path, key);
            let val = number(x, &p)?;
            if !(val >= 0.0) {
                return Err(ConfigError::new(p, "must be nonnegative"));
            }
            *slot = val;
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn presets_parse() {
        let free = RunConfig::preset("free-small").unwrap();
        assert_eq!(free.n_max, 3);
        assert_eq!(free.kernel.build().unwrap().sup_q(), 0.0);
        let k = RunConfig::preset("krolak-binding").unwrap();
        assert_eq!(k.d, Some(50));
        assert!(RunConfig::preset("nope").is_err());
    }

    #[test]
    fn errors_carry_json_paths() {
        let v = json!({"grid": {"type": "interval1d", "a": 0.0, "b": 1.0, "m": 2}, "kernel": {"type": "constant", "q": "x"}});
        assert_eq!(RunConfig::from_value(&v, None, "t").unwrap_err().path, "$.kernel.q");
        let v = json!({"grid": {"type": "interval1d", "a": 0.0, "b": 1.0, "m": 2}, "kernel": {"type": "matrix", "values": [[0.1, 0.2], [0.2, true]]}});
        assert_eq!(RunConfig::from_value(&v, None, "t").unwrap_err().path, "$.kernel.values[1][1]");
        let v = json!({"grid": {"type": "interval1d", "a": 0.0, "b": 1.0, "m": 2}, "kernel": {"type": "constant", "q": 0.1}, "typo": 1});
        assert_eq!(RunConfig::from_value(&v, None, "t").unwrap_err().path, "$.typo");
    }

    #[test]
    fn sup_norm_violation_reported_on_build() {
        let v = json!({"grid": {"type": "interval1d", "a": 0.0, "b": 1.0, "m": 2}, "kernel": {"type": "matrix", "values": [[0.1, 1.0], [1.0, 0.1]]}});
        let cfg = RunConfig::from_value(&v, None, "t").unwrap();
        let err = cfg.kernel.build().unwrap_err();
        assert!(err.message.contains("sup-norm violation"));
    }

    #[test]
    fn function_specs() {
        assert_eq!(FunctionSpec::parse("bump_3", "$").unwrap(), FunctionSpec::Bumps(3));
        assert!(FunctionSpec::parse("bump_0", "$").is_err());
        assert!(FunctionSpec::parse("wave", "$").is_err());
        assert_eq!(FunctionSpec::Bumps(2).to_string(), "bump_2");
    }
}
