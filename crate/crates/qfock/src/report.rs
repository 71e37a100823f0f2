//! Suite reports and their JSON and CSV renderings.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `measured ≤ expected + tolerance`.
    Le,
    /// `measured ≥ expected − tolerance`.
    Ge,
    /// `measured > expected`.
    Gt,
    /// `|measured − expected| ≤ tolerance`.
    Eq,
    /// Logged only; always passes.
    Info,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Le => "le",
            Relation::Ge => "ge",
            Relation::Gt => "gt",
            Relation::Eq => "eq",
            Relation::Info => "info",
        }
    }

    pub fn holds(self, measured: f64, expected: f64, tolerance: f64) -> bool {
        match self {
            Relation::Le => measured <= expected + tolerance,
            Relation::Ge => measured >= expected - tolerance,
            Relation::Gt => measured > expected,
            Relation::Eq => (measured - expected).abs() <= tolerance,
            Relation::Info => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub relation: Relation,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub config: String,
    pub seed: u64,
    pub pass: bool,
    pub records: Vec<CheckRecord>,
}

impl SuiteResult {
    pub fn new(suite: &str, config: &str, seed: u64) -> Self {
        Self {
            suite: suite.into(),
            config: config.into(),
            seed,
            pass: true,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, relation: Relation, measured: f64, expected: f64, tolerance: f64) {
        self.push_noted(name, relation, measured, expected, tolerance, "");
    }

    pub fn push_noted(
        &mut self,
        name: impl Into<String>,
        relation: Relation,
        measured: f64,
        expected: f64,
        tolerance: f64,
        note: impl Into<String>,
    ) {
        let pass = relation.holds(measured, expected, tolerance);
        self.pass &= pass;
        self.records.push(CheckRecord {
            name: name.into(),
            relation,
            measured,
            expected,
            tolerance,
            pass,
            note: note.into(),
        });
    }

    pub fn info(&mut self, name: impl Into<String>, value: f64, note: impl Into<String>) {
        self.push_noted(name, Relation::Info, value, 0.0, 0.0, note);
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(["suite", "config", "seed", "name", "relation", "measured", "expected", "tolerance", "pass", "note"])
            .expect("in-memory write");
        for r in &self.records {
            w.write_record([
                self.suite.as_str(),
                self.config.as_str(),
                &self.seed.to_string(),
                &r.name,
                r.relation.as_str(),
                &float17(r.measured),
                &float17(r.expected),
                &float17(r.tolerance),
                if r.pass { "true" } else { "false" },
                &r.note,
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }
}

/// 17 significant digits in scientific notation.
pub fn float17(x: f64) -> String {
    format!("{x:.16e}")
}
