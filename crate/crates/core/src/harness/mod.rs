//! Seeded verification suites and their JSON reports.

mod suites;
mod tools;

pub use tools::{compat_summary, forms_summary, frames_summary};

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{abs_q, format_f64, format_rational, Scalar, Q};
use crate::sampling::case_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Invariance,
    Counts,
    Syzygy,
    Lowrel,
    Eikonal,
    Compat,
    Forms,
    Tresse,
    Frames,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Invariance,
        Suite::Counts,
        Suite::Syzygy,
        Suite::Lowrel,
        Suite::Eikonal,
        Suite::Compat,
        Suite::Forms,
        Suite::Tresse,
        Suite::Frames,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Invariance => "invariance",
            Suite::Counts => "counts",
            Suite::Syzygy => "syzygy",
            Suite::Lowrel => "lowrel",
            Suite::Eikonal => "eikonal",
            Suite::Compat => "compat",
            Suite::Forms => "forms",
            Suite::Tresse => "tresse",
            Suite::Frames => "frames",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Suite::Invariance => "catalog invariants are unchanged by prolonged Cayley motions",
            Suite::Counts => "Jacobian ranks of the catalog, on the full jet space and on the eikonal equation",
            Suite::Syzygy => "Leibniz oracle for v_i applied to polar invariants",
            Suite::Lowrel => "low-order relations, Newton-Girard, Cayley-Hamilton",
            Suite::Eikonal => "vanishing of the degenerate invariants on eikonal jets, Christoffel check",
            Suite::Compat => "(D+f)^(n+1)(1) = 0 and spectrum identities",
            Suite::Forms => "Omega recursion, contact certificate, section forms",
            Suite::Tresse => "Tresse derivatives reconstruct the horizontal differential",
            Suite::Frames => "eigenframe power sums and structure-constant invariance",
        }
    }

    /// Numeric suites carry a tolerance.
    pub fn default_tolerance(self) -> Option<f64> {
        match self {
            Suite::Eikonal => Some(1e-4),
            Suite::Frames => Some(1e-9),
            _ => None,
        }
    }

    pub fn default_order(self) -> usize {
        match self {
            Suite::Counts | Suite::Eikonal => 4,
            _ => 3,
        }
    }

    fn order_range(self) -> (usize, usize) {
        match self {
            Suite::Invariance => (0, 6),
            Suite::Counts => (1, 5),
            Suite::Eikonal => (2, 5),
            Suite::Lowrel | Suite::Tresse | Suite::Frames => (3, 5),
            Suite::Syzygy | Suite::Compat | Suite::Forms => (0, usize::MAX),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::bad_config("suite", format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub n: usize,
    pub order: usize,
    pub trials: usize,
    pub seed: u64,
    /// Defaults to the suite's tolerance when `None`.
    pub tolerance: Option<f64>,
    /// Fixed poles for `compat` and `forms`; random when empty.
    pub alphas: Vec<Q>,
    /// Fixed `s` for `syzygy`; cycles through 2 and 3 otherwise.
    pub s: Option<usize>,
}

impl SuiteConfig {
    pub fn new(suite: Suite, n: usize) -> Self {
        SuiteConfig {
            suite,
            n,
            order: suite.default_order(),
            trials: 50,
            seed: 42,
            tolerance: None,
            alphas: Vec::new(),
            s: None,
        }
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = Some(tolerance);
        self
    }

    pub fn with_alphas(mut self, alphas: Vec<Q>) -> Self {
        self.alphas = alphas;
        self
    }

    pub fn with_s(mut self, s: usize) -> Self {
        self.s = Some(s);
        self
    }

    /// Tolerance in effect for numeric records.
    pub fn effective_tolerance(&self) -> Option<f64> {
        self.tolerance.or(self.suite.default_tolerance())
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::bad_config("trials", "must be at least 1"));
        }
        if self.n < 2 {
            return Err(Error::bad_config("n", format!("must be at least 2, got {}", self.n)));
        }
        if let Some(t) = self.tolerance {
            if self.suite.default_tolerance().is_none() {
                return Err(Error::bad_config(
                    "tolerance",
                    format!("{} is an exact suite", self.suite),
                ));
            }
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::bad_config("tolerance", format!("must be positive, got {t}")));
            }
        }
        let (lo, hi) = self.suite.order_range();
        if self.order < lo || self.order > hi {
            return Err(Error::bad_config(
                "order",
                format!("{} needs {lo} <= order <= {hi}, got {}", self.suite, self.order),
            ));
        }
        if let Some(s) = self.s {
            if !(2..=4).contains(&s) {
                return Err(Error::bad_config("s", format!("must be in 2..=4, got {s}")));
            }
        }
        if self.suite == Suite::Forms && self.n > 4 {
            return Err(Error::bad_config("n", format!("forms supports n <= 4, got {}", self.n)));
        }
        if !self.alphas.is_empty() {
            crate::equations::CompatConfig::new(self.n, self.alphas.clone())
                .map_err(|e| Error::bad_config("alphas", e.to_string()))?;
        }
        Ok(())
    }

    /// Config echo; everything that determines the report bytes.
    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.name(),
            "n": self.n,
            "order": self.order,
            "trials": self.trials,
            "seed": self.seed,
            "tolerance": self.effective_tolerance().map(format_f64),
            "alphas": self.alphas.iter().map(format_rational).collect::<Vec<_>>(),
            "s": self.s,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Exact,
    Numeric,
}

#[derive(Clone, Debug, PartialEq)]
enum Residual {
    Exact(Q),
    Numeric(f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub case: usize,
    pub label: String,
    pub kind: Kind,
    pub inputs: Value,
    pub lhs: String,
    pub rhs: String,
    pub residual: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub extra: Value,
    #[serde(skip)]
    residual_value: Residual,
}

impl Record {
    /// Exact comparison `lhs = rhs`.
    pub fn exact(case: usize, label: impl Into<String>, lhs: &Q, rhs: &Q) -> Self {
        let r = abs_q(&(lhs.clone() - rhs.clone()));
        Record::exact_with(case, label, format_rational(lhs), format_rational(rhs), r)
    }

    /// Exact record with a precomputed residual; passes iff it is zero.
    pub fn exact_with(
        case: usize,
        label: impl Into<String>,
        lhs: String,
        rhs: String,
        residual: Q,
    ) -> Self {
        Record {
            case,
            label: label.into(),
            kind: Kind::Exact,
            inputs: Value::Null,
            lhs,
            rhs,
            residual: format_rational(&residual),
            tolerance: None,
            pass: residual.is_zero_value(),
            extra: Value::Null,
            residual_value: Residual::Exact(residual),
        }
    }

    /// Exact yes/no check; residual 0 on pass, 1 otherwise.
    pub fn check(case: usize, label: impl Into<String>, lhs: String, rhs: String, pass: bool) -> Self {
        let r = if pass { Q::zero() } else { Q::one() };
        Record::exact_with(case, label, lhs, rhs, r)
    }

    pub fn count(case: usize, label: impl Into<String>, lhs: usize, rhs: usize) -> Self {
        Record::exact(case, label, &Q::from_int(lhs as i64), &Q::from_int(rhs as i64))
    }

    pub fn numeric(
        case: usize,
        label: impl Into<String>,
        lhs: f64,
        rhs: f64,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        Record {
            case,
            label: label.into(),
            kind: Kind::Numeric,
            inputs: Value::Null,
            lhs: format_f64(lhs),
            rhs: format_f64(rhs),
            residual: format_f64(residual),
            tolerance: Some(format_f64(tolerance)),
            pass: residual.is_finite() && residual < tolerance,
            extra: Value::Null,
            residual_value: Residual::Numeric(residual),
        }
    }

    pub fn with_inputs(mut self, inputs: Value) -> Self {
        self.inputs = inputs;
        self
    }

    pub fn with_extra(mut self, extra: Value) -> Self {
        self.extra = extra;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub config: Value,
    pub cases: usize,
    pub records: Vec<Record>,
    pub max_exact_residual: Option<String>,
    pub max_numeric_residual: Option<String>,
    pub failures: usize,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl Report {
    pub fn new(cfg: &SuiteConfig, records: Vec<Record>) -> Self {
        let mut max_exact: Option<Q> = None;
        let mut max_numeric: Option<f64> = None;
        for r in &records {
            match &r.residual_value {
                Residual::Exact(q) => {
                    if max_exact.as_ref().map_or(true, |m| q > m) {
                        max_exact = Some(q.clone());
                    }
                }
                Residual::Numeric(x) => {
                    let x = if x.is_nan() { f64::INFINITY } else { *x };
                    max_numeric = Some(max_numeric.map_or(x, |m| m.max(x)));
                }
            }
        }
        Report {
            suite: cfg.suite.name().to_string(),
            config: cfg.to_json(),
            cases: cfg.trials,
            failures: records.iter().filter(|r| !r.pass).count(),
            max_exact_residual: max_exact.as_ref().map(format_rational),
            max_numeric_residual: max_numeric.map(format_f64),
            records,
            wall_time: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// Sorted-key JSON value.
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// Canonical text: sorted keys, two-space indent, trailing newline.
    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per failing record.
    pub fn failure_lines(&self) -> Vec<String> {
        self.records
            .iter()
            .filter(|r| !r.pass)
            .map(|r| format!("case {} {}: lhs={} rhs={} residual={}", r.case, r.label, r.lhs, r.rhs, r.residual))
            .collect()
    }
}

/// Runs every case of the suite, in parallel by case index.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let start = Instant::now();
    let shared = suites::Shared::prepare(cfg)?;
    let per_case: Vec<Vec<Record>> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = case_rng(cfg.seed, i as u64);
            suites::run_case(cfg, &shared, i, &mut rng)
        })
        .collect::<Result<_>>()?;
    let mut report = Report::new(cfg, per_case.into_iter().flatten().collect());
    report.wall_time = start.elapsed();
    Ok(report)
}

pub fn emit_report(report: &Report, path: &Path) -> Result<()> {
    std::fs::write(path, report.to_canonical_string())?;
    Ok(())
}
