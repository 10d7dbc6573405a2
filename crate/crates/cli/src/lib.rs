//! Batch verification harness behind the `zetafock` binary: run
//! configuration, suite orchestration and exact-fraction tables.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use zetafock::arith::rational::{parse_fraction, to_fraction_string, Rational};
use zetafock::arith::{bernoulli_number, bernoulli_poly, zeta_negative};
use zetafock::diffop::{abstract_check, bar_central_term};
use zetafock::fields::{
    assemble_consistency_check, commutator_sweep, generating_l_check, generators_corollary_check, iterate_commutator_sweep,
    iterate_identity_check, jacobi_sweep_with, lbar_bracket_check, virasoro_axiom_check,
};
use zetafock::fock::{
    correction, delta_closed_form, delta_eigenvalues, delta_genfun, graded_dimension_check, rep_sweep, TwistSetup, Variant,
};
use zetafock::report::{Report, Status};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Abstract,
    Rep,
    Jacobi,
    Mwa,
    Iterates,
    Genfun,
    Delta,
    Generators,
    Dims,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Abstract,
        Suite::Rep,
        Suite::Jacobi,
        Suite::Mwa,
        Suite::Iterates,
        Suite::Genfun,
        Suite::Delta,
        Suite::Generators,
        Suite::Dims,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Abstract => "abstract",
            Suite::Rep => "rep",
            Suite::Jacobi => "jacobi",
            Suite::Mwa => "mwa",
            Suite::Iterates => "iterates",
            Suite::Genfun => "genfun",
            Suite::Delta => "delta",
            Suite::Generators => "generators",
            Suite::Dims => "dims",
        }
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}; expected one of {}", Suite::ALL.map(Suite::name).join(", ")))
    }
}

/// Usage or configuration error; maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Bounds {
    pub r_max: u32,
    pub s_max: u32,
    pub m_max: i64,
    pub degree_max: String,
    pub window: i64,
    pub y_order: i64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { r_max: 2, s_max: 4, m_max: 2, degree_max: "3".into(), window: 1, y_order: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_setup")]
    pub setup: TwistSetup,
    #[serde(default)]
    pub suites: Vec<Suite>,
    #[serde(default)]
    pub bounds: Bounds,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub parallelism: Option<usize>,
}

fn default_setup() -> TwistSetup {
    TwistSetup::new(1, vec![1]).expect("valid")
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { setup: default_setup(), suites: Vec::new(), bounds: Bounds::default(), output: None, parallelism: None }
    }
}

impl RunConfig {
    /// Parses a JSON config; errors name the offending field and position.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let at = if path == "." { String::new() } else { format!(" at field `{path}`") };
            bad(format!("config error{at}: {inner}"))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn degree_max(&self) -> Result<Rational, ConfigError> {
        parse_fraction(&self.bounds.degree_max).map_err(|e| bad(format!("bounds.degree_max: {e}")))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let b = &self.bounds;
        if b.m_max < 1 {
            return Err(bad("bounds.m_max must be positive"));
        }
        if b.window < 1 {
            return Err(bad("bounds.window must be positive"));
        }
        if b.y_order < 0 {
            return Err(bad("bounds.y_order must be nonnegative"));
        }
        let deg = self.degree_max()?;
        if deg <= Rational::from_integer(0.into()) {
            return Err(bad("bounds.degree_max must be positive"));
        }
        let den = deg.denom();
        if u32::try_from(den).map_or(true, |d| !self.setup.p().is_multiple_of(d)) {
            return Err(bad(format!("bounds.degree_max: denominator {den} does not divide p = {}", self.setup.p())));
        }
        if self.parallelism == Some(0) {
            return Err(bad("parallelism must be positive"));
        }
        Ok(())
    }
}

/// Builds a setup from `--p` and a comma-separated `--dims`.
pub fn parse_setup(p: Option<u32>, dims: Option<&str>) -> Result<Option<TwistSetup>, ConfigError> {
    let dims = match dims {
        None if p.is_some() => return Err(bad("--p requires --dims")),
        None => return Ok(None),
        Some(s) => s
            .split(',')
            .map(|x| x.trim().parse::<u32>().map_err(|_| bad(format!("--dims: {x:?} is not a nonnegative integer"))))
            .collect::<Result<Vec<u32>, _>>()?,
    };
    let p = p.unwrap_or(dims.len() as u32);
    TwistSetup::new(p, dims).map(Some).map_err(|e| bad(e.to_string()))
}

/// Runs one suite at the configured bounds.
pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Result<Report, ConfigError> {
    let s = &cfg.setup;
    let b = &cfg.bounds;
    let deg = cfg.degree_max()?;
    Ok(match suite {
        Suite::Abstract => abstract_check(b.r_max, b.m_max),
        Suite::Rep => rep_sweep(s, b.r_max, b.m_max, &deg),
        Suite::Jacobi => Report::merge([
            jacobi_sweep_with(s, b.window, &deg, true, false),
            commutator_sweep(s, b.window, &deg),
            virasoro_axiom_check(s, b.m_max, &deg),
        ]),
        Suite::Mwa => jacobi_sweep_with(s, b.window, &deg, false, true),
        Suite::Iterates => Report::merge([
            iterate_identity_check(s, 2, (b.r_max, b.r_max), b.m_max, &deg),
            iterate_commutator_sweep(s, b.y_order, b.window, &deg),
        ]),
        Suite::Genfun => Report::merge([
            generating_l_check(s, b.r_max, b.m_max, &deg),
            lbar_bracket_check(s, b.r_max, b.m_max, &deg),
            assemble_consistency_check(s, b.m_max, &deg),
        ]),
        Suite::Delta => delta_genfun(s, 2 * b.s_max),
        Suite::Generators => generators_corollary_check(s, b.r_max, b.m_max, &deg),
        Suite::Dims => graded_dimension_check(s, &deg),
    })
}

/// Runs every requested suite and merges the records in canonical order.
pub fn run(cfg: &RunConfig) -> Result<Report, ConfigError> {
    cfg.validate()?;
    if cfg.suites.is_empty() {
        return Err(bad("no suites requested"));
    }
    let mut suites = cfg.suites.clone();
    suites.sort();
    suites.dedup();
    let mut reports = Vec::new();
    for s in suites {
        reports.push(run_suite(s, cfg)?);
    }
    let mut rep = Report::merge(reports);
    rep.strip_timings();
    Ok(rep)
}

pub fn exit_code(rep: &Report) -> i32 {
    if rep.ok() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Per-suite counts and the first failure, if any.
pub fn summary_text(rep: &Report) -> String {
    use std::collections::BTreeMap;
    let mut by_suite: BTreeMap<&str, [usize; 3]> = BTreeMap::new();
    for r in &rep.records {
        let e = by_suite.entry(&r.suite).or_default();
        match r.status {
            Status::Pass => e[0] += 1,
            Status::Fail => e[1] += 1,
            Status::Skipped => e[2] += 1,
        }
    }
    let mut out = format!("{:<20} {:>8} {:>8} {:>8}\n", "suite", "passed", "failed", "skipped");
    for (s, [p, f, k]) in &by_suite {
        out += &format!("{s:<20} {p:>8} {f:>8} {k:>8}\n");
    }
    let sm = &rep.summary;
    out += &format!("{:<20} {:>8} {:>8} {:>8}\n", "total", sm.passed, sm.failed, sm.skipped);
    if let Some(f) = rep.first_failure() {
        out += &format!("first failure: {}\n", serde_json::to_string(f).expect("serializable"));
    }
    out += if rep.ok() { "result: PASS\n" } else { "result: FAIL\n" };
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    Corrections,
    Central,
    Zeta,
    Delta,
}

/// Column headers and rows of exact fractions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().map(|c| json!(c))).collect()))
            .collect();
        json!(rows)
    }

    pub fn render(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(String::len).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.len());
            }
        }
        let line = |cells: &[String]| {
            let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            parts.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.columns);
        for r in &self.rows {
            out += &line(r);
        }
        out
    }
}

fn frac(q: &Rational) -> String {
    to_fraction_string(q)
}

pub fn table(kind: TableKind, setup: &TwistSetup, bounds: &Bounds) -> Table {
    match kind {
        TableKind::Corrections => {
            let mut t = Table::new(&["r", "L(r)(0)", "Lbar(r)(0)"]);
            for r in 0..=bounds.r_max {
                t.push(vec![
                    r.to_string(),
                    frac(&correction(setup, r, Variant::Plain)),
                    frac(&correction(setup, r, Variant::Bar)),
                ]);
            }
            t
        }
        TableKind::Central => {
            let mut t = Table::new(&["r", "s", "m", "central"]);
            for r in 0..=bounds.r_max {
                for s in 0..=bounds.r_max {
                    for m in 1..=bounds.m_max {
                        t.push(vec![r.to_string(), s.to_string(), m.to_string(), frac(&bar_central_term(r, s, m))]);
                    }
                }
            }
            t
        }
        TableKind::Zeta => {
            let mut t = Table::new(&["r", "argument", "zeta"]);
            for r in 0..=bounds.r_max {
                let m = 1 + 2 * r as usize;
                t.push(vec![r.to_string(), format!("-{m}"), frac(&zeta_negative(m))]);
            }
            t
        }
        TableKind::Delta => {
            let k_max = bounds.s_max.max(1);
            let eig = delta_eigenvalues(setup, k_max);
            let closed = delta_closed_form(setup, 2 * k_max);
            let mut t = Table::new(&["k", "eigenvalue side", "closed form"]);
            for k in 1..=k_max {
                t.push(vec![k.to_string(), frac(&eig[k as usize - 1]), frac(&closed[2 * k as usize])]);
            }
            t
        }
    }
}

/// `B_n`, or the Bernoulli polynomial `B_n(x)` when `x` is given.
pub fn bernoulli(n: usize, x: Option<&str>) -> Result<(String, Value), ConfigError> {
    match x {
        None => {
            let v = frac(&bernoulli_number(n));
            Ok((format!("B_{n} = {v}"), json!({ "n": n, "value": v })))
        }
        Some(xs) => {
            let xq = parse_fraction(xs).map_err(|e| bad(format!("--x: {e}")))?;
            let v = frac(&bernoulli_poly(n, &xq));
            let xs = frac(&xq);
            Ok((format!("B_{n}({xs}) = {v}"), json!({ "n": n, "x": xs, "value": v })))
        }
    }
}
