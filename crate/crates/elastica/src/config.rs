//! Run configuration: a TOML file of dotted keys plus `key=value` overrides.
//!
//! Tables and dotted keys are equivalent (`[solver] m = 12` and
//! `solver.m = 12`). Every key must be one of [`KEYS`]; anything else is an
//! error so that a misspelling never silently falls back to a default.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde_json::json;
use toml::Value;

use crate::error::{HarnessError, Result};
use elastica_core::cap1d::MIN_RADIAL_CELLS;

/// Recognized keys, in echo order.
pub const KEYS: &[&str] = &[
    "domain.edges",
    "domain.alpha",
    "mesh.cells",
    "mesh.lumped_mass",
    "solver.m",
    "solver.tol",
    "solver.seed",
    "solver.max_iterations",
    "verify.k_max",
    "verify.policy",
    "verify.tol",
    "cap.theta0",
    "cap.mode_max",
    "cap.radial_cells",
    "input.spectrum",
    "input.matrix_k",
    "input.matrix_m",
    "output.path",
    "output.format",
    "output.matrix_market",
    "report.inputs",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Solve,
    Bounds,
    Verify,
    Cap,
    Report,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Solve => "solve",
            Self::Bounds => "bounds",
            Self::Verify => "verify",
            Self::Cap => "cap",
            Self::Report => "report",
        }
    }
}

/// How eigenvalue uncertainty is budgeted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// Raw values, relative slack `verify.tol`.
    Fixed,
    /// Solve at `N` and `2N`, extrapolate, and budget each value by
    /// `max(verify.tol · σ, |σ_2N − σ_N|)`.
    Richardson,
}

impl Policy {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Fixed => "fixed",
            Self::Richardson => "richardson",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutputFormat {
    Csv,
    Json,
    Table,
    Svg,
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
            Self::Table => "table",
            Self::Svg => "svg",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Self::Csv, Self::Json, Self::Table, Self::Svg].into_iter().find(|f| f.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    /// Box edge lengths; `None` means "not given" (solves default to `(0,π)²`).
    pub edges: Option<Vec<f64>>,
    /// One case per value.
    pub alphas: Vec<f64>,
    /// Cells per direction (the coarse level under the Richardson policy).
    pub cells: Vec<usize>,
    pub lumped_mass: bool,
    pub m: usize,
    pub tol: f64,
    pub seed: u64,
    pub max_iterations: usize,
    pub k_max: usize,
    pub policy: Policy,
    pub verify_tol: f64,
    /// One cap case per value.
    pub theta0: Vec<f64>,
    pub mode_max: usize,
    pub radial_cells: usize,
    pub spectrum: Option<PathBuf>,
    pub matrix_k: Option<PathBuf>,
    pub matrix_m: Option<PathBuf>,
    /// Output directory; without one, tables go to stdout only.
    pub output: Option<PathBuf>,
    pub formats: Vec<OutputFormat>,
    pub matrix_market: bool,
    pub report_inputs: Vec<PathBuf>,
}

impl RunConfig {
    pub fn defaults(mode: Mode) -> Self {
        Self {
            mode,
            edges: None,
            alphas: vec![0.0],
            cells: vec![32, 32],
            lumped_mass: false,
            m: 16,
            tol: 1e-8,
            seed: 0,
            max_iterations: 500,
            k_max: 15,
            policy: Policy::Richardson,
            verify_tol: 1e-9,
            theta0: vec![PI / 2.0],
            mode_max: 8,
            radial_cells: 256,
            spectrum: None,
            matrix_k: None,
            matrix_m: None,
            output: None,
            formats: vec![OutputFormat::Csv, OutputFormat::Json, OutputFormat::Table],
            matrix_market: false,
            report_inputs: Vec::new(),
        }
    }

    /// Reads `path` (if any), applies `overrides` of the form `key=value`
    /// in order, and validates the result.
    pub fn load(mode: Mode, path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| HarnessError::io(p, e))?,
            None => String::new(),
        };
        Self::parse(mode, &text, overrides)
    }

    pub fn parse(mode: Mode, text: &str, overrides: &[String]) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))?;
        let mut flat = BTreeMap::new();
        flatten("", table, &mut flat);
        for o in overrides {
            let (key, value) = parse_override(o)?;
            flat.insert(key, value);
        }
        Self::from_flat(mode, flat)
    }

    fn from_flat(mode: Mode, mut flat: BTreeMap<String, Value>) -> Result<Self> {
        if let Some(key) = flat.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(HarnessError::Config(format!("unknown key `{key}`")));
        }
        let mut c = Self::defaults(mode);
        let mut take = |key: &str| flat.remove(key);

        if let Some(v) = take("domain.edges") {
            c.edges = Some(reals("domain.edges", &v)?);
        }
        if let Some(v) = take("domain.alpha") {
            c.alphas = reals("domain.alpha", &v)?;
        }
        let cells = take("mesh.cells");
        if let Some(v) = take("mesh.lumped_mass") {
            c.lumped_mass = boolean("mesh.lumped_mass", &v)?;
        }
        if let Some(v) = take("solver.m") {
            c.m = integer("solver.m", &v)?;
        }
        if let Some(v) = take("solver.tol") {
            c.tol = real("solver.tol", &v)?;
        }
        if let Some(v) = take("solver.seed") {
            c.seed = integer("solver.seed", &v)? as u64;
        }
        if let Some(v) = take("solver.max_iterations") {
            c.max_iterations = integer("solver.max_iterations", &v)?;
        }
        if let Some(v) = take("verify.k_max") {
            c.k_max = integer("verify.k_max", &v)?;
        }
        if let Some(v) = take("verify.policy") {
            c.policy = match string("verify.policy", &v)?.as_str() {
                "fixed" => Policy::Fixed,
                "richardson" => Policy::Richardson,
                other => return Err(range("verify.policy", format!("expected `fixed` or `richardson`, got `{other}`"))),
            };
        }
        if let Some(v) = take("verify.tol") {
            c.verify_tol = real("verify.tol", &v)?;
        }
        if let Some(v) = take("cap.theta0") {
            c.theta0 = reals("cap.theta0", &v)?;
        }
        if let Some(v) = take("cap.mode_max") {
            c.mode_max = integer("cap.mode_max", &v)?;
        }
        if let Some(v) = take("cap.radial_cells") {
            c.radial_cells = integer("cap.radial_cells", &v)?;
        }
        if let Some(v) = take("input.spectrum") {
            c.spectrum = Some(string("input.spectrum", &v)?.into());
        }
        if let Some(v) = take("input.matrix_k") {
            c.matrix_k = Some(string("input.matrix_k", &v)?.into());
        }
        if let Some(v) = take("input.matrix_m") {
            c.matrix_m = Some(string("input.matrix_m", &v)?.into());
        }
        if let Some(v) = take("output.path") {
            c.output = Some(string("output.path", &v)?.into());
        }
        if let Some(v) = take("output.format") {
            let names = match &v {
                Value::Array(items) => items.iter().map(|i| string("output.format", i)).collect::<Result<Vec<_>>>()?,
                other => vec![string("output.format", other)?],
            };
            let mut formats = Vec::new();
            for n in names {
                let f = OutputFormat::parse(&n)
                    .ok_or_else(|| range("output.format", format!("unknown format `{n}` (csv, json, table, svg)")))?;
                if !formats.contains(&f) {
                    formats.push(f);
                }
            }
            formats.sort();
            c.formats = formats;
        }
        if let Some(v) = take("output.matrix_market") {
            c.matrix_market = boolean("output.matrix_market", &v)?;
        }
        if let Some(v) = take("report.inputs") {
            c.report_inputs = match &v {
                Value::Array(items) => items
                    .iter()
                    .map(|i| string("report.inputs", i).map(PathBuf::from))
                    .collect::<Result<Vec<_>>>()?,
                other => vec![string("report.inputs", other)?.into()],
            };
        }

        let dim = c.dim();
        c.cells = match cells {
            None => vec![32; dim],
            Some(Value::Array(items)) => items.iter().map(|i| integer("mesh.cells", i)).collect::<Result<Vec<_>>>()?,
            Some(v) => vec![integer("mesh.cells", &v)?; dim],
        };
        c.validate()?;
        Ok(c)
    }

    /// Spatial dimension of the box (`2` unless `domain.edges` says otherwise).
    pub fn dim(&self) -> usize {
        self.edges.as_ref().map_or(2, Vec::len)
    }

    /// Edge lengths used for solves.
    pub fn solve_edges(&self) -> Vec<f64> {
        self.edges.clone().unwrap_or_else(|| vec![PI; 2])
    }

    /// Whether eigenvalues are read from a file rather than computed.
    pub fn loads_spectrum(&self) -> bool {
        self.mode == Mode::Bounds || (self.mode == Mode::Verify && self.spectrum.is_some())
    }

    /// Checks ranges and cross-key consistency, and that referenced input
    /// files exist.
    pub fn validate(&self) -> Result<()> {
        if let Some(e) = &self.edges {
            if e.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
                return Err(range("domain.edges", "edge lengths must be positive".into()));
            }
        }
        if self.alphas.is_empty() || self.alphas.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) {
            return Err(range("domain.alpha", "needs one or more finite values ≥ 0".into()));
        }
        if self.cells.len() != self.dim() {
            return Err(range(
                "mesh.cells",
                format!("{} entries for a {}-dimensional box", self.cells.len(), self.dim()),
            ));
        }
        if let Some(&c) = self.cells.iter().find(|&&c| c < 2) {
            return Err(range("mesh.cells", format!("at least 2 cells per direction are needed, got {c}")));
        }
        if self.m == 0 {
            return Err(range("solver.m", "must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(range("solver.tol", format!("must lie in (0, 1), got {}", self.tol)));
        }
        if self.max_iterations == 0 {
            return Err(range("solver.max_iterations", "must be at least 1".into()));
        }
        if self.k_max == 0 {
            return Err(range("verify.k_max", "must be at least 1".into()));
        }
        if !(self.verify_tol >= 0.0 && self.verify_tol < 1.0) {
            return Err(range("verify.tol", format!("must lie in [0, 1), got {}", self.verify_tol)));
        }
        if self.theta0.is_empty() || self.theta0.iter().any(|t| !(*t > 0.0 && *t < PI)) {
            return Err(range("cap.theta0", "angles must lie in (0, π)".into()));
        }
        if self.radial_cells < MIN_RADIAL_CELLS {
            return Err(range("cap.radial_cells", format!("must be at least {MIN_RADIAL_CELLS}")));
        }

        match self.mode {
            Mode::Solve | Mode::Verify if !self.loads_spectrum() => {
                let dim = self.dim();
                if !(2..=3).contains(&dim) {
                    return Err(range("domain.edges", format!("boxes of dimension 2 or 3 are supported, got {dim}")));
                }
                if self.mode == Mode::Verify && self.m < self.k_max + 1 {
                    return Err(range(
                        "solver.m",
                        format!("verify.k_max = {} needs at least {} eigenvalues", self.k_max, self.k_max + 1),
                    ));
                }
                if self.matrix_k.is_some() != self.matrix_m.is_some() {
                    return Err(range("input.matrix_k", "input.matrix_k and input.matrix_m go together".into()));
                }
                if self.matrix_k.is_some() && (self.mode != Mode::Solve || self.alphas.len() != 1) {
                    return Err(range("input.matrix_k", "matrix read-back needs mode solve and a single alpha".into()));
                }
                if self.matrix_k.is_none() {
                    let order = dim * self.cells.iter().map(|c| c - 1).product::<usize>();
                    if 4 * self.m > order {
                        return Err(range(
                            "solver.m",
                            format!("{} eigenpairs need at least {} unknowns; mesh.cells gives {order}", self.m, 4 * self.m),
                        ));
                    }
                }
            }
            Mode::Bounds | Mode::Verify => {
                if self.spectrum.is_none() {
                    return Err(range("input.spectrum", format!("required for mode {}", self.mode.as_str())));
                }
                if self.mode == Mode::Verify && self.policy == Policy::Richardson {
                    return Err(range(
                        "verify.policy",
                        "richardson needs an inline solve; use `fixed` with input.spectrum".into(),
                    ));
                }
            }
            Mode::Solve | Mode::Cap | Mode::Report => {}
        }

        for (key, path) in [
            ("input.spectrum", &self.spectrum),
            ("input.matrix_k", &self.matrix_k),
            ("input.matrix_m", &self.matrix_m),
        ] {
            if let Some(p) = path {
                if !p.is_file() {
                    return Err(range(key, format!("{} does not exist", p.display())));
                }
            }
        }
        if let Some(p) = self.report_inputs.iter().find(|p| !p.is_file()) {
            return Err(range("report.inputs", format!("{} does not exist", p.display())));
        }
        Ok(())
    }

    /// Effective value of every key, for report provenance.
    pub fn echo(&self) -> BTreeMap<String, serde_json::Value> {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let mut e = BTreeMap::new();
        e.insert("mode".into(), json!(self.mode.as_str()));
        e.insert("domain.edges".into(), json!(self.edges.clone().unwrap_or_else(|| self.solve_edges())));
        e.insert("domain.alpha".into(), json!(self.alphas));
        e.insert("mesh.cells".into(), json!(self.cells));
        e.insert("mesh.lumped_mass".into(), json!(self.lumped_mass));
        e.insert("solver.m".into(), json!(self.m));
        e.insert("solver.tol".into(), json!(self.tol));
        e.insert("solver.seed".into(), json!(self.seed));
        e.insert("solver.max_iterations".into(), json!(self.max_iterations));
        e.insert("verify.k_max".into(), json!(self.k_max));
        e.insert("verify.policy".into(), json!(self.policy.as_str()));
        e.insert("verify.tol".into(), json!(self.verify_tol));
        e.insert("cap.theta0".into(), json!(self.theta0));
        e.insert("cap.mode_max".into(), json!(self.mode_max));
        e.insert("cap.radial_cells".into(), json!(self.radial_cells));
        e.insert("input.spectrum".into(), json!(path(&self.spectrum)));
        e.insert("input.matrix_k".into(), json!(path(&self.matrix_k)));
        e.insert("input.matrix_m".into(), json!(path(&self.matrix_m)));
        e.insert("output.path".into(), json!(path(&self.output)));
        e.insert(
            "output.format".into(),
            json!(self.formats.iter().map(|f| f.as_str()).collect::<Vec<_>>()),
        );
        e.insert("output.matrix_market".into(), json!(self.matrix_market));
        e.insert(
            "report.inputs".into(),
            json!(self.report_inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>()),
        );
        e
    }

    pub fn wants(&self, format: OutputFormat) -> bool {
        self.formats.contains(&format)
    }
}

fn flatten(prefix: &str, table: toml::Table, out: &mut BTreeMap<String, Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k } else { format!("{prefix}.{k}") };
        match v {
            Value::Table(t) => flatten(&key, t, out),
            other => {
                out.insert(key, other);
            }
        }
    }
}

/// `key=value`; the value is read as a TOML value, or as a bare string if it
/// does not parse as one.
fn parse_override(s: &str) -> Result<(String, Value)> {
    let (key, raw) = s
        .split_once('=')
        .ok_or_else(|| HarnessError::Config(format!("override `{s}` is not of the form key=value")))?;
    let key = key.trim().to_string();
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    Ok((key, value))
}

fn range(key: &str, message: String) -> HarnessError {
    HarnessError::Config(format!("`{key}`: {message}"))
}

fn type_error(key: &str, expected: &str, v: &Value) -> HarnessError {
    range(key, format!("expected {expected}, got {}", v.type_str()))
}

fn integer(key: &str, v: &Value) -> Result<usize> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        Value::Integer(i) => Err(range(key, format!("must be non-negative, got {i}"))),
        other => Err(type_error(key, "an integer", other)),
    }
}

fn boolean(key: &str, v: &Value) -> Result<bool> {
    v.as_bool().ok_or_else(|| type_error(key, "a boolean", v))
}

fn string(key: &str, v: &Value) -> Result<String> {
    v.as_str().map(str::to_string).ok_or_else(|| type_error(key, "a string", v))
}

/// A number, or a string such as `"pi"`, `"pi/2"`, `"2pi/3"` or `"3*pi/4"`.
fn real(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        Value::String(s) => parse_real(s).ok_or_else(|| range(key, format!("cannot read `{s}` as a number"))),
        other => Err(type_error(key, "a number", other)),
    }
}

fn reals(key: &str, v: &Value) -> Result<Vec<f64>> {
    match v {
        Value::Array(items) => items.iter().map(|i| real(key, i)).collect(),
        other => Ok(vec![real(key, other)?]),
    }
}

pub fn parse_real(s: &str) -> Option<f64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace() && *c != '*').collect::<String>().to_lowercase();
    let term = |t: &str| -> Option<f64> {
        match t.strip_suffix("pi") {
            Some("") => Some(PI),
            Some(coef) => coef.parse::<f64>().ok().map(|c| c * PI),
            None => t.parse::<f64>().ok(),
        }
    };
    let value = match s.split_once('/') {
        Some((num, den)) => term(num)? / term(den)?,
        None => term(&s)?,
    };
    value.is_finite().then_some(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(mode: Mode, text: &str, overrides: &[&str]) -> Result<RunConfig> {
        let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
        RunConfig::parse(mode, text, &o)
    }

    #[test]
    fn tables_and_dotted_keys_agree() {
        let a = parse(Mode::Solve, "[domain]\nalpha = 1.5\n[solver]\nm = 8\n", &[]).unwrap();
        let b = parse(Mode::Solve, "domain.alpha = 1.5\nsolver.m = 8\n", &[]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.alphas, vec![1.5]);
        assert_eq!(a.m, 8);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = parse(Mode::Solve, "solver.mm = 3\n", &[]).unwrap_err();
        assert!(e.to_string().contains("solver.mm"), "{e}");
        assert!(parse(Mode::Solve, "", &["mesh.cell=4"]).is_err());
    }

    #[test]
    fn overrides_win_and_parse_values() {
        let c = parse(
            Mode::Cap,
            "cap.theta0 = 1.0\n",
            &["cap.theta0=\"pi/3\"", "verify.policy=fixed", "domain.alpha=[0, 0.5]"],
        )
        .unwrap();
        assert!((c.theta0[0] - PI / 3.0).abs() < 1e-15);
        assert_eq!(c.policy, Policy::Fixed);
        assert_eq!(c.alphas, vec![0.0, 0.5]);
        assert!(parse(Mode::Solve, "", &["solver.m"]).is_err());
    }

    #[test]
    fn one_cell_is_rejected_at_load() {
        let e = parse(Mode::Solve, "mesh.cells = 1\n", &[]).unwrap_err();
        assert!(e.to_string().contains("mesh.cells"), "{e}");
    }

    #[test]
    fn range_checks() {
        assert!(parse(Mode::Solve, "solver.tol = 0.0\n", &[]).is_err());
        assert!(parse(Mode::Solve, "domain.alpha = -1.0\n", &[]).is_err());
        assert!(parse(Mode::Solve, "mesh.cells = 4\nsolver.m = 12\n", &[]).is_err());
        assert!(parse(Mode::Verify, "solver.m = 10\nverify.k_max = 10\n", &[]).is_err());
        assert!(parse(Mode::Cap, "cap.theta0 = 3.5\n", &[]).is_err());
        assert!(parse(Mode::Cap, "cap.radial_cells = 4\n", &[]).is_err());
        assert!(parse(Mode::Solve, "domain.edges = [1.0]\n", &[]).is_err());
        assert!(parse(Mode::Solve, "output.format = \"xml\"\n", &[]).is_err());
        assert!(parse(Mode::Solve, "solver.m = \"many\"\n", &[]).is_err());
    }

    #[test]
    fn missing_paths_are_rejected() {
        let e = parse(Mode::Bounds, "input.spectrum = \"/nonexistent/spectrum.txt\"\n", &[]).unwrap_err();
        assert!(e.to_string().contains("does not exist"), "{e}");
        assert!(parse(Mode::Bounds, "", &[]).is_err());
    }

    #[test]
    fn cells_follow_dimension() {
        let c = parse(Mode::Solve, "domain.edges = [1.0, 2.0, 3.0]\nmesh.cells = 6\n", &[]).unwrap();
        assert_eq!(c.cells, vec![6, 6, 6]);
        let c = parse(Mode::Solve, "mesh.cells = [8, 12]\n", &[]).unwrap();
        assert_eq!(c.cells, vec![8, 12]);
        assert!(parse(Mode::Solve, "mesh.cells = [8, 12, 4]\n", &[]).is_err());
    }

    #[test]
    fn real_expressions() {
        assert_eq!(parse_real("pi"), Some(PI));
        assert_eq!(parse_real("pi/2"), Some(PI / 2.0));
        assert_eq!(parse_real("2pi/3"), Some(2.0 * PI / 3.0));
        assert_eq!(parse_real("3 * pi / 4"), Some(3.0 * PI / 4.0));
        assert_eq!(parse_real("0.25"), Some(0.25));
        assert_eq!(parse_real("1/0"), None);
        assert_eq!(parse_real("tau"), None);
    }

    #[test]
    fn echo_lists_every_key() {
        let e = RunConfig::defaults(Mode::Verify).echo();
        for k in KEYS {
            assert!(e.contains_key(*k), "{k}");
        }
    }
}
