//! Scenario files.
//!
//! A scenario is a TOML document restricted to the sections below; unknown sections or keys
//! are rejected. Every section except `[fixture]` and `[check]` is optional.
//!
//! ```toml
//! [fixture]
//! names = ["TP", "CYC_8"]          # algebra fixtures, see `list-fixtures`
//!
//! [grid]                            # log-spaced time grid
//! lo = 1e-3
//! hi = 1e3
//! cells = 96
//!
//! [line]                            # discretized line for the dyadic checks
//! family = "heat"                   # heat | poisson
//! n = 1024
//! h = 0.1
//! phi = "2*t^0.5"                   # c*t^p
//! r = 2.0
//! t_min = 1e-2
//! t_max = 1e2
//! t_count = 16
//! filtration_t = 1.0
//! k_min = -8
//! probe_budget = 20
//!
//! [check]
//! ids = ["semigroup-axioms", "TP-tent-duality-bound"]   # or ["all"]
//! seed = 1
//!
//! [check.overrides.tent-duality-bound]
//! budget = 32.0
//! samples = 50
//!
//! [output]
//! dir = "out"
//! format = "csv"                    # csv | jsonl
//! ```
//!
//! A check id may carry a fixture prefix (`TP-semigroup-axioms`), restricting it to that
//! fixture; otherwise it runs on every fixture of its scope.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Deserialize;

use semitent_core::dyadic::KernelFamily;
use semitent_core::fixtures;
use semitent_core::quadrature::TimeGrid;

use crate::registry::{self, Scope};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    fixture: RawFixture,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    line: RawLine,
    check: RawCheck,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFixture {
    names: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawGrid {
    lo: f64,
    hi: f64,
    cells: usize,
}

impl Default for RawGrid {
    fn default() -> Self {
        RawGrid { lo: 1e-3, hi: 1e3, cells: 96 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawLine {
    family: String,
    n: usize,
    h: f64,
    phi: Option<String>,
    r: f64,
    t_min: f64,
    t_max: f64,
    t_count: usize,
    filtration_t: f64,
    k_min: i32,
    probe_budget: usize,
}

impl Default for RawLine {
    fn default() -> Self {
        RawLine {
            family: "heat".into(),
            n: 1024,
            h: 0.1,
            phi: None,
            r: 2.0,
            t_min: 1e-2,
            t_max: 1e2,
            t_count: 16,
            filtration_t: 1.0,
            k_min: -8,
            probe_budget: 20,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCheck {
    ids: Vec<String>,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default)]
    overrides: BTreeMap<String, Override>,
}

fn default_seed() -> u64 {
    1
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Override {
    pub budget: Option<f64>,
    pub samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
    format: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl std::str::FromStr for Format {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            _ => err(format!("unknown output format `{s}` (csv or jsonl)")),
        }
    }
}

/// The discretized line used by the dyadic checks.
#[derive(Clone, Debug, PartialEq)]
pub struct LineSettings {
    pub family: KernelFamily,
    pub n: usize,
    pub h: f64,
    pub phi: (f64, f64),
    pub r: f64,
    pub ts: Vec<f64>,
    pub filtration_t: f64,
    pub k_min: i32,
    pub probe_budget: usize,
}

impl LineSettings {
    pub fn label(&self) -> String {
        let fam = match self.family {
            KernelFamily::Heat => "HEAT",
            KernelFamily::Poisson => "POISSON",
        };
        format!("LINE_{fam}_{}", self.n)
    }
}

/// One (check, fixture) pair to execute.
#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    pub check: &'static str,
    /// Algebra fixture name; `None` for line and global checks.
    pub fixture: Option<String>,
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub fixtures: Vec<String>,
    pub grid: TimeGrid,
    pub line: LineSettings,
    pub selections: Vec<Selection>,
    pub seed: u64,
    pub overrides: BTreeMap<String, Override>,
    pub out_dir: Option<String>,
    pub format: Format,
}

/// Parses "c*t^p", "t^p", "c*t" or "t".
pub fn parse_phi(s: &str) -> Result<(f64, f64), ConfigError> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || ConfigError(format!("cannot parse scale `{s}` (expected c*t^p)"));
    let (c, rest) = match s.split_once('*') {
        Some((c, rest)) => (c.parse::<f64>().map_err(|_| bad())?, rest),
        None => (1.0, s.as_str()),
    };
    let p = match rest.strip_prefix('t').ok_or_else(bad)? {
        "" => 1.0,
        e => e.strip_prefix('^').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
    };
    if !(c > 0.0) || !p.is_finite() {
        return Err(bad());
    }
    Ok((c, p))
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn resolve_line(raw: RawLine) -> Result<LineSettings, ConfigError> {
    let family = match raw.family.as_str() {
        "heat" => KernelFamily::Heat,
        "poisson" => KernelFamily::Poisson,
        f => return err(format!("unknown kernel family `{f}`")),
    };
    let phi = match raw.phi {
        Some(s) => parse_phi(&s)?,
        None => family.default_phi(),
    };
    if raw.n == 0 || !(raw.h > 0.0) {
        return err("line needs n >= 1 and h > 0");
    }
    if !(raw.r > 1.0) {
        return err("line kernel bound needs r > 1");
    }
    if !(raw.t_min > 0.0) || !(raw.t_max >= raw.t_min) || raw.t_count == 0 {
        return err("line time grid needs 0 < t_min <= t_max and t_count >= 1");
    }
    if raw.k_min > 0 || !(raw.filtration_t > 0.0) {
        return err("line needs k_min <= 0 and filtration_t > 0");
    }
    Ok(LineSettings {
        family,
        n: raw.n,
        h: raw.h,
        phi,
        r: raw.r,
        ts: log_space(raw.t_min, raw.t_max, raw.t_count),
        filtration_t: raw.filtration_t,
        k_min: raw.k_min,
        probe_budget: raw.probe_budget,
    })
}

impl Scenario {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError(format!("parse error: {e}")))?;
        for name in &raw.fixture.names {
            fixtures::by_name(name).map_err(|_| ConfigError(format!("unknown fixture `{name}`")))?;
        }
        let grid = TimeGrid::new(raw.grid.lo, raw.grid.hi, raw.grid.cells)
            .map_err(|e| ConfigError(format!("invalid grid: {e}")))?;
        let line = resolve_line(raw.line)?;
        for id in raw.check.overrides.keys() {
            match registry::find(id) {
                None => return err(format!("override for unknown check `{id}`")),
                Some(spec) if spec.policy.is_exact() && raw.check.overrides[id].budget.is_some() => {
                    return err(format!("check `{id}` uses the exact constant; its budget cannot be overridden"))
                }
                _ => {}
            }
        }
        let mut selections = Vec::new();
        for entry in &raw.check.ids {
            for sel in expand(entry, &raw.fixture.names)? {
                if !selections.contains(&sel) {
                    selections.push(sel);
                }
            }
        }
        let format = match raw.output.format {
            Some(f) => f.parse()?,
            None => Format::Csv,
        };
        Ok(Scenario {
            fixtures: raw.fixture.names,
            grid,
            line,
            selections,
            seed: raw.check.seed,
            overrides: raw.check.overrides,
            out_dir: raw.output.dir,
            format,
        })
    }

    pub fn override_for(&self, id: &str) -> Override {
        self.overrides.get(id).copied().unwrap_or_default()
    }
}

fn selections_for(spec: &'static registry::CheckSpec, fixtures: &[String]) -> Vec<Selection> {
    match spec.scope {
        Scope::Algebra => {
            fixtures.iter().map(|f| Selection { check: spec.id, fixture: Some(f.clone()) }).collect()
        }
        Scope::Line | Scope::Global => vec![Selection { check: spec.id, fixture: None }],
    }
}

fn expand(entry: &str, fixtures: &[String]) -> Result<Vec<Selection>, ConfigError> {
    if entry == "all" {
        return Ok(registry::REGISTRY.iter().flat_map(|s| selections_for(s, fixtures)).collect());
    }
    if let Some(spec) = registry::find(entry) {
        return Ok(selections_for(spec, fixtures));
    }
    if let Some((prefix, rest)) = entry.split_once('-') {
        if let (Ok(_), Some(spec)) = (fixtures::by_name(prefix), registry::find(rest)) {
            if spec.scope != Scope::Algebra {
                return err(format!("check `{rest}` does not take an algebra fixture"));
            }
            return Ok(vec![Selection { check: spec.id, fixture: Some(prefix.to_string()) }]);
        }
    }
    err(format!("unknown check `{entry}`"))
}
