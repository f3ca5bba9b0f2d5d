//! Scenario execution.

use std::collections::BTreeMap;

use rayon::prelude::*;

use semitent_core::{fixtures, CheckReport, Generator};

use crate::config::{ConfigError, Scenario};
use crate::registry::{self, Policy, Task};

/// Environment variable capping the worker pool size.
pub const THREADS_ENV: &str = "SEMITENT_THREADS";

/// Per-task seed; depends only on the scenario seed, check id and fixture.
pub fn task_seed(seed: u64, check: &str, fixture: Option<&str>) -> u64 {
    // FNV-1a keeps the value stable across Rust releases, unlike `DefaultHasher`.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    for b in check.bytes().chain([0u8]).chain(fixture.unwrap_or("").bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct RunSummary {
    pub total: usize,
    pub passed: usize,
    /// Failed reports from exact-constant or tolerance checks.
    pub hard_failures: usize,
    /// Failed reports from empirical or uniformity checks.
    pub soft_failures: usize,
    pub errored: usize,
}

impl RunSummary {
    pub fn of(reports: &[CheckReport]) -> Self {
        let mut s = RunSummary { total: reports.len(), ..Default::default() };
        for r in reports {
            if r.errored {
                s.errored += 1;
            } else if r.pass {
                s.passed += 1;
            } else if registry::find(&r.check_id).is_some_and(|spec| spec.policy.is_hard()) {
                s.hard_failures += 1;
            } else {
                s.soft_failures += 1;
            }
        }
        s
    }
}

/// 0 all good, 1 an exact or tolerance check failed, 3 errored reports under `strict`.
pub fn exit_code(summary: &RunSummary, strict: bool) -> i32 {
    if summary.hard_failures > 0 {
        1
    } else if strict && summary.errored > 0 {
        3
    } else {
        0
    }
}

fn normalize(spec_id: &str, fixture: &str, seed: u64, mut r: CheckReport) -> CheckReport {
    if r.check_id != spec_id {
        let part = format!("part={}", r.check_id);
        r.sweep_key = if r.sweep_key.is_empty() { part } else { format!("{part};{}", r.sweep_key) };
        r.check_id = spec_id.to_string();
    }
    r.fixture = fixture.to_string();
    r.seed = seed;
    r
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool, ConfigError> {
    let env = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok());
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads.or(env).filter(|&n| n > 0) {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| ConfigError(format!("thread pool: {e}")))
}

/// Run every selection of the scenario. Output is sorted by (checkId, fixture, sweepKey) and
/// does not depend on the thread count. A runner error becomes an errored report. `threads`
/// takes precedence over the `SEMITENT_THREADS` environment variable.
pub fn run_scenario(scenario: &Scenario, threads: Option<usize>) -> Result<Vec<CheckReport>, ConfigError> {
    let mut gens: BTreeMap<String, Generator> = BTreeMap::new();
    for sel in &scenario.selections {
        registry::find(sel.check).ok_or_else(|| ConfigError(format!("unknown check `{}`", sel.check)))?;
        if let Some(name) = &sel.fixture {
            if !gens.contains_key(name) {
                let fx = fixtures::by_name(name).map_err(|_| ConfigError(format!("unknown fixture `{name}`")))?;
                gens.insert(name.clone(), fx.generator);
            }
        }
    }
    let pool = pool(threads)?;
    let mut reports: Vec<CheckReport> = pool.install(|| {
        scenario
            .selections
            .par_iter()
            .flat_map_iter(|sel| {
                let spec = registry::find(sel.check).expect("resolved above");
                let ov = scenario.override_for(spec.id);
                let budget = match spec.policy {
                    Policy::ExactConstant(_) => f64::NAN,
                    p => ov.budget.unwrap_or(p.default_budget()),
                };
                let fixture = sel.fixture.as_deref().map(|n| (n, &gens[n]));
                let seed = task_seed(scenario.seed, spec.id, sel.fixture.as_deref());
                let task = Task {
                    spec,
                    fixture,
                    grid: &scenario.grid,
                    line: &scenario.line,
                    budget,
                    samples: ov.samples.unwrap_or(spec.samples),
                    seed,
                };
                let label = sel.fixture.clone().unwrap_or_else(|| match spec.scope {
                    registry::Scope::Line => scenario.line.label(),
                    _ => String::new(),
                });
                let out = match (spec.run)(&task) {
                    Ok(v) => v,
                    Err(e) => vec![CheckReport::errored(spec.id, &e.to_string())],
                };
                out.into_iter().map(move |r| normalize(spec.id, &label, seed, r)).collect::<Vec<_>>()
            })
            .collect()
    });
    reports.sort_by(|a, b| {
        (&a.check_id, &a.fixture, &a.sweep_key).cmp(&(&b.check_id, &b.fixture, &b.sweep_key))
    });
    Ok(reports)
}
