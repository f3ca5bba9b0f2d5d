//! Named check families and their runners.

use rayon::prelude::*;

use semitent_core::axioms::{axiom_reports, derivative_fd_check};
use semitent_core::dyadic::{self, LineFixture};
use semitent_core::general::{
    carleson_pairing_check, general_duality_check, general_duality_terms, gradient_square_check,
    square_gradient_equivalence_check, truncated_square_checks,
};
use semitent_core::hardy::{
    atom_h1_bound, bmo_dual_characterization, bmo_equiv_heat, bmo_pointwise_witness, carleson_embedding_check,
    check_gamma_positive, check_gamma_tilde_identity, derivative_bounds_check, duality_check_heat_poisson,
    duality_ratios, split_constants, subordinated_h1_terms, AtomPair,
};
use semitent_core::lhalf::lhalf_test;
use semitent_core::quadrature::TimeGrid;
use semitent_core::report::safe_ratio;
use semitent_core::sample::{self, SampleRng};
use semitent_core::semigroup::{check_kadison_schwarz, doubling_constant, find_min_alpha};
use semitent_core::subordination::{
    admissible_k, check_poisson_pde, check_py_over_y, check_route_agreement, check_scalar_identity,
    pc_display_witness, pd_factorization_error,
};
use semitent_core::tent::{
    doubled_tent_terms, doubling_norms, duality_budget, duality_terms, necessity_ratio, square_relations,
    tinf_dual_terms, truncated_square, weighted_cauchy_schwarz, Family, SquareVariant, TentElement,
};
use semitent_core::{fixtures, CheckReport, Direction, Element, Flow, Generator, Result};

use crate::config::LineSettings;

/// How a family's pass/fail is decided.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Policy {
    /// A constant named explicitly in the proof (formula given as text).
    ExactConstant(&'static str),
    /// An existence constant; the measured value must stay within the budget.
    RecordEmpirical(f64),
    /// A measured quantity must vary by at most the given ratio across a sweep.
    UniformityAcrossSweep(f64),
    /// A residual or positivity witness with a fixed numerical tolerance.
    Tolerance(f64),
}

impl Policy {
    /// Exact constants and tolerances are hard requirements.
    pub fn is_hard(self) -> bool {
        matches!(self, Policy::ExactConstant(_) | Policy::Tolerance(_))
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Policy::ExactConstant(_))
    }

    pub fn default_budget(self) -> f64 {
        match self {
            Policy::ExactConstant(_) => f64::NAN,
            Policy::RecordEmpirical(b) | Policy::UniformityAcrossSweep(b) | Policy::Tolerance(b) => b,
        }
    }

    pub fn describe(self) -> String {
        match self {
            Policy::ExactConstant(c) => format!("exact constant {c}"),
            Policy::RecordEmpirical(b) => format!("empirical, budget {b}"),
            Policy::UniformityAcrossSweep(b) => format!("uniform across sweep, budget {b}"),
            Policy::Tolerance(b) => format!("tolerance {b:e}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    /// Runs once per algebra fixture.
    Algebra,
    /// Runs on the discretized line.
    Line,
    /// Needs no fixture.
    Global,
}

pub type Runner = fn(&Task) -> Result<Vec<CheckReport>>;

pub struct CheckSpec {
    pub id: &'static str,
    pub module: &'static str,
    pub statement: &'static str,
    pub scope: Scope,
    pub policy: Policy,
    /// Default number of seeded samples.
    pub samples: usize,
    pub run: Runner,
}

/// Everything a runner needs.
pub struct Task<'a> {
    pub spec: &'static CheckSpec,
    pub fixture: Option<(&'a str, &'a Generator)>,
    pub grid: &'a TimeGrid,
    pub line: &'a LineSettings,
    pub budget: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Task<'_> {
    fn gen(&self) -> &Generator {
        self.fixture.expect("algebra check without a fixture").1
    }

    fn name(&self) -> &str {
        self.fixture.map_or("", |f| f.0)
    }

    fn rng(&self) -> SampleRng {
        sample::rng(self.seed)
    }

    fn id(&self) -> &'static str {
        self.spec.id
    }
}

pub fn find(id: &str) -> Option<&'static CheckSpec> {
    REGISTRY.iter().find(|s| s.id == id)
}

// ---------------------------------------------------------------------------------------------
// Helpers

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1).max(1) as f64)).collect()
}

fn log_uniform(rng: &mut SampleRng, lo: f64, hi: f64) -> f64 {
    sample::uniform(rng, lo.ln(), hi.ln()).exp()
}

fn flow_name(flow: Flow) -> &'static str {
    match flow {
        Flow::Heat => "heat",
        Flow::Poisson => "poisson",
    }
}

fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::QuasiDecreasing => "decreasing",
        Direction::QuasiIncreasing => "increasing",
        Direction::Neither => "neither",
    }
}

/// Least α in the preferred direction (increasing for heat, decreasing for Poisson), falling
/// back to the other direction.
pub fn quasi_monotone(gen: &Generator, flow: Flow) -> Option<(Direction, f64)> {
    let order = match flow {
        Flow::Heat => [Direction::QuasiIncreasing, Direction::QuasiDecreasing],
        Flow::Poisson => [Direction::QuasiDecreasing, Direction::QuasiIncreasing],
    };
    order.into_iter().find_map(|d| {
        find_min_alpha(gen, flow, d, (1e-3, 50.0), 64).ok().and_then(|r| r.alpha().map(|a| (d, a)))
    })
}

fn skipped(id: &str, why: &str) -> CheckReport {
    let mut r = CheckReport::new(id, f64::NAN, f64::NAN, f64::NAN, true).with_notes(why.to_string());
    r.ratio = f64::NAN;
    r
}

/// The report with the largest key, failing reports first.
fn worst(reports: Vec<CheckReport>, key: impl Fn(&CheckReport) -> f64) -> Option<CheckReport> {
    reports.into_iter().max_by(|a, b| {
        (!a.pass, key(a)).partial_cmp(&(!b.pass, key(b))).unwrap_or(std::cmp::Ordering::Equal)
    })
}

fn by_ratio(r: &CheckReport) -> f64 {
    if r.ratio.is_nan() {
        f64::NEG_INFINITY
    } else {
        r.ratio
    }
}

fn two_sided_key(r: &CheckReport) -> f64 {
    if r.ratio > 0.0 {
        r.ratio.max(1.0 / r.ratio)
    } else {
        f64::INFINITY
    }
}

/// Eigen-projection of a fixed probe onto the eigenspace of L closest to zero (nonzero).
pub fn lowest_mode(gen: &Generator) -> Option<Element> {
    let gap = gen.spectral_gap()?;
    let lambda = -gap;
    let ctx = gen.ctx();
    let probe = if ctx.is_commutative() {
        ctx.point_mass(0)
    } else {
        let n = ctx.dim();
        ctx.from_real(&vec![1.0; n * n]).ok()?
    };
    let tol = 1e-9 * gap.max(1.0);
    let mode = gen.spectral_apply(|l| if (l - lambda).abs() <= tol { 1.0 } else { 0.0 }, &probe).real_part();
    (mode.max_abs() > 1e-12).then_some(mode)
}

/// CYC_8 → CYC_16, TORUS_16 → TORUS_32; `None` for fixtures that are not graph refinements.
pub fn doubled_fixture(name: &str) -> Option<String> {
    let (kind, n) = name.split_once('_')?;
    let n: usize = n.parse().ok()?;
    matches!(kind, "CYC" | "TORUS").then(|| format!("{kind}_{}", 2 * n))
}

fn tents(gen: &Generator, grid: &TimeGrid, count: usize, rng: &mut SampleRng) -> Vec<TentElement> {
    (0..count).map(|_| sample::tent(gen.ctx(), grid, rng)).collect()
}

/// Centered f and Hermitian φ, plus the lowest-mode pair.
fn duality_pairs(gen: &Generator, count: usize, rng: &mut SampleRng) -> Vec<(Element, Element)> {
    let mut pairs: Vec<(Element, Element)> =
        (0..count).map(|_| (sample::centered(gen, rng), sample::hermitian(gen.ctx(), rng))).collect();
    if let Some(m) = lowest_mode(gen) {
        pairs.push((m.clone(), m));
    }
    pairs
}

// ---------------------------------------------------------------------------------------------
// Semigroup engine

fn run_axioms(t: &Task) -> Result<Vec<CheckReport>> {
    axiom_reports(t.gen(), t.samples, &mut t.rng())
}

fn run_kadison_schwarz(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let mut rng = t.rng();
    let mut out = Vec::new();
    for flow in [Flow::Heat, Flow::Poisson] {
        let mut w = f64::INFINITY;
        for _ in 0..t.samples {
            let x = sample::element(gen.ctx(), &mut rng);
            let y = log_uniform(&mut rng, 1e-3, 10.0);
            let r = check_kadison_schwarz(&gen.evaluate(flow, y)?, &x)?;
            let s = x.max_abs();
            w = w.min(r.lhs / (s * s).max(1.0));
        }
        out.push(CheckReport::witness(t.id(), w, t.budget).with_sweep(format!("flow={}", flow_name(flow))));
    }
    Ok(out)
}

fn run_weighted_cs(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let mut rng = t.rng();
    let fam = Family::heat(gen);
    let mut reps = Vec::new();
    for _ in 0..t.samples {
        let a = sample::tent(gen.ctx(), t.grid, &mut rng);
        let b = sample::tent(gen.ctx(), t.grid, &mut rng);
        let sq = truncated_square(&fam, &a, SquareVariant::Increasing(0.0))?;
        let c = weighted_cauchy_schwarz(&fam, &a, &b, &sq.tilde, true)?;
        reps.push(CheckReport::bound(t.id(), c.lhs, c.rhs(), 1.0, t.budget).with_notes(format!("eps={:.3e}", c.epsilon)));
    }
    Ok(worst(reps, by_ratio).into_iter().collect())
}

fn run_min_alpha(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let mut out = Vec::new();
    for flow in [Flow::Heat, Flow::Poisson] {
        let sweep = format!("flow={}", flow_name(flow));
        out.push(match quasi_monotone(gen, flow) {
            Some((d, a)) => CheckReport::new(t.id(), a, t.budget, t.budget, a <= t.budget)
                .with_ratio(a)
                .with_sweep(format!("{sweep};direction={}", direction_name(d))),
            None => skipped(t.id(), "not quasi-monotone on the scan window").with_sweep(sweep),
        });
    }
    Ok(out)
}

fn run_time_derivative(t: &Task) -> Result<Vec<CheckReport>> {
    Ok(vec![derivative_fd_check(t.gen(), t.samples, &mut t.rng())?])
}

// ---------------------------------------------------------------------------------------------
// Subordination

fn run_routes(t: &Task) -> Result<Vec<CheckReport>> {
    Ok(vec![check_route_agreement(t.gen(), &log_space(1e-2, 1e2, 32))])
}

fn run_scalar_identity(_: &Task) -> Result<Vec<CheckReport>> {
    Ok(vec![check_scalar_identity(&log_space(0.1, 10.0, 8), &log_space(0.05, 10.0, 8))])
}

fn run_pde(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let mut rng = t.rng();
    let mut reps = Vec::new();
    for y in log_space(1e-2, 10.0, 8) {
        for _ in 0..t.samples {
            let x = sample::element(gen.ctx(), &mut rng);
            reps.push(check_poisson_pde(gen, y, &x)?);
        }
    }
    Ok(worst(reps, |r| r.lhs).into_iter().collect())
}

fn run_py_over_y(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let mut rng = t.rng();
    let ys = log_space(1e-2, 1e2, 32);
    let mut reps = Vec::new();
    for _ in 0..t.samples {
        let f = sample::positive(gen.ctx(), &mut rng);
        reps.push(check_py_over_y(gen, &ys, &f)?);
    }
    Ok(worst(reps, |r| -r.lhs).into_iter().collect())
}

// ---------------------------------------------------------------------------------------------
// Tent spaces

fn run_square_order(t: &Task, want: Direction) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let mut out = Vec::new();
    for flow in [Flow::Heat, Flow::Poisson] {
        let sweep = format!("flow={}", flow_name(flow));
        let alpha = match quasi_monotone(gen, flow) {
            Some((d, a)) if d == want => a,
            _ => {
                out.push(skipped(t.id(), "hypothesis-not-satisfied").with_sweep(sweep));
                continue;
            }
        };
        let (variant, c) = match want {
            Direction::QuasiDecreasing => (SquareVariant::Decreasing(alpha), 2f64.powf(alpha / 2.0)),
            _ => (SquareVariant::Increasing(alpha), 1.0),
        };
        let fam = Family::new(gen, flow);
        let mut rng = t.rng();
        let (mut order, mut mono, mut deriv) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
        for a in tents(gen, t.grid, t.samples, &mut rng) {
            let r = square_relations(&fam, &a, variant)?;
            let s = r.scale.max(1e-300);
            order = order.min(r.order / s);
            mono = mono.min(r.monotone / s);
            deriv = deriv.min(r.derivative / s);
        }
        let mut rep = CheckReport::witness(t.id(), order, 1e-9);
        rep.budget = c;
        out.push(rep.with_sweep(format!("{sweep};part=order;alpha={alpha:.5}")));
        out.push(CheckReport::witness(t.id(), mono, 1e-8).with_sweep(format!("{sweep};part=monotone")));
        out.push(CheckReport::witness(t.id(), deriv, 1e-8).with_sweep(format!("{sweep};part=derivative")));
    }
    Ok(out)
}

fn run_square_order_decreasing(t: &Task) -> Result<Vec<CheckReport>> {
    run_square_order(t, Direction::QuasiDecreasing)
}

fn run_square_order_increasing(t: &Task) -> Result<Vec<CheckReport>> {
    run_square_order(t, Direction::QuasiIncreasing)
}

fn run_tent_duality(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let mut out = Vec::new();
    for flow in [Flow::Heat, Flow::Poisson] {
        let sweep = format!("flow={}", flow_name(flow));
        let Some((_, alpha)) = quasi_monotone(gen, flow) else {
            out.push(skipped(t.id(), "hypothesis-not-satisfied").with_sweep(sweep));
            continue;
        };
        let c = duality_budget(alpha);
        let fam = Family::new(gen, flow);
        let mut rng = t.rng();
        let mut reps = Vec::new();
        for _ in 0..t.samples {
            let a = sample::tent(gen.ctx(), t.grid, &mut rng);
            let b = sample::tent(gen.ctx(), t.grid, &mut rng);
            let (lhs, rhs) = duality_terms(&fam, &a, &b)?;
            reps.push(CheckReport::bound(t.id(), lhs, rhs, c, 1e-12));
        }
        let violations = reps.iter().filter(|r| !r.pass).count();
        if let Some(r) = worst(reps, by_ratio) {
            out.push(
                r.with_sweep(format!("{sweep};alpha={alpha:.5}"))
                    .with_notes(format!("pairs={};violations={violations}", t.samples)),
            );
        }
    }
    Ok(out)
}

fn run_lhalf(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let ys = log_space(1e-3, 1e2, 200);
    let mut out = Vec::new();
    for flow in [Flow::Heat, Flow::Poisson] {
        let r = lhalf_test(gen, flow, &ys, t.samples, t.seed)?;
        out.push(
            CheckReport::new(t.id(), r.constant, 1.0, t.budget, r.constant <= t.budget)
                .with_ratio(r.constant)
                .with_sweep(format!("flow={}", flow_name(flow)))
                .with_notes(format!("at y={:.6}", r.at)),
        );
    }
    Ok(out)
}

fn run_necessity(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let ctx = gen.ctx();
    let fam = Family::heat(gen);
    let mut rng = t.rng();
    let mk = |(ratio, at): (f64, f64)| CheckReport::bound(t.id(), ratio, 1.0, 1.0, 1e-12).with_notes(format!("t={at:.6}"));
    let mut random = Vec::new();
    for _ in 0..t.samples {
        let f = sample::positive(ctx, &mut rng);
        let g = sample::tent(ctx, t.grid, &mut rng);
        random.push(mk(necessity_ratio(&fam, &f, &g)?));
    }
    // g concentrated in a single cell, equal to a point mass f there.
    let f = ctx.point_mass(0);
    let mut concentrated = Vec::new();
    for k in (0..t.grid.len()).step_by(2) {
        let node = t.grid.node(k);
        let g = TentElement::from_fn(t.grid, |y| if y == node { f.clone() } else { ctx.zero() })?;
        concentrated.push(mk(necessity_ratio(&fam, &f, &g)?));
    }
    let mut out = Vec::new();
    for (name, reps) in [("random", random), ("concentrated", concentrated)] {
        let n = reps.len();
        let bad = reps.iter().filter(|r| !r.pass).count();
        if let Some(r) = worst(reps, by_ratio) {
            let notes = format!("{};probes={n};violations={bad}", r.notes);
            out.push(r.with_sweep(format!("probe={name}")).with_notes(notes));
        }
    }
    Ok(out)
}

fn run_tinf_dual(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let fam = Family::heat(gen);
    let mut rng = t.rng();
    let mut reps = Vec::new();
    for time in [0.1, 1.0, 10.0] {
        for _ in 0..t.samples {
            let h = sample::element(gen.ctx(), &mut rng);
            let (lhs, rhs) = tinf_dual_terms(&fam, time, &h, 200, &mut rng)?;
            reps.push(CheckReport::bound(t.id(), lhs, rhs, t.budget, 0.0).with_sweep(format!("t={time}")));
        }
    }
    Ok(worst(reps, by_ratio).into_iter().collect())
}

fn run_doubled_tent(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let fam = Family::heat(gen);
    let mut rng = t.rng();
    let mut reps = Vec::new();
    for a in tents(gen, t.grid, t.samples, &mut rng) {
        let (lhs, rhs) = doubled_tent_terms(&fam, &a)?;
        reps.push(CheckReport::bound(t.id(), lhs, rhs, t.budget, 0.0));
    }
    Ok(worst(reps, by_ratio).into_iter().collect())
}

fn run_tent_doubling(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let fam = Family::heat(gen);
    let mut rng = t.rng();
    let mut reps = Vec::new();
    for a in tents(gen, t.grid, t.samples, &mut rng) {
        let (n1, n2) = doubling_norms(&fam, &a)?;
        let r = safe_ratio(n1, n2);
        reps.push(CheckReport::new(t.id(), n1, n2, t.budget, r <= t.budget && r >= 1.0 / t.budget).with_ratio(r));
    }
    Ok(worst(reps, two_sided_key).into_iter().collect())
}

// ---------------------------------------------------------------------------------------------
// Hardy–BMO (Poisson)

fn run_gamma_positive(t: &Task) -> Result<Vec<CheckReport>> {
    Ok(vec![check_gamma_positive(t.gen(), t.samples, &mut t.rng())])
}

fn run_gamma_tilde(t: &Task) -> Result<Vec<CheckReport>> {
    Ok(vec![check_gamma_tilde_identity(t.gen(), &[0.1, 1.0, 5.0], t.samples, &mut t.rng())])
}

fn run_bmo_pointwise(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let mut rng = t.rng();
    let mut w = f64::INFINITY;
    for _ in 0..t.samples {
        let phi = sample::element(gen.ctx(), &mut rng);
        w = w.min(bmo_pointwise_witness(gen, &phi, t.grid));
    }
    Ok(vec![CheckReport::witness(t.id(), w, t.budget)])
}

fn run_carleson(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let mut rng = t.rng();
    let mut reps = Vec::new();
    for _ in 0..t.samples {
        let phi = sample::centered(gen, &mut rng);
        reps.push(carleson_embedding_check(gen, &phi, t.grid, t.budget)?);
    }
    Ok(worst(reps, by_ratio).into_iter().collect())
}

fn run_duality(t: &Task, index: usize) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let mut rng = t.rng();
    let reps: Vec<CheckReport> = duality_pairs(gen, t.samples, &mut rng)
        .iter()
        .map(|(f, phi)| duality_check_heat_poisson(gen, f, phi, t.grid, t.budget)[index].clone())
        .filter(|r| !r.notes.starts_with("skipped"))
        .collect();
    Ok(worst(reps, by_ratio).into_iter().collect())
}

fn run_h1_bmo_duality(t: &Task) -> Result<Vec<CheckReport>> {
    run_duality(t, 0)
}

fn run_poisson_h1_bmo_duality(t: &Task) -> Result<Vec<CheckReport>> {
    run_duality(t, 1)
}

fn run_bmo_equivalence(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let mut rng = t.rng();
    let reps = (0..t.samples)
        .map(|_| bmo_equiv_heat(gen, &sample::centered(gen, &mut rng), t.grid, t.budget))
        .collect();
    Ok(worst(reps, two_sided_key).into_iter().collect())
}

fn run_atom_duality(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let mut rng = t.rng();
    let mut reps = Vec::new();
    for _ in 0..t.samples {
        let phi = sample::centered(gen, &mut rng);
        reps.push(bmo_dual_characterization(gen, &phi, t.grid, t.budget, &mut rng));
    }
    Ok(worst(reps, two_sided_key).into_iter().collect())
}

/// Heat direction and α when quasi-monotone, else (decreasing, 1).
fn heat_alpha(gen: &Generator) -> (Direction, f64) {
    quasi_monotone(gen, Flow::Heat).unwrap_or((Direction::QuasiDecreasing, 1.0))
}

fn run_splits(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let (dir, alpha) = heat_alpha(gen);
    let times = [0.3, 1.0, 3.0];
    let (mut rec, mut pb, mut pa) = (0.0f64, f64::INFINITY, 0.0f64);
    for &s in &times {
        for &u in &times {
            let c = split_constants(gen, s, u, dir)?;
            rec = rec.max(c.reconstruction);
            pb = pb.min(c.pb_witness);
            pa = pa.max(c.pa_constant);
        }
    }
    let k = admissible_k(alpha, 1.0);
    let (mut pd, mut pc) = (0.0f64, f64::INFINITY);
    for &s in &times {
        pd = pd.max(pd_factorization_error(gen, s, k)?);
        pc = pc.min(pc_display_witness(gen, s, k, 1.0)?);
    }
    Ok(vec![
        CheckReport::residual(t.id(), rec, 1e-6).with_sweep("part=reconstruction".into()),
        CheckReport::witness(t.id(), pb, 1e-9).with_sweep("part=pb-order".into()),
        CheckReport::new(t.id(), pa, 1.0, t.budget, pa <= t.budget).with_ratio(pa).with_sweep("part=pa-constant".into()),
        CheckReport::residual(t.id(), pd, 1e-6).with_sweep(format!("part=pd-factorization;k={k:.6}")),
        CheckReport::witness(t.id(), pc, 1e-9).with_sweep(format!("part=pc-display;k={k:.6}")),
    ])
}

fn run_derivative_bounds(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let ys = log_space(1e-2, 1e2, 41);
    let mut out = Vec::new();
    for flow in [Flow::Heat, Flow::Poisson] {
        let sweep = format!("flow={}", flow_name(flow));
        out.push(match quasi_monotone(gen, flow) {
            Some((d, a)) => {
                let mut r = derivative_bounds_check(gen, flow, d, a, &ys);
                r.budget = semitent_core::hardy::derivative_constant(a);
                r.with_sweep(format!("{sweep};direction={};alpha={a:.5}", direction_name(d)))
            }
            None => skipped(t.id(), "hypothesis-not-satisfied").with_sweep(sweep),
        });
    }
    Ok(out)
}

fn random_atom(gen: &Generator, rng: &mut SampleRng) -> Result<AtomPair> {
    let ctx = gen.ctx();
    let a = sample::positive(ctx, rng);
    let a = a.scale_re(1.0 / ctx.tr_re(&a));
    let b = sample::positive(ctx, rng);
    let b = b.scale_re(1.0 / ctx.tr_re(&b.abs_sq()).sqrt());
    AtomPair::new(ctx, log_uniform(rng, 0.3, 3.0), a, b)
}

fn run_atoms(t: &Task, index: usize) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let k = admissible_k(heat_alpha(gen).1, 1.0);
    let mut rng = t.rng();
    let mut reps = Vec::new();
    for _ in 0..t.samples {
        let atom = random_atom(gen, &mut rng)?;
        let mut r = atom_h1_bound(gen, &atom, k, t.grid, t.budget)[index].clone();
        r.check_id = t.id().to_string();
        reps.push(r.with_notes(format!("k={k:.6}")));
    }
    Ok(worst(reps, by_ratio).into_iter().collect())
}

fn run_atom_inner(t: &Task) -> Result<Vec<CheckReport>> {
    run_atoms(t, 0)
}

fn run_atom_outer(t: &Task) -> Result<Vec<CheckReport>> {
    run_atoms(t, 1)
}

fn run_atom_h1(t: &Task) -> Result<Vec<CheckReport>> {
    run_atoms(t, 2)
}

fn run_subordinated_h1(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let k = admissible_k(heat_alpha(gen).1, 1.0);
    let mut rng = t.rng();
    let mut reps = Vec::new();
    for _ in 0..t.samples {
        let g = sample::centered(gen, &mut rng);
        let (h1, rhs) = subordinated_h1_terms(gen, &g, k, t.grid);
        reps.push(CheckReport::bound(t.id(), h1, rhs, t.budget, 0.0).with_notes(format!("k={k:.6}")));
    }
    Ok(worst(reps, by_ratio).into_iter().collect())
}

// ---------------------------------------------------------------------------------------------
// General Hardy–BMO

fn run_gradient_square(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let mut rng = t.rng();
    let mut reps = Vec::new();
    for _ in 0..t.samples {
        reps.push(gradient_square_check(gen, &sample::element(gen.ctx(), &mut rng), t.grid)?);
    }
    Ok(worst(reps, by_ratio).into_iter().collect())
}

fn run_general_duality(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let mut rng = t.rng();
    let mut reps = Vec::new();
    for (f, phi) in duality_pairs(gen, t.samples, &mut rng) {
        reps.push(general_duality_check(gen, &f, &phi, t.grid, t.budget)?);
    }
    Ok(worst(reps, by_ratio).into_iter().collect())
}

fn run_truncated_squares(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let mut rng = t.rng();
    let nodes = log_space(1e-2, 1e2, 16);
    let mut parts: [Vec<CheckReport>; 3] = Default::default();
    for _ in 0..t.samples {
        let f = sample::element(gen.ctx(), &mut rng);
        for (i, r) in truncated_square_checks(gen, &f, &nodes)?.into_iter().enumerate() {
            parts[i].push(r);
        }
    }
    Ok(parts
        .into_iter()
        .filter_map(|p| {
            let part = p.first()?.check_id.clone();
            let mut r = worst(p, |r| -r.lhs)?;
            r.check_id = t.id().to_string();
            Some(r.with_sweep(format!("part={part}")))
        })
        .collect())
}

fn run_carleson_pairing(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let mut rng = t.rng();
    let mut reps = Vec::new();
    for _ in 0..t.samples {
        let f = sample::centered(gen, &mut rng);
        let phi = sample::tent(gen.ctx(), t.grid, &mut rng);
        reps.push(carleson_pairing_check(gen, &f, &phi)?);
    }
    Ok(worst(reps, by_ratio).into_iter().collect())
}

fn run_square_gradient_equivalence(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let lhalf = lhalf_test(gen, Flow::Heat, &log_space(1e-3, 1e2, 40), 20, t.seed)?.constant;
    let doubling = doubling_constant(gen, Flow::Heat, t.grid.nodes());
    let hypotheses = lhalf.is_finite() && doubling.is_finite();
    let mut rng = t.rng();
    let sample: Vec<Element> = (0..t.samples).map(|_| sample::centered(gen, &mut rng)).collect();
    let r = square_gradient_equivalence_check(gen, &sample, t.grid, t.budget, hypotheses)?;
    let notes = format!("{};lhalf={lhalf:.6};doubling={doubling:.6}", r.notes);
    Ok(vec![r.with_notes(notes)])
}

// ---------------------------------------------------------------------------------------------
// Duality drift under grid and fixture-size doubling

fn duality_constants(gen: &Generator, grid: &TimeGrid) -> Result<Option<[f64; 3]>> {
    let Some(m) = lowest_mode(gen) else { return Ok(None) };
    let d = duality_ratios(gen, &m, &m, grid);
    let (p, hs, bmoc) = general_duality_terms(gen, &m, &m, grid)?;
    Ok(Some([d.heat(), d.poisson(), safe_ratio(p, hs * bmoc)]))
}

fn run_duality_drift(t: &Task) -> Result<Vec<CheckReport>> {
    let gen = t.gen();
    let names = ["h1-bmo", "poisson-h1-bmo", "general-h1-bmo"];
    let Some(base) = duality_constants(gen, t.grid)? else {
        return Ok(vec![skipped(t.id(), "no nonzero eigenvalue")]);
    };
    let mut axes = vec![("grid", duality_constants(gen, &t.grid.doubled())?)];
    if let Some(big) = doubled_fixture(t.name()) {
        axes.push(("size", duality_constants(&fixtures::by_name(&big)?.generator, t.grid)?));
    }
    let mut out = Vec::new();
    for (axis, other) in axes {
        let Some(other) = other else { continue };
        for i in 0..3 {
            let drift = (other[i] / base[i] - 1.0).abs();
            out.push(
                CheckReport::new(t.id(), base[i], other[i], t.budget, drift <= t.budget)
                    .with_ratio(drift)
                    .with_sweep(format!("constant={};axis={axis}", names[i])),
            );
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------------------------
// Dyadic appendix

fn line_fixture(l: &LineSettings, n: usize, h: f64) -> Result<LineFixture> {
    LineFixture::torus(n, h, l.family)?.with_phi(l.phi.0, l.phi.1)
}

/// Torus whose finest atom at the filtration time spans exactly 8 cells.
fn filtration_fixture(l: &LineSettings, n: usize) -> Result<(LineFixture, f64)> {
    let base = line_fixture(l, n, l.h)?;
    let phi = base.scale(l.filtration_t);
    Ok((line_fixture(l, n, phi / 8.0)?, phi))
}

fn run_kernel_bound(t: &Task) -> Result<Vec<CheckReport>> {
    let l = t.line;
    let fix = line_fixture(l, l.n, l.h)?;
    let mut best = (0.0f64, 0.0);
    for &time in &l.ts {
        let c = dyadic::kernel_bound_constant(&fix, time, l.r, fix.scale(time))?;
        if c > best.0 {
            best = (c, time);
        }
    }
    Ok(vec![CheckReport::new(t.id(), best.0, 1.0, t.budget, best.0 <= t.budget)
        .with_ratio(best.0)
        .with_sweep(format!("r={}", l.r))
        .with_notes(format!("worst t={:.6}", best.1))])
}

fn run_filtration(t: &Task, nesting: bool) -> Result<Vec<CheckReport>> {
    let l = t.line;
    let (fix, phi) = filtration_fixture(l, l.n)?;
    let probes = dyadic::positive_probes(l.n, t.samples, &mut t.rng());
    let w = dyadic::filtration_witnesses(&fix, phi, l.k_min, &probes)?;
    let (value, c) = if nesting { (w.nesting, 4.0) } else { (w.overlap, 3.0) };
    let mut r = CheckReport::witness(t.id(), value, 1e-12);
    r.budget = c;
    Ok(vec![r.with_sweep(format!("t={};k_min={}", l.filtration_t, l.k_min)).with_notes(format!("probes={}", probes.len()))])
}

fn run_nesting(t: &Task) -> Result<Vec<CheckReport>> {
    run_filtration(t, true)
}

fn run_overlap(t: &Task) -> Result<Vec<CheckReport>> {
    run_filtration(t, false)
}

fn run_domination(t: &Task) -> Result<Vec<CheckReport>> {
    let l = t.line;
    let (fix, _) = filtration_fixture(l, l.n)?;
    let rs = [1.5, 2.0, 3.0];
    let cs: Vec<(f64, f64)> =
        rs.par_iter().map(|&r| dyadic::domination_constant(&fix, l.filtration_t, r, l.k_min)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (r, (c, tail)) in rs.iter().zip(&cs) {
        out.push(
            CheckReport::new(t.id(), *c, 1.0, t.budget, c.is_finite() && *c <= t.budget)
                .with_ratio(*c)
                .with_sweep(format!("part=constant;r={r}"))
                .with_notes(format!("tail<={tail:.3e}")),
        );
    }
    let mono = cs.windows(2).map(|w| (w[1].0 - w[0].0) / w[1].0).fold(f64::INFINITY, f64::min);
    out.push(CheckReport::witness(t.id(), mono, 1e-12).with_sweep("part=monotone-in-r".into()));
    let (big, _) = filtration_fixture(l, 2 * l.n)?;
    let c1 = dyadic::domination_constant(&fix, l.filtration_t, l.r, l.k_min)?.0;
    let c2 = dyadic::domination_constant(&big, l.filtration_t, l.r, l.k_min)?.0;
    let drift = (c2 / c1 - 1.0).abs();
    out.push(
        CheckReport::new(t.id(), c1, c2, 0.05, drift <= 0.05)
            .with_ratio(drift)
            .with_sweep(format!("part=size-doubling;r={}", l.r)),
    );
    Ok(out)
}

/// Per-t L^½ constants of the line kernels; t values run in parallel with their own seeds.
fn line_constants(l: &LineSettings, n: usize, h: f64, seed: u64) -> Result<Vec<f64>> {
    let fix = line_fixture(l, n, h)?;
    l.ts
        .par_iter()
        .enumerate()
        .map(|(i, &time)| dyadic::lhalf_at(&fix, time, l.probe_budget, &mut sample::rng(seed ^ (i as u64 + 1) << 32)))
        .collect()
}

fn run_line_lhalf(t: &Task) -> Result<Vec<CheckReport>> {
    let l = t.line;
    let fix = line_fixture(l, l.n, l.h)?;
    let hypotheses = l.ts.iter().all(|&time| {
        matches!(dyadic::kernel_bound_constant(&fix, time, l.r, fix.scale(time)), Ok(c) if c <= 1.0)
    });
    let base = line_constants(l, l.n, l.h, t.seed)?;
    let fine = line_constants(l, 2 * l.n, l.h / 2.0, t.seed)?;
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = max(&base) / min(&base);
    let drift = (max(&fine) / max(&base) - 1.0).abs();
    let note = if hypotheses { String::new() } else { "hypothesis-not-satisfied".to_string() };
    let gate = |ok: bool| ok || !hypotheses;
    let mut out = Vec::new();
    for (n, vals) in [(l.n, &base), (2 * l.n, &fine)] {
        for (time, v) in l.ts.iter().zip(vals.iter()) {
            out.push(
                CheckReport::new(t.id(), *v, 1.0, f64::NAN, v.is_finite())
                    .with_ratio(*v)
                    .with_sweep(format!("part=constant;n={n};t={time:.6e}")),
            );
        }
    }
    out.push(
        CheckReport::new(t.id(), max(&base), min(&base), t.budget, gate(spread <= t.budget))
            .with_ratio(spread)
            .with_sweep(format!("part=spread;n={}", l.n))
            .with_notes(note.clone()),
    );
    out.push(
        CheckReport::new(t.id(), max(&base), max(&fine), 0.10, gate(drift <= 0.10))
            .with_ratio(drift)
            .with_sweep(format!("part=size-doubling;n={}", 2 * l.n))
            .with_notes(note),
    );
    Ok(out)
}

// ---------------------------------------------------------------------------------------------

macro_rules! spec {
    ($id:literal, $module:literal, $scope:ident, $policy:expr, $samples:expr, $run:ident, $stmt:literal) => {
        CheckSpec {
            id: $id,
            module: $module,
            statement: $stmt,
            scope: Scope::$scope,
            policy: $policy,
            samples: $samples,
            run: $run,
        }
    };
}

use Policy::{ExactConstant as Exact, RecordEmpirical as Empirical, Tolerance, UniformityAcrossSweep as Uniform};

pub static REGISTRY: &[CheckSpec] = &[
    spec!("semigroup-axioms", "semigroup-engine", Algebra, Tolerance(1e-10), 200, run_axioms,
        "T_sT_t = T_{s+t}, symmetry, T_t1 = 1, positivity, continuity at 0, Kadison-Schwarz"),
    spec!("kadison-schwarz", "semigroup-engine", Algebra, Tolerance(1e-10), 200, run_kadison_schwarz,
        "T(|x|^2) >= |T(x)|^2 for heat and Poisson operators"),
    spec!("weighted-cauchy-schwarz", "tent-spaces", Algebra, Tolerance(1e-8), 20, run_weighted_cs,
        "|tau int a* b| <= [tau int T_s(S^-1)|a|^2]^1/2 [tau int T_s(S)|b|^2]^1/2"),
    spec!("min-alpha", "semigroup-engine", Algebra, Empirical(64.0), 0, run_min_alpha,
        "least alpha with T_t <= (t/s)^alpha T_s (decreasing) or (s/t)^alpha (increasing)"),
    spec!("time-derivative-fd", "semigroup-engine", Algebra, Tolerance(1e-6), 20, run_time_derivative,
        "spectral d/dt and d2/dt2 of both flows agree with central differences"),
    spec!("poisson-routes", "subordination", Algebra, Tolerance(1e-6), 0, run_routes,
        "spectral P_y equals the subordination integral of T_u"),
    spec!("poisson-scalar-identity", "subordination", Global, Tolerance(1e-8), 0, run_scalar_identity,
        "(1/2sqrt(pi)) int y e^{-y^2/4u} u^{-3/2} e^{-lambda u} du = e^{-y sqrt(lambda)}"),
    spec!("poisson-pde", "subordination", Algebra, Tolerance(1e-5), 4, run_pde,
        "(d^2/dy^2 + L) P_y x = 0"),
    spec!("py-over-y", "subordination", Algebra, Tolerance(1e-12), 10, run_py_over_y,
        "P_y(f)/y decreases in y for positive f"),
    spec!("square-function-order-decreasing", "tent-spaces", Algebra, Exact("2^{alpha/2}"), 10, run_square_order_decreasing,
        "quasi-decreasing flows: tilde S_s <= 2^{alpha/2} S_s, T_{s/2}S_s decreasing, derivative sign"),
    spec!("square-function-order-increasing", "tent-spaces", Algebra, Exact("1"), 10, run_square_order_increasing,
        "quasi-increasing flows: tilde S_s <= S_s, T_{s/2}S_s decreasing, derivative sign"),
    spec!("tent-duality-bound", "tent-spaces", Algebra, Exact("4*2^{3alpha/2}"), 200, run_tent_duality,
        "|<A,B>|^2 <= 4*2^{3alpha/2} |B|^2_Tinf |A|^2_T1"),
    spec!("lhalf-constant", "tent-spaces", Algebra, Empirical(8.0), 50, run_lhalf,
        "|T_y[(T_y g)^1/2 f (T_y g)^1/2]|_1/2 <= c |f|_1 |g|_1"),
    spec!("lhalf-necessity-display", "tent-spaces", Algebra, Exact("1"), 50, run_necessity,
        "tau(int_0^t T_y[(T_t f)^1/2 |g_y|^2 (T_t f)^1/2] dy/y)^1/2 <= |int_0^t |g_y|^2 dy/y|_1^1/2 |f|_1^1/2"),
    spec!("tinf-dual-lower-bound", "tent-spaces", Algebra, Empirical(8.0), 5, run_tinf_dual,
        "|T_t|h|^2|_inf^1/2 <= c sup{|tau f h*| : tau (T_t|f|^2)^1/2 <= 1}"),
    spec!("doubled-tent-interpolation", "tent-spaces", Algebra, Empirical(16.0), 100, run_doubled_tent,
        "|(T_{2s}A_s)|^2_T1 <= c |A|_T1 tau(int |T_sA_s|^2 ds/s)^1/2"),
    spec!("tent-doubling-equivalence", "tent-spaces", Algebra, Empirical(8.0), 50, run_tent_doubling,
        "|A|_T1(T_s) and |A|_T1(T_2s) are equivalent"),
    spec!("gamma-positive", "hardy-bmo-poisson", Algebra, Tolerance(1e-10), 200, run_gamma_positive,
        "Gamma(x, x) >= 0"),
    spec!("gamma-tilde-identity", "hardy-bmo-poisson", Algebra, Tolerance(1e-8), 20, run_gamma_tilde,
        "2 tilde Gamma(P_s x, P_s y) = tilde L((P_s x)* P_s y)"),
    spec!("bmo-pointwise-lower-bound", "hardy-bmo-poisson", Algebra, Tolerance(1e-9), 5, run_bmo_pointwise,
        "P_y|phi|^2 >= int sy/(s+y) P_{s+y} tilde Gamma(P_s phi, P_s phi) ds/s"),
    spec!("carleson-embedding", "hardy-bmo-poisson", Algebra, Empirical(16.0), 10, run_carleson,
        "s d/ds P_s(phi - P_s phi) is a Carleson tent with norm <= c |phi|_BMO"),
    spec!("poisson-h1-bmo-duality", "hardy-bmo-poisson", Algebra, Empirical(32.0), 20, run_poisson_h1_bmo_duality,
        "|tau f phi*| <= c |f|_H1 (Poisson average) |phi|_BMO"),
    spec!("h1-bmo-duality", "hardy-bmo-poisson", Algebra, Empirical(32.0), 20, run_h1_bmo_duality,
        "|tau f phi*| <= c |f|_H1 |phi|_BMO"),
    spec!("bmo-heat-poisson-equivalence", "hardy-bmo-poisson", Algebra, Empirical(8.0), 10, run_bmo_equivalence,
        "BMO norms built from P_y and from T_y are equivalent"),
    spec!("bmo-atom-duality", "hardy-bmo-poisson", Algebra, Empirical(8.0), 2, run_atom_duality,
        "|phi|_BMO is comparable to the sup of |tau phi f*| over atoms b (T_{t^2} a)^1/2"),
    spec!("poisson-kernel-splits", "hardy-bmo-poisson", Algebra, Empirical(16.0), 0, run_splits,
        "pieces of the subordination kernel: reconstruction, order bounds, factorization"),
    spec!("poisson-derivative-bounds", "hardy-bmo-poisson", Algebra, Exact("3(3^alpha alpha + 2^alpha)"), 0, run_derivative_bounds,
        "y dT_y/dy between -c T_{2y/3} and alpha T_y (or -alpha T_y and c T_{2y})"),
    spec!("atom-inner-square", "hardy-bmo-poisson", Algebra, Empirical(4.0), 10, run_atom_inner,
        "tau(int_0^t T_{t^2}|dP_s f/ds|^2 s ds)^1/2 <= c for atoms f"),
    spec!("atom-outer-square", "hardy-bmo-poisson", Algebra, Empirical(4.0), 10, run_atom_outer,
        "tau(int_t^inf T_{ks^2}|dP_s f/ds|^2 s ds)^1/2 <= c for atoms f"),
    spec!("subordinated-h1-bound", "hardy-bmo-poisson", Algebra, Empirical(16.0), 10, run_subordinated_h1,
        "|g|_H1 <= c tau(int |T_{ks^2/8} dP_s g/ds|^2 s ds)^1/2"),
    spec!("atom-h1-bound", "hardy-bmo-poisson", Algebra, Empirical(4.0), 10, run_atom_h1,
        "|f|_H1 <= c for atoms f"),
    spec!("gradient-square-factor-2", "general-hardy-bmo", Algebra, Exact("2"), 10, run_gradient_square,
        "|f|_HG <= 2 |f|_HS"),
    spec!("general-h1-bmo-duality", "general-hardy-bmo", Algebra, Empirical(64.0), 20, run_general_duality,
        "|tau f phi*| <= c |f|_HS |phi|_BMO^C"),
    spec!("truncated-square-relations", "general-hardy-bmo", Algebra, Tolerance(1e-8), 3, run_truncated_squares,
        "G_s <= S_s, monotonicity and derivative sign of the truncated squares"),
    spec!("carleson-pairing-factor-3", "general-hardy-bmo", Algebra, Exact("3"), 10, run_carleson_pairing,
        "|tau int dT_{3s}f phi_s* s ds| <= 3 sup|T_{y/2} int_0^y |phi|^2|^1/2 |G f|_1^1/2 |S f|_1^1/2"),
    spec!("square-gradient-equivalence", "general-hardy-bmo", Algebra, Empirical(16.0), 10, run_square_gradient_equivalence,
        "|f|_HS <= c |f|_HG under the L^1/2 and doubling hypotheses"),
    spec!("duality-drift", "general-hardy-bmo", Algebra, Uniform(0.10), 0, run_duality_drift,
        "duality constants on the lowest mode drift <= budget under grid and size doubling"),
    spec!("kernel-tail-bound", "dyadic-appendix", Line, Empirical(1.0), 0, run_kernel_bound,
        "K_t(x,s) <= c phi^r/(phi^{1+r} + |x-s|^{1+r})"),
    spec!("dyadic-nesting", "dyadic-appendix", Line, Exact("4"), 8, run_nesting,
        "E_k f <= 4 E_{k-1} f for plain and shifted filtrations"),
    spec!("shifted-dyadic-overlap", "dyadic-appendix", Line, Exact("3"), 8, run_overlap,
        "E_k f <= 3 E'_k E_k f and E'_k f <= 3 E_k E'_k f"),
    spec!("kernel-dyadic-domination", "dyadic-appendix", Line, Empirical(1e4), 0, run_domination,
        "T_t f <= c sum_k 4^{kr}(E_k f + E'_k f)"),
    spec!("line-lhalf-uniformity", "dyadic-appendix", Line, Uniform(2.0), 0, run_line_lhalf,
        "L^1/2 constant of the line kernels is uniform in t and stable under refinement"),
];
