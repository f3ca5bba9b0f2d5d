//! Symmetric Markov semigroups T_t = e^{tL} and their subordinated Poisson flows, evaluated
//! by spectral calculus from a single factorization of the generator.

use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{AlgebraContext, Element, PositivityWitness, Shape, POSITIVITY_TOL};
use crate::error::{invalid, Error, Result};
use crate::linalg::{symmetric_eigen, CMat, HermitianEigen, C64};
use crate::report::CheckReport;

/// Eigenvalues this close to zero are treated as the invariant subspace.
const ZERO_EIGEN: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorForm {
    /// Row-major L acting on functions, (Lf)_i = Σ_j L_ij f_j.
    Markov(Vec<f64>),
    /// Symbol ψ; T_t acts entrywise by e^{-tψ_ij}.
    Schur(Vec<f64>),
}

#[derive(Clone, Debug)]
enum Spectral {
    Markov {
        lambda: Vec<f64>,
        /// D^{-1/2} V, row-major n x n.
        left: Vec<f64>,
        /// V^T D^{1/2}, row-major n x n.
        right: Vec<f64>,
    },
    Schur {
        /// -ψ_ij, row-major.
        lambda: Vec<f64>,
    },
}

/// Which one-parameter family generated by L.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flow {
    /// T_t = e^{tL}.
    Heat,
    /// P_t = e^{-t√(-L)}.
    Poisson,
}

impl Flow {
    /// Rate r(λ) with the flow equal to e^{t r(λ)}.
    #[inline]
    pub fn rate(self, lambda: f64) -> f64 {
        match self {
            Flow::Heat => lambda,
            Flow::Poisson => -libm::sqrt(-lambda),
        }
    }

    /// d^k/dt^k e^{t r(λ)}.
    #[inline]
    pub fn symbol(self, lambda: f64, t: f64, order: u32) -> f64 {
        let r = self.rate(lambda);
        let base = libm::exp(t * r);
        match order {
            0 => base,
            1 => r * base,
            2 => r * r * base,
            k => libm::pow(r, k as f64) * base,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Generator {
    ctx: AlgebraContext,
    form: GeneratorForm,
    spectral: Spectral,
}

impl Generator {
    pub fn markov(ctx: AlgebraContext, l: Vec<f64>) -> Result<Self> {
        let weights = match &ctx {
            AlgebraContext::Commutative { weights } => weights.clone(),
            AlgebraContext::Matrix { .. } => return Err(invalid("Markov generators need a commutative context")),
        };
        let n = weights.len();
        if l.len() != n * n {
            return Err(Error::ContextMismatch);
        }
        let scale = l.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            let row: f64 = l[i * n..(i + 1) * n].iter().sum();
            if row.abs() > 1e-12 * scale {
                return Err(invalid("generator rows must sum to zero"));
            }
            for j in 0..n {
                if i != j && l[i * n + j] < 0.0 {
                    return Err(invalid("generator off-diagonal entries must be nonnegative"));
                }
                let d = weights[i] * l[i * n + j] - weights[j] * l[j * n + i];
                if d.abs() > 1e-12 * scale {
                    return Err(invalid("generator must be symmetric with respect to the weights"));
                }
            }
        }
        let sq: Vec<f64> = weights.iter().map(|w| libm::sqrt(*w)).collect();
        let mut sym = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                sym[i * n + j] = sq[i] * l[i * n + j] / sq[j];
            }
        }
        for i in 0..n {
            for j in 0..i {
                let avg = 0.5 * (sym[i * n + j] + sym[j * n + i]);
                sym[i * n + j] = avg;
                sym[j * n + i] = avg;
            }
        }
        let (mut lambda, v) = symmetric_eigen(n, &sym);
        for x in lambda.iter_mut() {
            *x = if x.abs() <= ZERO_EIGEN * scale { 0.0 } else { x.min(0.0) };
        }
        let mut left = vec![0.0; n * n];
        let mut right = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                left[i * n + k] = v[i * n + k] / sq[i];
                right[k * n + i] = v[i * n + k] * sq[i];
            }
        }
        Ok(Generator { ctx, form: GeneratorForm::Markov(l), spectral: Spectral::Markov { lambda, left, right } })
    }

    pub fn schur(ctx: AlgebraContext, psi: Vec<f64>) -> Result<Self> {
        let n = match &ctx {
            AlgebraContext::Matrix { n } => *n,
            AlgebraContext::Commutative { .. } => return Err(invalid("Schur symbols need a matrix context")),
        };
        if psi.len() != n * n {
            return Err(Error::ContextMismatch);
        }
        let scale = psi.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            if psi[i * n + i].abs() > 1e-14 * scale {
                return Err(invalid("Schur symbol must vanish on the diagonal"));
            }
            for j in 0..n {
                if (psi[i * n + j] - psi[j * n + i]).abs() > 1e-14 * scale {
                    return Err(invalid("Schur symbol must be symmetric"));
                }
            }
        }
        // Conditional negativity: P ψ P ⪯ 0 with P the projection off constants.
        let mut p = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                p[i * n + j] = if i == j { 1.0 } else { 0.0 } - 1.0 / n as f64;
            }
        }
        let pm = CMat::from_real(n, &p);
        let ppsip = pm.matmul(&CMat::from_real(n, &psi)).matmul(&pm);
        if HermitianEigen::new(&ppsip).values.last().copied().unwrap_or(0.0) > 1e-10 * scale {
            return Err(invalid("Schur symbol must be conditionally negative definite"));
        }
        let lambda = psi.iter().map(|v| -v).collect();
        Ok(Generator { ctx, form: GeneratorForm::Schur(psi), spectral: Spectral::Schur { lambda } })
    }

    pub fn ctx(&self) -> &AlgebraContext {
        &self.ctx
    }

    pub fn form(&self) -> &GeneratorForm {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    /// Spectrum of L (for Schur symbols, the entries -ψ_ij).
    pub fn eigenvalues(&self) -> Vec<f64> {
        match &self.spectral {
            Spectral::Markov { lambda, .. } | Spectral::Schur { lambda } => lambda.clone(),
        }
    }

    /// Smallest nonzero |λ|, if any.
    pub fn spectral_gap(&self) -> Option<f64> {
        self.eigenvalues().iter().filter(|v| **v < 0.0).map(|v| -v).fold(None, |m: Option<f64>, v| {
            Some(m.map_or(v, |m| m.min(v)))
        })
    }

    /// Operator f(L), realized as a kernel or Schur symbol.
    pub fn spectral_op(&self, f: impl Fn(f64) -> f64) -> Operator {
        let values: Vec<f64> = self.eigenvalues().iter().map(|&l| f(l)).collect();
        self.spectral_op_values(&values)
    }

    /// Operator with the given value on each entry of `eigenvalues()`.
    pub fn spectral_op_values(&self, fl: &[f64]) -> Operator {
        match &self.spectral {
            Spectral::Markov { lambda, left, right } => {
                let n = lambda.len();
                assert_eq!(fl.len(), n, "one value per eigenvalue");
                let mut a = vec![0.0; n * n];
                for i in 0..n {
                    for k in 0..n {
                        let c = left[i * n + k] * fl[k];
                        if c == 0.0 {
                            continue;
                        }
                        let row = &right[k * n..(k + 1) * n];
                        for (dst, &r) in a[i * n..(i + 1) * n].iter_mut().zip(row) {
                            *dst += c * r;
                        }
                    }
                }
                Operator::Kernel { n, a }
            }
            Spectral::Schur { lambda } => {
                assert_eq!(fl.len(), lambda.len(), "one value per symbol entry");
                Operator::Schur { n: self.dim(), m: fl.to_vec() }
            }
        }
    }

    /// f(L) x without forming f(L).
    pub fn spectral_apply(&self, f: impl Fn(f64) -> f64, x: &Element) -> Element {
        assert_eq!(x.shape(), self.ctx.shape(), "element shape mismatch");
        match &self.spectral {
            Spectral::Markov { lambda, left, right } => {
                let n = lambda.len();
                let xd = x.data();
                let mut coef = vec![C64::new(0.0, 0.0); n];
                for k in 0..n {
                    let fk = f(lambda[k]);
                    if fk == 0.0 {
                        continue;
                    }
                    let row = &right[k * n..(k + 1) * n];
                    let s: C64 = row.iter().zip(xd).map(|(&r, &v)| v * r).sum();
                    coef[k] = s * fk;
                }
                let mut out = vec![C64::new(0.0, 0.0); n];
                for i in 0..n {
                    let row = &left[i * n..(i + 1) * n];
                    out[i] = row.iter().zip(&coef).map(|(&l, &c)| c * l).sum();
                }
                Element::from_parts(x.shape(), out)
            }
            Spectral::Schur { lambda } => Element::from_parts(
                x.shape(),
                x.data().iter().zip(lambda).map(|(&v, &l)| v * f(l)).collect(),
            ),
        }
    }

    /// The flow at time t as an operator.
    pub fn evaluate(&self, flow: Flow, t: f64) -> Result<Operator> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(invalid("time must be nonnegative and finite"));
        }
        Ok(self.spectral_op(|l| flow.symbol(l, t, 0)))
    }

    pub fn heat(&self, t: f64) -> Result<Operator> {
        self.evaluate(Flow::Heat, t)
    }

    /// Spectral route for P_y.
    pub fn poisson(&self, y: f64) -> Result<Operator> {
        self.evaluate(Flow::Poisson, y)
    }

    /// Flow applied to x (t ≥ 0 assumed).
    pub fn apply(&self, flow: Flow, t: f64, x: &Element) -> Element {
        self.spectral_apply(|l| flow.symbol(l, t, 0), x)
    }

    /// d^order/dt^order of the flow at time t applied to x.
    pub fn time_derivative(&self, flow: Flow, t: f64, order: u32, x: &Element) -> Result<Element> {
        if !(t >= 0.0) {
            return Err(invalid("time must be nonnegative"));
        }
        if order == 0 || order > 2 {
            return Err(invalid("order must be 1 or 2"));
        }
        Ok(self.derivative_apply(flow, t, order, x))
    }

    pub(crate) fn derivative_apply(&self, flow: Flow, t: f64, order: u32, x: &Element) -> Element {
        self.spectral_apply(|l| flow.symbol(l, t, order), x)
    }

    /// d/dt of the flow at time t, as an operator.
    pub fn derivative_op(&self, flow: Flow, t: f64) -> Operator {
        self.spectral_op(|l| flow.symbol(l, t, 1))
    }

    /// L x.
    pub fn generator_apply(&self, x: &Element) -> Element {
        self.spectral_apply(|l| l, x)
    }

    /// Projection onto the kernel of L (the t → ∞ limit of either flow).
    pub fn ergodic_projection(&self, x: &Element) -> Element {
        self.spectral_apply(|l| if l == 0.0 { 1.0 } else { 0.0 }, x)
    }

    pub fn identity_op(&self) -> Operator {
        self.spectral_op(|_| 1.0)
    }
}

/// Realized operator: a kernel acting on functions or a Schur multiplier symbol.
#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    /// (Af)_i = Σ_j a_ij f_j, row-major.
    Kernel { n: usize, a: Vec<f64> },
    /// (Ax)_ij = m_ij x_ij, row-major.
    Schur { n: usize, m: Vec<f64> },
}

impl Operator {
    pub fn dim(&self) -> usize {
        match self {
            Operator::Kernel { n, .. } | Operator::Schur { n, .. } => *n,
        }
    }

    pub fn entries(&self) -> &[f64] {
        match self {
            Operator::Kernel { a, .. } => a,
            Operator::Schur { m, .. } => m,
        }
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        match (self, x.shape()) {
            (Operator::Kernel { n, a }, Shape::Vector(k)) if *n == k => {
                let xd = x.data();
                let out = (0..k)
                    .map(|i| a[i * k..(i + 1) * k].iter().zip(xd).map(|(&w, &v)| v * w).sum())
                    .collect();
                Ok(Element::from_parts(x.shape(), out))
            }
            (Operator::Schur { n, m }, Shape::Matrix(k)) if *n == k => Ok(Element::from_parts(
                x.shape(),
                x.data().iter().zip(m).map(|(&v, &w)| v * w).collect(),
            )),
            _ => Err(Error::ContextMismatch),
        }
    }

    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        match (self, other) {
            (Operator::Kernel { n, a }, Operator::Kernel { n: k, a: b }) if n == k => {
                let n = *n;
                let mut c = vec![0.0; n * n];
                for i in 0..n {
                    for l in 0..n {
                        let x = a[i * n + l];
                        for j in 0..n {
                            c[i * n + j] += x * b[l * n + j];
                        }
                    }
                }
                Ok(Operator::Kernel { n, a: c })
            }
            (Operator::Schur { n, m }, Operator::Schur { n: k, m: w }) if n == k => {
                Ok(Operator::Schur { n: *n, m: m.iter().zip(w).map(|(x, y)| x * y).collect() })
            }
            _ => Err(Error::IncompatibleOperators),
        }
    }

    /// a·self + b·other.
    pub fn combine(&self, a: f64, other: &Operator, b: f64) -> Result<Operator> {
        match (self, other) {
            (Operator::Kernel { n, a: x }, Operator::Kernel { n: k, a: y }) if n == k => {
                Ok(Operator::Kernel { n: *n, a: x.iter().zip(y).map(|(p, q)| a * p + b * q).collect() })
            }
            (Operator::Schur { n, m: x }, Operator::Schur { n: k, m: y }) if n == k => {
                Ok(Operator::Schur { n: *n, m: x.iter().zip(y).map(|(p, q)| a * p + b * q).collect() })
            }
            _ => Err(Error::IncompatibleOperators),
        }
    }

    pub fn scaled(&self, c: f64) -> Operator {
        match self {
            Operator::Kernel { n, a } => Operator::Kernel { n: *n, a: a.iter().map(|v| v * c).collect() },
            Operator::Schur { n, m } => Operator::Schur { n: *n, m: m.iter().map(|v| v * c).collect() },
        }
    }

    /// Positivity of the operator itself: min kernel entry, or min eigenvalue of the symbol
    /// (a Schur multiplier is completely positive iff its symbol is positive semidefinite).
    pub fn positivity(&self) -> f64 {
        match self {
            Operator::Kernel { a, .. } => a.iter().fold(f64::INFINITY, |m, v| m.min(*v)),
            Operator::Schur { n, m } => HermitianEigen::new(&CMat::from_real(*n, m)).min(),
        }
    }

    /// ∞→∞ norm (max absolute row sum) for kernels; max symbol entry for Schur multipliers.
    pub fn norm(&self) -> f64 {
        match self {
            Operator::Kernel { n, a } => (0..*n)
                .map(|i| a[i * n..(i + 1) * n].iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max),
            Operator::Schur { m, .. } => m.iter().fold(0.0, |acc, v| acc.max(v.abs())),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// Witness for A ≥ B, i.e. positivity of A − B.
pub fn operator_order(a: &Operator, b: &Operator) -> Result<PositivityWitness> {
    let d = a.combine(1.0, b, -1.0)?;
    Ok(PositivityWitness { value: d.positivity(), tolerance: POSITIVITY_TOL })
}

/// T(|x|²) − |T(x)|² ⪰ 0.
pub fn check_kadison_schwarz(t: &Operator, x: &Element) -> Result<CheckReport> {
    let lhs = t.apply(&x.abs_sq())?;
    let tx = t.apply(x)?;
    let diff = lhs.sub(&tx.abs_sq());
    let w = diff.min_witness();
    Ok(CheckReport::witness("kadison-schwarz", w, POSITIVITY_TOL))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// T_y / y^α decreasing: T_t ≤ (t/s)^α T_s for s ≤ t.
    QuasiDecreasing,
    /// y^α T_y increasing: T_t ≤ (s/t)^α T_s for t ≤ s.
    QuasiIncreasing,
    Neither,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityReport {
    pub direction: Direction,
    /// Meaningful only when `direction != Neither`.
    pub minimal_alpha: f64,
    /// Binding constraint; equal entries mean the infinitesimal (derivative) form at that time.
    pub worst_pair: (f64, f64),
    /// Worst witness at `minimal_alpha - 1e-3` (negative when the bound is tight).
    pub residual: f64,
}

impl MonotonicityReport {
    pub fn alpha(&self) -> Option<f64> {
        if self.direction == Direction::Neither {
            None
        } else {
            Some(self.minimal_alpha)
        }
    }
}

const ALPHA_MAX: f64 = 64.0;
const ALPHA_TOL: f64 = 1e-4;
const ORDER_TOL: f64 = 1e-12;

enum Constraint {
    /// Times a < b (indices into the time table).
    Pair(usize, usize),
    /// Derivative form at one time.
    Local(usize),
}

struct AlphaProblem {
    times: Vec<f64>,
    ops: Vec<Operator>,
    ders: Vec<Operator>,
    constraints: Vec<Constraint>,
    direction: Direction,
}

impl AlphaProblem {
    fn combo(&self, c: &Constraint, alpha: f64) -> Operator {
        match *c {
            Constraint::Pair(i, j) => {
                let (a, b) = (self.times[i], self.times[j]);
                let f = libm::pow(b / a, alpha);
                match self.direction {
                    Direction::QuasiDecreasing => self.ops[i].combine(f, &self.ops[j], -1.0),
                    _ => self.ops[j].combine(f, &self.ops[i], -1.0),
                }
                .expect("operators from one generator")
            }
            Constraint::Local(i) => {
                let y = self.times[i];
                match self.direction {
                    Direction::QuasiDecreasing => self.ops[i].combine(alpha / y, &self.ders[i], -1.0),
                    _ => self.ops[i].combine(alpha / y, &self.ders[i], 1.0),
                }
                .expect("operators from one generator")
            }
        }
    }

    fn witness(&self, c: &Constraint, alpha: f64) -> f64 {
        let op = self.combo(c, alpha);
        let scale = op.max_abs().max(self.scale_of(c, alpha));
        op.positivity() / scale.max(f64::MIN_POSITIVE)
    }

    fn scale_of(&self, c: &Constraint, alpha: f64) -> f64 {
        match *c {
            Constraint::Pair(i, j) => {
                let f = libm::pow(self.times[j] / self.times[i], alpha);
                f * self.ops[i].max_abs().max(self.ops[j].max_abs())
            }
            Constraint::Local(i) => (alpha / self.times[i]) * self.ops[i].max_abs() + self.ders[i].max_abs(),
        }
    }

    fn holds(&self, alpha: f64) -> bool {
        self.constraints.iter().all(|c| self.witness(c, alpha) >= -ORDER_TOL)
    }

    fn worst(&self, alpha: f64) -> (f64, f64, f64) {
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for c in &self.constraints {
            let w = self.witness(c, alpha);
            if w < best.0 {
                let pair = match *c {
                    Constraint::Pair(i, j) => (self.times[i], self.times[j]),
                    Constraint::Local(i) => (self.times[i], self.times[i]),
                };
                best = (w, pair.0, pair.1);
            }
        }
        best
    }
}

fn local_alpha(gen: &Generator, flow: Flow, direction: Direction, y: f64) -> f64 {
    let p = AlphaProblem {
        times: vec![y],
        ops: vec![gen.spectral_op(|l| flow.symbol(l, y, 0))],
        ders: vec![gen.spectral_op(|l| flow.symbol(l, y, 1))],
        constraints: vec![Constraint::Local(0)],
        direction,
    };
    if p.holds(0.0) {
        return 0.0;
    }
    if !p.holds(ALPHA_MAX) {
        return ALPHA_MAX;
    }
    let (mut lo, mut hi) = (0.0, ALPHA_MAX);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if p.holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Least α for which the quasi-monotone order condition holds on the scanned window.
///
/// The scan combines all node pairs, near-coincident pairs (ratios 1.01 and 1.1) and the
/// derivative form of the condition at every node and at a golden-section refinement of the
/// worst node.
pub fn find_min_alpha(
    gen: &Generator,
    flow: Flow,
    direction: Direction,
    window: (f64, f64),
    scan_density: usize,
) -> Result<MonotonicityReport> {
    let (t_min, t_max) = window;
    if !(t_min > 0.0) || !(t_max > t_min) {
        return Err(invalid("time window must satisfy 0 < t_min < t_max"));
    }
    if scan_density < 16 {
        return Err(invalid("scan density must be at least 16"));
    }
    if direction == Direction::Neither {
        return Err(invalid("direction must be QuasiDecreasing or QuasiIncreasing"));
    }
    let m = scan_density;
    let ratio = libm::pow(t_max / t_min, 1.0 / (m - 1) as f64);
    let mut nodes: Vec<f64> = (0..m).map(|i| t_min * libm::pow(ratio, i as f64)).collect();
    nodes[m - 1] = t_max;

    // Refine the worst node of the derivative condition.
    let local: Vec<f64> = nodes.iter().map(|&y| local_alpha(gen, flow, direction, y)).collect();
    let (k, _) = local
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let lo = libm::log(nodes[k.saturating_sub(1)]);
    let hi = libm::log(nodes[(k + 1).min(m - 1)]);
    let refined = golden_max(lo, hi, 60, |v| local_alpha(gen, flow, direction, libm::exp(v)));

    let mut times = nodes.clone();
    let mut constraints = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            constraints.push(Constraint::Pair(i, j));
        }
        constraints.push(Constraint::Local(i));
    }
    for &r in &[1.01, 1.1] {
        for i in 0..m {
            let b = nodes[i] * r;
            if b <= t_max {
                times.push(b);
                constraints.push(Constraint::Pair(i, times.len() - 1));
            }
        }
    }
    times.push(libm::exp(refined));
    constraints.push(Constraint::Local(times.len() - 1));

    let ops: Vec<Operator> = times.iter().map(|&t| gen.spectral_op(|l| flow.symbol(l, t, 0))).collect();
    let ders: Vec<Operator> = times.iter().map(|&t| gen.spectral_op(|l| flow.symbol(l, t, 1))).collect();
    let problem = AlphaProblem { times, ops, ders, constraints, direction };

    if !problem.holds(ALPHA_MAX) {
        let (w, s, t) = problem.worst(ALPHA_MAX);
        return Ok(MonotonicityReport { direction: Direction::Neither, minimal_alpha: f64::NAN, worst_pair: (s, t), residual: w });
    }
    let alpha = if problem.holds(0.0) {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0, ALPHA_MAX);
        while hi - lo > ALPHA_TOL {
            let mid = 0.5 * (lo + hi);
            if problem.holds(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let probe = (alpha - 1e-3).max(0.0);
    let (w, s, t) = problem.worst(probe);
    Ok(MonotonicityReport { direction, minimal_alpha: alpha, worst_pair: (s, t), residual: w })
}

fn golden_max(mut a: f64, mut b: f64, iters: usize, f: impl Fn(f64) -> f64) -> f64 {
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        c
    } else {
        d
    }
}

/// Smallest c with T_{2s} ≤ c T_s at every grid time (entrywise / symbol-PSD order).
pub fn doubling_constant(gen: &Generator, flow: Flow, times: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for &s in times {
        let a = gen.spectral_op(|l| flow.symbol(l, 2.0 * s, 0));
        let b = gen.spectral_op(|l| flow.symbol(l, s, 0));
        let ok = |c: f64| b.combine(c, &a, -1.0).map(|d| d.positivity() >= -1e-12 * c.max(1.0)).unwrap_or(false);
        if ok(worst) {
            continue;
        }
        let (mut lo, mut hi) = (worst, worst.max(1.0));
        while !ok(hi) {
            lo = hi;
            hi *= 2.0;
            if hi > 1e12 {
                return f64::INFINITY;
            }
        }
        while hi - lo > 1e-9 * hi {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        worst = hi;
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn tp_kernel_at_one() {
        let g = fixtures::two_point();
        let t = g.heat(1.0).unwrap();
        let e = libm::exp(-2.0);
        let want = [0.5 * (1.0 + e), 0.5 * (1.0 - e), 0.5 * (1.0 - e), 0.5 * (1.0 + e)];
        for (a, b) in t.entries().iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((t.entries()[0] - 0.567668).abs() < 1e-6);
    }

    #[test]
    fn zero_time_is_identity() {
        for g in [fixtures::two_point(), fixtures::cycle(8), fixtures::schur_two()] {
            let t = g.heat(0.0).unwrap();
            let id = g.identity_op();
            for (a, b) in t.entries().iter().zip(id.entries()) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn schur_symbol_at_one() {
        let g = fixtures::schur_two();
        let t = g.heat(1.0).unwrap();
        let e = libm::exp(-1.0);
        for (a, b) in t.entries().iter().zip([1.0, e, e, 1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn apply_examples() {
        let g = fixtures::two_point();
        let phi = g.ctx().from_real(&[1.0, -1.0]).unwrap();
        let y = g.heat(1.0).unwrap().apply(&phi).unwrap();
        assert!((y.data()[0].re - 0.135335).abs() < 1e-6);
        assert!((y.data()[1].re + libm::exp(-2.0)).abs() < 1e-14);
        let one = g.ctx().one();
        let y = g.heat(3.7).unwrap().apply(&one).unwrap();
        assert!(y.data().iter().all(|v| (v.re - 1.0).abs() < 1e-14));
        let s = fixtures::schur_two();
        let x = s.ctx().from_real(&[0.0, 1.0, 1.0, 0.0]).unwrap();
        let y = s.heat(1.0).unwrap().apply(&x).unwrap();
        assert!((y.data()[1].re - libm::exp(-1.0)).abs() < 1e-15);
        assert_eq!(y.data()[0].re, 0.0);
    }

    #[test]
    fn derivative_examples() {
        let g = fixtures::two_point();
        let phi = g.ctx().from_real(&[1.0, -1.0]).unwrap();
        let d = g.time_derivative(Flow::Heat, 1.0, 1, &phi).unwrap();
        assert!((d.data()[0].re + 0.270671).abs() < 1e-6);
        let d2 = g.time_derivative(Flow::Heat, 0.5, 2, &phi).unwrap();
        assert!((d2.data()[0].re - 1.471518).abs() < 1e-6);
        let c = g.time_derivative(Flow::Heat, 0.5, 1, &g.ctx().one()).unwrap();
        assert!(c.max_abs() < 1e-14);
        assert!(g.time_derivative(Flow::Heat, -1.0, 1, &phi).is_err());
    }

    #[test]
    fn kadison_schwarz_examples() {
        let g = fixtures::two_point();
        let phi = g.ctx().from_real(&[1.0, -1.0]).unwrap();
        let r = check_kadison_schwarz(&g.heat(1.0).unwrap(), &phi).unwrap();
        assert!(r.pass && (r.lhs - (1.0 - libm::exp(-4.0))).abs() < 1e-12);
        let r = check_kadison_schwarz(&g.heat(1.0).unwrap(), &g.ctx().one()).unwrap();
        assert!(r.pass && r.lhs.abs() < 1e-14);
        let s = fixtures::schur_two();
        let x = s.ctx().from_real(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        let r = check_kadison_schwarz(&s.heat(1.0).unwrap(), &x).unwrap();
        assert!(r.pass && r.lhs.abs() < 1e-12);
    }

    #[test]
    fn operator_order_examples() {
        let g = fixtures::two_point();
        let (s, t) = (0.5, 1.0);
        let a = g.poisson(s).unwrap().scaled(t / s);
        let b = g.poisson(t).unwrap();
        assert!(operator_order(&a, &b).unwrap().is_positive());
        assert_eq!(operator_order(&b, &b).unwrap().value, 0.0);
        let sm = fixtures::schur_two();
        let w = operator_order(&sm.heat(0.5).unwrap(), &sm.heat(1.0).unwrap()).unwrap();
        assert!(!w.is_positive());
        assert!((w.value + (libm::exp(-0.5) - libm::exp(-1.0))).abs() < 1e-12);
    }

    #[test]
    fn min_alpha_examples() {
        let g = fixtures::two_point();
        let r = find_min_alpha(&g, Flow::Heat, Direction::QuasiIncreasing, (1e-3, 50.0), 64).unwrap();
        assert_eq!(r.direction, Direction::QuasiIncreasing);
        assert!((r.minimal_alpha - 0.278465).abs() < 1e-3, "{r:?}");
        assert!(r.residual < 0.0);
        let r = find_min_alpha(&g, Flow::Poisson, Direction::QuasiDecreasing, (1e-3, 50.0), 64).unwrap();
        assert!((r.minimal_alpha - 1.0).abs() < 1e-3, "{r:?}");
        let id = fixtures::identity(3);
        for d in [Direction::QuasiDecreasing, Direction::QuasiIncreasing] {
            let r = find_min_alpha(&id, Flow::Heat, d, (1e-3, 50.0), 16).unwrap();
            assert_eq!(r.minimal_alpha, 0.0);
        }
    }

    #[test]
    fn tp_heat_doubling_constant_is_at_most_two() {
        let g = fixtures::two_point();
        let times: Vec<f64> = (0..41).map(|i| libm::pow(10.0, -2.0 + 0.1 * i as f64)).collect();
        let c = doubling_constant(&g, Flow::Heat, &times);
        assert!(c <= 2.0 + 1e-9 && c > 1.9, "{c}");
    }

    #[test]
    fn invalid_generators_are_rejected() {
        let ctx = AlgebraContext::uniform(2).unwrap();
        assert!(Generator::markov(ctx.clone(), vec![-1.0, 1.0, 1.0, -2.0]).is_err());
        assert!(Generator::markov(ctx, vec![1.0, -1.0, -1.0, 1.0]).is_err());
        let m = AlgebraContext::matrix(3).unwrap();
        // ψ = -|i-j| is not conditionally negative.
        assert!(Generator::schur(m, vec![0.0, -1.0, -2.0, -1.0, 0.0, -1.0, -2.0, -1.0, 0.0]).is_err());
    }
}
