//! Tent elements on a geometric time grid, the 𝒯₁ and 𝒯∞ norms, the duality pairing and the
//! truncated square functions used in the duality argument.
//!
//! Integrals over [s, ∞) at a grid node s count the cell of s with weight ½; at other points
//! the cell containing s is cut at s in log measure.

use alloc::vec::Vec;

use crate::algebra::{AlgebraContext, Element, Shape};
use crate::error::{invalid, Error, Result};
use crate::linalg::C64;
use crate::quadrature::{Measure, TimeGrid};
use crate::sample::{self, SampleRng};
use crate::semigroup::{Flow, Generator, Operator};

/// The family y ↦ T_{c y^p} where T is the heat or Poisson flow of a generator.
#[derive(Clone, Copy, Debug)]
pub struct Family<'a> {
    pub gen: &'a Generator,
    pub flow: Flow,
    pub scale: f64,
    pub power: f64,
}

impl<'a> Family<'a> {
    pub fn new(gen: &'a Generator, flow: Flow) -> Self {
        Family { gen, flow, scale: 1.0, power: 1.0 }
    }

    pub fn heat(gen: &'a Generator) -> Self {
        Self::new(gen, Flow::Heat)
    }

    pub fn poisson(gen: &'a Generator) -> Self {
        Self::new(gen, Flow::Poisson)
    }

    /// y ↦ T_{c·time(y)}.
    pub fn rescaled(self, c: f64) -> Self {
        Family { scale: self.scale * c, ..self }
    }

    /// y ↦ T_{y²}.
    pub fn squared(self) -> Self {
        Family { power: self.power * 2.0, ..self }
    }

    pub fn time(&self, y: f64) -> f64 {
        if self.power == 1.0 {
            self.scale * y
        } else {
            self.scale * libm::pow(y, self.power)
        }
    }

    pub fn apply(&self, y: f64, x: &Element) -> Element {
        self.gen.apply(self.flow, self.time(y), x)
    }

    pub fn op(&self, y: f64) -> Operator {
        let t = self.time(y);
        self.gen.spectral_op(|l| self.flow.symbol(l, t, 0))
    }

    pub fn ctx(&self) -> &AlgebraContext {
        self.gen.ctx()
    }
}

/// Samples f_{y_i} at the nodes of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TentElement {
    grid: TimeGrid,
    samples: Vec<Element>,
}

impl TentElement {
    pub fn new(grid: TimeGrid, samples: Vec<Element>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(invalid("one sample per grid node"));
        }
        if let Some(first) = samples.first() {
            if samples.iter().any(|s| s.shape() != first.shape()) {
                return Err(Error::ContextMismatch);
            }
        }
        Ok(TentElement { grid, samples })
    }

    pub fn zeros(ctx: &AlgebraContext, grid: &TimeGrid) -> Self {
        TentElement { grid: grid.clone(), samples: (0..grid.len()).map(|_| ctx.zero()).collect() }
    }

    pub fn from_fn(grid: &TimeGrid, f: impl Fn(f64) -> Element) -> Result<Self> {
        let samples = grid.nodes().iter().map(|&y| f(y)).collect();
        Self::new(grid.clone(), samples)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Element] {
        &self.samples
    }

    pub fn sample(&self, i: usize) -> &Element {
        &self.samples[i]
    }

    pub fn shape(&self) -> Option<Shape> {
        self.samples.first().map(|s| s.shape())
    }

    pub fn scale_re(&self, c: f64) -> Self {
        TentElement { grid: self.grid.clone(), samples: self.samples.iter().map(|x| x.scale_re(c)).collect() }
    }

    /// Apply `f(y, x)` sample-wise.
    pub fn map(&self, f: impl Fn(f64, &Element) -> Element) -> Self {
        let samples = self.grid.nodes().iter().zip(&self.samples).map(|(&y, x)| f(y, x)).collect();
        TentElement { grid: self.grid.clone(), samples }
    }

    fn check(&self, ctx: &AlgebraContext) -> Result<()> {
        match self.shape() {
            Some(s) if s != ctx.shape() => Err(Error::ContextMismatch),
            _ => Ok(()),
        }
    }
}

/// Σ_i w_i T_{y_i}(|f_i|²), the discretized ∫ T_y|f_y|² dy/y.
fn t1_integrand(fam: &Family, f: &TentElement) -> Element {
    let mut acc = fam.ctx().zero();
    for (i, x) in f.samples.iter().enumerate() {
        let w = f.grid.weight(i, Measure::Mult);
        acc.axpy(w, &fam.apply(f.grid.node(i), &x.abs_sq()));
    }
    acc
}

/// ‖f‖_{𝒯₁} = τ (∫ T_y|f_y|² dy/y)^{1/2}.
pub fn t1_norm(fam: &Family, f: &TentElement) -> Result<f64> {
    f.check(fam.ctx())?;
    Ok(fam.ctx().tr_re(&t1_integrand(fam, f).sqrt_psd()).max(0.0))
}

/// ‖f‖_{𝒯∞} = sup_t ‖T_t ∫_0^t |f_y|² dy/y‖_∞^{1/2}, with t over grid nodes and cell boundaries.
pub fn tinf_norm(fam: &Family, f: &TentElement) -> Result<f64> {
    f.check(fam.ctx())?;
    let grid = &f.grid;
    let mut partial = fam.ctx().zero();
    let mut best: f64 = 0.0;
    for (i, x) in f.samples.iter().enumerate() {
        let w = grid.weight(i, Measure::Mult);
        let sq = x.abs_sq();
        let mut half = partial.clone();
        half.axpy(0.5 * w, &sq);
        best = best.max(fam.apply(grid.node(i), &half).herm_sup_norm());
        partial.axpy(w, &sq);
        best = best.max(fam.apply(grid.upper(i), &partial).herm_sup_norm());
    }
    Ok(libm::sqrt(best))
}

/// ℓ_g(f) = τ ∫ f_y g_y* dy/y.
pub fn pairing(f: &TentElement, g: &TentElement) -> Result<C64> {
    if f.grid != g.grid {
        return Err(invalid("tent elements live on different grids"));
    }
    if f.shape() != g.shape() {
        return Err(Error::ContextMismatch);
    }
    let ctx = match f.shape() {
        Some(Shape::Vector(n)) => AlgebraContext::uniform(n)?,
        Some(Shape::Matrix(n)) => AlgebraContext::matrix(n)?,
        None => return Ok(C64::new(0.0, 0.0)),
    };
    pairing_in(&ctx, f, g)
}

/// Pairing with the trace of an explicit context (needed for non-uniform weights).
pub fn pairing_in(ctx: &AlgebraContext, f: &TentElement, g: &TentElement) -> Result<C64> {
    if f.grid != g.grid {
        return Err(invalid("tent elements live on different grids"));
    }
    f.check(ctx)?;
    g.check(ctx)?;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..f.grid.len() {
        acc += ctx.inner(&f.samples[i], &g.samples[i]) * f.grid.weight(i, Measure::Mult);
    }
    Ok(acc)
}

/// Which truncated square function S_s to build alongside S̃_s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SquareVariant {
    /// ∫_s^∞ T_y(|A_y|²) y^{α-1}/(y+s)^α dy.
    Decreasing(f64),
    /// ∫_s^∞ T_{2y-s}(|A_y|²) (2y-s)^α / y^α dy/y.
    Increasing(f64),
}

/// S_s² (or S̃_s² when `variant` is None) at an arbitrary truncation point s.
pub fn square_sq_at(fam: &Family, f: &TentElement, variant: Option<SquareVariant>, s: f64) -> Element {
    let grid = &f.grid;
    let mut acc = fam.ctx().zero();
    for (j, x) in f.samples.iter().enumerate() {
        let frac = grid.frac_above(j, s);
        if frac == 0.0 {
            continue;
        }
        let y = grid.node(j);
        let w = frac * grid.weight(j, Measure::Mult);
        let (weight, time) = match variant {
            None => (1.0, y),
            Some(SquareVariant::Decreasing(a)) => (libm::pow(y / (y + s), a), y),
            Some(SquareVariant::Increasing(a)) => {
                let t = 2.0 * y - s;
                (libm::pow(t / y, a), t)
            }
        };
        acc.axpy(w * weight, &fam.apply(time, &x.abs_sq()));
    }
    acc
}

pub fn square_at(fam: &Family, f: &TentElement, variant: Option<SquareVariant>, s: f64) -> Element {
    square_sq_at(fam, f, variant, s).sqrt_psd()
}

/// S_s and S̃_s at every grid node.
#[derive(Clone, Debug)]
pub struct TruncatedSquare {
    pub variant: SquareVariant,
    pub s: Vec<Element>,
    pub tilde: Vec<Element>,
}

pub fn truncated_square(fam: &Family, f: &TentElement, variant: SquareVariant) -> Result<TruncatedSquare> {
    f.check(fam.ctx())?;
    let nodes = f.grid.nodes();
    let s = nodes.iter().map(|&y| square_at(fam, f, Some(variant), y)).collect();
    let tilde = nodes.iter().map(|&y| square_at(fam, f, None, y)).collect();
    Ok(TruncatedSquare { variant, s, tilde })
}

/// Worst witnesses for the relations between S and S̃ and the monotonicity of T_{s/2}(S_s).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SquareRelations {
    /// min over nodes of c·S_s − S̃_s, with c = 2^{α/2} (decreasing) or 1 (increasing).
    pub order: f64,
    /// min over consecutive nodes s < s' of T_{s/2}S_s − T_{s'/2}S_{s'}.
    pub monotone: f64,
    /// min over consecutive nodes of T_{s+δ}S_{s+δ} − T_sS_s − T_{s/2}[T_{s'/2}S_{s'} − T_{s/2}S_s].
    pub derivative: f64,
    /// max_s ‖S_s‖_∞, for relative tolerances.
    pub scale: f64,
}

pub fn square_relations(fam: &Family, f: &TentElement, variant: SquareVariant) -> Result<SquareRelations> {
    let sq = truncated_square(fam, f, variant)?;
    let nodes = f.grid.nodes();
    let c = match variant {
        SquareVariant::Decreasing(a) => libm::pow(2.0, a / 2.0),
        SquareVariant::Increasing(_) => 1.0,
    };
    let mut order = f64::INFINITY;
    let mut scale: f64 = 0.0;
    for (s, t) in sq.s.iter().zip(&sq.tilde) {
        order = order.min(s.scale_re(c).sub(t).min_witness());
        scale = scale.max(s.herm_sup_norm());
    }
    let mut monotone = f64::INFINITY;
    let mut derivative = f64::INFINITY;
    for i in 0..nodes.len().saturating_sub(1) {
        let (s, s2) = (nodes[i], nodes[i + 1]);
        let half = fam.apply(s / 2.0, &sq.s[i]);
        let half2 = fam.apply(s2 / 2.0, &sq.s[i + 1]);
        monotone = monotone.min(half.sub(&half2).min_witness());
        let mid = 0.5 * (s + s2);
        let s_mid = square_at(fam, f, Some(variant), mid);
        let lhs = fam.apply(mid, &s_mid).sub(&fam.apply(s, &sq.s[i]));
        let rhs = fam.apply(s / 2.0, &half2.sub(&half));
        derivative = derivative.min(lhs.sub(&rhs).min_witness());
    }
    if nodes.len() < 2 {
        monotone = 0.0;
        derivative = 0.0;
    }
    Ok(SquareRelations { order, monotone, derivative, scale })
}

/// Terms of |τ ∫ a_s* b_s ds/s| ≤ [τ ∫ T_s(S_s^{-1}) |a_s|²]^{1/2} [τ ∫ T_s(S_s) |b_s|²]^{1/2}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CauchySchwarzTerms {
    pub lhs: f64,
    pub first: f64,
    pub second: f64,
    /// Additive regularization applied to S before inversion.
    pub epsilon: f64,
}

impl CauchySchwarzTerms {
    pub fn rhs(&self) -> f64 {
        libm::sqrt(self.first * self.second)
    }
}

/// Weighted Cauchy–Schwarz for positive weights `s` (one per node).
///
/// With `regularize`, S is replaced by S + ε, ε = 1e-8·max‖S‖; otherwise a singular S is rejected.
pub fn weighted_cauchy_schwarz(
    fam: &Family,
    a: &TentElement,
    b: &TentElement,
    s: &[Element],
    regularize: bool,
) -> Result<CauchySchwarzTerms> {
    let ctx = fam.ctx();
    a.check(ctx)?;
    b.check(ctx)?;
    if a.grid != b.grid || s.len() != a.grid.len() {
        return Err(invalid("tent elements and weights must share one grid"));
    }
    let top = s.iter().fold(0.0f64, |m, x| m.max(x.herm_sup_norm()));
    let epsilon = if regularize { 1e-8 * top.max(1e-300) } else { 0.0 };
    let grid = &a.grid;
    let mut lhs = C64::new(0.0, 0.0);
    let (mut first, mut second) = (0.0, 0.0);
    for i in 0..grid.len() {
        let w = grid.weight(i, Measure::Mult);
        let y = grid.node(i);
        let si = s[i].add(&ctx.one().scale_re(epsilon));
        if !regularize && si.min_witness() <= 0.0 {
            return Err(invalid("weight is singular; enable regularization"));
        }
        let inv = si.psd_map(|v| if v > 0.0 { 1.0 / v } else { 0.0 });
        lhs += ctx.inner(&b.samples[i], &a.samples[i]) * w;
        let aa = a.samples[i].mul(&a.samples[i].adjoint());
        let bb = b.samples[i].mul(&b.samples[i].adjoint());
        first += w * ctx.tr_re(&fam.apply(y, &inv).mul(&aa));
        second += w * ctx.tr_re(&fam.apply(y, &si).mul(&bb));
    }
    Ok(CauchySchwarzTerms { lhs: lhs.norm(), first, second, epsilon })
}

/// |ℓ_B(A)|² and ‖A‖²_{𝒯₁} ‖B‖²_{𝒯∞}.
pub fn duality_terms(fam: &Family, a: &TentElement, b: &TentElement) -> Result<(f64, f64)> {
    let p = pairing_in(fam.ctx(), a, b)?.norm();
    let na = t1_norm(fam, a)?;
    let nb = tinf_norm(fam, b)?;
    Ok((p * p, na * na * nb * nb))
}

/// The explicit duality constant 4·2^{3α/2} for |ℓ_B(A)|² ≤ c ‖B‖²_{𝒯∞} ‖A‖²_{𝒯₁}.
pub fn duality_budget(alpha: f64) -> f64 {
    4.0 * libm::pow(2.0, 1.5 * alpha)
}

/// ‖(T_{2s}A_s)_s‖²_{𝒯₁} and ‖A‖_{𝒯₁} · τ(∫ |T_sA_s|² ds/s)^{1/2}.
pub fn doubled_tent_terms(fam: &Family, a: &TentElement) -> Result<(f64, f64)> {
    let doubled = a.map(|y, x| fam.apply(2.0 * y, x));
    let lhs = t1_norm(fam, &doubled)?;
    let mut g = fam.ctx().zero();
    for (i, x) in a.samples.iter().enumerate() {
        let tx = fam.apply(a.grid.node(i), x);
        g.axpy(a.grid.weight(i, Measure::Mult), &tx.abs_sq());
    }
    let g0 = fam.ctx().tr_re(&g.sqrt_psd());
    Ok((lhs * lhs, t1_norm(fam, a)? * g0))
}

/// ‖A‖_{𝒯₁^{(T_s)}} and ‖A‖_{𝒯₁^{(T_{2s})}}.
pub fn doubling_norms(fam: &Family, a: &TentElement) -> Result<(f64, f64)> {
    Ok((t1_norm(fam, a)?, t1_norm(&fam.rescaled(2.0), a)?))
}

/// Worst ratio over grid boundaries t of
/// τ(∫_0^t T_y[(T_t f)^{1/2}|g_y|²(T_t f)^{1/2}] dy/y)^{1/2} / (‖∫_0^t |g_y|² dy/y‖₁^{1/2} ‖f‖₁^{1/2}).
///
/// Returns (ratio, t).
pub fn necessity_ratio(fam: &Family, f: &Element, g: &TentElement) -> Result<(f64, f64)> {
    let ctx = fam.ctx();
    ctx.check(f)?;
    g.check(ctx)?;
    let grid = &g.grid;
    let f1 = ctx.l1_norm(f);
    let mut best = (0.0, grid.upper(grid.len().saturating_sub(1)));
    for k in 0..grid.len() {
        let t = grid.upper(k);
        let root = fam.apply(t, f).sqrt_psd();
        let mut inner = ctx.zero();
        let mut mass = ctx.zero();
        for j in 0..=k {
            let w = grid.weight(j, Measure::Mult);
            let gg = g.samples[j].abs_sq();
            let sandwich = root.mul(&gg).mul(&root);
            inner.axpy(w, &fam.apply(grid.node(j), &sandwich));
            mass.axpy(w, &gg);
        }
        let lhs = ctx.tr_re(&inner.sqrt_psd());
        let rhs = libm::sqrt(ctx.l1_norm(&mass) * f1);
        if rhs > 0.0 && lhs / rhs > best.0 {
            best = (lhs / rhs, t);
        }
    }
    Ok(best)
}

/// ‖T_t|h|²‖_∞^{1/2} and a lower estimate of sup { |τ f h*| : τ((T_t|f|²)^{1/2}) ≤ 1 },
/// the latter by seeded hill climbing from f = h and f = T_t h.
pub fn tinf_dual_terms(fam: &Family, t: f64, h: &Element, iters: usize, rng: &mut SampleRng) -> Result<(f64, f64)> {
    let ctx = fam.ctx();
    ctx.check(h)?;
    let lhs = libm::sqrt(fam.apply(t, &h.abs_sq()).herm_sup_norm());
    let q = |f: &Element| {
        let den = ctx.tr_re(&fam.apply(t, &f.abs_sq()).sqrt_psd());
        if den > 0.0 {
            ctx.inner(f, h).norm() / den
        } else {
            0.0
        }
    };
    let mut best = 0.0f64;
    for start in [h.clone(), fam.apply(t, h)] {
        let mut f = start;
        let mut val = q(&f);
        let mut step = 0.5 * f.max_abs().max(1e-12);
        for _ in 0..iters {
            let trial = f.add(&sample::element(ctx, rng).scale_re(step));
            let v = q(&trial);
            if v > val {
                f = trial;
                val = v;
                step *= 1.5;
            } else {
                step *= 0.9;
            }
        }
        best = best.max(val);
    }
    Ok((lhs, best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    /// Boundaries 2^{k/8}: [1, 2] is exactly cells 80..88.
    fn dyadic_grid() -> TimeGrid {
        TimeGrid::new(libm::pow(2.0, -10.0), libm::pow(2.0, 10.0), 160).unwrap()
    }

    fn phi_indicator(g: &Generator, grid: &TimeGrid) -> TentElement {
        let phi = g.ctx().from_real(&[1.0, -1.0]).unwrap();
        TentElement::from_fn(grid, |y| if (1.0..2.0).contains(&y) { phi.clone() } else { g.ctx().zero() }).unwrap()
    }

    #[test]
    fn norms_of_indicator_tent() {
        let g = fixtures::two_point();
        let grid = dyadic_grid();
        let f = phi_indicator(&g, &grid);
        let fam = Family::heat(&g);
        let ln2 = libm::log(2.0);
        assert!((t1_norm(&fam, &f).unwrap() - libm::sqrt(ln2)).abs() < 1e-12);
        assert!((tinf_norm(&fam, &f).unwrap() - libm::sqrt(ln2)).abs() < 1e-12);
        assert!((t1_norm(&fam, &f.scale_re(3.0)).unwrap() - 3.0 * libm::sqrt(ln2)).abs() < 1e-12);
        assert!((pairing(&f, &f).unwrap().re - ln2).abs() < 1e-12);
        let zero = TentElement::zeros(g.ctx(), &grid);
        assert_eq!(t1_norm(&fam, &zero).unwrap(), 0.0);
        assert_eq!(tinf_norm(&fam, &zero).unwrap(), 0.0);
        assert_eq!(pairing(&f, &zero).unwrap().norm(), 0.0);
    }

    #[test]
    fn single_node_tent_has_unit_norms() {
        let g = fixtures::two_point();
        let grid = TimeGrid::standard();
        let phi = g.ctx().from_real(&[1.0, -1.0]).unwrap();
        let w = libm::sqrt(grid.log_ratio());
        let f = TentElement::from_fn(&grid, |y| {
            if y == grid.node(40) {
                phi.scale_re(1.0 / w)
            } else {
                g.ctx().zero()
            }
        })
        .unwrap();
        let fam = Family::heat(&g);
        assert!((t1_norm(&fam, &f).unwrap() - 1.0).abs() < 1e-12);
        assert!((tinf_norm(&fam, &f).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tilde_square_at_fractional_point() {
        let g = fixtures::two_point();
        let grid = dyadic_grid();
        let f = phi_indicator(&g, &grid);
        let fam = Family::heat(&g);
        let s = square_at(&fam, &f, None, 1.5);
        let want = libm::sqrt(libm::log(2.0 / 1.5));
        for v in s.data() {
            assert!((v.re - want).abs() < 1e-12);
        }
        assert!(square_at(&fam, &f, None, 2.5).max_abs() == 0.0);
    }

    #[test]
    fn square_relations_on_tp_poisson_and_heat() {
        let g = fixtures::two_point();
        let grid = TimeGrid::new(1e-2, 1e2, 48).unwrap();
        let mut rng = sample::rng(3);
        for _ in 0..5 {
            let f = sample::tent(g.ctx(), &grid, &mut rng);
            let r = square_relations(&Family::poisson(&g), &f, SquareVariant::Decreasing(1.0)).unwrap();
            assert!(r.order >= -1e-12 && r.monotone >= -1e-8 * r.scale && r.derivative >= -1e-8 * r.scale, "{r:?}");
            let r = square_relations(&Family::heat(&g), &f, SquareVariant::Increasing(0.2785)).unwrap();
            assert!(r.order >= -1e-12 && r.monotone >= -1e-8 * r.scale && r.derivative >= -1e-8 * r.scale, "{r:?}");
        }
    }

    #[test]
    fn cauchy_schwarz_cases() {
        let g = fixtures::two_point();
        let grid = dyadic_grid();
        let f = phi_indicator(&g, &grid);
        let fam = Family::heat(&g);
        let ones: Vec<Element> = (0..grid.len()).map(|_| g.ctx().one()).collect();
        let t = weighted_cauchy_schwarz(&fam, &f, &f, &ones, false).unwrap();
        assert!((t.lhs / t.rhs() - 1.0).abs() < 1e-12);
        let sq = truncated_square(&fam, &f, SquareVariant::Increasing(0.2785)).unwrap();
        let t = weighted_cauchy_schwarz(&fam, &f, &f, &sq.tilde, true).unwrap();
        assert!(t.lhs <= t.rhs() * (1.0 + 1e-8));
        assert!(weighted_cauchy_schwarz(&fam, &f, &f, &sq.tilde, false).is_err());
    }

    #[test]
    fn duality_bound_random_pairs_matrix() {
        let g = fixtures::schur(2);
        let grid = TimeGrid::new(1e-2, 1e2, 40).unwrap();
        let mut rng = sample::rng(11);
        let fam = Family::heat(&g);
        for _ in 0..10 {
            let a = sample::tent(g.ctx(), &grid, &mut rng);
            let b = sample::tent(g.ctx(), &grid, &mut rng);
            let (lhs, rhs) = duality_terms(&fam, &a, &b).unwrap();
            assert!(lhs <= duality_budget(1.0) * rhs);
        }
    }

    #[test]
    fn necessity_display_fails_on_concentrated_tp_probe() {
        // g concentrated in the last cell below t reduces the display to the L^½ ratio,
        // which exceeds 1 on the two-point chain.
        let g = fixtures::two_point();
        let t_cell = 64usize;
        let grid = TimeGrid::new(1e-3, libm::log(2.0) / 4.0 * 1.0001, t_cell + 1).unwrap();
        let fam = Family::heat(&g);
        let f = g.ctx().from_real(&[2.0, 0.0]).unwrap();
        let tent = TentElement::from_fn(&grid, |y| if y == grid.node(t_cell) { f.clone() } else { g.ctx().zero() })
            .unwrap();
        let (ratio, _) = necessity_ratio(&fam, &f, &tent).unwrap();
        assert!(ratio > 1.1, "{ratio}");
    }
}
