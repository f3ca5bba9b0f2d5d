//! The subordinated Poisson semigroup P_y = e^{-y√(-L)} realized by quadrature of
//! (1/2√π) ∫ y e^{-y²/4u} u^{-3/2} T_u du, its truncated pieces, and checks of its identities.

use alloc::format;
use alloc::vec::Vec;

use crate::algebra::{order_constant, Element, POSITIVITY_TOL};
use crate::error::{invalid, Result};
use crate::quadrature::{erfc, integrate_vec};
use crate::report::CheckReport;
use crate::sample::{self, SampleRng};
use crate::semigroup::{operator_order, Flow, Generator, Operator};

const SQRT_PI: f64 = 1.772_453_850_905_516;
/// Relative weight of the subordination density left outside the integration window.
const TAIL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Spectral,
    Quadrature,
}

/// ∫_lo^hi s e^{-s²/4u} u^{-3/2} e^{λ(u - shift)} du for every eigenvalue λ of `gen`,
/// integrated on shared adaptive panels in v = ln u. `hi = None` means +∞.
fn subordination_values(gen: &Generator, s: f64, lo: f64, hi: Option<f64>, shift: f64) -> Result<Vec<f64>> {
    let lambda = gen.eigenvalues();
    // Below s²/160 the density is below e^{-40}.
    let u_lo = lo.max(s * s / 160.0);
    // erf(s / 2√U) ≈ s/√(πU) is the mass beyond U.
    let z = TAIL * SQRT_PI / 2.0;
    let u_inf = (s / (2.0 * z)) * (s / (2.0 * z));
    let u_hi = hi.unwrap_or(u_inf).min(u_inf);
    if u_hi <= u_lo {
        return Ok(alloc::vec![0.0; lambda.len()]);
    }
    let f = |v: f64| -> Vec<f64> {
        let u = libm::exp(v);
        let w = s * libm::exp(-s * s / (4.0 * u)) / libm::sqrt(u);
        lambda.iter().map(|&l| w * libm::exp(l * (u - shift))).collect()
    };
    let total = 2.0 * SQRT_PI;
    let (vals, _) = integrate_vec(&f, libm::log(u_lo), libm::log(u_hi), 1e-13 * total, 1e-12, 20_000)?;
    Ok(vals)
}

/// P_y by the chosen route.
pub fn poisson(gen: &Generator, y: f64, route: Route) -> Result<Operator> {
    match route {
        Route::Spectral => gen.poisson(y),
        Route::Quadrature => {
            if !(y > 0.0) || !y.is_finite() {
                return Err(invalid("quadrature route needs y > 0"));
            }
            let vals = subordination_values(gen, y, 0.0, None, 0.0)?;
            let scaled: Vec<f64> = vals.iter().map(|v| v / (2.0 * SQRT_PI)).collect();
            Ok(gen.spectral_op_values(&scaled))
        }
    }
}

/// (1/2√π) ∫ y e^{-y²/4u} u^{-3/2} e^{-λu} du by quadrature, for comparison with e^{-y√λ}.
pub fn scalar_subordination(lambda: f64, y: f64) -> Result<f64> {
    let f = |v: f64| {
        let u = libm::exp(v);
        alloc::vec![y * libm::exp(-y * y / (4.0 * u)) / libm::sqrt(u) * libm::exp(-lambda * u)]
    };
    let z = TAIL * SQRT_PI / 2.0;
    let u_hi = (y / (2.0 * z)) * (y / (2.0 * z));
    let (v, _) = integrate_vec(&f, libm::log(y * y / 160.0), libm::log(u_hi), 1e-15, 1e-13, 20_000)?;
    Ok(v[0] / (2.0 * SQRT_PI))
}

/// Max relative ∞-norm difference between the two routes over `ys`.
pub fn check_route_agreement(gen: &Generator, ys: &[f64]) -> CheckReport {
    let mut worst: f64 = 0.0;
    let mut at = 0.0;
    for &y in ys {
        let (a, b) = match (poisson(gen, y, Route::Spectral), poisson(gen, y, Route::Quadrature)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return CheckReport::errored("poisson-routes", &format!("{e}")),
        };
        let d = a.combine(1.0, &b, -1.0).expect("same generator").norm() / a.norm().max(1e-300);
        if d > worst {
            worst = d;
            at = y;
        }
    }
    CheckReport::residual("poisson-routes", worst, 1e-6).with_notes(format!("worst y={at}"))
}

/// Worst |quadrature − e^{-y√λ}| over the pairs.
pub fn check_scalar_identity(lambdas: &[f64], ys: &[f64]) -> CheckReport {
    let mut worst: f64 = 0.0;
    for &l in lambdas {
        for &y in ys {
            match scalar_subordination(l, y) {
                Ok(q) => worst = worst.max((q - libm::exp(-y * libm::sqrt(l))).abs()),
                Err(e) => return CheckReport::errored("poisson-scalar-identity", &format!("{e}")),
            }
        }
    }
    CheckReport::residual("poisson-scalar-identity", worst, 1e-8)
}

/// ‖P_s P_t − P_{s+t}‖ (spectral route).
pub fn poisson_law_residual(gen: &Generator, s: f64, t: f64) -> Result<f64> {
    let ps = gen.poisson(s)?;
    let pt = gen.poisson(t)?;
    let pst = gen.poisson(s + t)?;
    Ok(ps.compose(&pt)?.combine(1.0, &pst, -1.0)?.norm())
}

/// (∂²/∂y² + L) P_y x = 0, spectrally and against a central second difference in y.
pub fn check_poisson_pde(gen: &Generator, y: f64, x: &Element) -> Result<CheckReport> {
    if !(y > 0.0) {
        return Err(invalid("y must be positive"));
    }
    gen.ctx().check(x)?;
    let spectral = gen.spectral_apply(|l| l * libm::exp(y * Flow::Poisson.rate(l)) + Flow::Poisson.symbol(l, y, 2), x);
    let target = gen.generator_apply(&gen.apply(Flow::Poisson, y, x)).scale_re(-1.0);
    // Step on the scale of the fastest mode, Richardson-extrapolated to fourth order.
    let lmax = gen.eigenvalues().into_iter().fold(1e-12f64, |m, l| m.max(l.abs()));
    let h = (1e-2 / libm::sqrt(lmax)).min(0.5 * y);
    // The ergodic part is fixed by P_y and killed by L; differencing it only adds rounding.
    let xc = x.sub(&gen.ergodic_projection(x));
    let second = |h: f64| {
        gen.apply(Flow::Poisson, y + h, &xc)
            .add(&gen.apply(Flow::Poisson, y - h, &xc))
            .sub(&gen.apply(Flow::Poisson, y, &xc).scale_re(2.0))
            .scale_re(1.0 / (h * h))
    };
    let fd = second(0.5 * h).scale_re(4.0 / 3.0).sub(&second(h).scale_re(1.0 / 3.0));
    let scale = target.max_abs().max(1e-12 * x.max_abs());
    let fd_err = if scale > 0.0 { fd.sub(&target).max_abs() / scale } else { 0.0 };
    let spec_err = if x.max_abs() > 0.0 { spectral.max_abs() / x.max_abs() } else { 0.0 };
    Ok(CheckReport::residual("poisson-pde", fd_err.max(spec_err), 1e-5)
        .with_sweep(format!("y={y}"))
        .with_notes(format!("spectral={spec_err:.3e};fd={fd_err:.3e}")))
}

/// P_{y₂}(f)/y₂ ≤ P_{y₁}(f)/y₁ for consecutive ys; lhs holds the worst witness.
pub fn check_py_over_y(gen: &Generator, ys: &[f64], f: &Element) -> Result<CheckReport> {
    gen.ctx().check(f)?;
    let mut worst = f64::INFINITY;
    let mut count = 0usize;
    for w in ys.windows(2) {
        let (y1, y2) = (w[0], w[1]);
        let a = gen.apply(Flow::Poisson, y1, f).scale_re(1.0 / y1);
        let b = gen.apply(Flow::Poisson, y2, f).scale_re(1.0 / y2);
        worst = worst.min(a.sub(&b).min_witness());
        count += 1;
    }
    if count == 0 {
        worst = 0.0;
    }
    Ok(CheckReport::witness("py-over-y", worst, POSITIVITY_TOL).with_notes(format!("pairs={count}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Piece {
    /// ∫_0^{t²}, parameter t.
    A,
    /// ∫_{t²}^∞, parameter t.
    B,
    /// ∫_0^{ks²}, parameter k.
    C,
    /// ∫_{ks²}^∞, parameter k.
    D,
    /// ∫_{ks²}^∞ with T_{u − ks²/2}, parameter k.
    E,
}

/// Truncated subordination integral ∫ s e^{-s²/4u} u^{-3/2} T_{u - shift} du (no 1/2√π).
#[derive(Clone, Debug)]
pub struct KernelSplit {
    pub piece: Piece,
    pub s: f64,
    pub param: f64,
    pub operator: Operator,
}

pub fn kernel_split(gen: &Generator, s: f64, piece: Piece, param: f64) -> Result<KernelSplit> {
    if !(s > 0.0) || !(param > 0.0) {
        return Err(invalid("s and the piece parameter must be positive"));
    }
    let ks2 = param * s * s;
    let t2 = param * param;
    let vals = match piece {
        Piece::A => subordination_values(gen, s, 0.0, Some(t2), 0.0)?,
        Piece::B => subordination_values(gen, s, t2, None, 0.0)?,
        Piece::C => subordination_values(gen, s, 0.0, Some(ks2), 0.0)?,
        Piece::D => subordination_values(gen, s, ks2, None, 0.0)?,
        Piece::E => subordination_values(gen, s, ks2, None, ks2 / 2.0)?,
    };
    Ok(KernelSplit { piece, s, param, operator: gen.spectral_op_values(&vals) })
}

/// Relative ∞-norm error of P^a + P^b against 2√π P_s.
pub fn split_reconstruction_error(gen: &Generator, s: f64, t: f64) -> Result<f64> {
    let a = kernel_split(gen, s, Piece::A, t)?.operator;
    let b = kernel_split(gen, s, Piece::B, t)?.operator;
    let p = gen.poisson(s)?.scaled(2.0 * SQRT_PI);
    Ok(a.combine(1.0, &b, 1.0)?.combine(1.0, &p, -1.0)?.norm() / p.norm())
}

/// Witness for P^b_s ≤ c (s/t) P^b_t, both split at t², for s ≤ t.
pub fn pb_order_witness(gen: &Generator, s: f64, t: f64, c: f64) -> Result<f64> {
    let bs = kernel_split(gen, s, Piece::B, t)?.operator;
    let bt = kernel_split(gen, t, Piece::B, t)?.operator;
    Ok(operator_order(&bt.scaled(c * s / t), &bs)?.value)
}

/// Weight ∫_0^{ks²} s e^{-s²/4u} u^{-3/2} du = 2√π erfc(1/(2√k)); independent of s.
pub fn pc_mass(k: f64) -> f64 {
    2.0 * SQRT_PI * erfc(1.0 / (2.0 * libm::sqrt(k)))
}

/// Largest k ≤ 4 with c_α² 2^α ∫_0^{ks²} s e^{-s²/4u} u^{-3/2} du ≤ 1/16.
pub fn admissible_k(alpha: f64, c_alpha: f64) -> f64 {
    let g = |k: f64| c_alpha * c_alpha * libm::pow(2.0, alpha) * pc_mass(k) - 1.0 / 16.0;
    if g(4.0) <= 0.0 {
        return 4.0;
    }
    let (mut lo, mut hi) = (0.0, 4.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Witness for T_{4s²} P^c_s ≤ (1/16c_α²) T_{8s²}.
pub fn pc_display_witness(gen: &Generator, s: f64, k: f64, c_alpha: f64) -> Result<f64> {
    let pc = kernel_split(gen, s, Piece::C, k)?.operator;
    let lhs = gen.heat(4.0 * s * s)?.compose(&pc)?;
    let rhs = gen.heat(8.0 * s * s)?.scaled(1.0 / (16.0 * c_alpha * c_alpha));
    Ok(operator_order(&rhs, &lhs)?.value)
}

/// Witness for P^d_s = P^e_s T_{ks²/2} (relative ∞-norm error).
pub fn pd_factorization_error(gen: &Generator, s: f64, k: f64) -> Result<f64> {
    let d = kernel_split(gen, s, Piece::D, k)?.operator;
    let e = kernel_split(gen, s, Piece::E, k)?.operator;
    let et = e.compose(&gen.heat(k * s * s / 2.0)?)?;
    Ok(d.combine(1.0, &et, -1.0)?.norm() / d.norm().max(1e-300))
}

/// Largest c with a − c·b ⪰ 0 (as operators), for b ⪰ 0.
pub fn max_scale_below(a: &Operator, b: &Operator) -> f64 {
    let ok = |c: f64| a.combine(1.0, b, -c).map(|d| d.positivity() >= -1e-13).unwrap_or(false);
    if !ok(0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while ok(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Largest c with P_y ≥ c T_{y²} at every y in `ys`.
pub fn poisson_heat_lower_constant(gen: &Generator, ys: &[f64]) -> Result<f64> {
    let mut c = f64::INFINITY;
    for &y in ys {
        let p = gen.poisson(y)?;
        let t = gen.heat(y * y)?;
        c = c.min(max_scale_below(&p, &t));
    }
    Ok(c)
}

/// Empirical c in |∂P_y/∂y x|² ≤ c P_{y/2}(|x|²)/y² over `ys`.
///
/// For commutative algebras the sharp constant max_i Σ_j D_ij² y² / P_{y/2,ij} is used
/// (Cauchy–Schwarz is attained); for matrices, `probes` seeded random x.
pub fn derivative_bound_constant(gen: &Generator, ys: &[f64], probes: usize, rng: &mut SampleRng) -> Result<f64> {
    let mut c: f64 = 0.0;
    for &y in ys {
        let d = gen.derivative_op(Flow::Poisson, y);
        let q = gen.poisson(y / 2.0)?;
        match (&d, &q) {
            (Operator::Kernel { n, a: da }, Operator::Kernel { a: qa, .. }) => {
                for i in 0..*n {
                    let mut row = 0.0;
                    for j in 0..*n {
                        let dij = da[i * n + j];
                        if dij == 0.0 {
                            continue;
                        }
                        let qij = qa[i * n + j];
                        if qij <= 0.0 {
                            if dij.abs() > 1e-13 {
                                return Ok(f64::INFINITY);
                            }
                            continue;
                        }
                        row += dij * dij * y * y / qij;
                    }
                    c = c.max(row);
                }
            }
            _ => {
                for _ in 0..probes {
                    let x = sample::element(gen.ctx(), rng);
                    let lhs = d.apply(&x)?.abs_sq();
                    let rhs = q.apply(&x.abs_sq())?.scale_re(1.0 / (y * y));
                    c = c.max(order_constant(&rhs, &lhs));
                }
            }
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn tp_poisson_routes_agree() {
        let g = fixtures::two_point();
        let s = poisson(&g, 1.0, Route::Spectral).unwrap();
        let e = libm::exp(-libm::sqrt(2.0));
        assert!((s.entries()[0] - 0.621_558).abs() < 1e-6);
        assert!((s.entries()[0] - 0.5 * (1.0 + e)).abs() < 1e-14);
        let q = poisson(&g, 1.0, Route::Quadrature).unwrap();
        for (a, b) in s.entries().iter().zip(q.entries()) {
            assert!((a - b).abs() < 1e-8, "{a} {b}");
        }
        let id = poisson(&g, 0.0, Route::Spectral).unwrap();
        for (a, b) in id.entries().iter().zip([1.0, 0.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(poisson(&g, 0.0, Route::Quadrature).is_err());
    }

    #[test]
    fn scalar_identity_holds() {
        let r = check_scalar_identity(&[0.5, 1.0, 2.0, 5.0], &[0.1, 1.0, 5.0]);
        assert!(r.pass, "{}", r.lhs);
        assert!(r.lhs < 1e-10);
    }

    #[test]
    fn routes_agree_on_cycle_and_schur() {
        let ys: Vec<f64> = (0..8).map(|i| libm::pow(10.0, -2.0 + 0.5 * i as f64)).collect();
        for g in [fixtures::cycle(8), fixtures::schur(2), fixtures::torus(16)] {
            assert!(check_route_agreement(&g, &ys).pass);
        }
    }

    #[test]
    fn pde_residuals() {
        let g = fixtures::two_point();
        let phi = g.ctx().from_real(&[1.0, -1.0]).unwrap();
        assert!(check_poisson_pde(&g, 1.0, &phi).unwrap().pass);
        assert_eq!(check_poisson_pde(&g, 1.0, &g.ctx().one()).unwrap().lhs, 0.0);
        let s = fixtures::schur(2);
        let x = s.ctx().from_real(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(check_poisson_pde(&s, 0.7, &x).unwrap().pass);
    }

    #[test]
    fn py_over_y_decreases() {
        let g = fixtures::two_point();
        let ys: Vec<f64> = (0..32).map(|i| 0.01 * libm::pow(2000.0, i as f64 / 31.0)).collect();
        let f = g.ctx().from_real(&[2.0, 0.0]).unwrap();
        let r = check_py_over_y(&g, &ys, &f).unwrap();
        assert!(r.pass && r.notes == "pairs=31");
        let c = fixtures::cycle(8);
        assert!(check_py_over_y(&c, &ys, &c.ctx().point_mass(0)).unwrap().pass);
    }

    #[test]
    fn splits_reconstruct_and_order() {
        let g = fixtures::two_point();
        assert!(split_reconstruction_error(&g, 1.0, 1.0).unwrap() < 1e-6);
        assert!(split_reconstruction_error(&g, 0.3, 2.0).unwrap() < 1e-6);
        assert!(pb_order_witness(&g, 0.5, 1.0, 3.0).unwrap() >= 0.0);
        assert!(pb_order_witness(&g, 0.5, 1.0, libm::exp(0.25)).unwrap() >= -1e-10);
        assert!(pd_factorization_error(&g, 0.7, 0.5).unwrap() < 1e-6);
    }

    #[test]
    fn admissible_k_meets_budget() {
        let k = admissible_k(0.2785, 1.0);
        assert!(k > 0.0 && k < 4.0);
        let lhs = libm::pow(2.0, 0.2785) * pc_mass(k);
        assert!((lhs - 1.0 / 16.0).abs() < 1e-12);
        // Oracle: the mass is 2√π erfc(1/(2√k)); at k = 1 that is 2√π·erfc(1/2).
        assert!((pc_mass(1.0) - 2.0 * SQRT_PI * 0.479_500_122_186_953_5).abs() < 1e-12);
        let g = fixtures::two_point();
        assert!(pc_display_witness(&g, 0.3, k, 1.0).unwrap() >= -1e-10);
    }

    #[test]
    fn lower_constant_and_derivative_bound() {
        let ys: Vec<f64> = (0..24).map(|i| libm::pow(10.0, -2.0 + i as f64 / 6.0)).collect();
        for g in [fixtures::two_point(), fixtures::cycle(8), fixtures::torus(16)] {
            let c = poisson_heat_lower_constant(&g, &ys).unwrap();
            assert!(c >= 0.1, "{c}");
            let d = derivative_bound_constant(&g, &ys, 0, &mut sample::rng(1)).unwrap();
            assert!(d.is_finite() && d > 0.0);
        }
    }
}
