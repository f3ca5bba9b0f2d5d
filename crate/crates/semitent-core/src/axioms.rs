//! Semigroup axiom suite and the finite-difference cross-check of spectral time derivatives.

use alloc::vec::Vec;

use crate::algebra::POSITIVITY_TOL;
use crate::error::Result;
use crate::report::CheckReport;
use crate::sample::{self, SampleRng};
use crate::semigroup::{check_kadison_schwarz, Flow, Generator};

pub const LAW_TOL: f64 = 1e-10;
pub const SYMMETRY_TOL: f64 = 1e-12;
pub const UNIT_TOL: f64 = 1e-13;
pub const CONTINUITY_TOL: f64 = 1e-6;
pub const FD_TOL: f64 = 1e-6;

fn log_uniform(rng: &mut SampleRng, lo: f64, hi: f64) -> f64 {
    libm::exp(sample::uniform(rng, libm::log(lo), libm::log(hi)))
}

/// Six reports for the heat flow over `count` seeded elements and times in [1e-3, 10]:
/// semigroup law, symmetry, T_t(1) = 1, positivity, strong continuity at 0, Kadison–Schwarz.
pub fn axiom_reports(gen: &Generator, count: usize, rng: &mut SampleRng) -> Result<Vec<CheckReport>> {
    let ctx = gen.ctx();
    let one = ctx.one();
    let (mut law, mut sym, mut unit, mut cont) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut pos, mut ks) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..count {
        let x = sample::element(ctx, rng);
        let y = sample::element(ctx, rng);
        let (s, t) = (log_uniform(rng, 1e-3, 10.0), log_uniform(rng, 1e-3, 10.0));
        let scale = x.max_abs().max(1e-300);
        let op = gen.heat(t)?;
        let tx = op.apply(&x)?;
        let two = gen.heat(s)?.apply(&tx)?;
        law = law.max(two.sub(&gen.heat(s + t)?.apply(&x)?).max_abs() / scale);
        let ty = op.apply(&y)?;
        let d = (ctx.inner(&tx, &y) - ctx.inner(&x, &ty)).norm();
        sym = sym.max(d / (ctx.l2_norm(&x) * ctx.l2_norm(&y)).max(1e-300));
        unit = unit.max(op.apply(&one)?.sub(&one).max_abs());
        pos = pos.min(op.positivity());
        cont = cont.max(gen.heat(1e-9)?.apply(&x)?.sub(&x).max_abs() / scale);
        let w = check_kadison_schwarz(&op, &x)?.lhs;
        ks = ks.min(w / (scale * scale).max(1.0));
    }
    Ok(alloc::vec![
        CheckReport::residual("semigroup-law", law, LAW_TOL),
        CheckReport::residual("semigroup-symmetry", sym, SYMMETRY_TOL),
        CheckReport::residual("semigroup-unital", unit, UNIT_TOL),
        CheckReport::witness("semigroup-positivity", pos, 1e-12),
        CheckReport::residual("semigroup-continuity", cont, CONTINUITY_TOL),
        CheckReport::witness("kadison-schwarz", ks, POSITIVITY_TOL),
    ])
}

/// Worst relative gap between spectral first/second time derivatives and central differences,
/// both flows, over `count` centered elements and times in [0.1, 2].
pub fn derivative_fd_residual(gen: &Generator, count: usize, rng: &mut SampleRng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let x = sample::centered(gen, rng);
        let t = log_uniform(rng, 0.1, 2.0);
        for flow in [Flow::Heat, Flow::Poisson] {
            let d1 = gen.time_derivative(flow, t, 1, &x)?;
            let h = 1e-4 * t;
            let fd1 = gen.apply(flow, t + h, &x).sub(&gen.apply(flow, t - h, &x)).scale_re(0.5 / h);
            let d2 = gen.time_derivative(flow, t, 2, &x)?;
            let h = 5e-4 * t;
            let fd2 = gen
                .apply(flow, t + h, &x)
                .add(&gen.apply(flow, t - h, &x))
                .sub(&gen.apply(flow, t, &x).scale_re(2.0))
                .scale_re(1.0 / (h * h));
            let floor = 1e-12 * x.max_abs();
            worst = worst.max(fd1.sub(&d1).max_abs() / (d1.max_abs() + floor).max(1e-300));
            worst = worst.max(fd2.sub(&d2).max_abs() / (d2.max_abs() + floor).max(1e-300));
        }
    }
    Ok(worst)
}

pub fn derivative_fd_check(gen: &Generator, count: usize, rng: &mut SampleRng) -> Result<CheckReport> {
    Ok(CheckReport::residual("time-derivative-fd", derivative_fd_residual(gen, count, rng)?, FD_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn axioms_hold_on_catalog() {
        for name in ["TP", "CYC_8", "TORUS_16", "SM_2"] {
            let g = fixtures::by_name(name).unwrap().generator;
            let mut rng = sample::rng(5);
            let reps = axiom_reports(&g, 50, &mut rng).unwrap();
            assert_eq!(reps.len(), 6);
            for r in reps {
                assert!(r.pass, "{name} {r:?}");
            }
        }
    }

    #[test]
    fn finite_differences_match() {
        for name in ["TP", "CYC_8", "TORUS_16", "SM_2"] {
            let g = fixtures::by_name(name).unwrap().generator;
            let mut rng = sample::rng(2);
            let r = derivative_fd_check(&g, 20, &mut rng).unwrap();
            assert!(r.pass, "{name} {r:?}");
        }
    }
}
