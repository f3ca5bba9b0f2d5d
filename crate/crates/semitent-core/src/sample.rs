//! Seeded random probes: elements, positive elements and tent families.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraContext, Element};
use crate::linalg::C64;
use crate::quadrature::TimeGrid;
use crate::semigroup::Generator;
use crate::tent::TentElement;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauss(rng: &mut SampleRng) -> f64 {
    // Box-Muller; u1 kept away from zero.
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
}

/// Standard complex Gaussian entries (real entries for commutative algebras).
pub fn element(ctx: &AlgebraContext, rng: &mut SampleRng) -> Element {
    let n = ctx.shape().len();
    let data: Vec<C64> = (0..n)
        .map(|_| if ctx.is_commutative() { C64::new(gauss(rng), 0.0) } else { C64::new(gauss(rng), gauss(rng)) })
        .collect();
    ctx.from_complex(data).expect("shape matches")
}

/// Self-adjoint element with Gaussian entries.
pub fn hermitian(ctx: &AlgebraContext, rng: &mut SampleRng) -> Element {
    let x = element(ctx, rng);
    x.add(&x.adjoint()).scale_re(0.5)
}

/// Positive element: uniform(0,1) entries, or X X* / n for matrices.
pub fn positive(ctx: &AlgebraContext, rng: &mut SampleRng) -> Element {
    if ctx.is_commutative() {
        let v: Vec<f64> = (0..ctx.dim()).map(|_| rng.random::<f64>()).collect();
        ctx.from_real(&v).expect("shape matches")
    } else {
        let x = element(ctx, rng);
        x.mul(&x.adjoint()).scale_re(1.0 / ctx.dim() as f64)
    }
}

/// Random element with its ergodic projection removed.
pub fn centered(gen: &Generator, rng: &mut SampleRng) -> Element {
    let x = element(gen.ctx(), rng);
    x.sub(&gen.ergodic_projection(&x))
}

/// Random tent: Gaussian samples modulated by a log-normal bump with random center and width.
pub fn tent(ctx: &AlgebraContext, grid: &TimeGrid, rng: &mut SampleRng) -> TentElement {
    let lo = libm::log(grid.lo());
    let hi = libm::log(grid.hi());
    let center = lo + (hi - lo) * (0.2 + 0.6 * rng.random::<f64>());
    let width = 0.3 + 2.5 * rng.random::<f64>();
    let samples = grid
        .nodes()
        .iter()
        .map(|&y| {
            let z = (libm::log(y) - center) / width;
            element(ctx, rng).scale_re(libm::exp(-0.5 * z * z))
        })
        .collect();
    TentElement::new(grid.clone(), samples).expect("samples share one context")
}

pub fn uniform(rng: &mut SampleRng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

pub fn index(rng: &mut SampleRng, n: usize) -> usize {
    rng.random_range(0..n)
}
