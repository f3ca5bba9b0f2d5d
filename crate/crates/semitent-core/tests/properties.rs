use num_complex::Complex64 as C64;
use proptest::prelude::*;
use semitent_core::dyadic::{DyadicFiltration, KernelFamily, LineFixture};
use semitent_core::fixtures;
use semitent_core::hardy::{bmo_norm, h1_norm};
use semitent_core::lhalf::KernelLhalf;
use semitent_core::quadrature::TimeGrid;
use semitent_core::sample;
use semitent_core::semigroup::{check_kadison_schwarz, Flow};
use semitent_core::tent::{pairing, t1_norm, tinf_norm, Family};
use semitent_core::{AlgebraContext, Element, Generator};

fn fixture(i: usize) -> Generator {
    fixtures::by_name(["TP", "CYC_8", "TORUS_16", "SM_2"][i]).unwrap().generator
}

fn close(a: C64, b: C64, scale: f64) -> bool {
    (a - b).norm() <= 1e-10 * scale.max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn semigroup_law_and_unit(fx in 0usize..4, seed in any::<u64>(), s in 1e-3f64..5.0, t in 1e-3f64..5.0) {
        let gen = fixture(fx);
        let mut rng = sample::rng(seed);
        let x = sample::element(gen.ctx(), &mut rng);
        for flow in [Flow::Heat, Flow::Poisson] {
            let two = gen.apply(flow, s, &gen.apply(flow, t, &x));
            let one = gen.apply(flow, s + t, &x);
            prop_assert!(two.sub(&one).max_abs() <= 1e-10 * x.max_abs().max(1.0));
            let unit = gen.apply(flow, t, &gen.ctx().one());
            prop_assert!(unit.sub(&gen.ctx().one()).max_abs() <= 1e-10);
        }
    }

    #[test]
    fn kadison_schwarz_holds(fx in 0usize..4, seed in any::<u64>(), t in 1e-3f64..10.0) {
        let gen = fixture(fx);
        let mut rng = sample::rng(seed);
        let x = sample::element(gen.ctx(), &mut rng);
        prop_assert!(check_kadison_schwarz(&gen.heat(t).unwrap(), &x).unwrap().pass);
    }

    #[test]
    fn pairing_is_sesquilinear(fx in 0usize..4, seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let gen = fixture(fx);
        let grid = TimeGrid::new(1e-2, 1e2, 24).unwrap();
        let mut rng = sample::rng(seed);
        let f = sample::tent(gen.ctx(), &grid, &mut rng);
        let g = sample::tent(gen.ctx(), &grid, &mut rng);
        let h = sample::tent(gen.ctx(), &grid, &mut rng);
        let c = C64::new(a, b);
        let lin = h.map(|y, x| x.scale(c).add(g.sample(grid.cell_of(y))));
        let lhs = pairing(&f, &lin).unwrap();
        let rhs = pairing(&f, &h).unwrap() * c.conj() + pairing(&f, &g).unwrap();
        let scale = lhs.norm() + rhs.norm();
        prop_assert!(close(lhs, rhs, scale));
        let anti = f.map(|_, x| x.scale(c));
        prop_assert!(close(pairing(&anti, &h).unwrap(), pairing(&f, &h).unwrap() * c, scale));
    }

    #[test]
    fn tent_norms_are_homogeneous(fx in 0usize..4, seed in any::<u64>(), c in 0.01f64..50.0) {
        let gen = fixture(fx);
        let grid = TimeGrid::new(1e-2, 1e2, 24).unwrap();
        let mut rng = sample::rng(seed);
        let f = sample::tent(gen.ctx(), &grid, &mut rng);
        let fam = Family::heat(&gen);
        let g = f.scale_re(c);
        let (n1, m1) = (t1_norm(&fam, &f).unwrap(), t1_norm(&fam, &g).unwrap());
        prop_assert!((m1 - c * n1).abs() <= 1e-9 * m1.max(1e-300));
        let (n2, m2) = (tinf_norm(&fam, &f).unwrap(), tinf_norm(&fam, &g).unwrap());
        prop_assert!((m2 - c * n2).abs() <= 1e-9 * m2.max(1e-300));
    }

    #[test]
    fn bmo_ignores_constants_and_h1_is_homogeneous(fx in 0usize..4, seed in any::<u64>(), k in -5.0f64..5.0) {
        let gen = fixture(fx);
        let grid = TimeGrid::new(1e-2, 1e2, 24).unwrap();
        let mut rng = sample::rng(seed);
        let phi = sample::hermitian(gen.ctx(), &mut rng);
        let shifted = phi.add(&gen.ctx().one().scale_re(k));
        let (a, b) = (bmo_norm(&gen, &phi, &grid), bmo_norm(&gen, &shifted, &grid));
        prop_assert!((a - b).abs() <= 1e-8 * a.max(1e-12));
        let f = sample::centered(&gen, &mut rng);
        let (h, hk) = (h1_norm(&gen, &f, &grid), h1_norm(&gen, &f.scale_re(k.abs() + 0.1), &grid));
        prop_assert!((hk - (k.abs() + 0.1) * h).abs() <= 1e-8 * hk.max(1e-12));
    }

    #[test]
    fn conditional_expectation_is_a_projection(level in -3i32..=0, shifted in any::<bool>(), seed in any::<u64>()) {
        let fx = LineFixture::torus(512, 0.25, KernelFamily::Heat).unwrap();
        let d = DyadicFiltration::new(&fx, 2.0, level, shifted).unwrap();
        let mut rng = sample::rng(seed);
        let f: Vec<f64> = (0..512).map(|_| sample::uniform(&mut rng, 0.0, 1.0)).collect();
        let e = d.expectation(&f);
        let ee = d.expectation(&e);
        prop_assert!(e.iter().zip(&ee).all(|(a, b)| (a - b).abs() <= 1e-14));
        prop_assert!(e.iter().all(|v| *v >= 0.0));
        let (sf, se): (f64, f64) = (f.iter().sum(), e.iter().sum());
        prop_assert!((sf - se).abs() <= 1e-10 * sf);
    }

    #[test]
    fn lhalf_ratio_is_scale_invariant(seed in any::<u64>(), a in 0.1f64..10.0, b in 0.1f64..10.0) {
        let gen = fixture(1);
        let k = KernelLhalf::new(gen.heat(0.7).unwrap().entries().to_vec(), gen.ctx().weights().unwrap().to_vec());
        let mut rng = sample::rng(seed);
        let f: Vec<f64> = (0..8).map(|_| sample::uniform(&mut rng, 0.0, 1.0)).collect();
        let g: Vec<f64> = (0..8).map(|_| sample::uniform(&mut rng, 0.0, 1.0)).collect();
        let r = k.ratio(&f, &g);
        let fa: Vec<f64> = f.iter().map(|v| a * v).collect();
        let gb: Vec<f64> = g.iter().map(|v| b * v).collect();
        prop_assert!((k.ratio(&fa, &gb) - r).abs() <= 1e-10 * r);
    }
}

#[test]
fn trace_is_faithful_on_positive_elements() {
    let ctx = AlgebraContext::matrix(3).unwrap();
    let mut rng = sample::rng(9);
    for _ in 0..50 {
        let p: Element = sample::positive(&ctx, &mut rng);
        assert!(ctx.tr_re(&p) > 0.0);
    }
}
