//! Adaptive Gauss-Kronrod quadrature for vector-valued integrands, and the geometric time grid.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    err: f64,
}

fn gk15(f: &dyn Fn(f64) -> Vec<f64>, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let dim = fc.len();
    let mut k = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    for d in 0..dim {
        k[d] = WGK[7] * fc[d];
        g[d] = WG[3] * fc[d];
    }
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        for d in 0..dim {
            let s = f1[d] + f2[d];
            k[d] += WGK[j] * s;
            if j % 2 == 1 {
                g[d] += WG[j / 2] * s;
            }
        }
    }
    let mut err: f64 = 0.0;
    for d in 0..dim {
        k[d] *= h;
        g[d] *= h;
        err = err.max((k[d] - g[d]).abs());
    }
    Panel { a, b, value: k, err }
}

/// Integrate a vector-valued function over [a, b] until the summed panel error estimate
/// (max over components) is below `max(abs_tol, rel_tol * |I|_max)`.
///
/// Returns the integral and the achieved error estimate.
pub fn integrate_vec(
    f: &dyn Fn(f64) -> Vec<f64>,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<(Vec<f64>, f64)> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(invalid("integration limits must be finite"));
    }
    if a == b {
        let dim = f(a).len();
        return Ok((vec![0.0; dim], 0.0));
    }
    let init = 8usize;
    let mut panels: Vec<Panel> = (0..init)
        .map(|i| {
            let x0 = a + (b - a) * i as f64 / init as f64;
            let x1 = a + (b - a) * (i + 1) as f64 / init as f64;
            gk15(f, x0, x1)
        })
        .collect();
    loop {
        let dim = panels[0].value.len();
        let mut total = vec![0.0; dim];
        let mut err = 0.0;
        for p in &panels {
            for d in 0..dim {
                total[d] += p.value[d];
            }
            err += p.err;
        }
        let mag = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let target = abs_tol.max(rel_tol * mag);
        if err <= target {
            return Ok((total, err));
        }
        if panels.len() >= max_panels {
            return Err(Error::QuadratureNonconvergence { achieved: err });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.err > acc.1 { (i, p.err) } else { acc });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        panels.push(gk15(f, p.a, mid));
        panels.push(gk15(f, mid, p.b));
    }
}

pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<(f64, f64)> {
    let g = |x: f64| vec![f(x)];
    let (v, e) = integrate_vec(&g, a, b, abs_tol, rel_tol, 4000)?;
    Ok((v[0], e))
}

/// Measure discretized by grid weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    /// dy/y
    Mult,
    /// y dy
    Lin,
    /// dy
    Flat,
}

/// Geometric grid: `m` log-cells between `lo` and `hi` with nodes at the log-midpoints.
///
/// Weights are the midpoint rule in log y for every measure (`ln q`, `ln q · y`, `ln q · y²`),
/// which is spectrally accurate for integrands that decay at both ends of the range.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    lo: f64,
    hi: f64,
    log_q: f64,
    nodes: Vec<f64>,
}

impl TimeGrid {
    pub fn new(lo: f64, hi: f64, m: usize) -> Result<Self> {
        if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() {
            return Err(invalid("grid needs 0 < lo < hi < inf"));
        }
        if m == 0 {
            return Err(invalid("grid needs at least one cell"));
        }
        let log_q = (libm::log(hi) - libm::log(lo)) / m as f64;
        let nodes = (0..m).map(|i| libm::exp(libm::log(lo) + (i as f64 + 0.5) * log_q)).collect();
        Ok(TimeGrid { lo, hi, log_q, nodes })
    }

    /// 96 cells over [1e-3, 1e3].
    pub fn standard() -> Self {
        Self::new(1e-3, 1e3, 96).expect("static grid")
    }

    /// Same cells-per-decade times `factor`, over [lo/ext, hi*ext].
    pub fn refined(&self, factor: usize, ext: f64) -> Result<Self> {
        let lo = self.lo / ext;
        let hi = self.hi * ext;
        let per_log = factor as f64 / self.log_q;
        let m = libm::round(per_log * (libm::log(hi) - libm::log(lo))) as usize;
        Self::new(lo, hi, m.max(1))
    }

    /// Doubled density, range extended one decade each way.
    pub fn doubled(&self) -> Self {
        self.refined(2, 10.0).expect("refinement of a valid grid")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn ratio(&self) -> f64 {
        libm::exp(self.log_q)
    }

    pub fn log_ratio(&self) -> f64 {
        self.log_q
    }

    pub fn lower(&self, i: usize) -> f64 {
        self.nodes[i] * libm::exp(-0.5 * self.log_q)
    }

    pub fn upper(&self, i: usize) -> f64 {
        self.nodes[i] * libm::exp(0.5 * self.log_q)
    }

    pub fn weight(&self, i: usize, measure: Measure) -> f64 {
        let y = self.nodes[i];
        match measure {
            Measure::Mult => self.log_q,
            Measure::Flat => self.log_q * y,
            Measure::Lin => self.log_q * y * y,
        }
    }

    pub fn weights(&self, measure: Measure) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight(i, measure)).collect()
    }

    /// Fraction (in log measure) of cell i lying above s.
    pub fn frac_above(&self, i: usize, s: f64) -> f64 {
        let a = libm::log(self.lower(i));
        let b = libm::log(self.upper(i));
        if s <= 0.0 {
            return 1.0;
        }
        let ls = libm::log(s);
        ((b - ls.max(a)) / (b - a)).clamp(0.0, 1.0)
    }

    /// Fraction (in log measure) of cell i lying below t.
    pub fn frac_below(&self, i: usize, t: f64) -> f64 {
        1.0 - self.frac_above(i, t)
    }

    /// Index of the cell containing y (clamped to the grid).
    pub fn cell_of(&self, y: f64) -> usize {
        let k = libm::floor((libm::log(y) - libm::log(self.lo)) / self.log_q);
        if k < 0.0 {
            0
        } else {
            (k as usize).min(self.len() - 1)
        }
    }

    /// Σ_i w_i h(y_i) over the whole grid.
    pub fn sum(&self, measure: Measure, h: impl Fn(f64) -> f64) -> f64 {
        (0..self.len()).map(|i| self.weight(i, measure) * h(self.nodes[i])).sum()
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}
