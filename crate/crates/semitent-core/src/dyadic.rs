//! Convolution kernels on a discretized line, the plain and ⅓-shifted dyadic filtrations at
//! scale φ(t), and the comparison inequalities between them.
//!
//! Atoms are snapped to whole grid cells. The finest atom spans M = round(φ/h) ≥ 8 cells;
//! shifted atoms start round(W/3) cells after the plain ones, W the atom width in cells.
//! Since W/3 always has fractional part ⅔ here, the rounded offsets stay nested.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::lhalf::KernelLhalf;
use crate::sample::{self, SampleRng};

/// Closed-form kernel family on the line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelFamily {
    /// e^{−x²/4t} / √(4πt).
    Heat,
    /// t / (π(t² + x²)).
    Poisson,
}

impl KernelFamily {
    /// Natural scale φ(t): 2√t for heat, t for Poisson.
    pub fn scale(self, t: f64) -> f64 {
        let (c, p) = self.default_phi();
        c * libm::pow(t, p)
    }

    /// (c, p) with φ(t) = c·t^p.
    pub fn default_phi(self) -> (f64, f64) {
        match self {
            KernelFamily::Heat => (2.0, 0.5),
            KernelFamily::Poisson => (1.0, 1.0),
        }
    }
}

/// N cells of width h, either on a torus of length Nh or on the open interval.
#[derive(Clone, Debug, PartialEq)]
pub struct LineFixture {
    pub n: usize,
    pub h: f64,
    pub wrap: bool,
    pub family: KernelFamily,
    /// Rows rescaled to unit mass (always on for the torus).
    pub row_normalized: bool,
    /// φ(t) = c·t^p.
    pub phi: (f64, f64),
}

const SQRT_PI: f64 = 1.772_453_850_905_516;

impl LineFixture {
    pub fn torus(n: usize, h: f64, family: KernelFamily) -> Result<Self> {
        Self::validate(n, h)?;
        Ok(LineFixture { n, h, wrap: true, family, row_normalized: true, phi: family.default_phi() })
    }

    pub fn open(n: usize, h: f64, family: KernelFamily, row_normalized: bool) -> Result<Self> {
        Self::validate(n, h)?;
        Ok(LineFixture { n, h, wrap: false, family, row_normalized, phi: family.default_phi() })
    }

    fn validate(n: usize, h: f64) -> Result<()> {
        if n == 0 || !(h > 0.0) || !h.is_finite() {
            return Err(invalid("line fixture needs N >= 1 and h > 0"));
        }
        Ok(())
    }

    pub fn with_phi(mut self, c: f64, p: f64) -> Result<Self> {
        if !(c > 0.0) || !p.is_finite() {
            return Err(invalid("scale φ(t) = c·t^p needs c > 0"));
        }
        self.phi = (c, p);
        Ok(self)
    }

    pub fn scale(&self, t: f64) -> f64 {
        self.phi.0 * libm::pow(t, self.phi.1)
    }

    pub fn length(&self) -> f64 {
        self.n as f64 * self.h
    }

    /// |x_i − x_j|, periodic on the torus.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let d = i.abs_diff(j);
        let d = if self.wrap { d.min(self.n - d) } else { d };
        d as f64 * self.h
    }

    /// Closed-form density at distance x, periodized on the torus.
    pub fn density(&self, t: f64, x: f64) -> f64 {
        let l = self.length();
        match (self.family, self.wrap) {
            (KernelFamily::Heat, false) => libm::exp(-x * x / (4.0 * t)) / (2.0 * SQRT_PI * libm::sqrt(t)),
            (KernelFamily::Heat, true) => {
                // Images beyond m have weight below e^{-46}.
                let m = (libm::sqrt(184.0 * t) / l) as i64 + 1;
                (-m..=m)
                    .map(|k| {
                        let y = x + k as f64 * l;
                        libm::exp(-y * y / (4.0 * t))
                    })
                    .sum::<f64>()
                    / (2.0 * SQRT_PI * libm::sqrt(t))
            }
            (KernelFamily::Poisson, false) => t / (core::f64::consts::PI * (t * t + x * x)),
            (KernelFamily::Poisson, true) => {
                let a = core::f64::consts::TAU * t / l;
                let b = core::f64::consts::TAU * x / l;
                libm::sinh(a) / (l * (libm::cosh(a) - libm::cos(b)))
            }
        }
    }

    /// Row-major matrix a_ij = h K_t(x_i, x_j), so (T_t f)_i = Σ_j a_ij f_j.
    pub fn kernel(&self, t: f64) -> Result<Vec<f64>> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(invalid("kernel time must be positive"));
        }
        let n = self.n;
        let mut a = vec![0.0; n * n];
        if self.wrap {
            // Circulant: one profile, normalized once so that the matrix stays symmetric.
            let profile: Vec<f64> = (0..n).map(|d| self.h * self.density(t, self.distance(0, d))).collect();
            let z: f64 = profile.iter().sum();
            for i in 0..n {
                for j in 0..n {
                    a[i * n + j] = profile[i.abs_diff(j)] / z;
                }
            }
        } else {
            for i in 0..n {
                for j in 0..n {
                    a[i * n + j] = self.h * self.density(t, self.distance(i, j));
                }
                if self.row_normalized {
                    let z: f64 = a[i * n..(i + 1) * n].iter().sum();
                    a[i * n..(i + 1) * n].iter_mut().for_each(|v| *v /= z);
                }
            }
        }
        Ok(a)
    }

    pub fn weights(&self) -> Vec<f64> {
        vec![self.h; self.n]
    }
}

/// max over pairs of K_t(x,s)(φ^{1+r} + |x−s|^{1+r})/φ^r with K_t the fixture's discrete density.
pub fn kernel_bound_constant(fixture: &LineFixture, t: f64, r: f64, phi: f64) -> Result<f64> {
    if !(r > 1.0) {
        return Err(invalid("kernel bound needs r > 1"));
    }
    if !(phi > 0.0) {
        return Err(invalid("scale must be positive"));
    }
    let a = fixture.kernel(t)?;
    let n = fixture.n;
    let mut best: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = fixture.distance(i, j);
            let k = a[i * n + j] / fixture.h;
            best = best.max(k * (libm::pow(phi, 1.0 + r) + libm::pow(d, 1.0 + r)) / libm::pow(phi, r));
        }
    }
    Ok(best)
}

/// One level of the plain or shifted dyadic filtration on a torus fixture.
#[derive(Clone, Debug, PartialEq)]
pub struct DyadicFiltration {
    n: usize,
    /// Atom width in cells; `None` when a single atom covers the torus.
    width: Option<usize>,
    offset: usize,
}

impl DyadicFiltration {
    /// Level k ≤ 0 at scale φ: atoms of φ4^{−k}, shifted by a third of that when `shifted`.
    pub fn new(fixture: &LineFixture, phi: f64, k: i32, shifted: bool) -> Result<Self> {
        if !fixture.wrap {
            return Err(invalid("dyadic filtrations are built on the torus fixture"));
        }
        if k > 0 {
            return Err(invalid("levels satisfy k <= 0"));
        }
        let m = libm::round(phi / fixture.h);
        if m < 8.0 {
            return Err(invalid("finest atom must span at least 8 cells"));
        }
        let w = m * libm::pow(4.0, -k as f64);
        let n = fixture.n;
        if w >= n as f64 {
            return Ok(DyadicFiltration { n, width: None, offset: 0 });
        }
        let w = w as usize;
        if n % w != 0 {
            return Err(invalid("atoms must tile the torus"));
        }
        let offset = if shifted { libm::round(w as f64 / 3.0) as usize } else { 0 };
        Ok(DyadicFiltration { n, width: Some(w), offset })
    }

    pub fn atom_count(&self) -> usize {
        self.width.map_or(1, |w| self.n / w)
    }

    pub fn atom_of(&self, i: usize) -> usize {
        match self.width {
            None => 0,
            Some(w) => ((i + self.n - self.offset) % self.n) / w,
        }
    }

    /// Cells per atom.
    pub fn atom_size(&self) -> usize {
        self.width.unwrap_or(self.n)
    }

    /// Atom-wise average (the measure is uniform).
    pub fn expectation(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.n, "function length must match the fixture");
        let mut sums = vec![0.0; self.atom_count()];
        for (i, v) in f.iter().enumerate() {
            sums[self.atom_of(i)] += v;
        }
        let size = self.atom_size() as f64;
        (0..self.n).map(|i| sums[self.atom_of(i)] / size).collect()
    }
}

/// Plain and shifted filtrations for levels k_min..=0 (index 0 is k_min).
fn levels(fixture: &LineFixture, phi: f64, k_min: i32) -> Result<(Vec<DyadicFiltration>, Vec<DyadicFiltration>)> {
    let plain = (k_min..=0).map(|k| DyadicFiltration::new(fixture, phi, k, false)).collect::<Result<Vec<_>>>()?;
    let shifted = (k_min..=0).map(|k| DyadicFiltration::new(fixture, phi, k, true)).collect::<Result<Vec<_>>>()?;
    Ok((plain, shifted))
}

/// Witnesses (normalized by the largest value of the smaller side) for the nesting bound
/// E_k f ≤ 4E_{k−1} f and the overlap bound E_k f ≤ 3E′_kE_k f, both families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiltrationWitnesses {
    pub nesting: f64,
    pub overlap: f64,
}

pub fn filtration_witnesses(
    fixture: &LineFixture,
    phi: f64,
    k_min: i32,
    probes: &[Vec<f64>],
) -> Result<FiltrationWitnesses> {
    let (plain, shifted) = levels(fixture, phi, k_min)?;
    let mut w = FiltrationWitnesses { nesting: f64::INFINITY, overlap: f64::INFINITY };
    let worst = |small: &[f64], big: &[f64], c: f64| -> f64 {
        let scale = small.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        small.iter().zip(big).map(|(s, b)| (c * b - s) / scale).fold(f64::INFINITY, f64::min)
    };
    for f in probes {
        for fam in [&plain, &shifted] {
            let e: Vec<Vec<f64>> = fam.iter().map(|d| d.expectation(f)).collect();
            for k in 1..e.len() {
                w.nesting = w.nesting.min(worst(&e[k], &e[k - 1], 4.0));
            }
        }
        for (p, s) in plain.iter().zip(&shifted) {
            let ef = p.expectation(f);
            w.overlap = w.overlap.min(worst(&ef, &s.expectation(&ef), 3.0));
            let sf = s.expectation(f);
            w.overlap = w.overlap.min(worst(&sf, &p.expectation(&sf), 3.0));
        }
    }
    Ok(w)
}

/// Smallest c with T_t ≤ c Σ_{k=k_min}^0 4^{kr}(E_k + E′_k) as positive kernels, which is the
/// best constant over all f ≥ 0. Returns (c, analytic bound on the omitted k < k_min terms
/// relative to ‖f‖_∞).
pub fn domination_constant(fixture: &LineFixture, t: f64, r: f64, k_min: i32) -> Result<(f64, f64)> {
    let phi = fixture.scale(t);
    let (plain, shifted) = levels(fixture, phi, k_min)?;
    let a = fixture.kernel(t)?;
    let n = fixture.n;
    let mut c: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut rij = 0.0;
            for (idx, k) in (k_min..=0).enumerate() {
                let wk = libm::pow(4.0, k as f64 * r);
                for d in [&plain[idx], &shifted[idx]] {
                    if d.atom_of(i) == d.atom_of(j) {
                        rij += wk / d.atom_size() as f64;
                    }
                }
            }
            let kij = a[i * n + j];
            if kij > 0.0 {
                c = c.max(if rij > 0.0 { kij / rij } else { f64::INFINITY });
            }
        }
    }
    let tail = 2.0 * libm::pow(4.0, (k_min - 1) as f64 * r) / (1.0 - libm::pow(4.0, -r));
    Ok((c, tail))
}

/// Point masses at a few cells plus seeded positive random probes.
pub fn positive_probes(n: usize, random: usize, rng: &mut SampleRng) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in [0, n / 3, n / 2, n - 1] {
        let mut f = vec![0.0; n];
        f[i] = 1.0;
        out.push(f);
    }
    for _ in 0..random {
        out.push((0..n).map(|_| sample::uniform(rng, 0.0, 1.0)).collect());
    }
    out
}

/// Empirical L^½ constants of the fixture's kernels across `ts`.
#[derive(Clone, Debug, PartialEq)]
pub struct LhalfUniformity {
    pub per_t: Vec<f64>,
    /// max over t.
    pub constant: f64,
    /// max/min over t.
    pub spread: f64,
    /// Whether the kernel bound held with r = 2 and c = 1 at every t.
    pub hypotheses: bool,
}

pub fn lhalf_at(fixture: &LineFixture, t: f64, budget: usize, rng: &mut SampleRng) -> Result<f64> {
    let k = KernelLhalf::new(fixture.kernel(t)?, fixture.weights());
    Ok(if budget == 0 { k.point_mass_max().0 } else { k.search(budget, rng) })
}

pub fn lhalf_uniformity(fixture: &LineFixture, ts: &[f64], budget: usize, seed: u64) -> Result<LhalfUniformity> {
    let mut rng = sample::rng(seed);
    let mut per_t = Vec::with_capacity(ts.len());
    let mut hypotheses = true;
    for &t in ts {
        let phi = fixture.scale(t);
        let r = match fixture.family {
            KernelFamily::Heat => 2.0,
            KernelFamily::Poisson => 1.0,
        };
        hypotheses &= matches!(kernel_bound_constant(fixture, t, r, phi), Ok(c) if c <= 1.0);
        per_t.push(lhalf_at(fixture, t, budget, &mut rng)?);
    }
    let max = per_t.iter().fold(0.0f64, |m, v| m.max(*v));
    let min = per_t.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    Ok(LhalfUniformity { per_t, constant: max, spread: max / min, hypotheses })
}
