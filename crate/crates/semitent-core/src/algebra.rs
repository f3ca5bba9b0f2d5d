//! The ambient algebra: a weighted point space or a matrix algebra with normalized trace.
//!
//! Elements are complex in both cases. Commutative elements are vectors over atoms and every
//! operation is entrywise; matrix elements are row-major `n x n` arrays.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::linalg::{CMat, HermitianEigen, C64, ONE, ZERO};

/// Default tolerance for positivity witnesses.
pub const POSITIVITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Vector(usize),
    Matrix(usize),
}

impl Shape {
    pub fn len(&self) -> usize {
        match *self {
            Shape::Vector(n) => n,
            Shape::Matrix(n) => n * n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match *self {
            Shape::Vector(n) | Shape::Matrix(n) => n,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlgebraContext {
    Commutative { weights: Vec<f64> },
    Matrix { n: usize },
}

impl AlgebraContext {
    pub fn commutative(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("commutative context needs at least one atom"));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(invalid("atom weights must be positive and finite"));
        }
        Ok(AlgebraContext::Commutative { weights })
    }

    /// n atoms of weight 1/n.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("commutative context needs at least one atom"));
        }
        Self::commutative(vec![1.0 / n as f64; n])
    }

    pub fn matrix(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("matrix dimension must be positive"));
        }
        Ok(AlgebraContext::Matrix { n })
    }

    pub fn shape(&self) -> Shape {
        match self {
            AlgebraContext::Commutative { weights } => Shape::Vector(weights.len()),
            AlgebraContext::Matrix { n } => Shape::Matrix(*n),
        }
    }

    pub fn dim(&self) -> usize {
        self.shape().dim()
    }

    pub fn is_commutative(&self) -> bool {
        matches!(self, AlgebraContext::Commutative { .. })
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            AlgebraContext::Commutative { weights } => weights.iter().sum(),
            AlgebraContext::Matrix { .. } => 1.0,
        }
    }

    pub fn weights(&self) -> Option<&[f64]> {
        match self {
            AlgebraContext::Commutative { weights } => Some(weights),
            AlgebraContext::Matrix { .. } => None,
        }
    }

    pub fn zero(&self) -> Element {
        Element::zeros(self.shape())
    }

    pub fn one(&self) -> Element {
        match self.shape() {
            Shape::Vector(n) => Element { shape: Shape::Vector(n), data: vec![ONE; n] },
            Shape::Matrix(n) => Element { shape: Shape::Matrix(n), data: CMat::identity(n).into_vec() },
        }
    }

    pub fn from_real(&self, values: &[f64]) -> Result<Element> {
        let shape = self.shape();
        if values.len() != shape.len() {
            return Err(Error::ContextMismatch);
        }
        Ok(Element { shape, data: values.iter().map(|&v| C64::new(v, 0.0)).collect() })
    }

    pub fn from_complex(&self, values: Vec<C64>) -> Result<Element> {
        let shape = self.shape();
        if values.len() != shape.len() {
            return Err(Error::ContextMismatch);
        }
        Ok(Element { shape, data: values })
    }

    /// Positive element of unit trace concentrated on atom `i` (or on the i-th basis projection).
    pub fn point_mass(&self, i: usize) -> Element {
        match self {
            AlgebraContext::Commutative { weights } => {
                let mut x = self.zero();
                x.data[i] = C64::new(1.0 / weights[i], 0.0);
                x
            }
            AlgebraContext::Matrix { n } => {
                let mut x = self.zero();
                x.data[i * n + i] = C64::new(*n as f64, 0.0);
                x
            }
        }
    }

    pub fn check(&self, x: &Element) -> Result<()> {
        if x.shape == self.shape() {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn trace(&self, x: &Element) -> Result<C64> {
        self.check(x)?;
        Ok(self.tr(x))
    }

    /// Unchecked trace for internal use.
    pub(crate) fn tr(&self, x: &Element) -> C64 {
        match self {
            AlgebraContext::Commutative { weights } => {
                weights.iter().zip(&x.data).map(|(&w, &v)| v * w).sum()
            }
            AlgebraContext::Matrix { n } => {
                let mut s = ZERO;
                for i in 0..*n {
                    s += x.data[i * n + i];
                }
                s / *n as f64
            }
        }
    }

    /// Real part of the trace, for elements known to be self-adjoint.
    pub fn tr_re(&self, x: &Element) -> f64 {
        self.tr(x).re
    }

    /// (τ|x|^p)^{1/p}; `p = f64::INFINITY` gives the sup (operator) norm.
    pub fn lp_quasinorm(&self, x: &Element, p: f64) -> Result<f64> {
        self.check(x)?;
        if !(p > 0.0) {
            return Err(invalid("p must be positive"));
        }
        if p == f64::INFINITY {
            return Ok(x.sup_norm());
        }
        let m = x.modulus();
        let powered = m.psd_map(|v| libm::pow(v, p));
        let t = self.tr_re(&powered).max(0.0);
        Ok(libm::pow(t, 1.0 / p))
    }

    /// ⟨x, y⟩ = τ(x y*).
    pub fn inner(&self, x: &Element, y: &Element) -> C64 {
        match self {
            AlgebraContext::Commutative { weights } => weights
                .iter()
                .zip(x.data.iter().zip(&y.data))
                .map(|(&w, (&a, &b))| a * b.conj() * w)
                .sum(),
            AlgebraContext::Matrix { n } => {
                // τ(x y*) = (1/n) Σ_ij x_ij conj(y_ij)
                let s: C64 = x.data.iter().zip(&y.data).map(|(&a, &b)| a * b.conj()).sum();
                s / *n as f64
            }
        }
    }

    pub fn l2_norm(&self, x: &Element) -> f64 {
        libm::sqrt(self.inner(x, x).re.max(0.0))
    }

    pub fn l1_norm(&self, x: &Element) -> f64 {
        self.tr_re(&x.modulus()).max(0.0)
    }

    pub fn is_positive(&self, x: &Element, tol: f64) -> Result<PositivityWitness> {
        self.check(x)?;
        let asym = x.asymmetry();
        let scale = x.max_abs().max(1.0);
        if asym > tol.max(1e-12) * scale {
            return Err(Error::NotSelfAdjoint { asymmetry: asym });
        }
        Ok(PositivityWitness { value: x.min_witness(), tolerance: tol })
    }

    /// Conditional expectation onto constants: τ(x)/τ(1) · 1.
    pub fn mean(&self, x: &Element) -> Element {
        let m = self.tr(x) / self.total_mass();
        self.one().scale(m)
    }
}

/// Min entry (commutative) or min eigenvalue of the Hermitian part (matrix).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositivityWitness {
    pub value: f64,
    pub tolerance: f64,
}

impl PositivityWitness {
    pub fn is_positive(&self) -> bool {
        self.value >= -self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    shape: Shape,
    data: Vec<C64>,
}

impl Element {
    pub fn zeros(shape: Shape) -> Self {
        Element { shape, data: vec![ZERO; shape.len()] }
    }

    pub(crate) fn from_parts(shape: Shape, data: Vec<C64>) -> Self {
        debug_assert_eq!(shape.len(), data.len());
        Element { shape, data }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn is_matrix(&self) -> bool {
        matches!(self.shape, Shape::Matrix(_))
    }

    pub fn to_cmat(&self) -> CMat {
        CMat::from_vec(self.shape.dim(), self.data.clone())
    }

    pub(crate) fn from_cmat(m: CMat) -> Self {
        let n = m.dim();
        Element { shape: Shape::Matrix(n), data: m.into_vec() }
    }

    fn zip(&self, other: &Element, f: impl Fn(C64, C64) -> C64) -> Element {
        assert_eq!(self.shape, other.shape, "element shape mismatch");
        Element { shape: self.shape, data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect() }
    }

    pub fn add(&self, other: &Element) -> Element {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: C64) -> Element {
        Element { shape: self.shape, data: self.data.iter().map(|&a| a * c).collect() }
    }

    pub fn scale_re(&self, c: f64) -> Element {
        Element { shape: self.shape, data: self.data.iter().map(|&a| a * c).collect() }
    }

    /// self += c * other.
    pub fn axpy(&mut self, c: f64, other: &Element) {
        assert_eq!(self.shape, other.shape, "element shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b * c;
        }
    }

    pub fn mul(&self, other: &Element) -> Element {
        assert_eq!(self.shape, other.shape, "element shape mismatch");
        match self.shape {
            Shape::Vector(_) => self.zip(other, |a, b| a * b),
            Shape::Matrix(_) => Element::from_cmat(self.to_cmat().matmul(&other.to_cmat())),
        }
    }

    pub fn adjoint(&self) -> Element {
        match self.shape {
            Shape::Vector(_) => Element { shape: self.shape, data: self.data.iter().map(|a| a.conj()).collect() },
            Shape::Matrix(_) => Element::from_cmat(self.to_cmat().adjoint()),
        }
    }

    /// |x|² = x* x.
    pub fn abs_sq(&self) -> Element {
        match self.shape {
            Shape::Vector(_) => Element {
                shape: self.shape,
                data: self.data.iter().map(|a| C64::new(a.norm_sqr(), 0.0)).collect(),
            },
            Shape::Matrix(_) => self.adjoint().mul(self),
        }
    }

    /// |x| = (x* x)^{1/2}.
    pub fn modulus(&self) -> Element {
        match self.shape {
            Shape::Vector(_) => Element {
                shape: self.shape,
                data: self.data.iter().map(|a| C64::new(a.norm(), 0.0)).collect(),
            },
            Shape::Matrix(_) => self.abs_sq().psd_map(libm::sqrt),
        }
    }

    /// Functional calculus f(h) on the self-adjoint part h; negative spectrum is clipped to 0
    /// before `f` is applied.
    pub fn psd_map(&self, f: impl Fn(f64) -> f64) -> Element {
        self.herm_map(|v| f(v.max(0.0)))
    }

    /// Functional calculus on the self-adjoint part without clipping.
    pub fn herm_map(&self, f: impl Fn(f64) -> f64) -> Element {
        match self.shape {
            Shape::Vector(_) => Element {
                shape: self.shape,
                data: self.data.iter().map(|a| C64::new(f(a.re), 0.0)).collect(),
            },
            Shape::Matrix(_) => Element::from_cmat(HermitianEigen::new(&self.to_cmat()).apply_fn(f)),
        }
    }

    pub fn sqrt_psd(&self) -> Element {
        self.psd_map(libm::sqrt)
    }

    /// Self-adjoint part (x + x*)/2.
    pub fn real_part(&self) -> Element {
        match self.shape {
            Shape::Vector(_) => Element {
                shape: self.shape,
                data: self.data.iter().map(|a| C64::new(a.re, 0.0)).collect(),
            },
            Shape::Matrix(_) => Element::from_cmat(self.to_cmat().hermitian_part()),
        }
    }

    pub fn asymmetry(&self) -> f64 {
        match self.shape {
            Shape::Vector(_) => self.data.iter().fold(0.0, |m, a| m.max(a.im.abs())),
            Shape::Matrix(_) => self.to_cmat().asymmetry(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.norm()))
    }

    /// Min entry of the real part, or min eigenvalue of the Hermitian part.
    pub fn min_witness(&self) -> f64 {
        match self.shape {
            Shape::Vector(_) => self.data.iter().fold(f64::INFINITY, |m, a| m.min(a.re)),
            Shape::Matrix(_) => HermitianEigen::new(&self.to_cmat()).min(),
        }
    }

    /// Max entry modulus, or the operator norm.
    pub fn sup_norm(&self) -> f64 {
        match self.shape {
            Shape::Vector(_) => self.max_abs(),
            Shape::Matrix(_) => {
                let e = HermitianEigen::new(&self.abs_sq().to_cmat());
                libm::sqrt(e.max_abs())
            }
        }
    }

    /// Operator norm of the self-adjoint part (cheaper than `sup_norm` for Hermitian input).
    pub fn herm_sup_norm(&self) -> f64 {
        match self.shape {
            Shape::Vector(_) => self.data.iter().fold(0.0, |m, a| m.max(a.re.abs())),
            Shape::Matrix(_) => HermitianEigen::new(&self.to_cmat()).max_abs(),
        }
    }
}

/// Smallest c ≥ 0 with c·a − b ⪰ 0 for self-adjoint a ⪰ 0 and b; infinity if none exists.
pub fn order_constant(a: &Element, b: &Element) -> f64 {
    assert_eq!(a.shape, b.shape, "element shape mismatch");
    let scale = a.max_abs().max(b.max_abs()).max(1e-300);
    let tol = 1e-12 * scale;
    match a.shape {
        Shape::Vector(_) => {
            let mut c: f64 = 0.0;
            for (x, y) in a.data.iter().zip(&b.data) {
                if y.re <= tol {
                    continue;
                }
                if x.re <= tol {
                    return f64::INFINITY;
                }
                c = c.max(y.re / x.re);
            }
            c
        }
        Shape::Matrix(_) => {
            let ok = |c: f64| a.scale_re(c).sub(b).min_witness() >= -tol * c.max(1.0);
            if ok(0.0) {
                return 0.0;
            }
            let (mut lo, mut hi) = (0.0, 1.0);
            while !ok(hi) {
                lo = hi;
                hi *= 2.0;
                if hi > 1e12 {
                    return f64::INFINITY;
                }
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if ok(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        }
    }
}
