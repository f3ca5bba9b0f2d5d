//! Small dense complex matrices and a cyclic Jacobi Hermitian eigensolver.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Row-major square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    n: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_vec(n: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), n * n, "matrix data length");
        CMat { n, data }
    }

    pub fn from_real(n: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), n * n, "matrix data length");
        CMat { n, data: data.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    pub fn diag(d: &[C64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n);
        for (i, &v) in d.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.n + j] = v;
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &CMat) -> Self {
        let n = self.n;
        assert_eq!(n, other.n, "matmul dimension");
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    /// Hermitian part (A + A*)/2.
    pub fn hermitian_part(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5;
            }
        }
        out
    }

    /// Max-entry distance to the adjoint.
    pub fn asymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// Eigen-decomposition A = V diag(λ) V* of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are orthonormal eigenvectors.
    pub vectors: CMat,
}

impl HermitianEigen {
    /// Cyclic Jacobi with complex phase rotations. Only the Hermitian part of `a` is used.
    pub fn new(a: &CMat) -> Self {
        let n = a.dim();
        let mut m = a.hermitian_part();
        let mut v = CMat::identity(n);
        let scale = m.frobenius().max(f64::MIN_POSITIVE);
        for _sweep in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        off += m.get(i, j).norm_sqr();
                    }
                }
            }
            if libm::sqrt(off) <= 1e-16 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut m, &mut v, p, q);
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        let diag: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
        order.sort_by(|&x, &y| diag[x].partial_cmp(&diag[y]).unwrap_or(core::cmp::Ordering::Equal));
        let values = order.iter().map(|&i| diag[i]).collect();
        let mut vectors = CMat::zeros(n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for r in 0..n {
                vectors.set(r, new_col, v.get(r, old_col));
            }
        }
        HermitianEigen { values, vectors }
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// V diag(f(λ)) V*.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> CMat {
        let n = self.vectors.dim();
        let mut out = CMat::zeros(n);
        for k in 0..n {
            let fk = f(self.values[k]);
            if fk == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors.get(i, k) * fk;
                for j in 0..n {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + vik * self.vectors.get(j, k).conj());
                }
            }
        }
        out
    }
}

fn rotate(m: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let n = m.dim();
    let apq = m.get(p, q);
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let app = m.get(p, p).re;
    let aqq = m.get(q, q).re;
    if b < 1e-300 || b <= 1e-18 * (app.abs() + aqq.abs()) {
        m.set(p, q, ZERO);
        m.set(q, p, ZERO);
        return;
    }
    let phase = apq / b;
    let theta = (aqq - app) / (2.0 * b);
    let t = if theta >= 0.0 {
        1.0 / (theta + libm::sqrt(1.0 + theta * theta))
    } else {
        -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
    };
    let c = 1.0 / libm::sqrt(1.0 + t * t);
    let s = t * c;
    // U = D R with D = diag(1, conj(phase)) on (p, q).
    let e = phase.conj();
    // Columns: M <- M U.
    for k in 0..n {
        let mkp = m.get(k, p);
        let mkq = m.get(k, q);
        m.set(k, p, mkp * c - mkq * e * s);
        m.set(k, q, mkp * s + mkq * e * c);
    }
    // Rows: M <- U* M.
    let ec = e.conj();
    for k in 0..n {
        let mpk = m.get(p, k);
        let mqk = m.get(q, k);
        m.set(p, k, mpk * c - mqk * ec * s);
        m.set(q, k, mpk * s + mqk * ec * c);
    }
    m.set(p, q, ZERO);
    m.set(q, p, ZERO);
    let dp = m.get(p, p).re;
    let dq = m.get(q, q).re;
    m.set(p, p, C64::new(dp, 0.0));
    m.set(q, q, C64::new(dq, 0.0));
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * c - vkq * e * s);
        v.set(k, q, vkp * s + vkq * e * c);
    }
}

/// Real symmetric eigen-decomposition, eigenvalues ascending, eigenvectors as columns (row-major).
pub fn symmetric_eigen(n: usize, a: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let e = HermitianEigen::new(&CMat::from_real(n, a));
    let vecs = e.vectors.as_slice().iter().map(|z| z.re).collect();
    (e.values, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_known_two_by_two() {
        let a = CMat::from_real(2, &[1.0, 2.0, 2.0, 1.0]);
        let e = HermitianEigen::new(&a);
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let n = 5;
        let mut a = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let re = libm::sin((i * 7 + j * 3) as f64) + libm::sin((j * 7 + i * 3) as f64);
                let im = if i == j { 0.0 } else { libm::cos((i * j + 1) as f64) * if i < j { 1.0 } else { -1.0 } };
                a.set(i, j, C64::new(re, im));
            }
        }
        let e = HermitianEigen::new(&a);
        let rebuilt = e.apply_fn(|x| x);
        for (x, y) in rebuilt.as_slice().iter().zip(a.as_slice()) {
            assert!((x - y).norm() < 1e-12);
        }
        let vv = e.vectors.adjoint().matmul(&e.vectors);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((vv.get(i, j) - C64::new(want, 0.0)).norm() < 1e-12);
            }
        }
        for w in e.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn degenerate_spectrum_is_fine() {
        let e = HermitianEigen::new(&CMat::identity(4));
        assert!(e.values.iter().all(|v| (v - 1.0).abs() < 1e-15));
    }
}
