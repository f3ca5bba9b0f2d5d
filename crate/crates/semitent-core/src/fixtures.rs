//! Named generator fixtures.
//!
//! | name        | algebra            | generator                                   |
//! |-------------|--------------------|---------------------------------------------|
//! | `TP`        | 2 atoms, μ = ½, ½  | L = [[-1, 1], [1, -1]]                      |
//! | `CYC_N`     | N atoms, uniform   | L = A/2 - I on the N-cycle                  |
//! | `TORUS_N`   | N atoms, uniform   | L = K - I, K the periodized Gaussian kernel |
//! | `SM_N`      | N x N matrices     | Schur symbol ψ_ij = abs(i - j)              |
//! | `ID_N`      | N atoms, uniform   | L = 0                                       |

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::AlgebraContext;
use crate::error::{invalid, Result};
use crate::semigroup::Generator;

/// Width (in lattice units) of the Gaussian behind `TORUS_N`.
pub const TORUS_SIGMA: f64 = 1.0;

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub generator: Generator,
}

pub fn two_point() -> Generator {
    Generator::markov(AlgebraContext::uniform(2).unwrap(), vec![-1.0, 1.0, 1.0, -1.0]).unwrap()
}

pub fn cycle(n: usize) -> Generator {
    assert!(n >= 3, "cycle needs at least 3 vertices");
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        l[i * n + i] = -1.0;
        l[i * n + (i + 1) % n] += 0.5;
        l[i * n + (i + n - 1) % n] += 0.5;
    }
    Generator::markov(AlgebraContext::uniform(n).unwrap(), l).unwrap()
}

pub fn torus(n: usize) -> Generator {
    assert!(n >= 2, "torus needs at least 2 sites");
    let row: Vec<f64> = (0..n)
        .map(|d| {
            let d = d.min(n - d) as f64;
            libm::exp(-d * d / (2.0 * TORUS_SIGMA * TORUS_SIGMA))
        })
        .collect();
    let z: f64 = row.iter().sum();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let d = (j + n - i) % n;
            l[i * n + j] = row[d] / z - if i == j { 1.0 } else { 0.0 };
        }
    }
    // Exact zero row sums.
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| l[i * n + j]).sum();
        l[i * n + i] = -off;
    }
    Generator::markov(AlgebraContext::uniform(n).unwrap(), l).unwrap()
}

pub fn schur(n: usize) -> Generator {
    assert!(n >= 1, "matrix size must be positive");
    let mut psi = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            psi[i * n + j] = (i as f64 - j as f64).abs();
        }
    }
    Generator::schur(AlgebraContext::matrix(n).unwrap(), psi).unwrap()
}

pub fn schur_two() -> Generator {
    schur(2)
}

pub fn identity(n: usize) -> Generator {
    Generator::markov(AlgebraContext::uniform(n).unwrap(), vec![0.0; n * n]).unwrap()
}

/// Resolve a catalog name such as `TP`, `CYC_8`, `TORUS_16`, `SM_2` or `ID_3`.
pub fn by_name(name: &str) -> Result<Fixture> {
    let generator = if name == "TP" {
        two_point()
    } else if let Some((family, size)) = name.split_once('_') {
        let n: usize = size.parse().map_err(|_| invalid("fixture size must be an integer"))?;
        match family {
            "CYC" if (3..=64).contains(&n) => cycle(n),
            "TORUS" if (2..=64).contains(&n) => torus(n),
            "SM" if (1..=16).contains(&n) => schur(n),
            "ID" if (1..=64).contains(&n) => identity(n),
            _ => return Err(invalid("unknown fixture family or size out of range")),
        }
    } else {
        return Err(invalid("unknown fixture name"));
    };
    Ok(Fixture { name: String::from(name), generator })
}

/// Catalog entries with their size ranges, for listings.
pub fn catalog() -> Vec<String> {
    vec![
        String::from("TP"),
        format!("CYC_N (3 <= N <= 64)"),
        format!("TORUS_N (2 <= N <= 64)"),
        format!("SM_N (1 <= N <= 16)"),
        format!("ID_N (1 <= N <= 64)"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        for n in ["TP", "CYC_8", "TORUS_16", "SM_2", "SM_4", "ID_3"] {
            assert_eq!(by_name(n).unwrap().name, n);
        }
        assert!(by_name("CYC_2").is_err());
        assert!(by_name("FOO_3").is_err());
        assert!(by_name("TP_2").is_err());
    }

    #[test]
    fn torus_rows_sum_to_zero() {
        let g = torus(16);
        let t = g.heat(0.7).unwrap();
        for i in 0..16 {
            let s: f64 = t.entries()[i * 16..(i + 1) * 16].iter().sum();
            assert!((s - 1.0).abs() < 1e-13);
        }
    }
}
