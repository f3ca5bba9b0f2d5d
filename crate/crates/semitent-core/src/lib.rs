//! Numerical core for semigroup tent spaces, Hardy and BMO spaces on finite algebras.
#![no_std]

extern crate alloc;

pub mod algebra;
pub mod axioms;
pub mod dyadic;
pub mod error;
pub mod fixtures;
pub mod general;
pub mod hardy;
pub mod lhalf;
pub mod linalg;
pub mod quadrature;
pub mod report;
pub mod sample;
pub mod semigroup;
pub mod subordination;
pub mod tent;

pub use algebra::{AlgebraContext, Element, PositivityWitness};
pub use error::{Error, Result};
pub use report::CheckReport;
pub use semigroup::{Direction, Flow, Generator, MonotonicityReport, Operator};
