//! Exact arithmetic for even integral lattices.

pub mod error;
pub mod fqf;
pub mod genus;
pub mod lattice;
pub mod linalg;
pub mod matrix;
pub mod moduli;
pub mod niemeier;
pub mod padic;
pub mod rootsys;
pub mod tables;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use error::{Error, Result};
pub use lattice::Lattice;
pub use matrix::Matrix;

/// Integer matrix with unbounded entries.
pub type IntMatrix = Matrix<BigInt>;
/// Rational matrix with unbounded numerators and denominators.
pub type RatMatrix = Matrix<BigRational>;
