//! Exact computation of smooth Mordell-Weil groups of genus-one fibrations
//! with nodal singular fibers, and of the lattice theory around them.
//!
//! Everything is exact: integers are arbitrary precision and the only
//! rational arithmetic is in diagonalization and root enumeration.

pub mod abelian;
pub mod error;
pub mod fibration;
pub mod json;
pub mod lattice;
pub mod matrix;
pub mod mapclass;
pub mod monodromy;
pub mod reproduce;
pub mod unipotent;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use abelian::{cokernel, groups_isomorphic, kernel_saturated, smith_normal_form, FgAbelianGroup, SmithDecomposition};
pub use error::{Error, Result};
pub use lattice::{Isometry, Lattice, LatticeVector};
pub use matrix::Matrix;

pub type IntegerMatrix = Matrix<BigInt>;
pub type RationalMatrix = Matrix<BigRational>;
