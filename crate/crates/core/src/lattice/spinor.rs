//! Orientation character of an isometry on maximal positive subspaces.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{diagonalize, Isometry, Lattice};
use crate::error::{Error, Result};
use crate::RationalMatrix;

/// A fixed maximal positive definite rational subspace `P`, spanned by the
/// positive vectors of an exact orthogonal diagonalization.
#[derive(Clone, Debug)]
pub struct SpinorReference {
    gram: RationalMatrix,
    /// Columns span `P`.
    basis: RationalMatrix,
}

impl SpinorReference {
    pub fn new(lattice: &Lattice) -> Result<Self> {
        let d = diagonalize(lattice.gram());
        let positive: Vec<usize> = (0..d.diag.len()).filter(|&i| d.diag[i].is_positive()).collect();
        if positive.is_empty() {
            return Err(Error::Precondition("lattice has no positive directions".into()));
        }
        Ok(SpinorReference {
            gram: lattice.gram().map(|x| BigRational::from_integer(x.clone())),
            basis: d.basis.select_columns(&positive),
        })
    }

    pub fn dimension(&self) -> usize {
        self.basis.cols()
    }

    /// Sign of `det(π_P ∘ g|_P)`. The basis of `P` is orthogonal and
    /// positive, so this is the sign of `det[w_i . g w_j]`.
    pub fn sign(&self, g: &Isometry) -> Result<i8> {
        let m = g.matrix().map(|x| BigRational::from_integer(x.clone()));
        if m.rows() != self.gram.rows() {
            return Err(Error::Dimension("isometry rank differs from lattice rank".into()));
        }
        if &(&m.transpose() * &self.gram) * &m != self.gram {
            return Err(Error::NotIsometry);
        }
        let w = &self.basis;
        let pairing = &(&w.transpose() * &self.gram) * &(&m * w);
        let det = pairing.determinant();
        debug_assert!(!det.is_zero(), "projection of an isometry to P is invertible");
        Ok(if det.is_positive() { 1 } else { -1 })
    }
}

/// `+1` if `g` preserves the orientation of maximal positive definite
/// subspaces, `-1` if it reverses it.
pub fn spinor_orientation_sign(lattice: &Lattice, g: &Isometry) -> Result<i8> {
    SpinorReference::new(lattice)?.sign(g)
}
