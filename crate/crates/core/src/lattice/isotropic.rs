//! Isotropic quotients `e⊥/Ze`, Eichler transformations and reflections.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{inverse_unimodular, Isometry, Lattice, LatticeVector};
use crate::abelian::{kernel_saturated, smith_normal_form, solve_in_basis};
use crate::error::{Error, Result};
use crate::IntegerMatrix;

fn check_primitive_isotropic(lattice: &Lattice, e: &LatticeVector) -> Result<()> {
    lattice.check_len(e)?;
    if !e.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let n = lattice.norm(e);
    if !n.is_zero() {
        return Err(Error::NotIsotropic(n.to_string()));
    }
    Ok(())
}

/// The lattice `e⊥/Ze` together with the maps relating it to the ambient
/// lattice.
#[derive(Clone, Debug)]
pub struct IsotropicQuotient {
    pub e: LatticeVector,
    pub quotient: Lattice,
    /// Columns: a basis of the saturated sublattice `e⊥`.
    pub perp_basis: IntegerMatrix,
    /// Ambient coordinates of the chosen lifts of the quotient basis.
    pub lift: IntegerMatrix,
    /// Sends ambient coordinates of a vector of `e⊥` to quotient
    /// coordinates. Meaningless off `e⊥`.
    pub project: IntegerMatrix,
}

impl IsotropicQuotient {
    pub fn new(lattice: &Lattice, e: &LatticeVector) -> Result<Self> {
        check_primitive_isotropic(lattice, e)?;
        let n = lattice.rank();
        let row = IntegerMatrix::new(1, n, lattice.dual_row(e));
        let perp = kernel_saturated(&row);
        if perp.cols() != n - 1 {
            return Err(Error::Degenerate { radical_rank: n - perp.cols() });
        }
        let y = solve_in_basis(&perp, &e.0).expect("e lies in e-perp");

        // Extend y to a basis of Z^(n-1): U y = ±first unit vector, so the
        // remaining columns of U^-1 complete it.
        let y_col = IntegerMatrix::new(n - 1, 1, y);
        let snf = smith_normal_form(&y_col);
        let u_inv = inverse_unimodular(&snf.u).expect("unimodular");
        let rest: Vec<usize> = (1..n - 1).collect();
        let complement = u_inv.select_columns(&rest);
        let lift = &perp * &complement;

        let perp_snf = smith_normal_form(&perp);
        let mut select = IntegerMatrix::zeros(n - 1, n);
        for i in 0..n - 1 {
            select[(i, i)] = BigInt::one();
        }
        let left_inverse = &(&perp_snf.v * &select) * &perp_snf.u;
        let project = &snf.u.select_rows(&rest) * &left_inverse;

        let gram = &(&lift.transpose() * lattice.gram()) * &lift;
        Ok(IsotropicQuotient {
            e: e.clone(),
            quotient: Lattice::new(gram)?,
            perp_basis: perp,
            lift,
            project,
        })
    }

    pub fn in_perp(&self, lattice: &Lattice, x: &LatticeVector) -> bool {
        lattice.pair(x, &self.e).is_zero()
    }

    pub fn project_vector(&self, lattice: &Lattice, x: &LatticeVector) -> Result<LatticeVector> {
        lattice.check_len(x)?;
        if !self.in_perp(lattice, x) {
            return Err(Error::NotOrthogonal(lattice.pair(x, &self.e).to_string()));
        }
        Ok(LatticeVector(self.project.mul_vec(&x.0)))
    }

    pub fn lift_vector(&self, q: &LatticeVector) -> LatticeVector {
        LatticeVector(self.lift.mul_vec(&q.0))
    }
}

/// `E(e, c)(x) = x + (x.e)c - (x.c)e - ½(c.c)(x.e)e`.
pub fn eichler(lattice: &Lattice, e: &LatticeVector, c: &LatticeVector) -> Result<Isometry> {
    check_primitive_isotropic(lattice, e)?;
    lattice.check_len(c)?;
    let ce = lattice.pair(c, e);
    if !ce.is_zero() {
        return Err(Error::NotOrthogonal(ce.to_string()));
    }
    let cc = lattice.norm(c);
    let xe = lattice.dual_row(e);
    let xc = lattice.dual_row(c);
    let n = lattice.rank();
    let mut m = IntegerMatrix::identity(n);
    for j in 0..n {
        let twice = &cc * &xe[j];
        if twice.is_odd() {
            return Err(Error::Parity);
        }
        let half = twice / 2;
        for i in 0..n {
            let delta = &xe[j] * &c.0[i] - &xc[j] * &e.0[i] - &half * &e.0[i];
            m[(i, j)] += delta;
        }
    }
    Isometry::new(lattice, m)
}

/// Some `x` with `x.e = 1`, when the form `x -> x.e` is onto `Z`.
pub fn unit_pairing_vector(lattice: &Lattice, e: &LatticeVector) -> Option<LatticeVector> {
    let n = lattice.rank();
    let row = IntegerMatrix::new(1, n, lattice.dual_row(e));
    let snf = smith_normal_form(&row);
    if !snf.d[(0, 0)].is_one() {
        return None;
    }
    // row * v0 = u^-1 = u (u is ±1).
    let v0 = snf.v.column(0);
    let x: Vec<BigInt> = v0.iter().map(|t| t * &snf.u[(0, 0)]).collect();
    Some(LatticeVector(x))
}

/// Recovers the lift `c̃ ∈ e⊥` (unique modulo `Ze`) of an isometry that
/// fixes `e` and acts trivially on `e⊥/Ze`, and checks `g = E(e, c̃)`.
pub fn recover_eichler(lattice: &Lattice, e: &LatticeVector, g: &Isometry) -> Result<LatticeVector> {
    check_primitive_isotropic(lattice, e)?;
    if g.apply(e) != *e {
        return Err(Error::Precondition("isometry does not fix e".into()));
    }
    let x0 = unit_pairing_vector(lattice, e)
        .ok_or_else(|| Error::Precondition("no vector pairs to 1 with e".into()))?;
    let c = g.apply(&x0).sub(&x0);
    let rebuilt = eichler(lattice, e, &c)?;
    if rebuilt != *g {
        return Err(Error::Precondition(
            "isometry is not trivial on e-perp/Ze, so it is not an Eichler transformation".into(),
        ));
    }
    Ok(c)
}

/// `x -> x + (x.c)c` for a (-2)-vector `c`.
pub fn reflection(lattice: &Lattice, c: &LatticeVector) -> Result<Isometry> {
    lattice.check_len(c)?;
    let cc = lattice.norm(c);
    if cc != BigInt::from(-2) {
        return Err(Error::NotRoot(cc.to_string()));
    }
    let xc = lattice.dual_row(c);
    let n = lattice.rank();
    let m = IntegerMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { BigInt::one() } else { BigInt::zero() };
        id + &xc[j] * &c.0[i]
    });
    Isometry::new(lattice, m)
}
