//! Integral lattices given by a symmetric Gram matrix.
//!
//! Vectors are integer coordinate columns in the lattice basis and
//! isometries act on those columns from the left.

mod construct;
mod isotropic;
mod roots;
mod spinor;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::abelian::{cokernel, smith_normal_form, FgAbelianGroup};
use crate::error::{Error, Result};
use crate::{IntegerMatrix, RationalMatrix};

pub use construct::{e8_gram, make_standard, minus_two_basis, model_lattice, lambda};
pub use isotropic::{
    eichler, recover_eichler, reflection, unit_pairing_vector, IsotropicQuotient,
};
pub use roots::{
    classify_even_unimodular_indefinite, dynkin_components, roots, simple_roots,
};
pub use spinor::{spinor_orientation_sign, SpinorReference};

/// Integer coordinate vector in a lattice basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(#[serde(with = "crate::json::big_vec")] pub Vec<BigInt>);

impl LatticeVector {
    pub fn zero(n: usize) -> Self {
        LatticeVector(vec![BigInt::zero(); n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        v.0[i] = BigInt::one();
        v
    }

    pub fn from_i64s(v: &[i64]) -> Self {
        LatticeVector(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    /// Generates a direct summand of the ambient lattice.
    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    pub fn scaled(&self, k: &BigInt) -> Self {
        LatticeVector(self.0.iter().map(|x| x * k).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        LatticeVector(self.0.iter().map(|x| -x).collect())
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    gram: IntegerMatrix,
    labels: Option<Vec<String>>,
    marked: BTreeMap<String, LatticeVector>,
}

#[derive(Serialize, Deserialize)]
struct LatticeJson {
    rank: usize,
    #[serde(with = "crate::json::big_matrix")]
    gram: IntegerMatrix,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    marked: BTreeMap<String, LatticeVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl Lattice {
    pub fn new(gram: IntegerMatrix) -> Result<Self> {
        if !gram.is_symmetric() {
            return Err(Error::Dimension("Gram matrix must be square and symmetric".into()));
        }
        Ok(Lattice { gram, labels: None, marked: BTreeMap::new() })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        let rows = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let gram = IntegerMatrix::from_rows(rows)
            .ok_or_else(|| Error::Dimension("ragged Gram matrix".into()))?;
        Self::new(gram)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.rank() {
            return Err(Error::Dimension("one label per basis vector".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_marked(mut self, name: &str, v: LatticeVector) -> Result<Self> {
        self.check_len(&v)?;
        self.marked.insert(name.to_string(), v);
        Ok(self)
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IntegerMatrix {
        &self.gram
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn marked(&self) -> &BTreeMap<String, LatticeVector> {
        &self.marked
    }

    /// The distinguished isotropic vector `e`, when one is marked.
    pub fn fiber_class(&self) -> Option<&LatticeVector> {
        self.marked.get("e")
    }

    pub(crate) fn check_len(&self, v: &LatticeVector) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::Dimension(format!(
                "vector of length {} in a rank {} lattice",
                v.len(),
                self.rank()
            )));
        }
        Ok(())
    }

    pub fn pair(&self, u: &LatticeVector, v: &LatticeVector) -> BigInt {
        self.gram.bilinear(&u.0, &v.0)
    }

    pub fn norm(&self, v: &LatticeVector) -> BigInt {
        self.pair(v, v)
    }

    /// The linear form `x -> x.v` as a coefficient row.
    pub fn dual_row(&self, v: &LatticeVector) -> Vec<BigInt> {
        self.gram.mul_vec(&v.0)
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[(i, i)].is_even())
    }

    pub fn determinant(&self) -> BigInt {
        self.gram.determinant()
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs().is_one()
    }

    /// Orthogonal direct sum; marked vectors of both summands are kept
    /// (names from `other` get a numeric suffix on collision).
    pub fn orthogonal_sum(&self, other: &Lattice) -> Lattice {
        let n = self.rank();
        let m = other.rank();
        let gram = self.gram.direct_sum(&other.gram);
        let labels = match (&self.labels, &other.labels) {
            (None, None) => None,
            _ => {
                let mut l = self.labels.clone().unwrap_or_else(|| default_labels("b", n));
                l.extend(other.labels.clone().unwrap_or_else(|| default_labels("b", m)));
                Some(l)
            }
        };
        let mut marked: BTreeMap<String, LatticeVector> = self
            .marked
            .iter()
            .map(|(k, v)| {
                let mut coords = v.0.clone();
                coords.extend(std::iter::repeat_n(BigInt::zero(), m));
                (k.clone(), LatticeVector(coords))
            })
            .collect();
        for (k, v) in &other.marked {
            let mut coords = vec![BigInt::zero(); n];
            coords.extend(v.0.iter().cloned());
            let mut name = k.clone();
            let mut idx = 2;
            while marked.contains_key(&name) {
                name = format!("{k}{idx}");
                idx += 1;
            }
            marked.insert(name, LatticeVector(coords));
        }
        Lattice { gram, labels, marked }
    }

    /// `(positive, negative, zero)` counts of the diagonalized form.
    pub fn inertia(&self) -> (usize, usize, usize) {
        let diag = diagonalize(&self.gram).diag;
        let pos = diag.iter().filter(|d| d.is_positive()).count();
        let neg = diag.iter().filter(|d| d.is_negative()).count();
        (pos, neg, diag.len() - pos - neg)
    }

    /// Signature `(positive, negative)` of a nondegenerate lattice.
    pub fn signature(&self) -> Result<(usize, usize)> {
        match self.inertia() {
            (p, n, 0) => Ok((p, n)),
            (_, _, z) => Err(Error::Degenerate { radical_rank: z }),
        }
    }

    pub fn is_negative_definite(&self) -> bool {
        self.inertia() == (0, self.rank(), 0)
    }

    pub fn discriminant_group(&self) -> Result<DiscriminantGroup> {
        let group = cokernel(&self.gram);
        if group.free_rank > 0 {
            return Err(Error::Degenerate { radical_rank: group.free_rank });
        }
        Ok(DiscriminantGroup { group })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(LatticeJson {
            rank: self.rank(),
            gram: self.gram.clone(),
            marked: self.marked.clone(),
            labels: self.labels.clone(),
        })
        .expect("lattice serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: LatticeJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.rank != raw.gram.rows() {
            return Err(Error::Dimension(format!(
                "rank {} does not match Gram size {}",
                raw.rank,
                raw.gram.rows()
            )));
        }
        let mut lattice = Lattice::new(raw.gram)?;
        if let Some(labels) = raw.labels {
            lattice = lattice.with_labels(labels)?;
        }
        for (name, v) in raw.marked {
            lattice = lattice.with_marked(&name, v)?;
        }
        Ok(lattice)
    }
}

fn default_labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Dual lattice modulo the lattice, as an abstract group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscriminantGroup {
    pub group: FgAbelianGroup,
}

impl DiscriminantGroup {
    pub fn order(&self) -> BigInt {
        self.group.torsion_order()
    }
}

/// Matrix preserving a Gram matrix: `m^T g m = g`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Isometry {
    matrix: IntegerMatrix,
}

impl Isometry {
    pub fn new(lattice: &Lattice, matrix: IntegerMatrix) -> Result<Self> {
        if matrix.rows() != lattice.rank() || matrix.cols() != lattice.rank() {
            return Err(Error::Dimension("isometry must be square of lattice rank".into()));
        }
        let g = lattice.gram();
        if &(&matrix.transpose() * g) * &matrix != *g {
            return Err(Error::NotIsometry);
        }
        Ok(Isometry { matrix })
    }

    pub fn identity(lattice: &Lattice) -> Self {
        Isometry { matrix: IntegerMatrix::identity(lattice.rank()) }
    }

    pub fn minus_identity(lattice: &Lattice) -> Self {
        Isometry { matrix: -&IntegerMatrix::identity(lattice.rank()) }
    }

    pub fn matrix(&self) -> &IntegerMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, v: &LatticeVector) -> LatticeVector {
        LatticeVector(self.matrix.mul_vec(&v.0))
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry { matrix: &self.matrix * &other.matrix }
    }

    pub fn inverse(&self) -> Isometry {
        Isometry {
            matrix: inverse_unimodular(&self.matrix).expect("isometries are invertible over Z"),
        }
    }

    pub fn determinant(&self) -> BigInt {
        self.matrix.determinant()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }
}

/// Inverse of an integer matrix with determinant +-1.
pub fn inverse_unimodular(m: &IntegerMatrix) -> Option<IntegerMatrix> {
    if !m.is_square() {
        return None;
    }
    let snf = smith_normal_form(m);
    if !snf.diagonal().iter().all(One::is_one) {
        return None;
    }
    Some(&snf.v * &snf.u)
}

/// Congruence diagonalization `basis^T g basis = diag(d)` over the
/// rationals. Columns of `basis` are mutually orthogonal.
pub(crate) struct Diagonalization {
    pub basis: RationalMatrix,
    pub diag: Vec<BigRational>,
}

pub(crate) fn diagonalize(gram: &IntegerMatrix) -> Diagonalization {
    let n = gram.rows();
    let mut a: RationalMatrix = gram.map(|x| BigRational::from_integer(x.clone()));
    let mut t = RationalMatrix::identity(n);
    for k in 0..n {
        if a[(k, k)].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[(j, j)].is_zero()) {
                a.swap_rows(k, j);
                a.swap_cols(k, j);
                t.swap_cols(k, j);
            } else if let Some(j) = (k + 1..n).find(|&j| !a[(k, j)].is_zero()) {
                // (v_k + v_j)^2 = 2 v_k.v_j when both are isotropic.
                let one = BigRational::one();
                a.add_col_multiple(k, j, &one);
                a.add_row_multiple(k, j, &one);
                t.add_col_multiple(k, j, &one);
            } else {
                continue;
            }
        }
        let pivot = a[(k, k)].clone();
        for j in k + 1..n {
            if a[(k, j)].is_zero() {
                continue;
            }
            let f = -(a[(k, j)].clone() / pivot.clone());
            a.add_col_multiple(j, k, &f);
            a.add_row_multiple(j, k, &f);
            t.add_col_multiple(j, k, &f);
        }
    }
    let diag = (0..n).map(|i| a[(i, i)].clone()).collect();
    Diagonalization { basis: t, diag }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> Lattice {
        Lattice::from_i64_rows(&[&[0, 1], &[1, 0]]).unwrap()
    }

    #[test]
    fn hyperbolic_plane_invariants() {
        let l = u();
        assert_eq!(l.signature().unwrap(), (1, 1));
        assert!(l.is_even());
        assert!(l.is_unimodular());
        assert!(l.discriminant_group().unwrap().group.is_trivial());
    }

    #[test]
    fn odd_unit_lattice() {
        let l = Lattice::from_i64_rows(&[&[1]]).unwrap();
        assert!(!l.is_even());
        assert_eq!(l.signature().unwrap(), (1, 0));
    }

    #[test]
    fn degenerate_reports_radical() {
        let l = Lattice::from_i64_rows(&[&[0, 0], &[0, -2]]).unwrap();
        assert_eq!(l.signature(), Err(Error::Degenerate { radical_rank: 1 }));
        assert!(l.discriminant_group().is_err());
    }

    #[test]
    fn discriminant_of_a1_and_a2() {
        let a1 = Lattice::from_i64_rows(&[&[-2]]).unwrap();
        assert_eq!(a1.discriminant_group().unwrap().group.torsion, vec![BigInt::from(2)]);
        let a2 = Lattice::from_i64_rows(&[&[-2, 1], &[1, -2]]).unwrap();
        assert_eq!(a2.discriminant_group().unwrap().group.torsion, vec![BigInt::from(3)]);
    }

    #[test]
    fn rejects_asymmetric_gram() {
        assert!(Lattice::from_i64_rows(&[&[0, 1], &[2, 0]]).is_err());
    }

    #[test]
    fn diagonalization_is_a_congruence() {
        let g = e8_gram().direct_sum(u().gram());
        let d = diagonalize(&g);
        let gq = g.map(|x| BigRational::from_integer(x.clone()));
        let prod = &(&d.basis.transpose() * &gq) * &d.basis;
        assert_eq!(prod, RationalMatrix::diagonal(&d.diag));
    }

    #[test]
    fn json_round_trip() {
        let l = u().with_marked("e", LatticeVector::from_i64s(&[1, 0])).unwrap();
        let v = l.to_json();
        assert_eq!(v["rank"], 2);
        assert_eq!(v["marked"]["e"], serde_json::json!([1, 0]));
        assert_eq!(Lattice::from_json(&v).unwrap(), l);
    }

    #[test]
    fn json_rank_mismatch_rejected() {
        let v = serde_json::json!({"rank": 3, "gram": [[0, 1], [1, 0]]});
        assert!(Lattice::from_json(&v).is_err());
    }

    #[test]
    fn isometry_check() {
        let l = u();
        let swap = IntegerMatrix::from_rows(vec![
            vec![BigInt::zero(), BigInt::one()],
            vec![BigInt::one(), BigInt::zero()],
        ])
        .unwrap();
        assert!(Isometry::new(&l, swap).is_ok());
        let bad = IntegerMatrix::from_rows(vec![
            vec![BigInt::one(), BigInt::one()],
            vec![BigInt::zero(), BigInt::one()],
        ])
        .unwrap();
        assert_eq!(Isometry::new(&l, bad), Err(Error::NotIsometry));
    }
}
