//! Genus-one fibrations with nodal singular fibers over a disk or a sphere,
//! described by their ordered vanishing cycles, and their Mordell-Weil
//! groups.
//!
//! The groups are computed as first cohomology of the punctured base with
//! coefficients in the fiber homology `Z^2`, using crossed homomorphisms on
//! the free group of loops `g_1, ..., g_n` around the singular fibers. A
//! cocycle is admissible when each `φ(g_i)` lies in `im(A_i - I)`, where
//! `A_i` is the local monodromy. Coboundaries are `φ_v(g_i) = (A_i - I)v`.
//! A loop around all singular fibers evaluates to
//! `Σ_i A_n ... A_{i+1} φ(g_i)`.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::abelian::{cokernel, image_basis, kernel_saturated, solve_in_basis, subquotient, FgAbelianGroup};
use crate::error::{Error, Result};
use crate::lattice::{
    classify_even_unimodular_indefinite, dynkin_components, make_standard, model_lattice, roots, IsotropicQuotient,
    Lattice, LatticeVector,
};
use crate::monodromy::{picard_lefschetz, product_monodromy, torus_bundle_mw, CycleTuple, Sl2};
use crate::IntegerMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Base {
    Disk,
    Sphere,
}

impl Base {
    pub fn name(self) -> &'static str {
        match self {
            Base::Disk => "disk",
            Base::Sphere => "sphere",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FibrationDescription {
    pub base: Base,
    pub cycles: CycleTuple,
}

/// Wire form; cycles are checked after parsing so that every problem can be
/// reported at once.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDescription {
    base: Base,
    #[serde(default)]
    cycles: Vec<Vec<serde_json::Value>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A cycle that is not a primitive pair (1-based position).
    BadCycle { index: usize, detail: String },
    NontrivialMonodromy { product: Sl2 },
    CountNotMultipleOf12 { count: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadCycle { index, detail } => write!(f, "cycle {index}: {detail}"),
            Violation::NontrivialMonodromy { product } => {
                write!(f, "total monodromy {:?} is not the identity", product)
            }
            Violation::CountNotMultipleOf12 { count } => {
                write!(f, "{count} singular fibers over the sphere, not a multiple of 12")
            }
        }
    }
}

impl FibrationDescription {
    pub fn new(base: Base, cycles: CycleTuple) -> Self {
        FibrationDescription { base, cycles }
    }

    pub fn disk(cycles: CycleTuple) -> Self {
        Self::new(Base::Disk, cycles)
    }

    pub fn sphere(cycles: CycleTuple) -> Self {
        Self::new(Base::Sphere, cycles)
    }

    /// The sphere description made of `6d` copies of `[(1,0),(0,1)]`.
    pub fn standard_sphere(d: usize) -> Self {
        Self::sphere(CycleTuple::standard(6 * d))
    }

    /// Parses `{"base": "disk" | "sphere", "cycles": [[x, y], ...]}`.
    /// Structural problems are parse errors; non-primitive cycles are
    /// collected as violations.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: RawDescription =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let mut cycles = Vec::new();
        let mut bad = Vec::new();
        for (i, pair) in raw.cycles.into_iter().enumerate() {
            match serde_json::from_value(serde_json::Value::Array(pair)) {
                Ok(c) => cycles.push(c),
                Err(e) => bad.push(Violation::BadCycle { index: i + 1, detail: e.to_string() }),
            }
        }
        if !bad.is_empty() {
            return Err(Error::InvalidDescription(bad));
        }
        Ok(Self::new(raw.base, CycleTuple(cycles)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("description serializes")
    }

    fn require(&self, base: Base) -> Result<()> {
        if self.base != base {
            return Err(Error::WrongBase { expected: base.name(), found: self.base.name() });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub violations: Vec<Violation>,
    /// `n / 12` for a valid sphere description.
    pub genus: Option<usize>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the sphere conditions. Cycles are primitive by construction of
/// [`CycleTuple`]; see [`FibrationDescription::from_json`] for raw input.
pub fn validate(f: &FibrationDescription) -> Validation {
    let mut violations = Vec::new();
    if f.base == Base::Sphere {
        let product = product_monodromy(&f.cycles);
        if !product.is_identity() {
            violations.push(Violation::NontrivialMonodromy { product });
        }
        if !f.cycles.len().is_multiple_of(12) {
            violations.push(Violation::CountNotMultipleOf12 { count: f.cycles.len() });
        }
    }
    let genus = (f.base == Base::Sphere && violations.is_empty()).then(|| f.cycles.len() / 12);
    Validation { violations, genus }
}

/// Per-puncture data of the cocycle model.
struct Punctures {
    /// `A_i - I`.
    minus_id: Vec<IntegerMatrix>,
    /// Column basis of `im(A_i - I)`.
    images: Vec<IntegerMatrix>,
    /// `A_n ... A_{i+1}`.
    tails: Vec<IntegerMatrix>,
    boundary: Sl2,
}

impl Punctures {
    fn new(cycles: &CycleTuple) -> Self {
        let local: Vec<Sl2> = cycles.cycles().iter().map(picard_lefschetz).collect();
        let minus_id: Vec<IntegerMatrix> = local.iter().map(Sl2::minus_identity).collect();
        let images = minus_id.iter().map(image_basis).collect();
        let mut tails = vec![IntegerMatrix::identity(2); local.len()];
        for i in (0..local.len().saturating_sub(1)).rev() {
            tails[i] = &tails[i + 1] * local[i + 1].matrix();
        }
        Punctures { minus_id, images, tails, boundary: product_monodromy(cycles) }
    }

    fn unknowns(&self) -> usize {
        self.images.iter().map(IntegerMatrix::cols).sum()
    }

    /// Columns: the coboundaries of the unit vectors, in the coordinates of
    /// the admissible cocycles.
    fn coboundaries(&self) -> IntegerMatrix {
        let cols: Vec<Vec<BigInt>> = (0..2)
            .map(|k| {
                let mut col = Vec::new();
                for (a, img) in self.minus_id.iter().zip(&self.images) {
                    let value = a.column(k);
                    col.extend(solve_in_basis(img, &value).expect("(A - I)v lies in im(A - I)"));
                }
                col
            })
            .collect();
        IntegerMatrix::from_columns(self.unknowns(), &cols)
    }

    /// Matrix of `φ -> φ(g_n ... g_1)` on the admissible cocycle coordinates.
    fn boundary_evaluation(&self) -> IntegerMatrix {
        let mut cols = Vec::new();
        for (tail, img) in self.tails.iter().zip(&self.images) {
            for b in img.columns() {
                cols.push(tail.mul_vec(&b));
            }
        }
        IntegerMatrix::from_columns(2, &cols)
    }
}

/// Mordell-Weil group over the disk, `(⊕ im(A_i - I)) / coboundaries`.
pub fn mw_disk(f: &FibrationDescription) -> Result<FgAbelianGroup> {
    f.require(Base::Disk)?;
    Ok(cokernel(&Punctures::new(&f.cycles).coboundaries()))
}

/// Mordell-Weil group of the boundary torus bundle, `coker(A_∂ - I)`.
pub fn mw_boundary_disk(f: &FibrationDescription) -> Result<FgAbelianGroup> {
    f.require(Base::Disk)?;
    Ok(torus_bundle_mw(&product_monodromy(&f.cycles)))
}

/// Image of `MW(π) -> MW(∂π)`.
pub fn restriction_image(f: &FibrationDescription) -> Result<FgAbelianGroup> {
    f.require(Base::Disk)?;
    let p = Punctures::new(&f.cycles);
    Ok(subquotient(&p.boundary_evaluation(), &p.boundary.minus_identity()))
}

/// Relative Mordell-Weil group over the disk, reported as free abelian of
/// rank `rank coker(H^0(B) -> H^0(∂B)) + rank ker(MW(π) -> MW(∂π))`.
/// Only the rank comes out of the exact sequence; freeness of the relative
/// group is a known structural fact and is assumed here.
pub fn mw_relative_disk(f: &FibrationDescription) -> Result<FgAbelianGroup> {
    f.require(Base::Disk)?;
    let p = Punctures::new(&f.cycles);
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for a in &p.minus_id {
        rows.extend(a.to_rows());
    }
    let invariants_base = if rows.is_empty() {
        2
    } else {
        kernel_saturated(&IntegerMatrix::from_rows(rows).expect("rectangular")).cols()
    };
    let invariants_boundary = kernel_saturated(&p.boundary.minus_identity()).cols();
    let mw = cokernel(&p.coboundaries());
    let image = subquotient(&p.boundary_evaluation(), &p.boundary.minus_identity());
    let kernel_rank = mw.free_rank - image.free_rank;
    Ok(FgAbelianGroup::free(invariants_boundary - invariants_base + kernel_rank))
}

/// Mordell-Weil group over the sphere: `Σ_i A_n...A_{i+1} φ(g_i) = 0` cuts
/// out the cocycles, coboundaries are divided out.
pub fn mw_sphere_group(f: &FibrationDescription) -> Result<FgAbelianGroup> {
    f.require(Base::Sphere)?;
    let v = validate(f);
    if !v.is_ok() {
        return Err(Error::InvalidDescription(v.violations));
    }
    let p = Punctures::new(&f.cycles);
    let cocycles = kernel_saturated(&p.boundary_evaluation());
    let cob = p.coboundaries();
    let coords: Vec<Vec<BigInt>> = cob
        .columns()
        .iter()
        .map(|c| solve_in_basis(&cocycles, c).expect("coboundaries are cocycles"))
        .collect();
    Ok(cokernel(&IntegerMatrix::from_columns(cocycles.cols(), &coords)))
}

/// The group from the cocycle model, together with the isomorphism label of
/// the lattice `dE8(-1) ⊥ (2d-2)U` that carries its intersection form.
pub fn mw_sphere(f: &FibrationDescription) -> Result<(FgAbelianGroup, String)> {
    let group = mw_sphere_group(f)?;
    let d = f.cycles.len() / 12;
    let label = classify_even_unimodular_indefinite(&model_lattice(d)?)?;
    Ok((group, label))
}

/// Everything computed for one description, ready for JSON output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MWReport {
    pub mw: FgAbelianGroup,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mw_boundary: Option<FgAbelianGroup>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mw_relative: Option<FgAbelianGroup>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restriction_image: Option<FgAbelianGroup>,
    /// Index of the image of `MW(π,∂π)` in `MW(π)`, when finite.
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_big")]
    pub relative_index: Option<BigInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genus: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice_label: Option<String>,
}

mod opt_big {
    use num_bigint::BigInt;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_some(&crate::json::to_value(x)),
            None => s.serialize_none(),
        }
    }
}

pub fn mw_report(f: &FibrationDescription) -> Result<MWReport> {
    match f.base {
        Base::Disk => {
            let image = restriction_image(f)?;
            Ok(MWReport {
                mw: mw_disk(f)?,
                mw_boundary: Some(mw_boundary_disk(f)?),
                mw_relative: Some(mw_relative_disk(f)?),
                relative_index: image.order(),
                restriction_image: Some(image),
                genus: None,
                lattice_label: None,
            })
        }
        Base::Sphere => {
            let (mw, label) = mw_sphere(f)?;
            Ok(MWReport {
                mw,
                mw_boundary: None,
                mw_relative: None,
                restriction_image: None,
                relative_index: None,
                genus: Some(f.cycles.len() / 12),
                lattice_label: Some(label),
            })
        }
    }
}

/// Concatenation of two valid sphere descriptions.
pub fn fiber_connected_sum(a: &FibrationDescription, b: &FibrationDescription) -> Result<FibrationDescription> {
    for f in [a, b] {
        f.require(Base::Sphere)?;
        let v = validate(f);
        if !v.is_ok() {
            return Err(Error::InvalidDescription(v.violations));
        }
    }
    Ok(FibrationDescription::sphere(a.cycles.concat(&b.cycles)))
}

/// The rational elliptic surface: `I ⊥ 9I(-1)` with basis `(ℓ, e_0..e_8)`,
/// fiber class `3ℓ - Σ e_i`, and the classes `ℓ - e_1 - e_2 - e_3`,
/// `e_1 - e_2`, ..., `e_7 - e_8`, which descend to a root basis of
/// `e⊥/Ze`.
#[derive(Clone, Debug)]
pub struct RationalElliptic {
    pub lattice: Lattice,
    pub e: LatticeVector,
    pub quotient: IsotropicQuotient,
    /// Ambient classes.
    pub classes: Vec<LatticeVector>,
    /// The same classes in quotient coordinates.
    pub images: Vec<LatticeVector>,
    /// Gram matrix of `images`.
    pub gram: IntegerMatrix,
    pub root_count: usize,
    pub dynkin: Vec<String>,
    /// Whether `images` is a basis of the quotient.
    pub images_form_basis: bool,
    pub label: String,
}

pub fn rational_elliptic_mw() -> Result<RationalElliptic> {
    let lattice = make_standard("I(+1) ⊥ 9I(-1)")?;
    let n = lattice.rank();
    let ell = LatticeVector::unit(n, 0);
    let ex = |i: usize| LatticeVector::unit(n, i + 1);
    let mut e = ell.scaled(&BigInt::from(3));
    for i in 0..9 {
        e = e.sub(&ex(i));
    }
    let quotient = IsotropicQuotient::new(&lattice, &e)?;
    let mut classes = vec![ell.sub(&ex(1)).sub(&ex(2)).sub(&ex(3))];
    for i in 1..8 {
        classes.push(ex(i).sub(&ex(i + 1)));
    }
    let images: Vec<LatticeVector> =
        classes.iter().map(|c| quotient.project_vector(&lattice, c)).collect::<Result<_>>()?;
    let q = &quotient.quotient;
    let gram = IntegerMatrix::from_fn(8, 8, |i, j| q.pair(&images[i], &images[j]));
    let cols: Vec<Vec<BigInt>> = images.iter().map(|v| v.0.clone()).collect();
    let change = IntegerMatrix::from_columns(q.rank(), &cols);
    let images_form_basis = change.is_square() && change.determinant().magnitude() == &1u32.into();
    let all = roots(q, &BigInt::from(-2))?;
    let dynkin = dynkin_components(q, &images);
    let label = classify_even_unimodular_indefinite(q)?;
    Ok(RationalElliptic {
        root_count: all.len(),
        lattice,
        e,
        quotient,
        classes,
        images,
        gram,
        dynkin,
        images_form_basis,
        label,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    fn disk(pairs: &[(i64, i64)]) -> FibrationDescription {
        FibrationDescription::disk(CycleTuple::from_pairs(pairs).unwrap())
    }

    fn group(rank: usize, torsion: &[i64]) -> FgAbelianGroup {
        FgAbelianGroup::new(rank, torsion.iter().map(|&t| BigInt::from(t)).collect()).unwrap()
    }

    #[test]
    fn equinodal_disk() {
        let f = disk(&[(1, 0), (1, 0)]);
        assert_eq!(mw_disk(&f).unwrap(), group(1, &[]));
        assert_eq!(mw_boundary_disk(&f).unwrap(), group(1, &[2]));
        assert_eq!(mw_relative_disk(&f).unwrap(), group(1, &[]));
        assert_eq!(restriction_image(&f).unwrap(), group(0, &[2]));
        let opposite = disk(&[(1, 0), (-1, 0)]);
        assert_eq!(mw_disk(&opposite).unwrap(), group(1, &[]));
    }

    #[test]
    fn transverse_disk() {
        let f = disk(&[(1, 0), (0, 1)]);
        assert!(mw_disk(&f).unwrap().is_trivial());
        assert!(mw_boundary_disk(&f).unwrap().is_trivial());
        assert!(mw_relative_disk(&f).unwrap().is_trivial());
        assert!(mw_disk(&disk(&[(1, 0), (2, 1)])).unwrap().is_trivial());
    }

    #[test]
    fn empty_disk() {
        let f = disk(&[]);
        assert!(mw_disk(&f).unwrap().is_trivial());
        assert_eq!(mw_boundary_disk(&f).unwrap(), group(2, &[]));
        assert!(mw_relative_disk(&f).unwrap().is_trivial());
    }

    #[test]
    fn validation() {
        assert!(validate(&disk(&[(1, 0), (1, 0)])).is_ok());
        let ok = FibrationDescription::standard_sphere(1);
        assert_eq!(validate(&ok).genus, Some(1));
        let bad = FibrationDescription::sphere(CycleTuple::from_pairs(&[(1, 0); 12]).unwrap());
        let v = validate(&bad);
        assert!(matches!(v.violations.as_slice(), [Violation::NontrivialMonodromy { .. }]));
        let short = FibrationDescription::sphere(CycleTuple::standard(3));
        assert_eq!(validate(&short).violations.len(), 2);
    }

    #[test]
    fn sphere_ranks_and_labels() {
        let (g1, l1) = mw_sphere(&FibrationDescription::standard_sphere(1)).unwrap();
        assert_eq!((g1, l1.as_str()), (group(8, &[]), "E8(−1)"));
        let (g2, l2) = mw_sphere(&FibrationDescription::standard_sphere(2)).unwrap();
        assert_eq!((g2, l2.as_str()), (group(20, &[]), "2E8(−1) ⊥ 2U"));
    }

    #[test]
    fn wrong_base_errors() {
        let s = FibrationDescription::standard_sphere(1);
        assert_eq!(mw_disk(&s), Err(Error::WrongBase { expected: "disk", found: "sphere" }));
        assert!(mw_sphere(&disk(&[(1, 0)])).is_err());
        assert!(fiber_connected_sum(&s, &disk(&[])).is_err());
    }

    #[test]
    fn gluing_adds_genus() {
        let a = FibrationDescription::standard_sphere(1);
        let glued = fiber_connected_sum(&a, &a).unwrap();
        assert_eq!(validate(&glued).genus, Some(2));
    }

    #[test]
    fn json_round_trip_and_violations() {
        let v = serde_json::json!({"base": "disk", "cycles": [[1, 0], [0, 1]]});
        let f = FibrationDescription::from_json(&v).unwrap();
        assert_eq!(f.to_json(), v);
        let bad = serde_json::json!({"base": "disk", "cycles": [[2, 0], [1, 0], [1, 2, 3]]});
        match FibrationDescription::from_json(&bad) {
            Err(Error::InvalidDescription(list)) => assert_eq!(list.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            FibrationDescription::from_json(&serde_json::json!({"base": "torus"})),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn rational_elliptic_surface() {
        let r = rational_elliptic_mw().unwrap();
        assert!(r.lattice.norm(&r.e).is_zero());
        assert!(r.e.is_primitive());
        assert_eq!(r.lattice.norm(&r.classes[0]), BigInt::from(-2));
        assert_eq!(r.root_count, 240);
        assert!(r.images_form_basis);
        assert_eq!(r.dynkin, vec!["E8"]);
        assert_eq!(r.label, "E8(−1)");
        for i in 0..8 {
            assert_eq!(r.gram[(i, i)], BigInt::from(-2));
        }
        assert!(r.quotient.quotient.determinant().is_one());
    }
}
