//! The fiber lattice `H_1(T^2) = Z^2`, Picard-Lefschetz transvections and
//! Hurwitz moves on ordered tuples of vanishing cycles.
//!
//! The symplectic pairing is `(x1, y1).(x2, y2) = x1*y2 - y1*x2`, so the
//! reference basis satisfies `e1.e2 = 1`. In a product of transvections the
//! first-listed cycle acts first.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::abelian::{cokernel, FgAbelianGroup};
use crate::error::{Error, Result};
use crate::IntegerMatrix;

/// A primitive class in `H_1(T^2)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VanishingCycle {
    x: BigInt,
    y: BigInt,
}

impl VanishingCycle {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Result<Self> {
        let (x, y) = (x.into(), y.into());
        if !x.gcd(&y).is_one() {
            return Err(Error::NotPrimitive);
        }
        Ok(VanishingCycle { x, y })
    }

    pub fn x(&self) -> &BigInt {
        &self.x
    }

    pub fn y(&self) -> &BigInt {
        &self.y
    }

    pub fn to_vec(&self) -> Vec<BigInt> {
        vec![self.x.clone(), self.y.clone()]
    }

    pub fn neg(&self) -> Self {
        VanishingCycle { x: -&self.x, y: -&self.y }
    }

    /// Whether the two cycles span the same subgroup of `H_1(T^2)`.
    pub fn same_line(&self, other: &Self) -> bool {
        self == other || *self == other.neg()
    }

    /// Image under an `SL2` matrix; primitivity is preserved.
    pub fn transform(&self, a: &Sl2) -> Self {
        let v = a.0.mul_vec(&self.to_vec());
        VanishingCycle { x: v[0].clone(), y: v[1].clone() }
    }
}

impl fmt::Display for VanishingCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl fmt::Debug for VanishingCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for VanishingCycle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::json::big_vec::serialize(&self.to_vec(), s)
    }
}

impl<'de> Deserialize<'de> for VanishingCycle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = crate::json::big_vec::deserialize(d)?;
        match <[BigInt; 2]>::try_from(v) {
            Ok([x, y]) => VanishingCycle::new(x, y).map_err(D::Error::custom),
            Err(v) => Err(D::Error::custom(format!("a cycle is a pair, got {} entries", v.len()))),
        }
    }
}

/// The symplectic pairing on `H_1(T^2)`.
pub fn pairing(a: &[BigInt], b: &[BigInt]) -> BigInt {
    &a[0] * &b[1] - &a[1] * &b[0]
}

/// An integer 2x2 matrix of determinant 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Sl2(IntegerMatrix);

impl Sl2 {
    pub fn new(m: IntegerMatrix) -> Result<Self> {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(Error::Dimension("SL2 elements are 2x2".into()));
        }
        let det = m.determinant();
        if !det.is_one() {
            return Err(Error::NotSl2(format!("determinant {det}")));
        }
        Ok(Sl2(m))
    }

    pub fn from_i64s(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let rows = vec![vec![a.into(), b.into()], vec![c.into(), d.into()]];
        Sl2::new(IntegerMatrix::from_rows(rows).expect("2x2"))
    }

    pub fn identity() -> Self {
        Sl2(IntegerMatrix::identity(2))
    }

    pub fn matrix(&self) -> &IntegerMatrix {
        &self.0
    }

    pub fn trace(&self) -> BigInt {
        self.0.trace()
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Sl2) -> Sl2 {
        Sl2(&self.0 * &other.0)
    }

    pub fn inverse(&self) -> Sl2 {
        let m = &self.0;
        Sl2(IntegerMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => m[(1, 1)].clone(),
            (1, 1) => m[(0, 0)].clone(),
            _ => -&m[(i, j)],
        }))
    }

    pub fn pow(&self, k: u32) -> Sl2 {
        Sl2(self.0.pow(k))
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_identity()
    }

    pub fn is_minus_identity(&self) -> bool {
        (-&self.0).is_identity()
    }

    /// `A - I`.
    pub fn minus_identity(&self) -> IntegerMatrix {
        &self.0 - &IntegerMatrix::identity(2)
    }
}

impl fmt::Debug for Sl2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.to_rows())
    }
}

impl Serialize for Sl2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::json::big_matrix::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Sl2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        Sl2::new(crate::json::big_matrix::deserialize(d)?).map_err(D::Error::custom)
    }
}

/// Ordered vanishing cycles of the singular fibers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CycleTuple(pub Vec<VanishingCycle>);

impl CycleTuple {
    pub fn from_pairs(pairs: &[(i64, i64)]) -> Result<Self> {
        pairs.iter().map(|&(x, y)| VanishingCycle::new(x, y)).collect::<Result<_>>().map(CycleTuple)
    }

    /// `[(1,0),(0,1)]` repeated `copies` times. Six copies describe twelve
    /// nodal fibers with trivial total monodromy.
    pub fn standard(copies: usize) -> Self {
        let pair = [VanishingCycle::new(1, 0).unwrap(), VanishingCycle::new(0, 1).unwrap()];
        CycleTuple(pair.iter().cloned().cycle().take(2 * copies).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn cycles(&self) -> &[VanishingCycle] {
        &self.0
    }

    pub fn concat(&self, other: &CycleTuple) -> CycleTuple {
        CycleTuple(self.0.iter().chain(&other.0).cloned().collect())
    }

    pub fn repeat(&self, k: usize) -> CycleTuple {
        CycleTuple(self.0.iter().cloned().cycle().take(k * self.0.len()).collect())
    }

    /// 1-based positions `i` with `δ_i` and `δ_{i+1}` spanning the same line.
    pub fn equinodal_positions(&self) -> Vec<usize> {
        self.0.windows(2).enumerate().filter(|(_, w)| w[0].same_line(&w[1])).map(|(i, _)| i + 1).collect()
    }
}

impl fmt::Display for CycleTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// `τ_δ(a) = a + (a.δ)δ`.
pub fn picard_lefschetz(delta: &VanishingCycle) -> Sl2 {
    let (x, y) = (&delta.x, &delta.y);
    let xy = x * y;
    Sl2(IntegerMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => BigInt::one() + &xy,
        (0, 1) => -(x * x),
        (1, 0) => y * y,
        _ => BigInt::one() - &xy,
    }))
}

/// `τ_{δ_n} ... τ_{δ_1}`.
pub fn product_monodromy(t: &CycleTuple) -> Sl2 {
    t.0.iter().fold(Sl2::identity(), |acc, d| picard_lefschetz(d).compose(&acc))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Sl2Class {
    Identity,
    MinusIdentity,
    Elliptic { order: u32 },
    /// Trace `2 sign`, not `±I`.
    Parabolic { sign: i8 },
    Hyperbolic,
}

impl fmt::Display for Sl2Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sl2Class::Identity => write!(f, "identity"),
            Sl2Class::MinusIdentity => write!(f, "minus identity"),
            Sl2Class::Elliptic { order } => write!(f, "elliptic of order {order}"),
            Sl2Class::Parabolic { sign: 1 } => write!(f, "parabolic"),
            Sl2Class::Parabolic { .. } => write!(f, "minus parabolic"),
            Sl2Class::Hyperbolic => write!(f, "hyperbolic"),
        }
    }
}

pub fn classify_sl2(a: &Sl2) -> Sl2Class {
    if a.is_identity() {
        return Sl2Class::Identity;
    }
    if a.is_minus_identity() {
        return Sl2Class::MinusIdentity;
    }
    let t = a.trace();
    let two = BigInt::from(2);
    if t.abs() < two {
        let mut p = a.clone();
        for k in 1..=6u32 {
            if p.is_identity() {
                return Sl2Class::Elliptic { order: k };
            }
            p = p.compose(a);
        }
        unreachable!("elliptic elements of SL2(Z) have order at most 6");
    }
    if t == two {
        Sl2Class::Parabolic { sign: 1 }
    } else if t == -two {
        Sl2Class::Parabolic { sign: -1 }
    } else {
        Sl2Class::Hyperbolic
    }
}

/// Trace of `τ_{δ-} τ_{δ+}` for `δ+ = (1,0)` and `δ- = (p,q)`, computed by
/// multiplying the matrices. Equals `2 - q^2`.
pub fn two_nodal_trace(p: i64, q: i64) -> Result<BigInt> {
    let plus = VanishingCycle::new(1, 0)?;
    let minus = VanishingCycle::new(p, q)?;
    Ok(picard_lefschetz(&minus).compose(&picard_lefschetz(&plus)).trace())
}

/// Coinvariants `coker(A - I)`.
pub fn torus_bundle_mw(a: &Sl2) -> FgAbelianGroup {
    cokernel(&a.minus_identity())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
}

/// A Hurwitz move at the 1-based position `index`, acting on the cycles at
/// `index` and `index + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HurwitzMove {
    pub index: usize,
    pub direction: Direction,
}

impl fmt::Display for HurwitzMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.direction {
            Direction::Left => 'L',
            Direction::Right => 'R',
        };
        write!(f, "{d}{}", self.index)
    }
}

/// Right: `(δ_i, δ_{i+1}) -> (δ_{i+1}, τ_{δ_{i+1}}(δ_i))`.
/// Left: `(δ_i, δ_{i+1}) -> (τ_{δ_i}^{-1}(δ_{i+1}), δ_i)`.
///
/// Both keep `product_monodromy` unchanged, because
/// `τ_{g δ} = g τ_δ g^{-1}`.
pub fn hurwitz_move(t: &CycleTuple, mv: HurwitzMove) -> Result<CycleTuple> {
    let n = t.len();
    if mv.index < 1 || mv.index >= n {
        return Err(Error::IndexOutOfRange { index: mv.index, len: n });
    }
    let i = mv.index - 1;
    let (a, b) = (&t.0[i], &t.0[i + 1]);
    let (first, second) = match mv.direction {
        Direction::Right => (b.clone(), a.transform(&picard_lefschetz(b))),
        Direction::Left => (b.transform(&picard_lefschetz(a).inverse()), a.clone()),
    };
    let mut out = t.clone();
    out.0[i] = first;
    out.0[i + 1] = second;
    Ok(out)
}

pub fn apply_moves(t: &CycleTuple, moves: &[HurwitzMove]) -> Result<CycleTuple> {
    moves.iter().try_fold(t.clone(), |acc, &mv| hurwitz_move(&acc, mv))
}

/// An adjacent equinodal pair reached by a word of Hurwitz moves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquinodalHit {
    pub moves: Vec<HurwitzMove>,
    /// 1-based position of the first cycle of the pair.
    pub pair_index: usize,
    /// The common line, normalized so the first nonzero coordinate is
    /// positive.
    pub cycle: VanishingCycle,
    pub tuple: CycleTuple,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquinodalSearch {
    pub hits: Vec<EquinodalHit>,
    pub tuples_explored: usize,
    /// False when the hit or state limit stopped the search before the
    /// depth bound was exhausted.
    pub exhaustive: bool,
}

pub const DEFAULT_HIT_LIMIT: usize = 32;
pub const DEFAULT_STATE_LIMIT: usize = 200_000;

fn normalize_line(c: &VanishingCycle) -> VanishingCycle {
    if c.x.is_negative() || (c.x.is_zero() && c.y.is_negative()) {
        c.neg()
    } else {
        c.clone()
    }
}

pub fn find_equinodal_pairs(t: &CycleTuple, max_moves: usize) -> EquinodalSearch {
    find_equinodal_pairs_bounded(t, max_moves, DEFAULT_HIT_LIMIT, DEFAULT_STATE_LIMIT)
}

/// Breadth-first search of the Hurwitz orbit. Moves at each tuple are tried
/// in the order R1, L1, R2, L2, ...; each tuple is visited once, at its
/// smallest depth, so results come out ordered by depth and then by that
/// move order.
pub fn find_equinodal_pairs_bounded(
    t: &CycleTuple,
    max_moves: usize,
    hit_limit: usize,
    state_limit: usize,
) -> EquinodalSearch {
    let mut hits = Vec::new();
    let mut seen: HashSet<CycleTuple> = HashSet::new();
    let mut queue: VecDeque<(CycleTuple, Vec<HurwitzMove>)> = VecDeque::new();
    seen.insert(t.clone());
    queue.push_back((t.clone(), Vec::new()));
    let mut explored = 0;
    let mut exhaustive = true;
    while let Some((cur, word)) = queue.pop_front() {
        explored += 1;
        for pos in cur.equinodal_positions() {
            hits.push(EquinodalHit {
                moves: word.clone(),
                pair_index: pos,
                cycle: normalize_line(&cur.0[pos - 1]),
                tuple: cur.clone(),
            });
            if hits.len() >= hit_limit {
                return EquinodalSearch { hits, tuples_explored: explored, exhaustive: false };
            }
        }
        if word.len() >= max_moves {
            continue;
        }
        for index in 1..cur.len() {
            for direction in [Direction::Right, Direction::Left] {
                let mv = HurwitzMove { index, direction };
                let next = hurwitz_move(&cur, mv).expect("index in range");
                if seen.contains(&next) {
                    continue;
                }
                if seen.len() >= state_limit {
                    exhaustive = false;
                    continue;
                }
                seen.insert(next.clone());
                let mut w = word.clone();
                w.push(mv);
                queue.push_back((next, w));
            }
        }
    }
    EquinodalSearch { hits, tuples_explored: explored, exhaustive }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vc(x: i64, y: i64) -> VanishingCycle {
        VanishingCycle::new(x, y).unwrap()
    }

    fn m(a: i64, b: i64, c: i64, d: i64) -> Sl2 {
        Sl2::from_i64s(a, b, c, d).unwrap()
    }

    #[test]
    fn transvection_matrices() {
        assert_eq!(picard_lefschetz(&vc(1, 0)), m(1, -1, 0, 1));
        assert_eq!(picard_lefschetz(&vc(0, 1)), m(1, 0, 1, 1));
        let d = vc(3, -5);
        assert_eq!(d.transform(&picard_lefschetz(&d)), d);
        assert_eq!(VanishingCycle::new(2, 4), Err(Error::NotPrimitive));
    }

    #[test]
    fn products() {
        let t = CycleTuple::from_pairs(&[(1, 0), (1, 0)]).unwrap();
        assert_eq!(product_monodromy(&t), m(1, -2, 0, 1));
        let s = CycleTuple::standard(1);
        let p = product_monodromy(&s);
        assert_eq!(p, m(1, -1, 1, 0));
        assert_eq!(p.trace(), BigInt::one());
        assert!(product_monodromy(&CycleTuple::standard(6)).is_identity());
        assert!(product_monodromy(&CycleTuple::standard(3)).is_minus_identity());
    }

    #[test]
    fn classification() {
        assert_eq!(classify_sl2(&Sl2::identity()), Sl2Class::Identity);
        assert_eq!(classify_sl2(&m(1, -1, 1, 0)), Sl2Class::Elliptic { order: 6 });
        assert_eq!(classify_sl2(&m(0, -1, 1, 0)), Sl2Class::Elliptic { order: 4 });
        assert_eq!(classify_sl2(&m(0, -1, 1, -1)), Sl2Class::Elliptic { order: 3 });
        assert_eq!(classify_sl2(&m(1, -2, 0, 1)), Sl2Class::Parabolic { sign: 1 });
        assert_eq!(classify_sl2(&m(-1, 0, 0, -1)), Sl2Class::MinusIdentity);
        assert_eq!(classify_sl2(&m(2, 1, 1, 1)), Sl2Class::Hyperbolic);
        assert_eq!(classify_sl2(&m(-1, 4, 0, -1)), Sl2Class::Parabolic { sign: -1 });
        assert!(Sl2::from_i64s(1, 1, 1, 1).is_err());
    }

    #[test]
    fn two_nodal_examples() {
        assert_eq!(two_nodal_trace(0, 1).unwrap(), BigInt::one());
        assert_eq!(two_nodal_trace(1, 0).unwrap(), BigInt::from(2));
        assert_eq!(two_nodal_trace(1, 2).unwrap(), BigInt::from(-2));
        assert!(two_nodal_trace(2, 4).is_err());
    }

    #[test]
    fn torus_bundles() {
        assert_eq!(torus_bundle_mw(&Sl2::identity()), FgAbelianGroup::free(2));
        let g = torus_bundle_mw(&m(1, -2, 0, 1));
        assert_eq!((g.free_rank, g.torsion.clone()), (1, vec![BigInt::from(2)]));
        assert!(torus_bundle_mw(&m(2, 1, 1, 1)).is_trivial());
    }

    #[test]
    fn hurwitz_basics() {
        let t = CycleTuple::standard(1);
        let r = hurwitz_move(&t, HurwitzMove { index: 1, direction: Direction::Right }).unwrap();
        assert_eq!(r, CycleTuple::from_pairs(&[(0, 1), (1, 1)]).unwrap());
        assert_eq!(product_monodromy(&r), product_monodromy(&t));
        let back = hurwitz_move(&r, HurwitzMove { index: 1, direction: Direction::Left }).unwrap();
        assert_eq!(back, t);
        assert!(matches!(
            hurwitz_move(&t, HurwitzMove { index: 2, direction: Direction::Left }),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn equinodal_search() {
        let t = CycleTuple::from_pairs(&[(1, 0), (1, 0)]).unwrap();
        let s = find_equinodal_pairs(&t, 0);
        assert_eq!(s.hits[0].moves, vec![]);
        assert_eq!(s.hits[0].pair_index, 1);
        assert!(find_equinodal_pairs(&CycleTuple::standard(1), 0).hits.is_empty());
        let six = CycleTuple::standard(6);
        let s = find_equinodal_pairs(&six, 6);
        assert!(!s.hits.is_empty());
        let hit = &s.hits[0];
        let replay = apply_moves(&six, &hit.moves).unwrap();
        assert_eq!(replay, hit.tuple);
        assert!(replay.0[hit.pair_index - 1].same_line(&replay.0[hit.pair_index]));
    }

    #[test]
    fn json_shape() {
        let t = CycleTuple::from_pairs(&[(1, 0), (0, -1)]).unwrap();
        assert_eq!(serde_json::to_string(&t).unwrap(), "[[1,0],[0,-1]]");
        let back: CycleTuple = serde_json::from_str("[[1,0],[0,-1]]").unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<CycleTuple>("[[2,0]]").is_err());
        assert!(serde_json::from_str::<CycleTuple>("[[1,0,1]]").is_err());
    }
}
