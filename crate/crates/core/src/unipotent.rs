//! Unipotent isometries: detection, fixed lattices, and a bounded search for
//! a primitive isotropic fixed vector.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::abelian::kernel_saturated;
use crate::error::{Error, Result};
use crate::lattice::{eichler, reflection, Isometry, Lattice, LatticeVector};
use crate::IntegerMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnipotentCertificate {
    /// Smallest `k` with `(g - I)^k = 0`.
    pub nilpotency_index: usize,
    /// Columns: a basis of `ker(g - I)`, saturated, in Hermite form.
    #[serde(with = "crate::json::big_matrix")]
    pub fixed_lattice: IntegerMatrix,
}

impl UnipotentCertificate {
    pub fn fixed_rank(&self) -> usize {
        self.fixed_lattice.cols()
    }
}

/// `Some` certificate when `(g - I)^k = 0` for some `k <= rank`.
pub fn is_unipotent(g: &Isometry) -> Option<UnipotentCertificate> {
    let n = g.rank();
    let nil = g.matrix() - &IntegerMatrix::identity(n);
    let mut power = IntegerMatrix::identity(n);
    for k in 1..=n.max(1) {
        power = &power * &nil;
        if power.is_zero() {
            return Some(UnipotentCertificate { nilpotency_index: k, fixed_lattice: kernel_saturated(&nil) });
        }
    }
    None
}

fn certificate(g: &Isometry) -> Result<UnipotentCertificate> {
    is_unipotent(g).ok_or(Error::NotUnipotent)
}

/// Whether the fixed lattice of a unipotent isometry of `Λ_d` has rank at
/// least `4d + 2`.
pub fn fixed_rank_bound_check(g: &Isometry, d: usize) -> Result<bool> {
    Ok(certificate(g)?.fixed_rank() >= 4 * d + 2)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsotropicSearch {
    pub found: Option<LatticeVector>,
    /// Coefficient vectors in the fixed-lattice basis that were tested.
    pub candidates_checked: u64,
    /// False when the candidate budget ran out before the box was covered.
    pub exhaustive: bool,
    pub fixed_rank: usize,
}

pub const DEFAULT_CANDIDATE_BUDGET: u64 = 20_000_000;

pub fn find_primitive_isotropic_fixed(lattice: &Lattice, g: &Isometry, bound: u32) -> Result<IsotropicSearch> {
    find_primitive_isotropic_fixed_budget(lattice, g, bound, DEFAULT_CANDIDATE_BUDGET)
}

/// Enumerates coefficient vectors `a` over the fixed-lattice basis with
/// `|a_i| <= bound`, ordered by support size, then sup-norm, then support
/// set (lexicographic), then values (lexicographic), and returns the first
/// `K a` that is isotropic with `gcd(a) = 1`. Since the fixed lattice is
/// saturated, such a vector is primitive in the ambient lattice. The result
/// is checked again against `g`, the Gram matrix and primitivity before it
/// is returned.
pub fn find_primitive_isotropic_fixed_budget(
    lattice: &Lattice,
    g: &Isometry,
    bound: u32,
    budget: u64,
) -> Result<IsotropicSearch> {
    lattice.check_len(&LatticeVector::zero(g.rank()))?;
    let cert = certificate(g)?;
    let k = &cert.fixed_lattice;
    let r = k.cols();
    let q_big = &(&k.transpose() * lattice.gram()) * k;
    let q: Option<Vec<Vec<i128>>> = q_big.to_rows().iter().map(|row| row.iter().map(ToPrimitive::to_i128).collect()).collect();
    let q = q.ok_or_else(|| Error::Precondition("fixed-lattice Gram entries exceed 128 bits".into()))?;

    let mut checked = 0u64;
    let bound = bound as i64;
    for support in 1..=r {
        for height in 1..=bound {
            let mut idx: Vec<usize> = (0..support).collect();
            loop {
                let mut vals = vec![-height; support];
                loop {
                    if vals.iter().any(|v| v.abs() == height) {
                        checked += 1;
                        if checked > budget {
                            return Ok(IsotropicSearch { found: None, candidates_checked: checked - 1, exhaustive: false, fixed_rank: r });
                        }
                        if quadratic(&q, &idx, &vals) == 0 && gcd(&vals) == 1 {
                            let mut a = vec![BigInt::zero(); r];
                            for (i, v) in idx.iter().zip(&vals) {
                                a[*i] = BigInt::from(*v);
                            }
                            let v = LatticeVector(k.mul_vec(&a));
                            verify(lattice, g, &v)?;
                            return Ok(IsotropicSearch { found: Some(v), candidates_checked: checked, exhaustive: true, fixed_rank: r });
                        }
                    }
                    if !next_values(&mut vals, height) {
                        break;
                    }
                }
                if !next_subset(&mut idx, r) {
                    break;
                }
            }
        }
    }
    Ok(IsotropicSearch { found: None, candidates_checked: checked, exhaustive: true, fixed_rank: r })
}

fn quadratic(q: &[Vec<i128>], idx: &[usize], vals: &[i64]) -> i128 {
    let mut total = 0i128;
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            total += q[i][j] * vals[a] as i128 * vals[b] as i128;
        }
    }
    total
}

fn gcd(vals: &[i64]) -> i64 {
    vals.iter().fold(0i64, |g, v| g.gcd(v))
}

/// Next tuple in `[-h, h] \ {0}` in lexicographic order.
fn next_values(vals: &mut [i64], h: i64) -> bool {
    for i in (0..vals.len()).rev() {
        if vals[i] < h {
            vals[i] += 1;
            if vals[i] == 0 {
                vals[i] = 1;
            }
            for v in vals.iter_mut().skip(i + 1) {
                *v = -h;
            }
            return true;
        }
    }
    false
}

/// Next increasing index tuple below `n` in lexicographic order.
fn next_subset(idx: &mut [usize], n: usize) -> bool {
    let s = idx.len();
    for i in (0..s).rev() {
        if idx[i] < n - s + i {
            idx[i] += 1;
            for j in i + 1..s {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn verify(lattice: &Lattice, g: &Isometry, v: &LatticeVector) -> Result<()> {
    if g.apply(v) != *v || !lattice.norm(v).is_zero() || !v.is_primitive() {
        return Err(Error::Precondition(format!("search produced an invalid vector {v}")));
    }
    Ok(())
}

/// Builds an isometry from a word of factors separated by whitespace or
/// `*`, composed left to right as matrices (the rightmost acts first):
///
/// - `E(c)`: Eichler transformation with the marked vector `e`
/// - `E(u; c)`: Eichler transformation with isotropic `u`
/// - `R(c)`: reflection in the (-2)-vector `c`
///
/// Vectors are either dense (`0,1,-1,...`) or sparse (`3:1,7:-2`, 0-based).
pub fn parse_generator_word(lattice: &Lattice, word: &str) -> Result<Isometry> {
    let mut acc = Isometry::identity(lattice);
    let mut rest = word.trim();
    while !rest.is_empty() {
        rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == '*');
        if rest.is_empty() {
            break;
        }
        let kind = rest.chars().next().unwrap();
        let open = rest.find('(').ok_or_else(|| Error::Parse(format!("expected '(' in {rest:?}")))?;
        let close = rest.find(')').ok_or_else(|| Error::Parse(format!("missing ')' in {rest:?}")))?;
        if open != 1 || close < open {
            return Err(Error::Parse(format!("malformed factor in {rest:?}")));
        }
        let inner = &rest[open + 1..close];
        let factor = match kind {
            'E' => {
                let (u, c) = match inner.split_once(';') {
                    Some((u, c)) => (parse_vector(lattice, u)?, parse_vector(lattice, c)?),
                    None => {
                        let e = lattice
                            .fiber_class()
                            .cloned()
                            .ok_or_else(|| Error::Precondition("lattice has no marked vector e".into()))?;
                        (e, parse_vector(lattice, inner)?)
                    }
                };
                eichler(lattice, &u, &c)?
            }
            'R' => reflection(lattice, &parse_vector(lattice, inner)?)?,
            other => return Err(Error::Parse(format!("unknown generator {other:?}; use E(...) or R(...)"))),
        };
        acc = acc.compose(&factor);
        rest = &rest[close + 1..];
    }
    Ok(acc)
}

/// Dense `a,b,c` or sparse `i:v,j:w` coordinates for a vector of `lattice`.
pub fn parse_vector(lattice: &Lattice, text: &str) -> Result<LatticeVector> {
    let n = lattice.rank();
    let text = text.trim().trim_start_matches('[').trim_end_matches(']');
    let parse_int = |s: &str| -> Result<BigInt> {
        s.trim().replace('−', "-").parse().map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
    };
    if text.is_empty() {
        return Ok(LatticeVector::zero(n));
    }
    if text.contains(':') {
        let mut v = LatticeVector::zero(n);
        for part in text.split(',') {
            let (i, x) = part.split_once(':').ok_or_else(|| Error::Parse(format!("expected i:v, got {part:?}")))?;
            let i: usize = i.trim().parse().map_err(|_| Error::Parse(format!("bad index {i:?}")))?;
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            v.0[i] += parse_int(x)?;
        }
        Ok(v)
    } else {
        let v = LatticeVector(text.split(',').map(parse_int).collect::<Result<_>>()?);
        lattice.check_len(&v)?;
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::lambda;

    #[test]
    fn identity_certificate() {
        let l = lambda(1).unwrap();
        let c = is_unipotent(&Isometry::identity(&l)).unwrap();
        assert_eq!(c.nilpotency_index, 1);
        assert_eq!(c.fixed_rank(), 10);
        assert!(fixed_rank_bound_check(&Isometry::identity(&l), 1).unwrap());
    }

    #[test]
    fn eichler_has_index_three() {
        let l = lambda(2).unwrap();
        let e = l.fiber_class().unwrap().clone();
        let g = parse_generator_word(&l, "E(2:1)").unwrap();
        assert_eq!(g, eichler(&l, &e, &LatticeVector::unit(22, 2)).unwrap());
        let c = is_unipotent(&g).unwrap();
        assert_eq!(c.nilpotency_index, 3);
        assert!(c.fixed_rank() >= 10);
        let s = find_primitive_isotropic_fixed(&l, &g, 1).unwrap();
        let v = s.found.unwrap();
        assert_eq!(g.apply(&v), v);
        assert!(l.norm(&v).is_zero());
    }

    #[test]
    fn isotropic_lift_has_index_two() {
        // c = e' from a hyperbolic block is isotropic and orthogonal to e.
        let l = lambda(2).unwrap();
        let g = parse_generator_word(&l, "E(18:1)").unwrap();
        assert_eq!(is_unipotent(&g).unwrap().nilpotency_index, 2);
    }

    #[test]
    fn reflection_is_not_unipotent() {
        let l = lambda(1).unwrap();
        let r = parse_generator_word(&l, "R(2:1)").unwrap();
        assert!(is_unipotent(&r).is_none());
        assert_eq!(fixed_rank_bound_check(&r, 1), Err(Error::NotUnipotent));
        assert_eq!(find_primitive_isotropic_fixed(&l, &r, 2).unwrap_err(), Error::NotUnipotent);
    }

    #[test]
    fn identity_search_finds_small_vector() {
        let l = lambda(1).unwrap();
        let s = find_primitive_isotropic_fixed(&l, &Isometry::identity(&l), 1).unwrap();
        let v = s.found.unwrap();
        assert!(l.norm(&v).is_zero() && v.is_primitive());
    }

    #[test]
    fn enumeration_order_helpers() {
        let mut v = vec![-2, -2];
        let mut seen = vec![v.clone()];
        while next_values(&mut v, 2) {
            seen.push(v.clone());
        }
        assert_eq!(seen.len(), 16);
        assert!(seen.iter().all(|t| !t.contains(&0)));
        let mut idx = vec![0, 1];
        let mut count = 1;
        while next_subset(&mut idx, 4) {
            count += 1;
        }
        assert_eq!(count, 6);
    }

    #[test]
    fn vector_syntax() {
        let l = lambda(1).unwrap();
        assert_eq!(parse_vector(&l, "0:1,1:-1").unwrap(), *l.fiber_class().unwrap());
        assert_eq!(parse_vector(&l, "1,-1,0,0,0,0,0,0,0,0").unwrap(), *l.fiber_class().unwrap());
        assert!(parse_vector(&l, "1,2").is_err());
        assert!(parse_vector(&l, "12:1").is_err());
        assert!(parse_generator_word(&l, "X(1)").is_err());
        assert!(parse_generator_word(&l, "E(2:1").is_err());
    }
}
