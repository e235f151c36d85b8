//! Vectors of fixed norm in definite lattices, simple roots, Dynkin types,
//! and labels for even unimodular lattices.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Lattice, LatticeVector};
use crate::error::{Error, Result};
use crate::RationalMatrix;

/// All `v` with `v.v = norm` in a negative definite lattice, sorted
/// lexicographically.
///
/// Works with the positive form `P = -G`: after an exact decomposition
/// `x^T P x = Σ q_i (x_i + Σ_{j>i} μ_ij x_j)^2` the coordinates are fixed
/// from the last one down, each confined to an interval with integer
/// endpoints computed without floating point.
pub fn roots(lattice: &Lattice, norm: &BigInt) -> Result<Vec<LatticeVector>> {
    if !norm.is_negative() {
        return Err(Error::Precondition(format!("norm must be negative, got {norm}")));
    }
    if !lattice.is_negative_definite() {
        return Err(Error::NotNegativeDefinite);
    }
    let n = lattice.rank();
    let p: RationalMatrix = lattice.gram().map(|x| BigRational::from_integer(-x));
    let (q, mu) = completed_squares(&p);
    let target = BigRational::from_integer(-norm);
    let mut out = Vec::new();
    let mut x = vec![BigInt::zero(); n];
    if n > 0 {
        search(n - 1, &q, &mu, &target, &mut x, &mut out);
    }
    out.sort();
    Ok(out)
}

/// `q_i` and the upper triangular `μ_ij` of the completed-square form.
fn completed_squares(p: &RationalMatrix) -> (Vec<BigRational>, RationalMatrix) {
    let n = p.rows();
    let mut a = p.clone();
    let mut mu = RationalMatrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            mu[(i, j)] = a[(i, j)].clone() / a[(i, i)].clone();
        }
        for k in i + 1..n {
            for l in k..n {
                let delta = mu[(i, k)].clone() * a[(i, l)].clone();
                a[(k, l)] = a[(k, l)].clone() - delta;
            }
        }
    }
    ((0..n).map(|i| a[(i, i)].clone()).collect(), mu)
}

fn floor_sqrt(r: &BigRational) -> BigInt {
    if !r.is_positive() {
        return BigInt::zero();
    }
    r.floor().to_integer().sqrt()
}

fn search(
    i: usize,
    q: &[BigRational],
    mu: &RationalMatrix,
    remaining: &BigRational,
    x: &mut [BigInt],
    out: &mut Vec<LatticeVector>,
) {
    let n = x.len();
    let mut center = BigRational::zero();
    for j in i + 1..n {
        center += mu[(i, j)].clone() * BigRational::from_integer(x[j].clone());
    }
    // (x_i + center)^2 <= remaining / q_i
    let bound = remaining.clone() / q[i].clone();
    let radius = floor_sqrt(&bound);
    let lo: BigInt = (-center.clone()).floor().to_integer() - &radius - 1;
    let hi: BigInt = (-center.clone()).ceil().to_integer() + &radius + 1;
    let mut xi = lo;
    while xi <= hi {
        let shifted = BigRational::from_integer(xi.clone()) + center.clone();
        let used = q[i].clone() * shifted.clone() * shifted;
        if used <= *remaining {
            x[i] = xi.clone();
            let rest = remaining.clone() - used;
            if i == 0 {
                if rest.is_zero() {
                    out.push(LatticeVector(x.to_vec()));
                }
            } else {
                search(i - 1, q, mu, &rest, x, out);
            }
        }
        xi += 1;
    }
    x[i] = BigInt::zero();
}

/// Simple roots for the positive system cut out by a generic linear
/// functional, sorted lexicographically.
pub fn simple_roots(all: &[LatticeVector]) -> Vec<LatticeVector> {
    if all.is_empty() {
        return Vec::new();
    }
    // With base larger than twice every coordinate the functional
    // Σ x_i B^i vanishes on no nonzero vector of the box.
    let max = all
        .iter()
        .flat_map(|v| v.0.iter())
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(BigInt::zero);
    let base = max * 2 + 1;
    let functional = |v: &LatticeVector| -> BigInt {
        v.0.iter().rev().fold(BigInt::zero(), |acc, c| acc * &base + c)
    };
    let positive: Vec<&LatticeVector> = all.iter().filter(|v| functional(v).is_positive()).collect();
    let set: HashSet<&LatticeVector> = positive.iter().copied().collect();
    let mut simple: Vec<LatticeVector> = positive
        .iter()
        .filter(|r| !positive.iter().any(|s| s != *r && set.contains(&r.sub(s))))
        .map(|r| (*r).clone())
        .collect();
    simple.sort();
    simple
}

/// Dynkin types of the components of the graph on `simple` with an edge
/// wherever two roots pair nontrivially. Sorted; components that are not
/// simply laced ADE trees are reported as `"?"`.
pub fn dynkin_components(lattice: &Lattice, simple: &[LatticeVector]) -> Vec<String> {
    let k = simple.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut simply_laced = true;
    for a in 0..k {
        for b in a + 1..k {
            let p = lattice.pair(&simple[a], &simple[b]);
            if !p.is_zero() {
                if p.abs() != BigInt::one() {
                    simply_laced = false;
                }
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    let mut seen = vec![false; k];
    let mut out = Vec::new();
    for start in 0..k {
        if seen[start] {
            continue;
        }
        let mut comp = Vec::new();
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        out.push(if simply_laced { ade_type(&comp, &adj) } else { "?".to_string() });
    }
    out.sort();
    out
}

fn ade_type(comp: &[usize], adj: &[Vec<usize>]) -> String {
    let n = comp.len();
    let edges: usize = comp.iter().map(|&v| adj[v].len()).sum::<usize>() / 2;
    if edges + 1 != n {
        return "?".into();
    }
    let branch: Vec<usize> = comp.iter().copied().filter(|&v| adj[v].len() >= 3).collect();
    match branch.as_slice() {
        [] => format!("A{n}"),
        [b] if adj[*b].len() == 3 => {
            let mut arms: Vec<usize> = adj[*b].iter().map(|&w| arm_length(*b, w, adj)).collect();
            arms.sort();
            match (arms[0], arms[1], arms[2]) {
                (1, 1, _) => format!("D{n}"),
                (1, 2, 2) => "E6".into(),
                (1, 2, 3) => "E7".into(),
                (1, 2, 4) => "E8".into(),
                _ => "?".into(),
            }
        }
        _ => "?".into(),
    }
}

fn arm_length(from: usize, mut at: usize, adj: &[Vec<usize>]) -> usize {
    let mut prev = from;
    let mut len = 1;
    loop {
        let next: Vec<usize> = adj[at].iter().copied().filter(|&w| w != prev).collect();
        match next.as_slice() {
            [w] => {
                prev = at;
                at = *w;
                len += 1;
            }
            _ => return len,
        }
    }
}

fn multiple(k: usize, name: &str) -> String {
    if k == 1 {
        name.to_string()
    } else {
        format!("{k}{name}")
    }
}

/// Isomorphism label of an even unimodular lattice.
///
/// Indefinite lattices are determined by their signature and get the
/// label `aE8(∓1) ⊥ bU`. Definite lattices are certified by their root
/// system: rank `8k` with `240k` roots whose Dynkin diagram is `k` copies
/// of E8 gives `kE8(∓1)`.
pub fn classify_even_unimodular_indefinite(lattice: &Lattice) -> Result<String> {
    if !lattice.is_even() {
        return Err(Error::Precondition("lattice is not even".into()));
    }
    if !lattice.is_unimodular() {
        return Err(Error::Precondition(format!(
            "lattice is not unimodular (determinant {})",
            lattice.determinant()
        )));
    }
    let (p, q) = lattice.signature()?;
    if p > 0 && q > 0 {
        let (e8s, sign, hyp) = if p <= q { ((q - p) / 8, "−1", p) } else { ((p - q) / 8, "+1", q) };
        let mut parts = Vec::new();
        if e8s > 0 {
            parts.push(multiple(e8s, &format!("E8({sign})")));
        }
        parts.push(multiple(hyp, "U"));
        return Ok(parts.join(" ⊥ "));
    }
    if p == 0 && q == 0 {
        return Ok("0".into());
    }
    let (definite, sign) = if p == 0 {
        (lattice.clone(), "−1")
    } else {
        (Lattice::new(-lattice.gram())?, "+1")
    };
    let n = definite.rank();
    let all = roots(&definite, &BigInt::from(-2))?;
    let k = n / 8;
    let simple = simple_roots(&all);
    let types = dynkin_components(&definite, &simple);
    if n % 8 == 0 && all.len() == 240 * k && simple.len() == n && types.iter().all(|t| t == "E8") {
        return Ok(multiple(k, &format!("E8({sign})")));
    }
    Err(Error::Precondition(format!(
        "definite lattice of rank {n} with {} roots of type {} is not certified as a sum of E8 lattices",
        all.len(),
        types.join("+")
    )))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::lattice::{make_standard, reflection};

    fn minus_two() -> BigInt {
        BigInt::from(-2)
    }

    #[test]
    fn a1_and_a2() {
        let a1 = make_standard("A1(-1)").unwrap();
        let r = roots(&a1, &minus_two()).unwrap();
        assert_eq!(r, vec![LatticeVector::from_i64s(&[-1]), LatticeVector::from_i64s(&[1])]);
        let a2 = make_standard("A2(-1)").unwrap();
        let r2 = roots(&a2, &minus_two()).unwrap();
        assert_eq!(r2.len(), 6);
        assert_eq!(dynkin_components(&a2, &simple_roots(&r2)), vec!["A2"]);
    }

    #[test]
    fn e8_roots_sorted_and_closed() {
        let e8 = make_standard("E8(-1)").unwrap();
        let r = roots(&e8, &minus_two()).unwrap();
        assert_eq!(r.len(), 240);
        assert!(r.windows(2).all(|w| w[0] < w[1]));
        let set: BTreeSet<_> = r.iter().cloned().collect();
        for v in &r {
            assert!(set.contains(&v.neg()));
        }
        let s = reflection(&e8, &r[17]).unwrap();
        for v in &r {
            assert!(set.contains(&s.apply(v)));
        }
        let simple = simple_roots(&r);
        assert_eq!(simple.len(), 8);
        assert_eq!(dynkin_components(&e8, &simple), vec!["E8"]);
    }

    #[test]
    fn dynkin_types_of_small_sums() {
        let l = make_standard("A1(-1) ⊥ A2(-1)").unwrap();
        let r = roots(&l, &minus_two()).unwrap();
        assert_eq!(r.len(), 8);
        assert_eq!(dynkin_components(&l, &simple_roots(&r)), vec!["A1", "A2"]);
    }

    #[test]
    fn d4_from_norm_minus_two_in_4i() {
        // Vectors of norm -2 in 4I(-1) form the D4 root system (24 roots).
        let l = make_standard("4I(-1)").unwrap();
        let r = roots(&l, &minus_two()).unwrap();
        assert_eq!(r.len(), 24);
        assert_eq!(dynkin_components(&l, &simple_roots(&r)), vec!["D4"]);
    }

    #[test]
    fn labels() {
        let l = make_standard("2E8(-1) ⊥ 2U").unwrap();
        assert_eq!(classify_even_unimodular_indefinite(&l).unwrap(), "2E8(−1) ⊥ 2U");
        let u = make_standard("U").unwrap();
        assert_eq!(classify_even_unimodular_indefinite(&u).unwrap(), "U");
        let e8 = make_standard("E8(-1)").unwrap();
        assert_eq!(classify_even_unimodular_indefinite(&e8).unwrap(), "E8(−1)");
        let e8p = make_standard("E8(+1) ⊥ U").unwrap();
        assert_eq!(classify_even_unimodular_indefinite(&e8p).unwrap(), "E8(+1) ⊥ U");
        assert!(classify_even_unimodular_indefinite(&make_standard("I(+1)").unwrap()).is_err());
        assert!(classify_even_unimodular_indefinite(&make_standard("A2(-1)").unwrap()).is_err());
    }

    #[test]
    fn preconditions() {
        let u = make_standard("U").unwrap();
        assert_eq!(roots(&u, &minus_two()), Err(Error::NotNegativeDefinite));
        let e8 = make_standard("E8(-1)").unwrap();
        assert!(roots(&e8, &BigInt::from(2)).is_err());
    }
}
