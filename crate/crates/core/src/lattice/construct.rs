//! Standard lattices and a small expression language for orthogonal sums.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! sum   := term (("⊥" | "⊕" | "+") term)*
//! term  := [count ["*"]] atom
//! atom  := "U" | "I" ["(" ±1 ")"] | "A1(" ±1 ")" | "A2(" ±1 ")" | "E8(" ±1 ")"
//!        | "Lambda(" d ")" | "(" sum ")"
//! ```

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Lattice, LatticeVector};
use crate::error::{Error, Result};
use crate::IntegerMatrix;

/// Bourbaki numbering: 1-3-4-5-6-7-8 with 2 attached to 4.
const E8_EDGES: [(usize, usize); 7] = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];

/// Gram matrix of E8(-1) in a simple-root basis: -2 on the diagonal, +1 on
/// Dynkin edges.
pub fn e8_gram() -> IntegerMatrix {
    let mut g = IntegerMatrix::diagonal(&vec![BigInt::from(-2); 8]);
    for (a, b) in E8_EDGES {
        g[(a, b)] = BigInt::one();
        g[(b, a)] = BigInt::one();
    }
    g
}

fn scaled(gram: IntegerMatrix, sign: i64) -> IntegerMatrix {
    if sign < 0 {
        gram
    } else {
        -&gram
    }
}

fn root_lattice(name: &str, sign: i64) -> Lattice {
    let base = match name {
        "A1" => IntegerMatrix::diagonal(&[BigInt::from(-2)]),
        "A2" => IntegerMatrix::from_rows(vec![
            vec![BigInt::from(-2), BigInt::one()],
            vec![BigInt::one(), BigInt::from(-2)],
        ])
        .unwrap(),
        "E8" => e8_gram(),
        _ => unreachable!("unknown root lattice {name}"),
    };
    let n = base.rows();
    Lattice::new(scaled(base, sign))
        .unwrap()
        .with_labels((1..=n).map(|i| format!("a{i}")).collect())
        .unwrap()
}

fn hyperbolic() -> Lattice {
    Lattice::from_i64_rows(&[&[0, 1], &[1, 0]])
        .unwrap()
        .with_labels(vec!["u_e".into(), "u_f".into()])
        .unwrap()
}

fn unit(sign: i64) -> Lattice {
    Lattice::from_i64_rows(&[&[sign]]).unwrap()
}

fn repeat(l: &Lattice, k: usize) -> Lattice {
    let mut acc = Lattice::new(IntegerMatrix::zeros(0, 0)).unwrap();
    for _ in 0..k {
        acc = acc.orthogonal_sum(l);
    }
    acc
}

/// The lattice `dE8(-1) ⊥ (2d-2)U`, E8 blocks first.
pub fn model_lattice(d: usize) -> Result<Lattice> {
    if d < 1 {
        return Err(Error::Precondition("d must be at least 1".into()));
    }
    Ok(repeat(&root_lattice("E8", -1), d).orthogonal_sum(&repeat(&hyperbolic(), 2 * d - 2)))
}

/// Rank `12d-2` unimodular lattice of signature `(2d-1, 10d-1)` with a
/// marked primitive isotropic vector `e`.
///
/// Even `d`: `U ⊥ dE8(-1) ⊥ (2d-2)U` with `e` the first isotropic basis
/// vector. Odd `d`: `I(+1) ⊥ I(-1) ⊥ dE8(-1) ⊥ (2d-2)U` with `e` the
/// difference of the two unit vectors. Either way `e⊥/Ze` is the model
/// lattice above.
pub fn lambda(d: usize) -> Result<Lattice> {
    let model = model_lattice(d)?;
    let (head, e) = if d.is_multiple_of(2) {
        (hyperbolic(), LatticeVector::from_i64s(&[1, 0]))
    } else {
        let head = unit(1)
            .orthogonal_sum(&unit(-1))
            .with_labels(vec!["i_plus".into(), "i_minus".into()])
            .unwrap();
        (head, LatticeVector::from_i64s(&[1, -1]))
    };
    let mut coords = e.0;
    coords.extend(std::iter::repeat_n(BigInt::zero(), model.rank()));
    head.orthogonal_sum(&model).with_marked("e", LatticeVector(coords))
}

/// A basis of the model lattice `dE8(-1) ⊥ (2d-2)U` made of (-2)-vectors:
/// the simple roots of every E8 block, and for the j-th pair of U blocks
/// the four vectors `α+e, α+f, α+e', α+f'` with `α` the first simple root
/// of the j-th E8 block.
pub fn minus_two_basis(d: usize) -> Result<Vec<LatticeVector>> {
    let model = model_lattice(d)?;
    let n = model.rank();
    let mut out: Vec<LatticeVector> = (0..8 * d).map(|i| LatticeVector::unit(n, i)).collect();
    for j in 0..d - 1 {
        let alpha = LatticeVector::unit(n, 8 * j);
        let start = 8 * d + 4 * j;
        for k in 0..4 {
            out.push(alpha.add(&LatticeVector::unit(n, start + k)));
        }
    }
    Ok(out)
}

/// Parses a construction expression such as `"U ⊥ 2E8(-1)"` or `"Lambda(2)"`.
pub fn make_standard(expr: &str) -> Result<Lattice> {
    let mut p = Parser { chars: expr.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0 };
    let l = p.sum()?;
    if p.pos != p.chars.len() {
        return Err(p.error("trailing input"));
    }
    Ok(l)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, what: &str) -> Error {
        let rest: String = self.chars[self.pos.min(self.chars.len())..].iter().collect();
        Error::Parse(format!("{what} at position {} (near {rest:?})", self.pos))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat_str(&mut self, s: &str) -> bool {
        let n = s.chars().count();
        if self.chars.len() >= self.pos + n && self.chars[self.pos..self.pos + n].iter().copied().eq(s.chars()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat_str(s) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {s:?}")))
        }
    }

    fn number(&mut self) -> Option<i64> {
        let start = self.pos;
        if matches!(self.peek(), Some('+') | Some('-') | Some('−')) {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect::<String>().replace('−', "-");
        match text.parse() {
            Ok(v) => Some(v),
            Err(_) => {
                self.pos = start;
                None
            }
        }
    }

    fn sign_arg(&mut self) -> Result<i64> {
        self.expect("(")?;
        let v = self.number().ok_or_else(|| self.error("expected +1 or -1"))?;
        self.expect(")")?;
        match v {
            1 | -1 => Ok(v),
            _ => Err(Error::Parse(format!("only ±1 scalings are supported, got {v}"))),
        }
    }

    fn sum(&mut self) -> Result<Lattice> {
        let mut acc = self.term()?;
        while self.eat_str("⊥") || self.eat_str("⊕") || self.eat_str("+") {
            acc = acc.orthogonal_sum(&self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Lattice> {
        let count = if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let k = self.number().ok_or_else(|| self.error("bad multiplicity"))?;
            self.eat_str("*");
            usize::try_from(k).map_err(|_| self.error("negative multiplicity"))?
        } else {
            1
        };
        let atom = self.atom()?;
        Ok(if count == 1 { atom } else { repeat(&atom, count) })
    }

    fn atom(&mut self) -> Result<Lattice> {
        if self.eat_str("(") {
            let inner = self.sum()?;
            self.expect(")")?;
            return Ok(inner);
        }
        if self.eat_str("Lambda") || self.eat_str("Λ") {
            self.expect("(")?;
            let d = self.number().ok_or_else(|| self.error("expected d"))?;
            self.expect(")")?;
            if d < 1 {
                return Err(Error::Precondition(format!("Lambda(d) needs d >= 1, got {d}")));
            }
            return lambda(d as usize);
        }
        for name in ["E8", "A2", "A1"] {
            if self.eat_str(name) {
                let sign = self.sign_arg()?;
                return Ok(root_lattice(name, sign));
            }
        }
        if self.eat_str("U") {
            return Ok(hyperbolic());
        }
        if self.eat_str("I") {
            let sign = if self.peek() == Some('(') { self.sign_arg()? } else { 1 };
            return Ok(unit(sign));
        }
        Err(self.error("expected a lattice"))
    }
}
