//! The relative mapping class group of the equinodal two-nodal fibration
//! over a disk, in normal form `F^m t^k`, and its actions on the rank-2
//! groups `H_2(X)` (basis `e, c`) and `H_2(X, ∂X)` (basis `σ_0, σ_1`).
//!
//! Here `t` is the Dehn twist along the vanishing sphere `C`, `F` is the
//! fiberwise translation by a generator of the relative Mordell-Weil group,
//! and the twist along the other sphere `C_1` is `F t`. Conjugating `F` by
//! `t` inverts it.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub type SmallMatrix = Matrix<i64>;

fn small(rows: [[i64; 2]; 2]) -> SmallMatrix {
    Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).expect("2x2")
}

fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `F^m t^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ModPiWord {
    pub m: i64,
    pub k: i64,
}

impl ModPiWord {
    pub const IDENTITY: ModPiWord = ModPiWord { m: 0, k: 0 };
    /// The translation `F`.
    pub const F: ModPiWord = ModPiWord { m: 1, k: 0 };
    /// The twist along `C`.
    pub const T: ModPiWord = ModPiWord { m: 0, k: 1 };
    /// The twist along `C_1`.
    pub const T1: ModPiWord = ModPiWord { m: 1, k: 1 };

    pub fn new(m: i64, k: i64) -> Self {
        ModPiWord { m, k }
    }

    pub fn inverse(self) -> Self {
        ModPiWord { m: -sign(self.k) * self.m, k: -self.k }
    }

    pub fn pow(self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self };
        (0..n.unsigned_abs()).fold(Self::IDENTITY, |acc, _| mp_multiply(acc, base))
    }

    /// Parses a word over `F`, `F'`, `t`, `t'` (primes are inverses),
    /// optionally separated by spaces, `*` or `.`. The empty word and `1`
    /// are the identity.
    pub fn parse(word: &str) -> Result<Self> {
        let chars: Vec<char> = word.chars().filter(|c| !c.is_whitespace() && *c != '*' && *c != '.').collect();
        if chars == ['1'] {
            return Ok(Self::IDENTITY);
        }
        let mut acc = Self::IDENTITY;
        let mut i = 0;
        while i < chars.len() {
            let letter = match chars[i] {
                'F' => Self::F,
                't' => Self::T,
                other => {
                    return Err(Error::Parse(format!(
                        "unexpected {other:?} at position {i}; words use F, F', t, t'"
                    )))
                }
            };
            i += 1;
            let mut g = letter;
            if chars.get(i) == Some(&'\'') {
                g = g.inverse();
                i += 1;
            }
            acc = mp_multiply(acc, g);
        }
        Ok(acc)
    }
}

impl fmt::Display for ModPiWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F^{} t^{}", self.m, self.k)
    }
}

/// `(m1, k1)(m2, k2) = (m1 + (-1)^k1 m2, k1 + k2)`.
pub fn mp_multiply(a: ModPiWord, b: ModPiWord) -> ModPiWord {
    ModPiWord { m: a.m + sign(a.k) * b.m, k: a.k + b.k }
}

/// Image in the infinite dihedral group, where the twist has order two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ModXElement {
    pub m: i64,
    pub k: u8,
}

impl ModXElement {
    pub fn multiply(self, other: ModXElement) -> ModXElement {
        let m = self.m + sign(self.k as i64) * other.m;
        ModXElement { m, k: (self.k + other.k) % 2 }
    }

    pub fn is_identity(self) -> bool {
        self.m == 0 && self.k == 0
    }
}

pub fn to_mod_x(w: ModPiWord) -> ModXElement {
    ModXElement { m: w.m, k: w.k.rem_euclid(2) as u8 }
}

/// Intersection form on `H_2(X)` in the basis `(e, c)`: `e.e = 0`,
/// `c.c = -2`, `e.c = 0`.
pub fn h2_gram() -> SmallMatrix {
    small([[0, 0], [0, -2]])
}

/// `⟨σ_a | y_b⟩` for `σ_0, σ_1` against `e, c`.
pub fn pairing_table() -> SmallMatrix {
    small([[1, 0], [1, -1]])
}

/// `⟨x | y⟩` for `x ∈ H_2(X, ∂X)` and `y ∈ H_2(X)` in coordinates.
pub fn pair(x: &[i64], y: &[i64]) -> i64 {
    pairing_table().bilinear(x, y)
}

/// Action on `H_2(X)` in the basis `(e, c)`: `F` fixes `e` and sends `c`
/// to `c + 2e`; `t` is the reflection in `c`.
pub fn h2_action(w: ModPiWord) -> SmallMatrix {
    let s = sign(w.k);
    small([[1, 2 * w.m * s], [0, s]])
}

fn inverse_2x2(m: &SmallMatrix) -> SmallMatrix {
    let det = m.determinant();
    assert!(det == 1 || det == -1, "unimodular 2x2 expected");
    small([[m[(1, 1)] * det, -m[(0, 1)] * det], [-m[(1, 0)] * det, m[(0, 0)] * det]])
}

/// Action on `H_2(X, ∂X)` in the basis `(σ_0, σ_1)`, determined by
/// invariance of the pairing with `H_2(X)`: `H_r^T P H = P`.
pub fn relative_action(w: ModPiWord) -> SmallMatrix {
    let p = pairing_table();
    let h_inv = inverse_2x2(&h2_action(w));
    (&(&p * &h_inv) * &inverse_2x2(&p)).transpose()
}

/// The map `H_2(X) -> H_2(X, ∂X)` dual to the intersection form:
/// `⟨j(y) | y'⟩ = y.y'`.
pub fn inclusion_map() -> SmallMatrix {
    &inverse_2x2(&pairing_table()).transpose() * &h2_gram()
}

fn var_t() -> SmallMatrix {
    // x -> ⟨x|c⟩ c
    let p = pairing_table();
    small([[0, 0], [p[(0, 1)], p[(1, 1)]]])
}

fn var_t1() -> SmallMatrix {
    // x -> ⟨x|c+e⟩ (c+e)
    let p = pairing_table();
    let a = p[(0, 0)] + p[(0, 1)];
    let b = p[(1, 0)] + p[(1, 1)];
    small([[a, b], [a, b]])
}

/// `var(gh) = var(g) h_r + var(h)`.
fn var_compose(g: (ModPiWord, &SmallMatrix), h: (ModPiWord, &SmallMatrix)) -> SmallMatrix {
    &(g.1 * &relative_action(h.0)) + h.1
}

/// `var(g^-1) = -var(g) (g^-1)_r`.
fn var_inverse(g: ModPiWord, var_g: &SmallMatrix) -> SmallMatrix {
    -&(var_g * &relative_action(g.inverse()))
}

/// Variation `H_2(X, ∂X) -> H_2(X)`, `x -> w(x) - x`, as a matrix from
/// `(σ_0, σ_1)` coordinates to `(e, c)` coordinates.
///
/// Built from the twists along `C` and `C_1` by the cocycle rule, writing
/// `F = t_1 t^-1`.
pub fn variation(w: ModPiWord) -> SmallMatrix {
    let t = ModPiWord::T;
    let t1 = ModPiWord::T1;
    let var_t_inv = var_inverse(t, &var_t());
    let var_f = var_compose((t1, &var_t1()), (t.inverse(), &var_t_inv));
    let f = ModPiWord::F;
    let (step, var_step) = if w.m >= 0 { (f, var_f.clone()) } else { (f.inverse(), var_inverse(f, &var_f)) };
    let mut acc = (ModPiWord::IDENTITY, Matrix::zeros(2, 2));
    for _ in 0..w.m.unsigned_abs() {
        acc = (mp_multiply(acc.0, step), var_compose((acc.0, &acc.1), (step, &var_step)));
    }
    let (tstep, var_tstep) = if w.k >= 0 { (t, var_t()) } else { (t.inverse(), var_t_inv) };
    for _ in 0..w.k.unsigned_abs() {
        acc = (mp_multiply(acc.0, tstep), var_compose((acc.0, &acc.1), (tstep, &var_tstep)));
    }
    debug_assert_eq!(acc.0, w);
    acc.1
}

/// `C_n = Φ^n(C)` has class `c + n e`, as `(e, c)` coordinates.
pub fn sphere_class(n: i64) -> [i64; 2] {
    [n, 1]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SectionSpherePairing {
    /// `σ_m . C_n = m - n`.
    pub value: i64,
    /// `⟨σ_0 | c + (n - m) e⟩` from the pairing table, moving both classes
    /// by `Φ^-m`. This is `n - m`: the table's `⟨σ_1 | c⟩ = -1` and the
    /// closed formula differ by an overall sign.
    pub table_value: i64,
}

pub fn section_sphere_pairing(m: i64, n: i64) -> SectionSpherePairing {
    let value = m - n;
    let table_value = pair(&[1, 0], &sphere_class(n - m));
    assert_eq!(table_value, -value, "pairing bookkeeping out of step with the closed formula");
    SectionSpherePairing { value, table_value }
}

/// Everything reported for one word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WordReport {
    pub normal_form: ModPiWord,
    pub mod_x: ModXElement,
    pub h2_action: Vec<Vec<i64>>,
    pub relative_action: Vec<Vec<i64>>,
    pub variation: Vec<Vec<i64>>,
}

pub fn word_report(w: ModPiWord) -> WordReport {
    WordReport {
        normal_form: w,
        mod_x: to_mod_x(w),
        h2_action: h2_action(w).to_rows(),
        relative_action: relative_action(w).to_rows(),
        variation: variation(w).to_rows(),
    }
}
