//! Exact integer linear algebra: Smith normal form, saturated kernels,
//! cokernels and finitely generated abelian groups.
//!
//! The reductions are generic over any Euclidean scalar with a sign
//! (`i64`, `i128`, `BigInt`). Group-valued results always carry `BigInt`
//! invariant factors.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::matrix::{Matrix, Scalar};

/// Scalars on which division with remainder is available.
pub trait Euclid: Scalar + Integer + Signed {}

impl<T: Scalar + Integer + Signed> Euclid for T {}

/// `u * m * v == d` with `u`, `v` unimodular and `d` diagonal,
/// nonnegative, with `d[i][i] | d[i+1][i+1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmithDecomposition<T> {
    pub u: Matrix<T>,
    pub d: Matrix<T>,
    pub v: Matrix<T>,
}

impl<T: Euclid> SmithDecomposition<T> {
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Smallest nonzero |entry| in the block `[t.., t..]`; ties go to the
/// topmost row, then the leftmost column.
fn find_pivot<T: Euclid>(d: &Matrix<T>, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, T)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let a = d[(i, j)].abs();
            if a.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|(_, _, b)| a < *b) {
                best = Some((i, j, a));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

pub fn smith_normal_form<T: Euclid>(m: &Matrix<T>) -> SmithDecomposition<T> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = Matrix::identity(rows);
    let mut v = Matrix::identity(cols);

    'diag: for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = find_pivot(&d, t) else {
                break 'diag;
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut dirty = false;
            for i in t + 1..rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&d[(t, t)]);
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                dirty |= !d[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&d[(t, t)]);
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                dirty |= !d[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }

            // Pivot must divide the whole remaining block.
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !d[(i, j)].is_multiple_of(&d[(t, t)])));
            match offender {
                Some(i) => {
                    d.add_row_multiple(t, i, &T::one());
                    u.add_row_multiple(t, i, &T::one());
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithDecomposition { u, d, v }
}

/// Column-style Hermite normal form: `h = b * w` with `w` unimodular, the
/// nonzero columns of `h` first and in echelon form (pivot rows strictly
/// increasing), pivots positive and the entries left of each pivot reduced
/// into `[0, pivot)`.
pub fn column_hermite_form<T: Euclid>(b: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
    let (rows, cols) = (b.rows(), b.cols());
    let mut h = b.clone();
    let mut w = Matrix::identity(cols);
    let mut p = 0;
    for i in 0..rows {
        if p == cols {
            break;
        }
        loop {
            let piv = (p..cols)
                .filter(|&j| !h[(i, j)].is_zero())
                .min_by(|&a, &c| h[(i, a)].abs().cmp(&h[(i, c)].abs()));
            let Some(j0) = piv else { break };
            h.swap_cols(p, j0);
            w.swap_cols(p, j0);
            let mut dirty = false;
            for j in p + 1..cols {
                if h[(i, j)].is_zero() {
                    continue;
                }
                let q = -h[(i, j)].div_floor(&h[(i, p)]);
                h.add_col_multiple(j, p, &q);
                w.add_col_multiple(j, p, &q);
                dirty |= !h[(i, j)].is_zero();
            }
            if !dirty {
                break;
            }
        }
        if h[(i, p)].is_zero() {
            continue;
        }
        if h[(i, p)].is_negative() {
            h.negate_col(p);
            w.negate_col(p);
        }
        for k in 0..p {
            let q = -h[(i, k)].div_floor(&h[(i, p)]);
            if !q.is_zero() {
                h.add_col_multiple(k, p, &q);
                w.add_col_multiple(k, p, &q);
            }
        }
        p += 1;
    }
    (h, w)
}

pub fn rank<T: Euclid>(m: &Matrix<T>) -> usize {
    smith_normal_form(m).rank()
}

/// Basis (as columns) of the column span of `m`, in Hermite form.
pub fn image_basis<T: Euclid>(m: &Matrix<T>) -> Matrix<T> {
    let (h, _) = column_hermite_form(m);
    let r = (0..h.cols()).take_while(|&j| (0..h.rows()).any(|i| !h[(i, j)].is_zero())).count();
    h.select_columns(&(0..r).collect::<Vec<_>>())
}

/// Basis (as columns) of the saturation of `ker m` in `Z^cols`, in Hermite
/// form. The quotient of `Z^cols` by the returned sublattice is torsion-free.
pub fn kernel_saturated<T: Euclid>(m: &Matrix<T>) -> Matrix<T> {
    let snf = smith_normal_form(m);
    let r = snf.rank();
    let free: Vec<usize> = (r..m.cols()).collect();
    let basis = snf.v.select_columns(&free);
    image_basis(&basis)
}

/// Integer coordinates of `v` in the basis given by the columns of `b`
/// (assumed linearly independent), or `None` when `v` is not in their span.
pub fn solve_in_basis<T: Euclid>(b: &Matrix<T>, v: &[T]) -> Option<Vec<T>> {
    assert_eq!(b.rows(), v.len(), "solve_in_basis: length mismatch");
    let snf = smith_normal_form(b);
    let y = snf.u.mul_vec(v);
    let k = b.cols();
    let diag = snf.diagonal();
    let mut z = vec![T::zero(); k];
    for (i, yi) in y.iter().enumerate() {
        let di = diag.get(i).cloned().unwrap_or_else(T::zero);
        if di.is_zero() {
            if !yi.is_zero() {
                return None;
            }
            continue;
        }
        if !yi.is_multiple_of(&di) {
            return None;
        }
        if i < k {
            z[i] = yi.clone() / di;
        }
    }
    Some(snf.v.mul_vec(&z))
}

/// Finitely generated abelian group `Z^free_rank + Z/d_1 + ... + Z/d_k`
/// with `2 <= d_1 | d_2 | ... | d_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FgAbelianGroup {
    #[serde(rename = "rank")]
    pub free_rank: usize,
    #[serde(with = "crate::json::big_vec")]
    pub torsion: Vec<BigInt>,
}

impl FgAbelianGroup {
    /// Checked constructor; the torsion list must already be an invariant
    /// factor chain.
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Result<Self, String> {
        if torsion.iter().any(|d| d < &BigInt::from(2)) {
            return Err("invariant factors must be >= 2".into());
        }
        if torsion.windows(2).any(|w| !w[1].is_multiple_of(&w[0])) {
            return Err("invariant factors must form a divisibility chain".into());
        }
        Ok(FgAbelianGroup { free_rank, torsion })
    }

    pub fn trivial() -> Self {
        FgAbelianGroup { free_rank: 0, torsion: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        FgAbelianGroup { free_rank: rank, torsion: Vec::new() }
    }

    /// Normalizes a direct sum of cyclic groups `Z/n_i` (with `n_i = 0`
    /// meaning `Z`) into invariant-factor form.
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Self {
        cokernel(&Matrix::diagonal(orders))
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion.iter().product())
    }

    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `Z^rows / (column span of m)`.
pub fn cokernel<T: Euclid>(m: &Matrix<T>) -> FgAbelianGroup
where
    BigInt: From<T>,
{
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    let rank = diag.iter().filter(|x| !x.is_zero()).count();
    let torsion = diag
        .into_iter()
        .filter(|x| !x.is_zero() && !x.is_one())
        .map(BigInt::from)
        .collect();
    FgAbelianGroup { free_rank: m.rows() - rank, torsion }
}

pub fn groups_isomorphic(g: &FgAbelianGroup, h: &FgAbelianGroup) -> bool {
    g.free_rank == h.free_rank && g.torsion == h.torsion
}

/// `(span S + span N) / span N` for generator columns `s` and `n` living in
/// the same ambient `Z^k`.
pub fn subquotient<T: Euclid>(s: &Matrix<T>, n: &Matrix<T>) -> FgAbelianGroup
where
    BigInt: From<T>,
{
    let total = image_basis(&s.hcat(n));
    if total.cols() == 0 {
        return FgAbelianGroup::trivial();
    }
    let coords: Vec<Vec<T>> = n
        .columns()
        .iter()
        .map(|c| solve_in_basis(&total, c).expect("generator lies in the joint span"))
        .collect();
    cokernel(&Matrix::from_columns(total.cols(), &coords))
}
