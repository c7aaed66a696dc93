//! Exact linear algebra over the rationals: reduced echelon forms, ranks,
//! nullspaces and linear solves, in dense and sparse flavors.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

/// Integer literal as a rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Fraction `n / d` as a rational.
pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Human readable rendering (`3`, `-1/2`).
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `a` or `a/b`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Q::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Q::from_integer(n))
    }
}

/// A subspace of `Q^ncols` held as a reduced row echelon basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<Vec<Q>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_rows<I: IntoIterator<Item = Vec<Q>>>(ncols: usize, rows: I) -> Self {
        let mut e = Echelon::new(ncols);
        for r in rows {
            e.insert(r);
        }
        e
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Q>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Residual of `v` after eliminating every pivot column.
    pub fn reduce(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.ncols, "vector length mismatch");
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let c = w[p].clone();
            for (wj, rj) in w.iter_mut().zip(row) {
                if !rj.is_zero() {
                    *wj -= &c * rj;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: Vec<Q>) -> bool {
        let mut w = self.reduce(&v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[p].recip();
        for x in w.iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let c = row[p].clone();
            for (rj, wj) in row.iter_mut().zip(&w) {
                if !wj.is_zero() {
                    *rj -= &c * wj;
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, w);
        true
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &[Q]) -> Option<Vec<Q>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }
}

/// Rank of a dense matrix given by rows.
pub fn rank(rows: &[Vec<Q>], ncols: usize) -> usize {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(r.clone());
        if e.rank() == ncols {
            break;
        }
    }
    e.rank()
}

/// Basis of `{x : M x = 0}` for `M` given by rows, one vector per free column,
/// with a one in that column and zeros in the other free columns.
pub fn nullspace(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    nullspace_sparse(rows, ncols)
        .into_iter()
        .map(|sv| {
            let mut v = vec![Q::zero(); ncols];
            for (j, x) in sv {
                v[j] = x;
            }
            v
        })
        .collect()
}

/// Same basis as [`nullspace`], stored sparsely as `(column, value)` pairs.
pub fn nullspace_sparse(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<(usize, Q)>> {
    let e = Echelon::from_rows(ncols, rows.iter().cloned());
    let mut is_pivot = vec![false; ncols];
    for &p in e.pivots() {
        is_pivot[p] = true;
    }
    let mut out = Vec::new();
    for f in 0..ncols {
        if is_pivot[f] {
            continue;
        }
        let mut v = Vec::new();
        for (row, &p) in e.rows().iter().zip(e.pivots()) {
            if !row[f].is_zero() {
                v.push((p, -row[f].clone()));
            }
        }
        v.push((f, Q::one()));
        v.sort_by_key(|(j, _)| *j);
        out.push(v);
    }
    out
}

/// One solution of `M x = b` (free variables set to zero), or `None`.
pub fn solve(rows: &[Vec<Q>], ncols: usize, rhs: &[Q]) -> Option<Vec<Q>> {
    assert_eq!(rows.len(), rhs.len(), "rhs length mismatch");
    let aug: Vec<Vec<Q>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut v = r.clone();
            v.push(b.clone());
            v
        })
        .collect();
    let e = Echelon::from_rows(ncols + 1, aug);
    if e.pivots().contains(&ncols) {
        return None;
    }
    let mut x = vec![Q::zero(); ncols];
    for (row, &p) in e.rows().iter().zip(e.pivots()) {
        x[p] = row[ncols].clone();
    }
    Some(x)
}

/// Transpose of a dense matrix with `ncols` columns.
pub fn transpose(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    (0..ncols)
        .map(|j| rows.iter().map(|r| r[j].clone()).collect())
        .collect()
}

/// Sparse row keyed by column.
pub type SparseRow = BTreeMap<usize, Q>;

/// Reduced row echelon form of sparse rows (pivot = smallest column).
pub fn sparse_rref(rows: Vec<SparseRow>) -> Vec<SparseRow> {
    let mut piv: BTreeMap<usize, SparseRow> = BTreeMap::new();
    for mut r in rows {
        r.retain(|_, v| !v.is_zero());
        while let Some((&lead, _)) = r.iter().find(|(c, _)| piv.contains_key(c)) {
            let c = r[&lead].clone();
            let prow = &piv[&lead];
            axpy(&mut r, &(-c), prow);
        }
        if let Some((&lead, lv)) = r.iter().next() {
            let inv = lv.recip();
            for v in r.values_mut() {
                *v *= &inv;
            }
            let keys: Vec<usize> = piv.keys().copied().collect();
            for k in keys {
                let c = piv[&k].get(&lead).cloned();
                if let Some(c) = c {
                    let row = piv.get_mut(&k).expect("pivot row");
                    axpy(row, &(-c), &r);
                }
            }
            piv.insert(lead, r);
        }
    }
    piv.into_values().collect()
}

fn axpy(r: &mut SparseRow, c: &Q, other: &SparseRow) {
    for (k, v) in other {
        let e = r.entry(*k).or_insert_with(Q::zero);
        *e += c * v;
        if e.is_zero() {
            r.remove(k);
        }
    }
}

/// Least common multiple of denominators, for compact integer renderings.
pub fn common_denominator(xs: &[Q]) -> BigInt {
    let mut l = BigInt::one();
    for x in xs {
        let d = x.denom().abs();
        let g = num_integer::Integer::gcd(&l, &d);
        l = &l / &g * d;
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Q>> {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn rank_of_singular_matrix() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a, 3), 2);
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let a = m(&[&[1, 2, 3, 4], &[0, 1, 1, 1]]);
        let ns = nullspace(&a, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for r in &a {
                let s: Q = r.iter().zip(v).map(|(x, y)| x * y).sum();
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = m(&[&[1, 1], &[1, -1]]);
        let x = solve(&a, 2, &[q(3), q(1)]).unwrap();
        assert_eq!(x, vec![q(2), q(1)]);
        let b = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&b, 2, &[q(1), q(3)]).is_none());
    }

    #[test]
    fn echelon_insert_keeps_reduced_form() {
        let mut e = Echelon::new(3);
        assert!(e.insert(vec![q(0), q(2), q(4)]));
        assert!(e.insert(vec![q(1), q(1), q(0)]));
        assert!(!e.insert(vec![q(2), q(4), q(4)]));
        assert_eq!(e.pivots(), &[0, 1]);
        assert_eq!(e.rows()[0], vec![q(1), q(0), q(-2)]);
        assert_eq!(e.coordinates(&[q(3), q(1), q(-4)]), Some(vec![q(3), q(1)]));
    }

    #[test]
    fn sparse_rref_matches_dense() {
        let rows: Vec<SparseRow> = vec![
            [(0, q(1)), (2, q(1))].into_iter().collect(),
            [(0, q(1)), (1, q(1))].into_iter().collect(),
        ];
        let r = sparse_rref(rows);
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].get(&1), None);
        assert_eq!(r[0][&2], q(1));
        assert_eq!(r[1][&1], q(1));
        assert_eq!(r[1][&2], q(-1));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("-3/6"), Some(frac(-1, 2)));
        assert_eq!(fmt_q(&frac(-1, 2)), "-1/2");
        assert_eq!(parse_q("1/0"), None);
    }
}
