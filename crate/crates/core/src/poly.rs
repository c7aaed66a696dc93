//! Homogeneous polynomials in three variables with exact rational
//! coefficients, plus affine Taylor expansion at a point.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::{fmt_q, Q};

/// Exponent triple for `x^a y^b z^c`.
pub type Exps = [u32; 3];

/// Degree-`d` monomials in the fixed order used for every coordinate vector:
/// descending lex with `x > y > z`.
pub fn monomials(d: u32) -> Vec<Exps> {
    let mut out = Vec::new();
    for a in (0..=d).rev() {
        for b in (0..=d - a).rev() {
            out.push([a, b, d - a - b]);
        }
    }
    out
}

/// Sparse polynomial in `x, y, z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Exps, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Q) -> Self {
        Poly::monomial([0, 0, 0], c)
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn monomial(e: Exps, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Poly { terms }
    }

    /// The variable with index `i` (0 = x, 1 = y, 2 = z).
    pub fn var(i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        Poly::monomial(e, Q::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exps) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    /// Total degree of the first term, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next().map(|e| e[0] + e[1] + e[2])
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|e| e[0] + e[1] + e[2]);
        match it.next() {
            None => true,
            Some(d) => it.all(|x| x == d),
        }
    }

    /// Builds a degree-`d` polynomial from coordinates over [`monomials`].
    pub fn from_coords(d: u32, v: &[Q]) -> Self {
        let mons = monomials(d);
        assert_eq!(mons.len(), v.len(), "coordinate length mismatch");
        let terms = mons
            .into_iter()
            .zip(v)
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e, c.clone()))
            .collect();
        Poly { terms }
    }

    /// Coordinates over the degree-`d` monomials.
    pub fn coords(&self, d: u32) -> Vec<Q> {
        debug_assert!(self.terms.keys().all(|e| e[0] + e[1] + e[2] == d));
        monomials(d).iter().map(|e| self.coeff(e)).collect()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        for (e, c) in &o.terms {
            let t = terms.entry(*e).or_insert_with(Q::zero);
            *t += c;
            if t.is_zero() {
                terms.remove(e);
            }
        }
        Poly { terms }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut terms: BTreeMap<Exps, Q> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]];
                let t = terms.entry(e).or_insert_with(Q::zero);
                *t += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Poly { terms }
    }

    pub fn eval(&self, p: &[Q; 3]) -> Q {
        let mut s = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..3 {
                for _ in 0..e[i] {
                    t *= &p[i];
                }
            }
            s += t;
        }
        s
    }

    /// Expansion `f(p + t)` in the affine chart `X_c = 1`, where `c` is the
    /// largest index with `p[c] != 0`, in local coordinates given by the two
    /// remaining indices in increasing order.
    pub fn taylor_at(&self, p: &[Q; 3]) -> Poly2 {
        let c = chart_index(p);
        let pn: Vec<Q> = p.iter().map(|x| x / &p[c]).collect();
        let locals: Vec<usize> = (0..3).filter(|&i| i != c).collect();
        // Each coordinate as a polynomial in (t1, t2).
        let mut coord: Vec<Poly2> = vec![Poly2::default(); 3];
        coord[c] = Poly2::constant(Q::one());
        for (slot, &i) in locals.iter().enumerate() {
            let mut e = [0, 0];
            e[slot] = 1;
            coord[i] = Poly2::constant(pn[i].clone()).add(&Poly2::monomial(e, Q::one()));
        }
        let mut out = Poly2::default();
        for (e, k) in &self.terms {
            let mut t = Poly2::constant(k.clone());
            for i in 0..3 {
                for _ in 0..e[i] {
                    t = t.mul(&coord[i]);
                }
            }
            out = out.add(&t);
        }
        out
    }
}

/// Index of the affine chart used at `p`: the largest nonzero coordinate index.
pub fn chart_index(p: &[Q; 3]) -> usize {
    (0..3)
        .rev()
        .find(|&i| !p[i].is_zero())
        .expect("nonzero homogeneous coordinates")
}

/// Polynomial in two affine variables.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly2 {
    terms: BTreeMap<[u32; 2], Q>,
}

impl Poly2 {
    pub fn constant(c: Q) -> Self {
        Poly2::monomial([0, 0], c)
    }

    pub fn monomial(e: [u32; 2], c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Poly2 { terms }
    }

    pub fn coeff(&self, e: &[u32; 2]) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, o: &Poly2) -> Poly2 {
        let mut terms = self.terms.clone();
        for (e, c) in &o.terms {
            let t = terms.entry(*e).or_insert_with(Q::zero);
            *t += c;
            if t.is_zero() {
                terms.remove(e);
            }
        }
        Poly2 { terms }
    }

    pub fn mul(&self, o: &Poly2) -> Poly2 {
        let mut terms: BTreeMap<[u32; 2], Q> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e = [e1[0] + e2[0], e1[1] + e2[1]];
                *terms.entry(e).or_insert_with(Q::zero) += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Poly2 { terms }
    }

    /// Lowest total degree present, `None` for zero.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|e| e[0] + e[1]).min()
    }

    /// Degree-`m` homogeneous part evaluated at direction `v`.
    pub fn jet_at(&self, m: u32, v: &[Q; 2]) -> Q {
        let mut s = Q::zero();
        for (e, c) in &self.terms {
            if e[0] + e[1] != m {
                continue;
            }
            let mut t = c.clone();
            for _ in 0..e[0] {
                t *= &v[0];
            }
            for _ in 0..e[1] {
                t *= &v[1];
            }
            s += t;
        }
        s
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = ["x", "y", "z"];
        let mut first = true;
        for e in monomials(self.degree().unwrap_or(0))
            .into_iter()
            .filter(|e| self.terms.contains_key(e))
            .chain(
                self.terms
                    .keys()
                    .filter(|e| Some(e[0] + e[1] + e[2]) != self.degree())
                    .copied(),
            )
        {
            let c = &self.terms[&e];
            let neg = c < &Q::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let mut factors = Vec::new();
            for i in 0..3 {
                match e[i] {
                    0 => {}
                    1 => factors.push(names[i].to_string()),
                    k => factors.push(format!("{}^{}", names[i], k)),
                }
            }
            if factors.is_empty() {
                write!(f, "{}", fmt_q(&a))?;
            } else if a.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_q(&a), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Sparse serialized form: list of exponent triples with rational strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsePoly(pub Vec<(Exps, String)>);

impl From<&Poly> for SparsePoly {
    fn from(p: &Poly) -> Self {
        SparsePoly(p.terms.iter().map(|(e, c)| (*e, fmt_q(c))).collect())
    }
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SparsePoly::from(self).serialize(s)
    }
}
