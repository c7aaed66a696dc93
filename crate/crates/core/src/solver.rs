//! Constraint propagation for sparse polynomial systems in arrow values:
//! substitute known values, eliminate, and read off variables that occur
//! linearly in a row with no other unknowns.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::linalg::{sparse_rref, SparseRow, Q};
use crate::quiver::QuiverOfSections;

/// Sorted variable ids with repetition; the empty monomial is the constant.
pub type Monomial = Vec<usize>;

/// Polynomial equation `sum c_m m = 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Equation {
    pub terms: BTreeMap<Monomial, Q>,
}

impl Equation {
    pub fn add_term(&mut self, mut m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        m.sort_unstable();
        let e = self.terms.entry(m.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    /// `x_v - c = 0`.
    pub fn assignment(v: usize, c: Q) -> Self {
        let mut e = Equation::default();
        e.add_term(vec![v], Q::one());
        e.add_term(Vec::new(), -c);
        e
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        self.terms
            .iter()
            .map(|(m, c)| m.iter().fold(c.clone(), |acc, &v| acc * &x[v]))
            .sum()
    }

    /// Partial derivative in `v` evaluated at `x`.
    pub fn derivative(&self, v: usize, x: &[Q]) -> Q {
        let mut s = Q::zero();
        for (m, c) in &self.terms {
            let k = m.iter().filter(|&&u| u == v).count();
            if k == 0 {
                continue;
            }
            let mut t = c * Q::from_integer((k as i64).into());
            let mut skipped = false;
            for &u in m {
                if u == v && !skipped {
                    skipped = true;
                    continue;
                }
                t *= &x[u];
            }
            s += t;
        }
        s
    }

    /// Substitutes the known values.
    pub fn substitute(&self, known: &[Option<Q>]) -> Equation {
        let mut out = Equation::default();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = Vec::new();
            for &v in m {
                match &known[v] {
                    Some(x) => coef *= x,
                    None => rest.push(v),
                }
            }
            out.add_term(rest, coef);
        }
        out
    }
}

/// The relation generators of a quiver as equations in arrow values.
pub fn relation_equations(q: &QuiverOfSections) -> Vec<Equation> {
    let mut out = Vec::new();
    for pr in &q.relations {
        for kv in &pr.kernel {
            let mut e = Equation::default();
            for (j, c) in kv {
                e.add_term(pr.paths[*j].clone(), c.clone());
            }
            out.push(e);
        }
    }
    out
}

/// Outcome of [`propagate`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Propagation {
    #[serde(skip)]
    pub values: Vec<Option<Q>>,
    /// Variables in the order they were determined.
    pub order: Vec<usize>,
    pub consistent: bool,
}

impl Propagation {
    pub fn complete(&self) -> bool {
        self.consistent && self.values.iter().all(Option::is_some)
    }

    pub fn undetermined(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&v| self.values[v].is_none())
            .collect()
    }

    pub fn solution(&self) -> Option<Vec<Q>> {
        if !self.complete() {
            return None;
        }
        Some(self.values.iter().map(|x| x.clone().expect("complete")).collect())
    }
}

/// Repeats: substitute known values, eliminate with nonlinear monomials
/// ordered before linear ones, and assign every variable whose row has no
/// other unknown; stops at a fixpoint or on an inconsistent row.
pub fn propagate(eqs: &[Equation], known: Vec<Option<Q>>) -> Propagation {
    let mut values = known;
    let mut order = Vec::new();
    loop {
        let reduced: Vec<Equation> = eqs.iter().map(|e| e.substitute(&values)).collect();
        let mut monos: Vec<Monomial> = reduced
            .iter()
            .flat_map(|e| e.terms.keys().cloned())
            .collect();
        monos.sort_by(|a, b| {
            let rank = |m: &Monomial| match m.len() {
                0 => 2,
                1 => 1,
                _ => 0,
            };
            rank(a).cmp(&rank(b)).then_with(|| a.cmp(b))
        });
        monos.dedup();
        let col: BTreeMap<&Monomial, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let rows: Vec<SparseRow> = reduced
            .iter()
            .filter(|e| !e.terms.is_empty())
            .map(|e| e.terms.iter().map(|(m, c)| (col[m], c.clone())).collect())
            .collect();
        let rref = sparse_rref(rows);
        let mut progress = false;
        for row in &rref {
            let (&lead, _) = row.iter().next().expect("nonzero row");
            let lm = &monos[lead];
            if lm.is_empty() {
                return Propagation {
                    values,
                    order,
                    consistent: false,
                };
            }
            if lm.len() != 1 || row.len() > 2 {
                continue;
            }
            let rest = row.iter().nth(1);
            let c = match rest {
                None => Q::zero(),
                Some((&j, x)) if monos[j].is_empty() => -x.clone(),
                _ => continue,
            };
            let v = lm[0];
            if values[v].is_none() {
                values[v] = Some(c);
                order.push(v);
                progress = true;
            }
        }
        if !progress {
            return Propagation {
                values,
                order,
                consistent: true,
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    fn eq(terms: &[(&[usize], i64)]) -> Equation {
        let mut e = Equation::default();
        for (m, c) in terms {
            e.add_term(m.to_vec(), q(*c));
        }
        e
    }

    #[test]
    fn chains_of_linear_substitutions() {
        // x0 = 2, x0 x1 = 6, x1 + x2 x3 = 3
        let eqs = vec![
            eq(&[(&[0], 1), (&[], -2)]),
            eq(&[(&[0, 1], 1), (&[], -6)]),
            eq(&[(&[1], 1), (&[2, 3], 1), (&[], -3)]),
        ];
        let p = propagate(&eqs, vec![None; 4]);
        assert!(p.consistent);
        assert_eq!(p.values[0], Some(q(2)));
        assert_eq!(p.values[1], Some(q(3)));
        assert_eq!(p.order, vec![0, 1]);
        assert_eq!(p.undetermined(), vec![2, 3]);
        let p = propagate(&eqs, vec![None, None, Some(q(5)), None]);
        assert_eq!(p.values[3], Some(q(0)));
        assert!(p.complete());
    }

    #[test]
    fn elimination_combines_rows() {
        // x0 + x1 = 1, x0 - x1 = 3
        let eqs = vec![eq(&[(&[0], 1), (&[1], 1), (&[], -1)]), eq(&[(&[0], 1), (&[1], -1), (&[], -3)])];
        let p = propagate(&eqs, vec![None; 2]);
        assert_eq!(p.solution(), Some(vec![q(2), q(-1)]));
    }

    #[test]
    fn inconsistency_is_reported() {
        let eqs = vec![eq(&[(&[0], 1), (&[], -1)]), eq(&[(&[0], 1), (&[], -2)])];
        assert!(!propagate(&eqs, vec![None]).consistent);
    }

    #[test]
    fn derivatives() {
        let e = eq(&[(&[0, 0, 1], 3), (&[1], 1)]);
        let x = vec![q(2), q(5)];
        assert_eq!(e.eval(&x), q(65));
        assert_eq!(e.derivative(0, &x), q(60));
        assert_eq!(e.derivative(1, &x), q(13));
    }
}
