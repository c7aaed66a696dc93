//! The blow-down map `F: Rep(Q) -> Rep(Q0)` given by polynomial images of
//! the base arrows, with a certificate that every base relation maps into
//! the relation ideal of the augmented quiver.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{fmt_q, Q};
use crate::picard::DivisorClass;
use crate::quiver::{Path, QuiverOfSections};
use crate::solver::{propagate, relation_equations, Equation};
use crate::stability::Representation;

/// `coef` times the product of the values of `arrows` (ordered as written).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coef: Q,
    pub arrows: Vec<usize>,
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (fmt_q(&self.coef), &self.arrows).serialize(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ImageKind {
    /// A single arrow with the same section.
    Identity,
    /// A combination of paths between the corresponding vertices.
    Composite,
    /// An arrow across the new center: `c u_s u_t` plus `e`-composites.
    Crossing,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArrowImage {
    pub arrow: usize,
    pub kind: ImageKind,
    pub terms: Vec<Term>,
}

/// Images of all base arrows.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArrowMap {
    /// 0-based vertex `k` of the augmented quiver.
    pub k: usize,
    pub images: Vec<ArrowImage>,
    pub relations_verified: usize,
}

/// Vertex of `Q` where arrows leaving base vertex `i` start.
pub fn vertex_source(i: usize, k: usize) -> usize {
    if i <= k {
        i
    } else {
        i + 1
    }
}

/// Vertex of `Q` where arrows entering base vertex `j` end.
pub fn vertex_target(j: usize, k: usize) -> usize {
    if j < k {
        j
    } else {
        j + 1
    }
}

fn terms_of(c: &[Q], paths: &[Path], prefix: &[usize]) -> Vec<Term> {
    c.iter()
        .zip(paths)
        .filter(|(x, _)| !x.is_zero())
        .map(|(x, p)| {
            let mut arrows = prefix.to_vec();
            arrows.extend(p.iter().copied());
            Term {
                coef: x.clone(),
                arrows,
            }
        })
        .collect()
}

/// Builds `phi` on every base arrow and verifies the relation images.
pub fn build_blowdown_map(q: &QuiverOfSections, q0: &QuiverOfSections) -> Result<ArrowMap> {
    let m = q
        .marking
        .as_ref()
        .ok_or_else(|| Error::BlowDown("augmented quiver carries no marking".into()))?;
    if q.n != q0.n + 1 {
        return Err(Error::BlowDown(format!(
            "vertex counts {} and {} do not differ by one",
            q.n, q0.n
        )));
    }
    let kk = m.k;
    let ex = m.exceptional;
    let center = &m.center;
    let e_class = DivisorClass::exceptional(q.cfg.r(), ex);
    let mut images = Vec::new();
    for b in &q0.arrows {
        let (i, j) = (b.source, b.target);
        let (s, t) = (vertex_source(i, kk), vertex_target(j, kk));
        let pulled = b.divisor.insert_exceptional(ex);
        let crossing = i < kk && kk < j;
        let expected = if crossing { &pulled - &e_class } else { pulled };
        if q.hom(s, t) != expected {
            return Err(Error::BlowDown(format!(
                "Hom({}, {}) is {}, expected {}",
                q.labels[s],
                q.labels[t],
                q.hom(s, t),
                expected
            )));
        }
        let f = &b.section;
        if !crossing {
            if let Some(a) = q
                .arrows_between(s, t)
                .into_iter()
                .find(|&a| q.arrows[a].section == *f)
            {
                images.push(ArrowImage {
                    arrow: b.id,
                    kind: ImageKind::Identity,
                    terms: vec![Term {
                        coef: Q::one(),
                        arrows: vec![a],
                    }],
                });
                continue;
            }
            let c = q.express(s, t, f)?;
            images.push(ArrowImage {
                arrow: b.id,
                kind: ImageKind::Composite,
                terms: terms_of(&c, &q.pair(s, t).expect("pair").paths, &[]),
            });
            continue;
        }
        let ui = &m.u[&i];
        let uj = &m.u[&t];
        let uu = q.path_section(ui).mul(&q.path_section(uj));
        let c = f.eval(center) / uu.eval(center);
        let rem = f.sub(&uu.scale(&c));
        let d = q.express(s, t, &rem)?;
        let mut terms = Vec::new();
        if !c.is_zero() {
            let mut arrows = ui.clone();
            arrows.extend(uj.iter().copied());
            terms.push(Term { coef: c, arrows });
        }
        terms.extend(terms_of(&d, &q.pair(s, t).expect("pair").paths, &[m.e]));
        images.push(ArrowImage {
            arrow: b.id,
            kind: ImageKind::Crossing,
            terms,
        });
    }
    let mut map = ArrowMap {
        k: kk,
        images,
        relations_verified: 0,
    };
    map.relations_verified = verify_relations(&map, q, q0)?;
    Ok(map)
}

/// Image of a base path as a list of terms.
fn expand_path(map: &ArrowMap, p: &[usize]) -> Vec<Term> {
    let mut acc = vec![Term {
        coef: Q::one(),
        arrows: Vec::new(),
    }];
    for &b in p {
        let mut next = Vec::new();
        for t in &acc {
            for u in &map.images[b].terms {
                let mut arrows = t.arrows.clone();
                arrows.extend(u.arrows.iter().copied());
                next.push(Term {
                    coef: &t.coef * &u.coef,
                    arrows,
                });
            }
        }
        acc = next;
    }
    acc
}

fn composable(q: &QuiverOfSections, p: &[usize], s: usize, t: usize) -> bool {
    q.is_path(p) && q.arrows[p[0]].source == s && q.arrows[*p.last().expect("nonempty")].target == t
}

fn verify_relations(map: &ArrowMap, q: &QuiverOfSections, q0: &QuiverOfSections) -> Result<usize> {
    let m = q.marking.as_ref().expect("marked");
    let kk = map.k;
    let mut count = 0;
    for pr0 in &q0.relations {
        if pr0.kernel.is_empty() {
            continue;
        }
        let (i0, j0) = (pr0.source, pr0.target);
        let (s, t) = (vertex_source(i0, kk), vertex_target(j0, kk));
        let pr = q.pair(s, t).expect("pair");
        let index: HashMap<&Path, usize> = pr.paths.iter().enumerate().map(|(x, p)| (p, x)).collect();
        let crossing = i0 < kk && kk < j0;
        for kv in &pr0.kernel {
            let mut acc = vec![Q::zero(); pr.paths.len()];
            let mut c_uu = Q::zero();
            let add = |p: &[usize], c: Q, acc: &mut Vec<Q>| -> Result<()> {
                let x = index.get(&p.to_vec()).ok_or_else(|| {
                    Error::BlowDown(format!("term {p:?} is not a path {} -> {}", q.labels[s], q.labels[t]))
                })?;
                acc[*x] += c;
                Ok(())
            };
            for (pi, c) in kv {
                for term in expand_path(map, &pr0.paths[*pi]) {
                    let coef = c * &term.coef;
                    if !crossing {
                        add(&term.arrows, coef, &mut acc)?;
                        continue;
                    }
                    if let Some(rest) = (0..term.arrows.len())
                        .filter(|&x| term.arrows[x] == m.e)
                        .map(|x| {
                            let mut r = term.arrows.clone();
                            r.remove(x);
                            r
                        })
                        .find(|r| composable(q, r, s, t))
                    {
                        add(&rest, coef, &mut acc)?;
                        continue;
                    }
                    let cut = term
                        .arrows
                        .iter()
                        .position(|&a| q.arrows[a].target == kk + 1)
                        .ok_or_else(|| Error::BlowDown(format!("term {:?} does not reach {}", term.arrows, q.labels[kk + 1])))?;
                    let (x, y) = term.arrows.split_at(cut + 1);
                    if !composable(q, x, s, kk + 1) || !composable(q, y, kk, t) {
                        return Err(Error::BlowDown(format!("term {:?} does not split at the center", term.arrows)));
                    }
                    let (cx, alpha, pa) = reduce_at_center(q, x, s, true)?;
                    let (cy, beta, pb) = reduce_at_center(q, y, t, false)?;
                    let ui = &m.u[&s];
                    let uj = &m.u[&t];
                    c_uu += &coef * &cx * &cy;
                    for (bq, qq) in beta.iter().zip(pb) {
                        if bq.is_zero() {
                            continue;
                        }
                        let mut p = ui.clone();
                        p.extend(qq.iter().copied());
                        add(&p, &coef * &cx * bq, &mut acc)?;
                    }
                    for (ap, pp) in alpha.iter().zip(pa) {
                        if ap.is_zero() {
                            continue;
                        }
                        let mut p = pp.clone();
                        p.extend(uj.iter().copied());
                        add(&p, &coef * &cy * ap, &mut acc)?;
                        for (bq, qq) in beta.iter().zip(pb) {
                            if bq.is_zero() {
                                continue;
                            }
                            let mut p = pp.clone();
                            p.push(m.e);
                            p.extend(qq.iter().copied());
                            add(&p, &coef * ap * bq, &mut acc)?;
                        }
                    }
                }
            }
            if !c_uu.is_zero() {
                return Err(Error::BlowDown(format!(
                    "relation image between {} and {} keeps a u-product with coefficient {}",
                    q0.labels[i0],
                    q0.labels[j0],
                    fmt_q(&c_uu)
                )));
            }
            if !pr.in_kernel(&acc) {
                return Err(Error::BlowDown(format!(
                    "relation image between {} and {} is not in the relation span",
                    q0.labels[i0], q0.labels[j0]
                )));
            }
            count += 1;
        }
    }
    Ok(count)
}

/// Writes a path into `k'` (resp. out of `k`) as `c u + sum alpha_p p`,
/// with `p` running over paths into `k` (resp. out of `k'`) composed with `e`.
fn reduce_at_center<'a>(
    q: &'a QuiverOfSections,
    x: &[usize],
    end: usize,
    into: bool,
) -> Result<(Q, Vec<Q>, &'a [Path])> {
    let m = q.marking.as_ref().expect("marked");
    let kk = m.k;
    let u = &m.u[&end];
    let fx = q.path_section(x);
    let fu = q.path_section(u);
    let c = fx.eval(&m.center) / fu.eval(&m.center);
    let rem = fx.sub(&fu.scale(&c));
    let (s, t) = if into { (end, kk) } else { (kk + 1, end) };
    let alpha = q.express(s, t, &rem)?;
    Ok((c, alpha, &q.pair(s, t).expect("pair").paths))
}

/// `F(R)`: each base arrow takes the value of its image.
pub fn apply_f(map: &ArrowMap, r: &Representation) -> Representation {
    Representation::new(
        map.images
            .iter()
            .map(|img| {
                img.terms
                    .iter()
                    .map(|t| &t.coef * r.path_value(&t.arrows))
                    .sum()
            })
            .collect(),
    )
}

/// Base gauge with `F(g R) = descend_gauge(g) F(R)`.
pub fn descend_gauge(g: &[Q], k: usize) -> Vec<Q> {
    let n0 = g.len() - 1;
    (0..n0)
        .map(|i| {
            if i < k {
                &g[i] * &g[k]
            } else if i == k {
                &g[k] * &g[k + 1]
            } else {
                &g[i + 1] * &g[k + 1]
            }
        })
        .collect()
}

/// Gauge `h` with `h R2 = R1` when `F(R1) = g0 F(R2)` and both `e`-values
/// `e1 = r1_e`, `e2 = r2_e` are nonzero.
pub fn lift_gauge(g0: &[Q], e1: &Q, e2: &Q, k: usize) -> Vec<Q> {
    let n0 = g0.len();
    let mut h = Vec::with_capacity(n0 + 1);
    for i in 0..n0 {
        if i < k {
            h.push(&g0[i] * e1);
        } else if i == k {
            h.push(&g0[k] * e2);
            h.push(&g0[k] * e1);
        } else {
            h.push(&g0[i] * e2);
        }
    }
    h
}

/// A representation `R` with `r_e = 1` and `F(R) = r0`, found by
/// propagation; free values are set to zero (or one if zero is inconsistent).
pub fn lift_representation(
    map: &ArrowMap,
    q: &QuiverOfSections,
    r0: &Representation,
) -> Result<Representation> {
    let m = q
        .marking
        .as_ref()
        .ok_or_else(|| Error::BlowDown("augmented quiver carries no marking".into()))?;
    let mut eqs = relation_equations(q);
    for (img, v) in map.images.iter().zip(&r0.values) {
        let mut e = Equation::default();
        for t in &img.terms {
            e.add_term(t.arrows.clone(), t.coef.clone());
        }
        e.add_term(Vec::new(), -v.clone());
        eqs.push(e);
    }
    let mut known = vec![None; q.arrows.len()];
    known[m.e] = Some(Q::one());
    let mut p = propagate(&eqs, known);
    while p.consistent && !p.complete() {
        let v = p.undetermined()[0];
        let mut tried = None;
        for guess in [Q::zero(), Q::one()] {
            let mut kn = p.values.clone();
            kn[v] = Some(guess);
            let next = propagate(&eqs, kn);
            if next.consistent {
                tried = Some(next);
                break;
            }
        }
        p = tried.ok_or_else(|| Error::BlowDown("no lift with r_e = 1".into()))?;
    }
    let r = Representation::new(
        p.solution()
            .ok_or_else(|| Error::BlowDown("no lift with r_e = 1".into()))?,
    );
    if !r.satisfies_relations(q) || apply_f(map, &r) != *r0 {
        return Err(Error::BlowDown("lift fails verification".into()));
    }
    Ok(r)
}
