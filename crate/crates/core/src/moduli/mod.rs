//! Representation-level checks of the moduli statements: the blow-down
//! map, gauge orbits, the exceptional fiber, tangent dimensions, and
//! semi-invariant counts.

pub mod blowdown;
pub mod fiber;

use std::collections::VecDeque;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{rank, Echelon, Q};
use crate::poly::{monomials, Poly};
use crate::quiver::QuiverOfSections;
use crate::solver::relation_equations;
use crate::stability::{Representation, Weight};

pub use blowdown::{
    apply_f, build_blowdown_map, descend_gauge, lift_gauge, lift_representation, ArrowImage,
    ArrowMap, ImageKind, Term,
};
pub use fiber::{exceptional_fiber_analysis, fiber_representation, FiberReport};

/// A gauge `g` with `g . r1 = r2`, or `None` if none exists.
pub fn orbit_equivalent(
    r1: &Representation,
    r2: &Representation,
    q: &QuiverOfSections,
) -> Option<Vec<Q>> {
    if r1.values.len() != q.arrows.len() || r2.values.len() != q.arrows.len() {
        return None;
    }
    if r1.zero_set() != r2.zero_set() {
        return None;
    }
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); q.n];
    for a in &q.arrows {
        if !r1.values[a.id].is_zero() {
            adj[a.source].push((a.target, a.id));
            adj[a.target].push((a.source, a.id));
        }
    }
    let mut g: Vec<Option<Q>> = vec![None; q.n];
    for root in 0..q.n {
        if g[root].is_some() {
            continue;
        }
        g[root] = Some(Q::one());
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let gv = g[v].clone().expect("visited");
            for &(w, a) in &adj[v] {
                if g[w].is_some() {
                    continue;
                }
                let ratio = &r2.values[a] / &r1.values[a];
                let arrow = &q.arrows[a];
                // g_t r1 / g_s = r2
                g[w] = Some(if arrow.source == v { &gv * &ratio } else { &gv / &ratio });
                queue.push_back(w);
            }
        }
    }
    let g: Vec<Q> = g.into_iter().map(|x| x.expect("all visited")).collect();
    q.arrows
        .iter()
        .all(|a| &g[a.target] * &r1.values[a.id] / &g[a.source] == r2.values[a.id])
        .then_some(g)
}

/// `dim Ext^1(R, R) = #arrows - rank(d1) - rank(d0)`.
pub fn ext1_dimension(r: &Representation, q: &QuiverOfSections) -> usize {
    let na = q.arrows.len();
    // d0: vertex scalars -> arrow perturbations, one row per vertex.
    let d0: Vec<Vec<Q>> = (0..q.n)
        .map(|v| {
            q.arrows
                .iter()
                .map(|a| {
                    let mut c = Q::zero();
                    if a.target == v {
                        c += &r.values[a.id];
                    }
                    if a.source == v {
                        c -= &r.values[a.id];
                    }
                    c
                })
                .collect()
        })
        .collect();
    let d1: Vec<Vec<Q>> = relation_equations(q)
        .iter()
        .map(|e| (0..na).map(|v| e.derivative(v, &r.values)).collect())
        .collect();
    na - rank(&d1, na) - rank(&d0, na)
}

/// Rank of the span of the sections of all arrow monomials of weight
/// `kdeg * theta`; a lower bound for the semi-invariant dimension in general.
pub fn semi_invariant_rank(
    q: &QuiverOfSections,
    w: &Weight,
    kdeg: u32,
    cap: usize,
) -> Result<usize> {
    if w.n() != q.n {
        return Err(Error::DimensionMismatch {
            expected: q.n,
            found: w.n(),
        });
    }
    let target: Vec<i64> = w.theta.iter().map(|t| t * kdeg as i64).collect();
    let mut out_arrows: Vec<Vec<usize>> = vec![Vec::new(); q.n];
    for a in &q.arrows {
        out_arrows[a.source].push(a.id);
    }
    let mut found: Vec<Vec<u32>> = Vec::new();
    let mut x = vec![0u32; q.arrows.len()];
    enumerate(q, &target, &out_arrows, 0, &mut x, &mut found, cap)?;
    if found.is_empty() {
        return Ok(0);
    }
    let deg = found[0]
        .iter()
        .zip(&q.arrows)
        .map(|(&e, a)| e as i64 * a.divisor.d)
        .sum::<i64>();
    let ncols = monomials(deg as u32).len();
    let mut span = Echelon::new(ncols);
    for ex in &found {
        let mut f = Poly::one();
        for (a, &e) in ex.iter().enumerate() {
            for _ in 0..e {
                f = f.mul(&q.arrows[a].section);
            }
        }
        span.insert(f.coords(deg as u32));
        if span.rank() == ncols {
            break;
        }
    }
    Ok(span.rank())
}

fn enumerate(
    q: &QuiverOfSections,
    target: &[i64],
    out_arrows: &[Vec<usize>],
    v: usize,
    x: &mut Vec<u32>,
    found: &mut Vec<Vec<u32>>,
    cap: usize,
) -> Result<()> {
    if v == q.n {
        found.push(x.clone());
        if found.len() > cap {
            return Err(Error::Size(format!("more than {cap} weighted monomials")));
        }
        return Ok(());
    }
    let inflow: i64 = q
        .arrows
        .iter()
        .filter(|a| a.target == v)
        .map(|a| x[a.id] as i64)
        .sum();
    let out = inflow - target[v];
    if out < 0 || (out_arrows[v].is_empty() && out != 0) {
        return Ok(());
    }
    distribute(q, target, out_arrows, v, 0, out as u32, x, found, cap)
}

#[allow(clippy::too_many_arguments)]
fn distribute(
    q: &QuiverOfSections,
    target: &[i64],
    out_arrows: &[Vec<usize>],
    v: usize,
    slot: usize,
    left: u32,
    x: &mut Vec<u32>,
    found: &mut Vec<Vec<u32>>,
    cap: usize,
) -> Result<()> {
    let arrows = &out_arrows[v];
    if slot + 1 >= arrows.len() {
        if let Some(&a) = arrows.last() {
            x[a] = left;
        }
        let r = enumerate(q, target, out_arrows, v + 1, x, found, cap);
        if let Some(&a) = arrows.last() {
            x[a] = 0;
        }
        return r;
    }
    let a = arrows[slot];
    for c in 0..=left {
        x[a] = c;
        distribute(q, target, out_arrows, v, slot + 1, left - c, x, found, cap)?;
    }
    x[a] = 0;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;
    use crate::picard::SurfaceConfig;
    use crate::quiver::build_quiver_of_sections;
    use crate::sections::SurfacePoint;
    use crate::stability::{gauge_act, tautological_rep};
    use crate::toric_system::ToricSystem;

    fn plane() -> QuiverOfSections {
        let ts = ToricSystem::parse(&["H", "H", "H"], 0).unwrap();
        build_quiver_of_sections(&ts, &SurfaceConfig::plane(), None).unwrap()
    }

    #[test]
    fn orbit_of_a_gauge_transform() {
        let quiv = plane();
        let r = tautological_rep(&SurfacePoint::Plane([q(1), q(2), q(3)]), &quiv).unwrap();
        let g = vec![q(2), q(-3), q(7)];
        let r2 = gauge_act(&g, &r, &quiv).unwrap();
        let h = orbit_equivalent(&r, &r2, &quiv).unwrap();
        assert_eq!(gauge_act(&h, &r, &quiv).unwrap(), r2);
        let other = tautological_rep(&SurfacePoint::Plane([q(1), q(2), q(4)]), &quiv).unwrap();
        assert!(orbit_equivalent(&r, &other, &quiv).is_none());
    }

    #[test]
    fn ext1_on_the_plane() {
        let quiv = plane();
        let r = tautological_rep(&SurfacePoint::Plane([q(1), q(2), q(3)]), &quiv).unwrap();
        assert_eq!(ext1_dimension(&r, &quiv), 2);
        assert_eq!(ext1_dimension(&Representation::zero(6), &quiv), 6);
    }

    #[test]
    fn semi_invariants_on_the_plane() {
        let quiv = plane();
        let w = Weight::from_toric(&[1, 2]);
        assert_eq!(semi_invariant_rank(&quiv, &w, 0, 1000).unwrap(), 1);
        assert_eq!(semi_invariant_rank(&quiv, &w, 1, 1000).unwrap(), 10);
        assert_eq!(semi_invariant_rank(&quiv, &w, 2, 1000).unwrap(), 28);
        assert!(semi_invariant_rank(&quiv, &w, 2, 10).is_err());
    }
}
