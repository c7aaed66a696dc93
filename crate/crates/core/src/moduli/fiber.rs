//! The locus `r_e = 0` in normal form: a seed pair of arrows that
//! determines every other value, sampled local dimension, and stability on
//! lines through the origin of the seed plane.

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{fmt_q, rank, Q};
use crate::quiver::QuiverOfSections;
use crate::sampling::{nonzero_q, rng};
use crate::solver::{propagate, relation_equations, Equation, Propagation};
use crate::stability::{check_stability, mask_vector, Representation, StabilityReport, Verdict, Weight};

/// Stability of the normal form at one seed value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineSample {
    pub kind: String,
    pub seed: [String; 2],
    pub verdict: Verdict,
    pub witness: Option<Vec<u8>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberReport {
    pub seed: u64,
    /// Arrows fixed by normalization: `e` to zero, u-path tree arrows to one.
    pub normalized: Vec<usize>,
    /// Arrows forced by the relations before seeding.
    pub forced_order: Vec<usize>,
    pub seed_pair: [usize; 2],
    /// Arrows determined after seeding, in propagation order.
    pub seeded_order: Vec<usize>,
    pub free_parameters: usize,
    /// Every value is affine in the seed pair.
    pub affine: bool,
    pub jacobian_ranks: Vec<usize>,
    pub local_dimensions: Vec<usize>,
    pub lines: Vec<LineSample>,
    pub origin: StabilityReport,
    /// Mask `{1, ..., k-1, k'}` and its weight at the origin.
    pub origin_mask: Vec<u8>,
    pub origin_mask_value: i64,
    pub origin_mask_destabilizes: bool,
    /// Every u-path is nonzero at every stable sample.
    pub u_paths_nonzero: bool,
    pub unstable_locus_is_origin: bool,
    pub certification: String,
    pub summary: String,
}

struct NormalForm {
    eqs: Vec<Equation>,
    base: Propagation,
    normalized: Vec<usize>,
}

fn normal_form(q: &QuiverOfSections) -> Result<NormalForm> {
    let m = q
        .marking
        .as_ref()
        .ok_or_else(|| Error::Analysis("quiver carries no marking".into()))?;
    let mut known: Vec<Option<Q>> = vec![None; q.arrows.len()];
    known[m.e] = Some(Q::zero());
    let mut normalized = vec![m.e];
    for &v in m.u.keys() {
        let a = m.tree_arrow(v);
        known[a] = Some(Q::one());
        normalized.push(a);
    }
    normalized.sort_unstable();
    let eqs = relation_equations(q);
    let base = propagate(&eqs, known);
    if !base.consistent {
        return Err(Error::Analysis("normal form is inconsistent with the relations".into()));
    }
    Ok(NormalForm {
        eqs,
        base,
        normalized,
    })
}

fn seeded(nf: &NormalForm, pair: [usize; 2], s: &Q, t: &Q) -> Propagation {
    let mut known = nf.base.values.clone();
    known[pair[0]] = Some(s.clone());
    known[pair[1]] = Some(t.clone());
    propagate(&nf.eqs, known)
}

/// Normal-form representation with seed values `(s, t)` on `pair`.
pub fn fiber_representation(
    q: &QuiverOfSections,
    pair: [usize; 2],
    s: &Q,
    t: &Q,
) -> Result<Representation> {
    let nf = normal_form(q)?;
    seeded(&nf, pair, s, t)
        .solution()
        .map(Representation::new)
        .ok_or_else(|| Error::Analysis("seed values do not determine the representation".into()))
}

fn jacobian_rank(q: &QuiverOfSections, eqs: &[Equation], normalized: &[usize], x: &[Q]) -> usize {
    let na = q.arrows.len();
    let mut rows: Vec<Vec<Q>> = eqs
        .iter()
        .map(|e| (0..na).map(|v| e.derivative(v, x)).collect())
        .collect();
    for &a in normalized {
        let mut r = vec![Q::zero(); na];
        r[a] = Q::one();
        rows.push(r);
    }
    rank(&rows, na)
}

/// Runs the normalization, seed search, dimension certification and line
/// sampling on a marked quiver with weight `w`.
pub fn exceptional_fiber_analysis(
    q: &QuiverOfSections,
    w: &Weight,
    seed: u64,
) -> Result<FiberReport> {
    let m = q.marking.as_ref().ok_or_else(|| Error::Analysis("quiver carries no marking".into()))?;
    let nf = normal_form(q)?;
    let free = nf.base.undetermined();
    let mut g = rng(seed);
    let mut pair = None;
    'search: for (x, &a) in free.iter().enumerate() {
        for &b in &free[x + 1..] {
            let ok = (0..2).all(|_| {
                let (s, t) = (nonzero_q(&mut g), nonzero_q(&mut g));
                seeded(&nf, [a, b], &s, &t).complete()
            });
            if ok {
                pair = Some([a, b]);
                break 'search;
            }
        }
    }
    let pair = pair.ok_or_else(|| {
        Error::Analysis(format!(
            "no seed pair among {} undetermined arrows determines the representation",
            free.len()
        ))
    })?;
    let solve = |s: &Q, t: &Q| -> Result<(Propagation, Vec<Q>)> {
        let p = seeded(&nf, pair, s, t);
        let x = p
            .solution()
            .ok_or_else(|| Error::Analysis(format!("seed ({}, {}) does not propagate", fmt_q(s), fmt_q(t))))?;
        Ok((p, x))
    };
    let (p0, x0) = solve(&Q::zero(), &Q::zero())?;
    let _ = p0;
    let (_, x10) = solve(&Q::one(), &Q::zero())?;
    let (_, x01) = solve(&Q::zero(), &Q::one())?;
    let alpha: Vec<Q> = x10.iter().zip(&x0).map(|(a, b)| a - b).collect();
    let beta: Vec<Q> = x01.iter().zip(&x0).map(|(a, b)| a - b).collect();

    let mut samples: Vec<(String, Q, Q)> = vec![
        ("axis".into(), Q::one(), Q::zero()),
        ("axis".into(), Q::zero(), Q::one()),
    ];
    let mut slopes: Vec<Q> = Vec::new();
    while slopes.len() < 8 {
        let sl = nonzero_q(&mut g);
        if !slopes.contains(&sl) {
            slopes.push(sl.clone());
            samples.push(("generic".into(), Q::one(), sl));
        }
    }
    let mut affine = true;
    for _ in 0..3 {
        let (s, t) = (nonzero_q(&mut g), nonzero_q(&mut g));
        let (_, x) = solve(&s, &t)?;
        for v in 0..x.len() {
            if x[v] != &x0[v] + &s * &alpha[v] + &t * &beta[v] {
                affine = false;
            }
        }
    }
    let mut seed_order = Vec::new();
    if affine {
        for v in 0..x0.len() {
            if alpha[v].is_zero() && beta[v].is_zero() {
                continue;
            }
            let point = if x0[v].is_zero() {
                (beta[v].clone(), -alpha[v].clone())
            } else if !alpha[v].is_zero() {
                let t: Q = crate::linalg::q(g.random_range(1..=9));
                (-(&x0[v] + &beta[v] * &t) / &alpha[v], t)
            } else {
                (crate::linalg::q(g.random_range(1..=9)), -&x0[v] / &beta[v])
            };
            if point.0.is_zero() && point.1.is_zero() {
                continue;
            }
            samples.push(("critical".into(), point.0, point.1));
        }
    }

    let mut lines = Vec::new();
    let mut jacobian_ranks = Vec::new();
    let mut local_dimensions = Vec::new();
    let mut all_stable = true;
    let mut u_paths_nonzero = true;
    let scales = [Q::one(), Q::new((-5).into(), 2.into())];
    for (kind, s, t) in &samples {
        for lam in &scales {
            let (s, t) = (s * lam, t * lam);
            let (p, x) = solve(&s, &t)?;
            if seed_order.is_empty() {
                seed_order = p.order.clone();
            }
            let r = Representation::new(x.clone());
            let rep = check_stability(&r, w, q)?;
            if rep.verdict != Verdict::Stable {
                all_stable = false;
            } else if m.u.values().any(|path| r.path_value(path).is_zero()) {
                u_paths_nonzero = false;
            }
            if jacobian_ranks.len() < 5 || kind == "generic" {
                let jr = jacobian_rank(q, &nf.eqs, &nf.normalized, &x);
                jacobian_ranks.push(jr);
                local_dimensions.push(q.arrows.len() - jr);
            }
            lines.push(LineSample {
                kind: kind.clone(),
                seed: [fmt_q(&s), fmt_q(&t)],
                verdict: rep.verdict,
                witness: rep.witness.map(|x| x.mask),
            });
        }
    }

    let origin_rep = Representation::new(x0);
    let origin = check_stability(&origin_rep, w, q)?;
    let mask: u32 = (0..m.k).fold(0, |acc, v| acc | 1 << v) | 1 << (m.k + 1);
    let origin_mask = mask_vector(mask, q.n);
    let origin_mask_value = w.value(mask);
    let origin_mask_destabilizes = origin.has_destabilizer(&origin_mask, origin_mask_value);
    let unstable_locus_is_origin = all_stable && origin.verdict == Verdict::Unstable;
    let free_parameters = 2;
    let dims_ok = local_dimensions.iter().all(|&d| d == free_parameters);
    let summary = format!(
        "{free_parameters} free parameters (arrows {} and {}), local dimension {} at {} samples, unstable locus {}",
        pair[0],
        pair[1],
        if dims_ok { "2" } else { "not 2" },
        local_dimensions.len(),
        if unstable_locus_is_origin { "= origin" } else { "differs from origin" }
    );
    Ok(FiberReport {
        seed,
        normalized: nf.normalized.clone(),
        forced_order: nf.base.order.clone(),
        seed_pair: pair,
        seeded_order: seed_order,
        free_parameters,
        affine,
        jacobian_ranks,
        local_dimensions,
        lines,
        origin,
        origin_mask,
        origin_mask_value,
        origin_mask_destabilizes,
        u_paths_nonzero,
        unstable_locus_is_origin,
        certification: "sampled".into(),
        summary,
    })
}

impl FiberReport {
    /// Seed pair found, local dimension two everywhere sampled, and the
    /// unstable locus reduced to the origin.
    pub fn passes(&self) -> bool {
        self.local_dimensions.len() >= 5
            && self.local_dimensions.iter().all(|&d| d == 2)
            && self.unstable_locus_is_origin
            && self.origin_mask_value == -1
            && self.origin_mask_destabilizes
            && self.lines.iter().filter(|l| l.kind == "generic").count() >= 16
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;
    use crate::picard::SurfaceConfig;
    use crate::quiver::build_quiver_of_sections;
    use crate::stability::augment_weight;
    use crate::toric_system::{augment, ToricSystem};

    #[test]
    fn f1_fiber() {
        let p = ToricSystem::parse(&["H", "H", "H"], 0).unwrap();
        let (ts, meta) = augment(&p, 2, 0).unwrap();
        let cfg = SurfaceConfig::from_integers(&[[0, 0, 1]]).unwrap();
        let quiv = build_quiver_of_sections(&ts, &cfg, Some(&meta)).unwrap();
        let w = Weight::from_toric(&augment_weight(&[1, 2], 2).unwrap());
        let rep = exceptional_fiber_analysis(&quiv, &w, 1).unwrap();
        assert!(rep.passes(), "{}", rep.summary);
        assert!(rep.affine);
        let r = fiber_representation(&quiv, rep.seed_pair, &q(2), &q(3)).unwrap();
        assert!(r.satisfies_relations(&quiv));
    }
}
