//! Weights and their toric forms, weight augmentation, subrepresentation
//! masks, King stability for dimension vector `(1, ..., 1)`, and
//! tautological representations of surface points.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{fmt_q, Q};
use crate::quiver::QuiverOfSections;
use crate::sections::{evaluate_at_point, SurfacePoint};

/// Integer weight, one entry per vertex, summing to zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Weight {
    pub theta: Vec<i64>,
}

impl Weight {
    pub fn new(theta: Vec<i64>) -> Result<Self> {
        let s: i64 = theta.iter().sum();
        if s != 0 {
            return Err(Error::Inadmissible(format!("weight entries sum to {s}")));
        }
        Ok(Weight { theta })
    }

    /// Weight with toric form `t`: `theta_1 = -t_1`, `theta_i = t_{i-1} - t_i`,
    /// `theta_n = t_{n-1}`.
    pub fn from_toric(t: &[i64]) -> Self {
        let n = t.len() + 1;
        let mut theta = Vec::with_capacity(n);
        let mut prev = 0;
        for &x in t {
            theta.push(prev - x);
            prev = x;
        }
        theta.push(prev);
        Weight { theta }
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    /// Negated prefix sums `(-theta_1, -theta_1 - theta_2, ...)`.
    pub fn toric_form(&self) -> Vec<i64> {
        let mut s = 0;
        self.theta[..self.n() - 1]
            .iter()
            .map(|x| {
                s -= x;
                s
            })
            .collect()
    }

    /// Every toric entry is a positive integer.
    pub fn is_admissible(&self) -> bool {
        self.toric_form().iter().all(|&x| x > 0)
    }

    /// Sum of `theta` over the vertices in `mask`.
    pub fn value(&self, mask: u32) -> i64 {
        (0..self.n())
            .filter(|v| mask >> v & 1 == 1)
            .map(|v| self.theta[v])
            .sum()
    }
}

/// Toric form after augmenting at quiver vertex `k` (1-based): entries
/// `2 b_i` with `2 b_{k-1} + 2 b_k - 1` inserted at position `k`, where
/// `b_0 = b_n = 0`.
pub fn augment_weight(toric0: &[i64], k: usize) -> Result<Vec<i64>> {
    let n = toric0.len() + 1;
    if toric0.iter().any(|&x| x <= 0) {
        return Err(Error::Inadmissible(format!(
            "toric form {toric0:?} has a nonpositive entry"
        )));
    }
    if k == 0 || k > n {
        return Err(Error::Range { position: k, max: n });
    }
    let b = |i: usize| if i == 0 || i == n { 0 } else { toric0[i - 1] };
    let mut out = Vec::with_capacity(n);
    for i in 1..k {
        out.push(2 * b(i));
    }
    out.push(2 * b(k - 1) + 2 * b(k) - 1);
    for i in k..n {
        out.push(2 * b(i));
    }
    Ok(out)
}

/// Mask rendered as a 0/1 vector in vertex order.
pub fn mask_vector(mask: u32, n: usize) -> Vec<u8> {
    (0..n).map(|v| (mask >> v & 1) as u8).collect()
}

pub fn mask_from_vector(v: &[u8]) -> u32 {
    v.iter()
        .enumerate()
        .filter(|(_, &b)| b == 1)
        .fold(0, |m, (i, _)| m | 1 << i)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FineModuli {
    pub fine: bool,
    /// 1-based vertices of a proper nonempty subset with zero weight.
    pub witness: Option<Vec<usize>>,
}

/// No proper nonempty vertex subset has zero weight.
pub fn fine_moduli_check(w: &Weight) -> FineModuli {
    let n = w.n();
    let full = (1u32 << n) - 1;
    for mask in 1..full {
        if w.value(mask) == 0 {
            return FineModuli {
                fine: false,
                witness: Some((0..n).filter(|v| mask >> v & 1 == 1).map(|v| v + 1).collect()),
            };
        }
    }
    FineModuli {
        fine: true,
        witness: None,
    }
}

/// Arrow values of a representation of dimension vector `(1, ..., 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Representation {
    pub values: Vec<Q>,
}

impl Serialize for Representation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.values.iter().map(fmt_q).collect::<Vec<_>>().serialize(s)
    }
}

impl Representation {
    pub fn new(values: Vec<Q>) -> Self {
        Representation { values }
    }

    pub fn zero(arrows: usize) -> Self {
        Representation {
            values: vec![Q::zero(); arrows],
        }
    }

    /// Value of a path: the product of its arrow values.
    pub fn path_value(&self, p: &[usize]) -> Q {
        p.iter().fold(Q::one(), |acc, &a| acc * &self.values[a])
    }

    /// Value of every relation generator, in relation order.
    pub fn residuals(&self, q: &QuiverOfSections) -> Vec<Q> {
        let mut out = Vec::new();
        for pr in &q.relations {
            let vals: Vec<Q> = pr.paths.iter().map(|p| self.path_value(p)).collect();
            for kv in &pr.kernel {
                out.push(kv.iter().map(|(j, c)| c * &vals[*j]).sum());
            }
        }
        out
    }

    pub fn satisfies_relations(&self, q: &QuiverOfSections) -> bool {
        self.values.len() == q.arrows.len() && self.residuals(q).iter().all(Zero::is_zero)
    }

    /// Arrow ids with value zero.
    pub fn zero_set(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&a| self.values[a].is_zero())
            .collect()
    }
}

/// `(g . r)_a = g_{t(a)} r_a g_{s(a)}^{-1}`.
pub fn gauge_act(g: &[Q], r: &Representation, q: &QuiverOfSections) -> Result<Representation> {
    if g.len() != q.n || g.iter().any(Zero::is_zero) {
        return Err(Error::Inadmissible("gauge needs one nonzero scalar per vertex".into()));
    }
    Ok(Representation::new(
        q.arrows
            .iter()
            .map(|a| &g[a.target] * &r.values[a.id] / &g[a.source])
            .collect(),
    ))
}

/// Every vertex mask closed under the nonzero arrows of `r`, including the
/// empty and the full mask, in increasing order.
pub fn enumerate_subreps(r: &Representation, q: &QuiverOfSections) -> Vec<u32> {
    let edges: Vec<(usize, usize)> = q
        .arrows
        .iter()
        .filter(|a| !r.values[a.id].is_zero())
        .map(|a| (a.source, a.target))
        .collect();
    (0..1u32 << q.n)
        .filter(|&m| edges.iter().all(|&(s, t)| m >> s & 1 == 0 || m >> t & 1 == 1))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Semistable,
    Unstable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaskValue {
    pub mask: Vec<u8>,
    pub value: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub verdict: Verdict,
    /// Minimal-value violating mask (ties: smallest bitmask), or a tight
    /// mask for strictly semistable representations.
    pub witness: Option<MaskValue>,
    /// Every proper nonempty subrepresentation with negative value.
    pub destabilizing: Vec<MaskValue>,
}

impl StabilityReport {
    pub fn has_destabilizer(&self, mask: &[u8], value: i64) -> bool {
        self.destabilizing
            .iter()
            .any(|m| m.mask == mask && m.value == value)
    }
}

/// King stability: `theta(S) > 0` (resp. `>= 0`) for every proper nonempty
/// subrepresentation `S`.
pub fn check_stability(
    r: &Representation,
    w: &Weight,
    q: &QuiverOfSections,
) -> Result<StabilityReport> {
    if w.n() != q.n {
        return Err(Error::DimensionMismatch {
            expected: q.n,
            found: w.n(),
        });
    }
    let full = (1u32 << q.n) - 1;
    let mut destabilizing: Vec<(i64, u32)> = Vec::new();
    let mut tight: Option<u32> = None;
    for m in enumerate_subreps(r, q) {
        if m == 0 || m == full {
            continue;
        }
        let v = w.value(m);
        if v < 0 {
            destabilizing.push((v, m));
        } else if v == 0 && tight.is_none() {
            tight = Some(m);
        }
    }
    let mv = |(v, m): (i64, u32)| MaskValue {
        mask: mask_vector(m, q.n),
        value: v,
    };
    let (verdict, witness) = if let Some(&best) = destabilizing.iter().min() {
        (Verdict::Unstable, Some(mv(best)))
    } else if let Some(m) = tight {
        (Verdict::Semistable, Some(mv((0, m))))
    } else {
        (Verdict::Stable, None)
    };
    Ok(StabilityReport {
        verdict,
        witness,
        destabilizing: destabilizing.into_iter().map(mv).collect(),
    })
}

/// Arrow values given by evaluating the arrow sections at `pt`.
pub fn tautological_rep(pt: &SurfacePoint, q: &QuiverOfSections) -> Result<Representation> {
    q.arrows
        .iter()
        .map(|a| evaluate_at_point(&a.section, &a.divisor, pt, &q.cfg))
        .collect::<Result<Vec<Q>>>()
        .map(Representation::new)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;
    use crate::picard::SurfaceConfig;
    use crate::quiver::build_quiver_of_sections;
    use crate::toric_system::ToricSystem;

    fn plane() -> QuiverOfSections {
        let ts = ToricSystem::parse(&["H", "H", "H"], 0).unwrap();
        build_quiver_of_sections(&ts, &SurfaceConfig::plane(), None).unwrap()
    }

    #[test]
    fn toric_bijection_examples() {
        assert_eq!(Weight::from_toric(&[3, 5]).theta, vec![-3, -2, 5]);
        assert_eq!(Weight::new(vec![-3, -2, 5]).unwrap().toric_form(), vec![3, 5]);
        let (a, b) = (2, 3);
        let w = Weight::new(vec![-2 * a, 1 - 2 * b, 2 * a - 1, 2 * b]).unwrap();
        assert_eq!(w.toric_form(), vec![2 * a, 2 * a + 2 * b - 1, 2 * b]);
        assert_eq!(Weight::from_toric(&[1, 1, 1, 1]).theta, vec![-1, 0, 0, 0, 1]);
        assert!(Weight::new(vec![1, 1]).is_err());
    }

    #[test]
    fn augment_weight_examples() {
        assert_eq!(augment_weight(&[1, 2], 2).unwrap(), vec![2, 5, 4]);
        assert_eq!(augment_weight(&[3, 4], 1).unwrap(), vec![5, 6, 8]);
        assert_eq!(augment_weight(&[3, 4], 3).unwrap(), vec![6, 8, 7]);
        assert_eq!(
            Weight::from_toric(&augment_weight(&[1, 1], 2).unwrap()).theta,
            vec![-2, -1, 1, 2]
        );
        assert!(augment_weight(&[0, 1], 1).is_err());
        assert!(augment_weight(&[1, 1], 4).is_err());
    }

    #[test]
    fn fine_moduli_examples() {
        assert!(fine_moduli_check(&Weight::new(vec![-1, -1, 2]).unwrap()).fine);
        let f = fine_moduli_check(&Weight::new(vec![-1, 1, -1, 1]).unwrap());
        assert_eq!(f.witness, Some(vec![1, 2]));
        let f = fine_moduli_check(&Weight::new(vec![-2, -1, 1, 2]).unwrap());
        assert!(!f.fine);
        assert!(!fine_moduli_check(&Weight::from_toric(&[1, 1])).fine);
    }

    #[test]
    fn plane_subreps_and_stability() {
        let quiv = plane();
        let r = tautological_rep(&SurfacePoint::Plane([q(2), q(3), q(5)]), &quiv).unwrap();
        assert!(r.satisfies_relations(&quiv));
        assert_eq!(enumerate_subreps(&r, &quiv), vec![0b000, 0b100, 0b110, 0b111]);
        let rep = check_stability(&r, &Weight::from_toric(&[1, 2]), &quiv).unwrap();
        assert_eq!(rep.verdict, Verdict::Stable);
        let zero = Representation::zero(6);
        assert_eq!(enumerate_subreps(&zero, &quiv).len(), 8);
        let rep = check_stability(&zero, &Weight::from_toric(&[1, 2]), &quiv).unwrap();
        assert_eq!(rep.verdict, Verdict::Unstable);
        assert_eq!(rep.witness.unwrap().mask, vec![1, 1, 0]);
    }

    #[test]
    fn tautological_values_on_the_plane() {
        let quiv = plane();
        let r = tautological_rep(&SurfacePoint::Plane([q(2), q(3), q(5)]), &quiv).unwrap();
        for a in &quiv.arrows {
            assert_eq!(r.values[a.id], a.section.eval(&[q(2), q(3), q(5)]) / q(5));
        }
    }

    #[test]
    fn gauge_preserves_relations() {
        let quiv = plane();
        let r = tautological_rep(&SurfacePoint::Plane([q(1), q(-4), q(7)]), &quiv).unwrap();
        let g = gauge_act(&[q(3), q(-2), q(5)], &r, &quiv).unwrap();
        assert!(g.satisfies_relations(&quiv));
        assert!(gauge_act(&[q(0), q(1), q(1)], &r, &quiv).is_err());
    }
}
