//! Toric systems: axioms, elementary augmentations and their inverse,
//! opposite systems, the cyclic strong criterion, the technical condition on
//! the last entry, and reduction of a system to the plane.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::picard::{self, canonical, DivisorClass, SurfaceConfig};

/// Cyclically ordered divisor classes `A_1, ..., A_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ToricSystem {
    pub a: Vec<DivisorClass>,
}

/// Line bundles `O(D_1), ..., O(D_n)` in their geometric order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Collection {
    pub d: Vec<DivisorClass>,
}

impl ToricSystem {
    pub fn new(a: Vec<DivisorClass>) -> Self {
        ToricSystem { a }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Rank of the Picard lattice minus one (number of centers).
    pub fn r(&self) -> usize {
        self.a.first().map(|x| x.r()).unwrap_or(0)
    }

    /// Entry with 1-based cyclic index.
    pub fn at(&self, i: isize) -> &DivisorClass {
        let n = self.n() as isize;
        &self.a[((i - 1).rem_euclid(n)) as usize]
    }

    /// Parses entries written as class expressions.
    pub fn parse(entries: &[&str], r: usize) -> Result<Self> {
        Ok(ToricSystem::new(
            entries
                .iter()
                .map(|s| DivisorClass::parse(s, r))
                .collect::<Result<_>>()?,
        ))
    }

    /// The collection with `D_1 = 0` and `D_{i+1} = D_i + A_i`.
    pub fn to_collection(&self) -> Collection {
        let mut d = vec![DivisorClass::zero(self.r())];
        for i in 0..self.n() - 1 {
            let next = &d[i] + &self.a[i];
            d.push(next);
        }
        Collection { d }
    }

    pub fn sum(&self) -> DivisorClass {
        self.a
            .iter()
            .fold(DivisorClass::zero(self.r()), |acc, x| &acc + x)
    }
}

impl fmt::Display for ToricSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.a.iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl Collection {
    pub fn new(d: Vec<DivisorClass>) -> Self {
        Collection { d }
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    pub fn r(&self) -> usize {
        self.d.first().map(|x| x.r()).unwrap_or(0)
    }
}

fn dot(a: &DivisorClass, b: &DivisorClass) -> i64 {
    picard::intersect(a, b).expect("same lattice")
}

/// Toric system of a collection; the last entry is `-K - (D_n - D_1)`.
pub fn from_collection(c: &Collection) -> Result<ToricSystem> {
    let n = c.n();
    let r = c.r();
    if n != 3 + r {
        return Err(Error::InvalidCollection(format!(
            "collection has {n} entries, expected {}",
            3 + r
        )));
    }
    if c.d.iter().any(|x| x.r() != r) {
        return Err(Error::InvalidCollection("entries on different lattices".into()));
    }
    let mut a: Vec<DivisorClass> = (0..n - 1).map(|i| &c.d[i + 1] - &c.d[i]).collect();
    a.push(&(-&canonical(r)) - &(&c.d[n - 1] - &c.d[0]));
    let ts = ToricSystem::new(a);
    let rep = validate_toric_system(&ts);
    if !rep.pass {
        return Err(Error::InvalidCollection(rep.violations.join("; ")));
    }
    Ok(ts)
}

/// Axiom check result; pairs are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ToricReport {
    pub pass: bool,
    pub violations: Vec<String>,
    pub bad_pairs: Vec<(usize, usize)>,
    pub segments_checked: usize,
}

/// Checks the pairing axioms, the sum axiom, and the segment identity
/// `A_{k..l}^2 + 2 = sum (A_i^2 + 2)` on every proper cyclic segment.
pub fn validate_toric_system(ts: &ToricSystem) -> ToricReport {
    let n = ts.n();
    let r = ts.r();
    let mut violations = Vec::new();
    let mut bad_pairs = Vec::new();
    if n != 3 + r {
        violations.push(format!("length {n} differs from rank {}", 3 + r));
    }
    if ts.a.iter().any(|x| x.r() != r) {
        violations.push("entries on different lattices".into());
        return ToricReport {
            pass: false,
            violations,
            bad_pairs,
            segments_checked: 0,
        };
    }
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let want = if adjacent { 1 } else { 0 };
            let got = dot(&ts.a[i], &ts.a[j]);
            if got != want && !(n == 2) {
                violations.push(format!(
                    "A{}.A{} = {got}, expected {want}",
                    i + 1,
                    j + 1
                ));
                bad_pairs.push((i + 1, j + 1));
            }
        }
    }
    let target = -&canonical(r);
    if ts.sum() != target {
        violations.push(format!("sum is {}, expected {}", ts.sum(), target));
    }
    let mut segments_checked = 0;
    if violations.is_empty() {
        for start in 0..n {
            for len in 1..n {
                let seg: Vec<&DivisorClass> = (0..len).map(|t| &ts.a[(start + t) % n]).collect();
                let s = seg
                    .iter()
                    .fold(DivisorClass::zero(r), |acc, x| &acc + *x);
                let lhs = dot(&s, &s) + 2;
                let rhs: i64 = seg.iter().map(|x| dot(x, x) + 2).sum();
                segments_checked += 1;
                if lhs != rhs {
                    violations.push(format!(
                        "segment identity fails at start {} length {len}",
                        start + 1
                    ));
                }
            }
        }
    }
    ToricReport {
        pass: violations.is_empty(),
        violations,
        bad_pairs,
        segments_checked,
    }
}

/// Bookkeeping of one elementary augmentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AugmentationMeta {
    /// Position of `E` in the augmented system (1-based, `1..=n+1`).
    pub m: usize,
    /// Length of the system before augmenting.
    pub n_base: usize,
    /// 0-based index of the new exceptional class.
    pub exceptional: usize,
    /// Position of `E` in the opposite system, which is the quiver vertex `k`
    /// whose arrow `e` runs to `k'`; `None` for `m = n + 1`.
    pub k: Option<usize>,
}

impl AugmentationMeta {
    /// Whether the step avoids the last-position augmentation.
    pub fn is_standard(&self) -> bool {
        self.k.is_some()
    }
}

/// Elementary augmentation at position `m` with a new exceptional class
/// inserted at lattice index `e_index` (0-based).
pub fn augment(
    ts: &ToricSystem,
    m: usize,
    e_index: usize,
) -> Result<(ToricSystem, AugmentationMeta)> {
    let n = ts.n();
    if m == 0 || m > n + 1 {
        return Err(Error::Range {
            position: m,
            max: n + 1,
        });
    }
    if e_index > ts.r() {
        return Err(Error::Range {
            position: e_index + 1,
            max: ts.r() + 1,
        });
    }
    let a: Vec<DivisorClass> = ts.a.iter().map(|x| x.insert_exceptional(e_index)).collect();
    let e = DivisorClass::exceptional(ts.r() + 1, e_index);
    let out: Vec<DivisorClass> = if m == 1 {
        let mut v = vec![e.clone(), &a[0] - &e];
        v.extend(a[1..n - 1].iter().cloned());
        v.push(&a[n - 1] - &e);
        v
    } else if m == n + 1 {
        let mut v = vec![&a[0] - &e];
        v.extend(a[1..n - 1].iter().cloned());
        v.push(&a[n - 1] - &e);
        v.push(e);
        v
    } else {
        let mut v: Vec<DivisorClass> = a[..m - 2].to_vec();
        v.push(&a[m - 2] - &e);
        v.push(e.clone());
        v.push(&a[m - 1] - &e);
        v.extend(a[m..].iter().cloned());
        v
    };
    let k = if m <= n { Some(n + 1 - m) } else { None };
    Ok((
        ToricSystem::new(out),
        AugmentationMeta {
            m,
            n_base: n,
            exceptional: e_index,
            k,
        },
    ))
}

/// Inverse of [`augment`]: requires `A_m = E_a`; adds `E_a` to both cyclic
/// neighbors, drops `A_m`, and pushes forward.
pub fn blow_down(ts: &ToricSystem, m: usize) -> Result<(ToricSystem, AugmentationMeta)> {
    let n = ts.n();
    if m == 0 || m > n {
        return Err(Error::Range { position: m, max: n });
    }
    let a = ts.a[m - 1]
        .as_exceptional()
        .ok_or_else(|| Error::InvalidCollection(format!("A{m} is not an exceptional class")))?;
    let e = &ts.a[m - 1];
    let prev = (m + n - 2) % n;
    let next = m % n;
    let mut v = ts.a.clone();
    v[prev] = &v[prev] + e;
    v[next] = &v[next] + e;
    let mut rest = v;
    rest.remove(m - 1);
    if rest.iter().any(|x| x.m[a] != 0) {
        return Err(Error::InvalidCollection(format!(
            "E{} does not split off at position {m}",
            a + 1
        )));
    }
    let base = ToricSystem::new(rest.iter().map(|x| x.remove_exceptional(a)).collect());
    let rep = validate_toric_system(&base);
    if !rep.pass {
        return Err(Error::InvalidCollection(rep.violations.join("; ")));
    }
    let (again, meta) = augment(&base, m, a)?;
    if again != *ts {
        return Err(Error::Internal(format!(
            "blow-down at {m} does not invert augmentation"
        )));
    }
    Ok((base, meta))
}

/// `B_i = A_{n-i}` for `i < n`, `B_n = A_n`. This is the only place where the
/// geometric order is converted into the quiver order.
pub fn opposite(ts: &ToricSystem) -> ToricSystem {
    let n = ts.n();
    let mut b: Vec<DivisorClass> = (1..n).map(|i| ts.a[n - i - 1].clone()).collect();
    b.push(ts.a[n - 1].clone());
    ToricSystem::new(b)
}

/// All `A_i^2 >= -2`.
pub fn is_cyclic_strong(ts: &ToricSystem) -> bool {
    ts.a.iter().all(|x| dot(x, x) >= -2)
}

/// The last entry is `H` minus at most three distinct exceptional classes.
pub fn technical_condition(ts: &ToricSystem) -> bool {
    let last = &ts.a[ts.n() - 1];
    last.d == 1 && last.m.iter().all(|&x| x == 0 || x == 1) && last.m.iter().sum::<i64>() <= 3
}

/// Technical condition on `-K - (D_n - D_1)` of a collection.
pub fn check_technical_condition(c: &Collection) -> bool {
    let r = c.r();
    let last = &(-&canonical(r)) - &(&c.d[c.n() - 1] - &c.d[0]);
    technical_condition(&ToricSystem::new(vec![last]))
}

/// One augmentation step of a chain starting at the plane.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainStep {
    pub base: ToricSystem,
    pub base_cfg: SurfaceConfig,
    pub ts: ToricSystem,
    pub cfg: SurfaceConfig,
    pub meta: AugmentationMeta,
}

/// Augmentation chain from `{H, H, H}` to a given system.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Chain {
    pub steps: Vec<ChainStep>,
    pub warnings: Vec<String>,
}

/// Repeatedly blows down an exceptional entry, preferring positions that
/// make the step standard and, among those, the largest exceptional index.
pub fn reduce_to_plane(ts: &ToricSystem, cfg: &SurfaceConfig) -> Result<Chain> {
    let mut cur = ts.clone();
    let mut cur_cfg = cfg.clone();
    let mut steps = Vec::new();
    let mut warnings = Vec::new();
    while cur.r() > 0 {
        let n = cur.n();
        let mut cands: Vec<(bool, usize, usize)> = Vec::new();
        for m in 1..=n {
            if let Some(a) = cur.a[m - 1].as_exceptional() {
                cands.push((m < n, a, m));
            }
        }
        cands.sort();
        let mut done = false;
        while let Some((standard, _a, m)) = cands.pop() {
            if let Ok((base, meta)) = blow_down(&cur, m) {
                if !standard {
                    warnings.push(format!(
                        "step to {} uses the last-position augmentation",
                        cur
                    ));
                }
                let base_cfg = cur_cfg.without(meta.exceptional);
                steps.push(ChainStep {
                    base: base.clone(),
                    base_cfg: base_cfg.clone(),
                    ts: cur.clone(),
                    cfg: cur_cfg.clone(),
                    meta,
                });
                cur = base;
                cur_cfg = base_cfg;
                done = true;
                break;
            }
        }
        if !done {
            return Err(Error::InvalidCollection(format!(
                "{cur} has no exceptional entry to blow down"
            )));
        }
    }
    let plane = ToricSystem::parse(&["H", "H", "H"], 0)?;
    if cur != plane {
        return Err(Error::InvalidCollection(format!(
            "reduction ends at {cur}, not at the plane"
        )));
    }
    steps.reverse();
    Ok(Chain { steps, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(e: &[&str], r: usize) -> ToricSystem {
        ToricSystem::parse(e, r).unwrap()
    }

    fn cls(s: &str, r: usize) -> DivisorClass {
        DivisorClass::parse(s, r).unwrap()
    }

    #[test]
    fn collections_to_toric_systems() {
        let c = Collection::new(vec![cls("0", 0), cls("H", 0), cls("2H", 0)]);
        assert_eq!(from_collection(&c).unwrap(), ts(&["H", "H", "H"], 0));
        let c = Collection::new(vec![cls("0", 1), cls("H-E1", 1), cls("H", 1), cls("2H-E1", 1)]);
        assert_eq!(from_collection(&c).unwrap(), ts(&["H-E1", "E1", "H-E1", "H"], 1));
        let bad = Collection::new(vec![cls("0", 0), cls("H", 0), cls("H", 0)]);
        assert!(from_collection(&bad).is_err());
    }

    #[test]
    fn validation_reports() {
        assert!(validate_toric_system(&ts(&["H", "H", "H"], 0)).pass);
        let bad = validate_toric_system(&ts(&["H", "H", "2H"], 0));
        assert!(!bad.pass);
        assert!(bad.violations.iter().any(|v| v.contains("sum")));
    }

    #[test]
    fn augmentations_of_the_plane() {
        let p = ts(&["H", "H", "H"], 0);
        assert_eq!(augment(&p, 2, 0).unwrap().0, ts(&["H-E1", "E1", "H-E1", "H"], 1));
        assert_eq!(augment(&p, 1, 0).unwrap().0, ts(&["E1", "H-E1", "H", "H-E1"], 1));
        let (last, meta) = augment(&p, 4, 0).unwrap();
        assert_eq!(last, ts(&["H-E1", "H", "H-E1", "E1"], 1));
        assert!(!meta.is_standard());
        assert!(augment(&p, 5, 0).is_err());
        assert_eq!(augment(&p, 2, 0).unwrap().1.k, Some(2));
        assert_eq!(augment(&p, 1, 0).unwrap().1.k, Some(3));
        assert_eq!(augment(&p, 3, 0).unwrap().1.k, Some(1));
    }

    #[test]
    fn blow_down_inverts_augment() {
        let p = ts(&["H", "H", "H"], 0);
        for m in 1..=4 {
            let (aug, _) = augment(&p, m, 0).unwrap();
            let (base, meta) = blow_down(&aug, m).unwrap();
            assert_eq!(base, p);
            assert_eq!(meta.m, m);
        }
    }

    #[test]
    fn opposite_examples() {
        let f1 = ts(&["H-E1", "E1", "H-E1", "H"], 1);
        assert_eq!(opposite(&f1), f1);
        let r = 3;
        let t = ts(&["E2", "E1-E2", "H-E3-E1", "E3", "H-E3", "H-E1-E2"], r);
        let o = opposite(&t);
        assert_eq!(o, ts(&["H-E3", "E3", "H-E3-E1", "E1-E2", "E2", "H-E1-E2"], r));
        assert_eq!(opposite(&o), t);
    }

    #[test]
    fn strong_and_technical_predicates() {
        assert!(is_cyclic_strong(&ts(&["H-E1", "E1", "H-E1", "H"], 1)));
        assert!(!is_cyclic_strong(&ts(&["E1-E2-E3", "H"], 3)));
        let c = Collection::new(vec![cls("0", 1), cls("H-E1", 1), cls("H", 1), cls("2H-E1", 1)]);
        assert!(check_technical_condition(&c));
        assert!(!technical_condition(&ts(&["2H-E1"], 1)));
    }
}
