//! Bound quivers of sections: vertices from the opposite toric system, arrows
//! from irreducible sections, relations as kernels of path evaluation, and
//! the `e` / `u` marking of augmented quivers.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{fmt_q, nullspace_sparse, solve, transpose, Echelon, Q};
use crate::picard::{intersect, DivisorClass, SurfaceConfig};
use crate::poly::Poly;
use crate::sections::{complement, ImageSpan, SectionCache};
use crate::toric_system::{
    is_cyclic_strong, opposite, technical_condition, validate_toric_system, AugmentationMeta,
    ToricSystem,
};

/// Arrow with its section payload; vertices are 0-based.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Arrow {
    pub id: usize,
    pub source: usize,
    pub target: usize,
    pub divisor: DivisorClass,
    pub section: Poly,
}

/// Composable arrow ids, first arrow first.
pub type Path = Vec<usize>;

/// Paths between one vertex pair and the kernel of their evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairRelations {
    pub source: usize,
    pub target: usize,
    pub divisor: DivisorClass,
    pub paths: Vec<Path>,
    #[serde(skip)]
    pub images: Vec<Poly>,
    /// Dimension of the span of path images.
    pub rank: usize,
    pub h0: usize,
    /// Kernel basis; vector `t` has coefficient one at path `free[t]` and
    /// zero at every other free path.
    #[serde(serialize_with = "ser_kernel")]
    pub kernel: Vec<Vec<(usize, Q)>>,
    pub free: Vec<usize>,
}

impl PairRelations {
    pub fn path_index(&self, p: &[usize]) -> Option<usize> {
        self.paths.iter().position(|x| x == p)
    }

    /// Whether a coefficient vector over `paths` lies in the kernel span.
    pub fn in_kernel(&self, v: &[Q]) -> bool {
        let mut w = v.to_vec();
        for (kv, &f) in self.kernel.iter().zip(&self.free) {
            let c = w[f].clone();
            if c.is_zero() {
                continue;
            }
            for (j, x) in kv {
                w[*j] -= &c * x;
            }
        }
        w.iter().all(Zero::is_zero)
    }
}

/// Data of the new center in an augmented quiver.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Marking {
    /// 0-based index of vertex `k`; `k'` is `k + 1`.
    pub k: usize,
    /// Arrow `e: k -> k'`.
    pub e: usize,
    /// Paths `u_i: i -> k'` for `i < k` and `u_j: k -> j` for `j > k'`,
    /// none of which vanishes at the center.
    pub u: BTreeMap<usize, Path>,
    /// 0-based lattice index of the new exceptional class.
    pub exceptional: usize,
    #[serde(serialize_with = "ser_point")]
    pub center: [Q; 3],
}

fn ser_kernel<S: serde::Serializer>(
    k: &[Vec<(usize, Q)>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    k.iter()
        .map(|v| v.iter().map(|(j, c)| (*j, fmt_q(c))).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .serialize(s)
}

fn ser_point<S: serde::Serializer>(p: &[Q; 3], s: S) -> std::result::Result<S::Ok, S::Error> {
    p.iter().map(fmt_q).collect::<Vec<_>>().serialize(s)
}

impl Marking {
    /// Arrow of `u_v` fixed to one by gauge normalization: the first arrow
    /// for `v < k`, the last arrow for `v > k'`.
    pub fn tree_arrow(&self, v: usize) -> usize {
        let p = &self.u[&v];
        if v < self.k {
            p[0]
        } else {
            *p.last().expect("nonempty path")
        }
    }
}

/// Bound quiver of sections.
#[derive(Clone, Debug, Serialize)]
pub struct QuiverOfSections {
    pub n: usize,
    pub labels: Vec<String>,
    pub vertex_classes: Vec<DivisorClass>,
    pub ts_op: ToricSystem,
    pub cfg: SurfaceConfig,
    pub arrows: Vec<Arrow>,
    pub relations: Vec<PairRelations>,
    pub marking: Option<Marking>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pair_index: HashMap<(usize, usize), usize>,
}

/// One row of the Hom dimension audit (1-based vertices).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomAuditRow {
    pub source: usize,
    pub target: usize,
    pub divisor: String,
    pub span: usize,
    pub h0: usize,
    pub chi: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomAudit {
    pub pass: bool,
    pub rows: Vec<HomAuditRow>,
}

/// Vertex labels `1..n`, with `k'` after `k` in augmented quivers.
fn vertex_labels(n: usize, k: Option<usize>) -> Vec<String> {
    (0..n)
        .map(|v| match k {
            Some(kk) if v == kk + 1 => format!("{}'", kk + 1),
            Some(kk) if v > kk + 1 => format!("{v}"),
            _ => format!("{}", v + 1),
        })
        .collect()
}

/// Builds the bound quiver of the toric system `ts` (geometric order).
/// With `meta`, the quiver is marked as the augmentation it records.
pub fn build_quiver_of_sections(
    ts: &ToricSystem,
    cfg: &SurfaceConfig,
    meta: Option<&AugmentationMeta>,
) -> Result<QuiverOfSections> {
    let rep = validate_toric_system(ts);
    if !rep.pass {
        return Err(Error::InvalidCollection(rep.violations.join("; ")));
    }
    if ts.r() != cfg.r() {
        return Err(Error::DimensionMismatch {
            expected: cfg.r(),
            found: ts.r(),
        });
    }
    let mut warnings = Vec::new();
    if !is_cyclic_strong(ts) {
        warnings.push("toric system is not cyclic strong".to_string());
    }
    if !technical_condition(ts) {
        warnings.push("last entry is not H minus at most three exceptional classes".to_string());
    }
    let k = match meta {
        Some(m) => Some(
            m.k
                .ok_or_else(|| Error::Inadmissible("last-position augmentation has no (k, k') pair".into()))?
                - 1,
        ),
        None => None,
    };
    let ts_op = opposite(ts);
    let n = ts.n();
    let r = ts.r();
    let mut vertex_classes = vec![DivisorClass::zero(r)];
    for i in 0..n - 1 {
        let next = &vertex_classes[i] + &ts_op.a[i];
        vertex_classes.push(next);
    }
    let hom = |i: usize, j: usize| &vertex_classes[j] - &vertex_classes[i];
    let mut cache = SectionCache::new(cfg);

    let mut arrows = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = hom(i, j);
            let ambient = cache.get(&d)?;
            let mut img = ImageSpan::empty(d.clone());
            for l in i + 1..j {
                let s1 = cache.get(&hom(i, l))?;
                let s2 = cache.get(&hom(l, j))?;
                img.absorb(&s1, &s2);
            }
            for f in complement(&ambient, &img) {
                arrows.push(Arrow {
                    id: arrows.len(),
                    source: i,
                    target: j,
                    divisor: d.clone(),
                    section: f,
                });
            }
        }
    }

    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for a in &arrows {
        out[a.source].push(a.id);
    }
    // paths[i][j]: every path i -> j with its image, built from the target down.
    let mut paths: Vec<Vec<Vec<(Path, Poly)>>> = vec![vec![Vec::new(); n]; n];
    for j in 0..n {
        for i in (0..j).rev() {
            let mut list = Vec::new();
            for &aid in &out[i] {
                let a = &arrows[aid];
                if a.target == j {
                    list.push((vec![aid], a.section.clone()));
                } else if a.target < j {
                    for (p, f) in &paths[a.target][j] {
                        let mut q = vec![aid];
                        q.extend(p.iter().copied());
                        list.push((q, a.section.mul(f)));
                    }
                }
            }
            paths[i][j] = list;
        }
    }

    let mut relations = Vec::new();
    let mut pair_index = HashMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = hom(i, j);
            let h0 = cache.get(&d)?.dim;
            let chi = intersect(&d, &d)? + 2;
            if h0 as i64 != chi {
                return Err(Error::SloViolation {
                    divisor: d.to_string(),
                    detail: format!("h0 = {h0} but D^2 + 2 = {chi}"),
                });
            }
            let list = std::mem::take(&mut paths[i][j]);
            let deg = d.d.max(0) as u32;
            let cols: Vec<Vec<Q>> = list.iter().map(|(_, f)| f.coords(deg)).collect();
            let ncols = list.len();
            let rows = if ncols == 0 {
                Vec::new()
            } else {
                transpose(&cols, cols[0].len())
            };
            let rank = crate::linalg::rank(&cols, if ncols == 0 { 0 } else { cols[0].len() });
            if rank != h0 {
                return Err(Error::Fullness {
                    source_vertex: i + 1,
                    target_vertex: j + 1,
                    span: rank,
                    expected: h0,
                });
            }
            let kernel = if ncols == 0 {
                Vec::new()
            } else {
                nullspace_sparse(&rows, ncols)
            };
            let pivots: Vec<usize> = Echelon::from_rows(ncols, rows.iter().cloned())
                .pivots()
                .to_vec();
            let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
            debug_assert_eq!(free.len(), kernel.len());
            let (paths_ij, images): (Vec<Path>, Vec<Poly>) = list.into_iter().unzip();
            pair_index.insert((i, j), relations.len());
            relations.push(PairRelations {
                source: i,
                target: j,
                divisor: d,
                paths: paths_ij,
                images,
                rank,
                h0,
                kernel,
                free,
            });
        }
    }

    let mut q = QuiverOfSections {
        n,
        labels: vertex_labels(n, k),
        vertex_classes,
        ts_op,
        cfg: cfg.clone(),
        arrows,
        relations,
        marking: None,
        warnings,
        pair_index,
    };
    if let (Some(kk), Some(m)) = (k, meta) {
        q.marking = Some(mark(&q, kk, m.exceptional)?);
    }
    Ok(q)
}

fn mark(q: &QuiverOfSections, kk: usize, exceptional: usize) -> Result<Marking> {
    let center = q.cfg.center(exceptional).clone();
    let es = q.arrows_between(kk, kk + 1);
    if es.len() != 1 || q.arrows[es[0]].divisor.as_exceptional() != Some(exceptional) {
        return Err(Error::Internal(format!(
            "vertices {} and {}' are not joined by a single arrow of class E{}",
            kk + 1,
            kk + 1,
            exceptional + 1
        )));
    }
    let e = es[0];
    let at_p = |aid: usize| !q.arrows[aid].section.eval(&center).is_zero();
    let mut u: BTreeMap<usize, Path> = BTreeMap::new();
    for i in (0..kk).rev() {
        let direct = q.arrows_between(i, kk + 1);
        if let Some(&a) = direct.first() {
            if direct.len() != 1 || !at_p(a) {
                return Err(Error::Internal(format!(
                    "irreducible arrows {} -> {}' do not form a single section off the center",
                    i + 1,
                    kk + 1
                )));
            }
            u.insert(i, vec![a]);
            continue;
        }
        let b = q
            .arrows
            .iter()
            .find(|a| a.source == i && a.target < kk && at_p(a.id))
            .ok_or_else(|| Error::Internal(format!("no arrow from {} avoids the center", i + 1)))?;
        let mut p = vec![b.id];
        p.extend(u[&b.target].iter().copied());
        u.insert(i, p);
    }
    for j in kk + 2..q.n {
        let direct = q.arrows_between(kk, j);
        if let Some(&a) = direct.first() {
            if direct.len() != 1 || !at_p(a) {
                return Err(Error::Internal(format!(
                    "irreducible arrows {} -> {} do not form a single section off the center",
                    kk + 1,
                    q.labels[j]
                )));
            }
            u.insert(j, vec![a]);
            continue;
        }
        let b = q
            .arrows
            .iter()
            .find(|a| a.target == j && a.source > kk + 1 && at_p(a.id))
            .ok_or_else(|| Error::Internal(format!("no arrow into {} avoids the center", q.labels[j])))?;
        let mut p = u[&b.source].clone();
        p.push(b.id);
        u.insert(j, p);
    }
    Ok(Marking {
        k: kk,
        e,
        u,
        exceptional,
        center,
    })
}

impl QuiverOfSections {
    pub fn arrows_between(&self, i: usize, j: usize) -> Vec<usize> {
        self.arrows
            .iter()
            .filter(|a| a.source == i && a.target == j)
            .map(|a| a.id)
            .collect()
    }

    pub fn pair(&self, i: usize, j: usize) -> Option<&PairRelations> {
        self.pair_index.get(&(i, j)).map(|&x| &self.relations[x])
    }

    pub fn hom(&self, i: usize, j: usize) -> DivisorClass {
        &self.vertex_classes[j] - &self.vertex_classes[i]
    }

    pub fn arrow_name(&self, id: usize) -> String {
        if let Some(m) = &self.marking {
            if m.e == id {
                return "e".to_string();
            }
        }
        format!("a{id}")
    }

    /// Section of a path: the product of its arrow sections.
    pub fn path_section(&self, p: &[usize]) -> Poly {
        p.iter()
            .fold(Poly::one(), |acc, &a| acc.mul(&self.arrows[a].section))
    }

    /// Whether `p` is a composable path.
    pub fn is_path(&self, p: &[usize]) -> bool {
        !p.is_empty()
            && p.windows(2)
                .all(|w| self.arrows[w[0]].target == self.arrows[w[1]].source)
    }

    /// Coefficients over the paths of `(i, j)` whose images sum to `f`.
    pub fn express(&self, i: usize, j: usize, f: &Poly) -> Result<Vec<Q>> {
        let pr = self
            .pair(i, j)
            .ok_or_else(|| Error::Internal(format!("no pair ({}, {})", i + 1, j + 1)))?;
        let deg = pr.divisor.d.max(0) as u32;
        if pr.paths.is_empty() {
            if f.is_zero() {
                return Ok(Vec::new());
            }
            return Err(Error::Internal("no paths to express a nonzero section".into()));
        }
        let cols: Vec<Vec<Q>> = pr.images.iter().map(|g| g.coords(deg)).collect();
        let rows = transpose(&cols, cols[0].len());
        solve(&rows, pr.paths.len(), &f.coords(deg)).ok_or_else(|| {
            Error::Internal(format!(
                "section {f} is not in the span of paths {} -> {}",
                self.labels[i], self.labels[j]
            ))
        })
    }

    /// Relation generators as text, one per kernel vector.
    pub fn relation_strings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for pr in &self.relations {
            for kv in &pr.kernel {
                let mut s = String::new();
                for (t, (pi, c)) in kv.iter().enumerate() {
                    let neg = c < &Q::zero();
                    let mag = if neg { -c.clone() } else { c.clone() };
                    if t == 0 {
                        if neg {
                            s.push('-');
                        }
                    } else {
                        s.push_str(if neg { " - " } else { " + " });
                    }
                    if mag != Q::from_integer(1.into()) {
                        let _ = write!(s, "{}*", fmt_q(&mag));
                    }
                    let names: Vec<String> =
                        pr.paths[*pi].iter().rev().map(|&a| self.arrow_name(a)).collect();
                    s.push_str(&names.join("."));
                }
                out.push(format!(
                    "{} -> {}: {s}",
                    self.labels[pr.source], self.labels[pr.target]
                ));
            }
        }
        out
    }

    pub fn relation_count(&self) -> usize {
        self.relations.iter().map(|p| p.kernel.len()).sum()
    }

    /// Every Hom space: span of path images, `h^0`, and `D^2 + 2`.
    pub fn hom_dimension_audit(&self) -> HomAudit {
        let mut rows = Vec::new();
        let mut pass = true;
        for pr in &self.relations {
            let chi = intersect(&pr.divisor, &pr.divisor).expect("same lattice") + 2;
            pass &= pr.rank == pr.h0 && pr.h0 as i64 == chi;
            rows.push(HomAuditRow {
                source: pr.source + 1,
                target: pr.target + 1,
                divisor: pr.divisor.to_string(),
                span: pr.rank,
                h0: pr.h0,
                chi,
            });
        }
        HomAudit { pass, rows }
    }

    /// DOT rendering; `e` is dashed and u-path arrows are bold.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph quiver {\n  rankdir=LR;\n");
        for (v, l) in self.labels.iter().enumerate() {
            let _ = writeln!(s, "  v{v} [label=\"{l}\"];");
        }
        let u_arrows: Vec<usize> = self
            .marking
            .as_ref()
            .map(|m| m.u.values().flatten().copied().collect())
            .unwrap_or_default();
        for a in &self.arrows {
            let style = match &self.marking {
                Some(m) if m.e == a.id => ", style=dashed",
                _ if u_arrows.contains(&a.id) => ", style=bold",
                _ => "",
            };
            let _ = writeln!(
                s,
                "  v{} -> v{} [label=\"{}: {}\"{style}];",
                a.source,
                a.target,
                self.arrow_name(a.id),
                a.section
            );
        }
        s.push_str("}\n");
        s
    }

    /// Whether every relation evaluates to the zero section.
    pub fn relations_vanish(&self) -> bool {
        self.relations.iter().all(|pr| {
            pr.kernel.iter().all(|kv| {
                kv.iter()
                    .fold(Poly::zero(), |acc, (pi, c)| acc.add(&pr.images[*pi].scale(c)))
                    .is_zero()
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::table1_system;
    use crate::linalg::q;
    use crate::toric_system::augment;

    fn plane() -> QuiverOfSections {
        let ts = ToricSystem::parse(&["H", "H", "H"], 0).unwrap();
        build_quiver_of_sections(&ts, &SurfaceConfig::plane(), None).unwrap()
    }

    #[test]
    fn plane_quiver_shape() {
        let q = plane();
        assert_eq!(q.arrows.len(), 6);
        assert_eq!(q.arrows_between(0, 1).len(), 3);
        assert_eq!(q.arrows_between(1, 2).len(), 3);
        assert!(q.arrows_between(0, 2).is_empty());
        let pr = q.pair(0, 2).unwrap();
        assert_eq!(pr.paths.len(), 9);
        assert_eq!(pr.kernel.len(), 3);
        assert_eq!(q.relation_count(), 3);
        assert!(q.relations_vanish());
        assert!(q.hom_dimension_audit().pass);
    }

    #[test]
    fn f1_quiver_is_marked() {
        let p = ToricSystem::parse(&["H", "H", "H"], 0).unwrap();
        let (ts, meta) = augment(&p, 2, 0).unwrap();
        let cfg = SurfaceConfig::from_integers(&[[0, 0, 1]]).unwrap();
        let q = build_quiver_of_sections(&ts, &cfg, Some(&meta)).unwrap();
        assert_eq!(q.labels, vec!["1", "2", "2'", "3"]);
        let m = q.marking.as_ref().unwrap();
        assert_eq!(m.k, 1);
        assert_eq!(q.arrows_between(0, 1).len(), 2);
        assert_eq!(q.arrows_between(0, 2).len(), 1);
        assert_eq!(q.arrows_between(1, 3).len(), 1);
        assert_eq!(q.arrows_between(2, 3).len(), 2);
        assert_eq!(m.u[&0], q.arrows_between(0, 2));
        assert_eq!(m.u[&3], q.arrows_between(1, 3));
        assert_eq!(q.arrows[m.e].section, Poly::one());
        assert_eq!(q.pair(0, 3).unwrap().h0, 5);
        assert!(q.relations_vanish());
    }

    #[test]
    fn express_recovers_sections() {
        let q = plane();
        let f = Poly::var(0).mul(&Poly::var(1));
        let c = q.express(0, 2, &f).unwrap();
        let back = q.relations[q.pair_index[&(0, 2)]]
            .images
            .iter()
            .zip(&c)
            .fold(Poly::zero(), |acc, (g, x)| acc.add(&g.scale(x)));
        assert_eq!(back, f);
    }

    #[test]
    fn kernel_membership() {
        let quiv = plane();
        let pr = quiv.pair(0, 2).unwrap();
        let mut v = vec![q(0); pr.paths.len()];
        for (j, c) in &pr.kernel[0] {
            v[*j] = c * q(3);
        }
        assert!(pr.in_kernel(&v));
        v[0] += q(1);
        assert!(!pr.in_kernel(&v));
    }

    #[test]
    fn degree_eight_fixture_builds() {
        let (ts, cfg) = table1_system(8).unwrap();
        let q = build_quiver_of_sections(&ts, &cfg, None).unwrap();
        assert!(q.hom_dimension_audit().pass);
        assert!(q.to_dot().contains("digraph"));
    }
}
