//! Global sections of line bundles as plane curves through the centers with
//! prescribed multiplicities, their products, irreducible complements, and
//! evaluation at points of the surface (including exceptional curves).

use std::collections::HashMap;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{fmt_q, nullspace, Echelon, Q};
use crate::picard::{self, DivisorClass, SurfaceConfig};
use crate::poly::{monomials, Poly};

/// A basis of `H^0(D)` in reduced echelon form over the degree-`d` monomials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectionSpace {
    pub divisor: DivisorClass,
    pub basis: Vec<Poly>,
    pub dim: usize,
}

impl SectionSpace {
    pub fn degree(&self) -> i64 {
        self.divisor.d
    }

    /// Echelon form of the basis coordinate vectors.
    pub fn echelon(&self) -> Echelon {
        let n = monomial_count(self.divisor.d);
        Echelon::from_rows(n, self.basis.iter().map(|p| p.coords(self.divisor.d as u32)))
    }

    /// Whether `f` is a section of this class.
    pub fn contains(&self, f: &Poly) -> bool {
        if f.is_zero() {
            return true;
        }
        if self.divisor.d < 0 || f.degree() != Some(self.divisor.d as u32) || !f.is_homogeneous() {
            return false;
        }
        self.echelon().contains(&f.coords(self.divisor.d as u32))
    }
}

fn monomial_count(d: i64) -> usize {
    if d < 0 {
        0
    } else {
        ((d + 1) * (d + 2) / 2) as usize
    }
}

/// A point of the blown-up surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SurfacePoint {
    /// A point of the plane away from every center.
    Plane(#[serde(serialize_with = "ser_q3")] [Q; 3]),
    /// A point of `E_a`, given by a tangent direction in the fixed chart at center `a` (0-based).
    Exceptional {
        center: usize,
        #[serde(serialize_with = "ser_q2")]
        dir: [Q; 2],
    },
}

fn ser_q3<S: serde::Serializer>(p: &[Q; 3], s: S) -> std::result::Result<S::Ok, S::Error> {
    p.iter().map(fmt_q).collect::<Vec<_>>().serialize(s)
}

fn ser_q2<S: serde::Serializer>(p: &[Q; 2], s: S) -> std::result::Result<S::Ok, S::Error> {
    p.iter().map(fmt_q).collect::<Vec<_>>().serialize(s)
}

impl SurfacePoint {
    pub fn validate(&self, cfg: &SurfaceConfig) -> Result<()> {
        match self {
            SurfacePoint::Plane(p) => {
                if p.iter().all(Zero::is_zero) {
                    return Err(Error::InvalidPoint("zero coordinate vector".into()));
                }
                for c in cfg.centers() {
                    if proportional(p, c) {
                        return Err(Error::AmbiguousPoint(format!(
                            "[{}]",
                            p.iter().map(fmt_q).collect::<Vec<_>>().join(":")
                        )));
                    }
                }
                Ok(())
            }
            SurfacePoint::Exceptional { center, dir } => {
                if *center >= cfg.r() {
                    return Err(Error::InvalidPoint(format!("no center with index {}", center + 1)));
                }
                if dir.iter().all(Zero::is_zero) {
                    return Err(Error::InvalidPoint("zero tangent direction".into()));
                }
                Ok(())
            }
        }
    }
}

fn proportional(a: &[Q; 3], b: &[Q; 3]) -> bool {
    (0..3).all(|i| (0..3).all(|j| &a[i] * &b[j] == &a[j] * &b[i]))
}

/// Linear conditions on degree-`d` coefficients for multiplicity `mult` at `p`.
fn jet_conditions(d: u32, p: &[Q; 3], mult: u32) -> Vec<Vec<Q>> {
    let mons = monomials(d);
    let expansions: Vec<_> = mons
        .iter()
        .map(|e| Poly::monomial(*e, Q::from_integer(1.into())).taylor_at(p))
        .collect();
    let mut rows = Vec::new();
    for tot in 0..mult {
        for i in 0..=tot {
            let e = [i, tot - i];
            rows.push(expansions.iter().map(|t| t.coeff(&e)).collect());
        }
    }
    rows
}

/// Basis of `H^0(D)`: the nullspace of the jet-evaluation matrix.
pub fn section_basis(d: &DivisorClass, cfg: &SurfaceConfig) -> Result<SectionSpace> {
    cfg.check_class(d)?;
    if d.d < 0 {
        return Ok(SectionSpace {
            divisor: d.clone(),
            basis: Vec::new(),
            dim: 0,
        });
    }
    let deg = d.d as u32;
    let ncols = monomial_count(d.d);
    let mut rows = Vec::new();
    for (a, &ma) in d.m.iter().enumerate() {
        if ma > 0 {
            rows.extend(jet_conditions(deg, cfg.center(a), ma as u32));
        }
    }
    let ns = nullspace(&rows, ncols);
    let e = Echelon::from_rows(ncols, ns);
    let basis: Vec<Poly> = e.rows().iter().map(|r| Poly::from_coords(deg, r)).collect();
    Ok(SectionSpace {
        divisor: d.clone(),
        dim: basis.len(),
        basis,
    })
}

/// `h^0(D)`.
pub fn section_dim(d: &DivisorClass, cfg: &SurfaceConfig) -> Result<usize> {
    Ok(section_basis(d, cfg)?.dim)
}

/// Section basis of a class that is required to be strong left-orthogonal:
/// the dimension must equal `D^2 + 2`.
pub fn audited_section_basis(d: &DivisorClass, cfg: &SurfaceConfig) -> Result<SectionSpace> {
    let s = section_basis(d, cfg)?;
    let expected = picard::intersect(d, d)? + 2;
    if s.dim as i64 != expected.max(0) || expected < 0 {
        return Err(Error::SloViolation {
            divisor: d.to_string(),
            detail: format!("h0 = {}, D^2 + 2 = {}", s.dim, expected),
        });
    }
    Ok(s)
}

/// Span of pairwise products, inside the section space of the sum.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageSpan {
    pub divisor: DivisorClass,
    pub span: Echelon,
}

impl ImageSpan {
    pub fn rank(&self) -> usize {
        self.span.rank()
    }

    pub fn basis(&self) -> Vec<Poly> {
        if self.divisor.d < 0 {
            return Vec::new();
        }
        self.span
            .rows()
            .iter()
            .map(|r| Poly::from_coords(self.divisor.d as u32, r))
            .collect()
    }

    pub fn empty(divisor: DivisorClass) -> Self {
        let n = monomial_count(divisor.d);
        ImageSpan {
            divisor,
            span: Echelon::new(n),
        }
    }

    /// Adds the products of `s1` and `s2` to the span.
    pub fn absorb(&mut self, s1: &SectionSpace, s2: &SectionSpace) {
        if self.divisor.d < 0 {
            return;
        }
        let deg = self.divisor.d as u32;
        for f in &s1.basis {
            for g in &s2.basis {
                if self.span.rank() == self.span.ncols() {
                    return;
                }
                self.span.insert(f.mul(g).coords(deg));
            }
        }
    }
}

/// Image of the multiplication map `H^0(D1) x H^0(D2) -> H^0(D1 + D2)`.
pub fn multiply_images(s1: &SectionSpace, s2: &SectionSpace) -> ImageSpan {
    let divisor = &s1.divisor + &s2.divisor;
    let mut img = ImageSpan::empty(divisor);
    img.absorb(s1, s2);
    img
}

/// Extends `image` to the ambient space by greedy selection over the ambient
/// echelon basis; the selected vectors form the complement.
pub fn complement(ambient: &SectionSpace, image: &ImageSpan) -> Vec<Poly> {
    if ambient.divisor.d < 0 {
        return Vec::new();
    }
    let deg = ambient.divisor.d as u32;
    let mut span = image.span.clone();
    let mut out = Vec::new();
    for f in &ambient.basis {
        if span.insert(f.coords(deg)) {
            out.push(f.clone());
        }
    }
    out
}

/// Caches section spaces of one surface.
#[derive(Clone, Debug)]
pub struct SectionCache {
    cfg: SurfaceConfig,
    spaces: HashMap<DivisorClass, SectionSpace>,
}

impl SectionCache {
    pub fn new(cfg: &SurfaceConfig) -> Self {
        SectionCache {
            cfg: cfg.clone(),
            spaces: HashMap::new(),
        }
    }

    pub fn cfg(&self) -> &SurfaceConfig {
        &self.cfg
    }

    pub fn get(&mut self, d: &DivisorClass) -> Result<SectionSpace> {
        if let Some(s) = self.spaces.get(d) {
            return Ok(s.clone());
        }
        let s = section_basis(d, &self.cfg)?;
        self.spaces.insert(d.clone(), s.clone());
        Ok(s)
    }
}

/// Irreducible sections between quiver vertices `i < j` (1-based) of the
/// quiver built from `ts_op`: a complement of all decomposable products
/// inside `H^0(B_i + ... + B_{j-1})`.
pub fn irreducible_complement(
    i: usize,
    j: usize,
    ts_op: &[DivisorClass],
    cfg: &SurfaceConfig,
) -> Result<Vec<Poly>> {
    if !(1 <= i && i < j && j <= ts_op.len()) {
        return Err(Error::Range {
            position: j,
            max: ts_op.len(),
        });
    }
    let mut cache = SectionCache::new(cfg);
    let hom = |a: usize, b: usize| -> DivisorClass {
        ts_op[a - 1..b - 1]
            .iter()
            .fold(DivisorClass::zero(cfg.r()), |acc, x| &acc + x)
    };
    let ambient = cache.get(&hom(i, j))?;
    let mut img = ImageSpan::empty(hom(i, j));
    for l in i + 1..j {
        let s1 = cache.get(&hom(i, l))?;
        let s2 = cache.get(&hom(l, j))?;
        img.absorb(&s1, &s2);
    }
    Ok(complement(&ambient, &img))
}

/// Value of a section `f` of `D` at a surface point.
///
/// Plane points are normalized so the coordinate of largest nonzero index is
/// one. On `E_a` the value is the degree-`m_a` jet of `f` at center `a`
/// applied to the direction, and zero when `m_a < 0`.
pub fn evaluate_at_point(
    f: &Poly,
    d: &DivisorClass,
    pt: &SurfacePoint,
    cfg: &SurfaceConfig,
) -> Result<Q> {
    pt.validate(cfg)?;
    cfg.check_class(d)?;
    match pt {
        SurfacePoint::Plane(p) => Ok(f.eval(&normalize(p))),
        SurfacePoint::Exceptional { center, dir } => {
            let ma = d.m[*center];
            if ma < 0 {
                return Ok(Q::zero());
            }
            Ok(f.taylor_at(cfg.center(*center)).jet_at(ma as u32, dir))
        }
    }
}

/// Chart normalization of homogeneous coordinates.
pub fn normalize(p: &[Q; 3]) -> [Q; 3] {
    let c = crate::poly::chart_index(p);
    [&p[0] / &p[c], &p[1] / &p[c], &p[2] / &p[c]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    fn cfg(pts: &[[i64; 3]]) -> SurfaceConfig {
        SurfaceConfig::from_integers(pts).unwrap()
    }

    fn cls(s: &str, r: usize) -> DivisorClass {
        DivisorClass::parse(s, r).unwrap()
    }

    #[test]
    fn dimensions_of_small_systems() {
        let p2 = SurfaceConfig::plane();
        let h = section_basis(&cls("H", 0), &p2).unwrap();
        assert_eq!(h.dim, 3);
        assert_eq!(h.basis, vec![Poly::var(0), Poly::var(1), Poly::var(2)]);
        let c2 = cfg(&[[1, 0, 0], [0, 1, 0]]);
        assert_eq!(section_dim(&cls("H-E1-E2", 2), &c2).unwrap(), 1);
        assert_eq!(section_dim(&cls("2H-E1", 2), &c2).unwrap(), 5);
        assert_eq!(section_dim(&cls("2H-E1-E2", 2), &c2).unwrap(), 4);
        assert_eq!(section_dim(&cls("E1-E2", 2), &c2).unwrap(), 0);
        assert_eq!(section_dim(&cls("E1", 2), &c2).unwrap(), 1);
        assert_eq!(section_dim(&cls("-H", 2), &c2).unwrap(), 0);
    }

    #[test]
    fn double_point_conditions() {
        // conics singular at [0:0:1]: spanned by x^2, xy, y^2
        let c1 = cfg(&[[0, 0, 1]]);
        let s = section_basis(&DivisorClass::new(2, vec![2]), &c1).unwrap();
        assert_eq!(s.dim, 3);
        for f in &s.basis {
            for (e, _) in f.terms() {
                assert_eq!(e[2], 0);
            }
        }
    }

    #[test]
    fn products_and_complements() {
        let c1 = cfg(&[[1, 0, 0]]);
        let h = section_basis(&cls("H", 1), &c1).unwrap();
        let hf = section_basis(&cls("H-E1", 1), &c1).unwrap();
        assert_eq!(multiply_images(&h, &hf).rank(), 5);
        let e = section_basis(&cls("E1", 1), &c1).unwrap();
        let mut img = ImageSpan::empty(cls("H", 1));
        img.absorb(&hf, &e);
        let comp = complement(&h, &img);
        assert_eq!(comp, vec![Poly::var(0)]);
    }

    #[test]
    fn evaluation_on_exceptional_curve() {
        let c1 = cfg(&[[0, 0, 1]]);
        let he = cls("H-E1", 1);
        let x = Poly::var(0);
        let on_e = |dx: i64, dy: i64| SurfacePoint::Exceptional {
            center: 0,
            dir: [q(dx), q(dy)],
        };
        assert_eq!(evaluate_at_point(&x, &he, &on_e(2, 5), &c1).unwrap(), q(2));
        assert_eq!(evaluate_at_point(&x, &he, &on_e(0, 1), &c1).unwrap(), q(0));
        let h = cls("H", 1);
        assert_eq!(evaluate_at_point(&x, &h, &on_e(2, 5), &c1).unwrap(), q(0));
        let one = Poly::one();
        assert_eq!(evaluate_at_point(&one, &cls("E1", 1), &on_e(1, 1), &c1).unwrap(), q(0));
        let pz = SurfacePoint::Plane([q(0), q(0), q(3)]);
        assert!(matches!(
            evaluate_at_point(&x, &h, &pz, &c1),
            Err(Error::AmbiguousPoint(_))
        ));
    }
}
