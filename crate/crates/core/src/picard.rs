//! Picard lattice of a blow-up of the plane at `r <= 6` points: intersection
//! form, canonical class, Riemann-Roch, orthogonality predicates, cohomology
//! dimensions, and general position of the centers.
//!
//! A class is stored as `(d; m_1, ..., m_r)` and denotes `dH - sum m_a E_a`.
//! So `E_1 - E_2` is `(0; -1, 1)`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, fmt_q, q, Q};
use crate::poly::monomials;

/// Maximum number of blown-up points (degree at least 3).
pub const MAX_CENTERS: usize = 6;

/// A divisor class `dH - sum m_a E_a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DivisorClass {
    pub d: i64,
    pub m: Vec<i64>,
}

impl DivisorClass {
    pub fn new(d: i64, m: Vec<i64>) -> Self {
        DivisorClass { d, m }
    }

    pub fn zero(r: usize) -> Self {
        DivisorClass::new(0, vec![0; r])
    }

    pub fn hyperplane(r: usize) -> Self {
        DivisorClass::new(1, vec![0; r])
    }

    /// The exceptional class `E_a` (0-based `a`).
    pub fn exceptional(r: usize, a: usize) -> Self {
        let mut m = vec![0; r];
        m[a] = -1;
        DivisorClass::new(0, m)
    }

    pub fn r(&self) -> usize {
        self.m.len()
    }

    pub fn scale(&self, k: i64) -> Self {
        DivisorClass::new(self.d * k, self.m.iter().map(|x| x * k).collect())
    }

    /// Pull-back along the blow-up of a new center inserted at index `a`.
    pub fn insert_exceptional(&self, a: usize) -> Self {
        let mut m = self.m.clone();
        m.insert(a, 0);
        DivisorClass::new(self.d, m)
    }

    /// Push-forward along contracting `E_a`.
    pub fn remove_exceptional(&self, a: usize) -> Self {
        let mut m = self.m.clone();
        m.remove(a);
        DivisorClass::new(self.d, m)
    }

    /// Whether the class is `E_a` for some `a`; returns that index.
    pub fn as_exceptional(&self) -> Option<usize> {
        if self.d != 0 {
            return None;
        }
        let nz: Vec<usize> = (0..self.r()).filter(|&a| self.m[a] != 0).collect();
        match nz.as_slice() {
            [a] if self.m[*a] == -1 => Some(*a),
            _ => None,
        }
    }

    /// Parses expressions such as `2H-E1-E3`, `E1-E2`, `0`, `-H+E2`.
    pub fn parse(s: &str, r: usize) -> Result<Self> {
        let bad = |why: &str| Error::Config(format!("cannot parse class `{s}`: {why}"));
        let mut out = DivisorClass::zero(r);
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "0" {
            return Ok(out);
        }
        let mut i = 0;
        let b = t.as_bytes();
        if b.is_empty() {
            return Err(bad("empty"));
        }
        while i < b.len() {
            let mut sign = 1;
            if b[i] == b'+' || b[i] == b'-' {
                sign = if b[i] == b'-' { -1 } else { 1 };
                i += 1;
            }
            let start = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let coef: i64 = if start == i {
                1
            } else {
                t[start..i].parse().map_err(|_| bad("coefficient"))?
            };
            if i >= b.len() {
                return Err(bad("dangling coefficient"));
            }
            match b[i] {
                b'H' => {
                    out.d += sign * coef;
                    i += 1;
                }
                b'E' => {
                    i += 1;
                    let s0 = i;
                    while i < b.len() && b[i].is_ascii_digit() {
                        i += 1;
                    }
                    let a: usize = t[s0..i].parse().map_err(|_| bad("exceptional index"))?;
                    if a == 0 || a > r {
                        return Err(bad("exceptional index out of range"));
                    }
                    out.m[a - 1] -= sign * coef;
                }
                _ => return Err(bad("unexpected symbol")),
            }
        }
        Ok(out)
    }

    fn check_r(&self, o: &DivisorClass) -> Result<()> {
        if self.r() != o.r() {
            return Err(Error::DimensionMismatch {
                expected: self.r(),
                found: o.r(),
            });
        }
        Ok(())
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, o: &DivisorClass) -> DivisorClass {
        assert_eq!(self.r(), o.r(), "lattice rank mismatch");
        DivisorClass::new(
            self.d + o.d,
            self.m.iter().zip(&o.m).map(|(a, b)| a + b).collect(),
        )
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, o: &DivisorClass) -> DivisorClass {
        self + &(-o)
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        self.scale(-1)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(i64, String)> = Vec::new();
        if self.d != 0 {
            parts.push((self.d, "H".into()));
        }
        for (a, &ma) in self.m.iter().enumerate() {
            if ma != 0 {
                parts.push((-ma, format!("E{}", a + 1)));
            }
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        for (idx, (c, name)) in parts.iter().enumerate() {
            let sign = if *c < 0 {
                "-"
            } else if idx > 0 {
                "+"
            } else {
                ""
            };
            let a = c.abs();
            if a == 1 {
                write!(f, "{sign}{name}")?;
            } else {
                write!(f, "{sign}{a}{name}")?;
            }
        }
        Ok(())
    }
}

/// `D1 . D2 = d1 d2 - sum m1_a m2_a`.
pub fn intersect(d1: &DivisorClass, d2: &DivisorClass) -> Result<i64> {
    d1.check_r(d2)?;
    Ok(d1.d * d2.d - d1.m.iter().zip(&d2.m).map(|(a, b)| a * b).sum::<i64>())
}

fn dot(d1: &DivisorClass, d2: &DivisorClass) -> i64 {
    intersect(d1, d2).expect("classes on the same surface")
}

/// Canonical class `-3H + sum E_a` on a surface with `r` centers.
pub fn canonical(r: usize) -> DivisorClass {
    DivisorClass::new(-3, vec![-1; r])
}

/// Canonical class and degree `K^2 = 9 - r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceInvariants {
    pub canonical: DivisorClass,
    pub degree: i64,
}

pub fn surface_invariants(cfg: &SurfaceConfig) -> SurfaceInvariants {
    let k = canonical(cfg.r());
    let degree = dot(&k, &k);
    SurfaceInvariants {
        canonical: k,
        degree,
    }
}

/// Riemann-Roch: `1 + (D^2 - D.K) / 2`, with integrality asserted.
pub fn euler_char(d: &DivisorClass) -> Result<i64> {
    let k = canonical(d.r());
    let num = dot(d, d) - dot(d, &k);
    if num % 2 != 0 {
        return Err(Error::Internal(format!(
            "non-integral Euler characteristic for {d}"
        )));
    }
    Ok(1 + num / 2)
}

/// `D^2 + D.K = -2`; when true also checks `chi(D) = D^2 + 2 = -D.K`.
pub fn is_num_left_orthogonal(d: &DivisorClass) -> Result<bool> {
    let k = canonical(d.r());
    let d2 = dot(d, d);
    let dk = dot(d, &k);
    if d2 + dk != -2 {
        return Ok(false);
    }
    let chi = euler_char(d)?;
    if chi != d2 + 2 || chi != -dk {
        return Err(Error::Internal(format!("Riemann-Roch identity fails for {d}")));
    }
    Ok(true)
}

/// Dimensions `(h0, h1, h2)` of the line bundle of a class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Cohomology {
    pub h0: i64,
    pub h1: i64,
    pub h2: i64,
}

/// `h0` by interpolation, `h2` by Serre duality, `h1` from Riemann-Roch.
pub fn cohomology_dims(d: &DivisorClass, cfg: &SurfaceConfig) -> Result<Cohomology> {
    cfg.check_class(d)?;
    let k = canonical(cfg.r());
    let h0 = crate::sections::section_dim(d, cfg)? as i64;
    let h2 = crate::sections::section_dim(&(&k - d), cfg)? as i64;
    let h1 = h0 + h2 - euler_char(d)?;
    if h1 < 0 {
        return Err(Error::GeneralPosition(format!(
            "negative h1 = {h1} computed for {d}"
        )));
    }
    Ok(Cohomology { h0, h1, h2 })
}

/// `h^i(-D) = 0` for all `i`.
pub fn is_lo(d: &DivisorClass, cfg: &SurfaceConfig) -> Result<bool> {
    let c = cohomology_dims(&(-d), cfg)?;
    Ok(c.h0 == 0 && c.h1 == 0 && c.h2 == 0)
}

/// Left-orthogonal with `h1(D) = h2(D) = 0`.
pub fn is_slo(d: &DivisorClass, cfg: &SurfaceConfig) -> Result<bool> {
    if !is_lo(d, cfg)? {
        return Ok(false);
    }
    let c = cohomology_dims(d, cfg)?;
    Ok(c.h1 == 0 && c.h2 == 0)
}

/// Centers of the blow-up with exact homogeneous coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceConfig {
    #[serde(with = "centers_serde")]
    centers: Vec<[Q; 3]>,
}

mod centers_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &[[Q; 3]], s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Vec<String>> = c
            .iter()
            .map(|p| p.iter().map(fmt_q).collect())
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<[Q; 3]>, D::Error> {
        let v: Vec<Vec<String>> = Vec::deserialize(d)?;
        v.into_iter()
            .map(|p| {
                if p.len() != 3 {
                    return Err(serde::de::Error::custom("expected three coordinates"));
                }
                let mut out: [Q; 3] = [Q::zero(), Q::zero(), Q::zero()];
                for (o, s) in out.iter_mut().zip(&p) {
                    *o = linalg::parse_q(s)
                        .ok_or_else(|| serde::de::Error::custom("bad rational"))?;
                }
                Ok(out)
            })
            .collect()
    }
}

/// Outcome of the general position test, with an offending subset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneralPosition {
    pub ok: bool,
    /// 0-based indices of collinear triple, conconic sextuple or repeated pair.
    pub witness: Option<Vec<usize>>,
}

impl SurfaceConfig {
    /// Validates distinctness, the count bound and general position.
    pub fn new(centers: Vec<[Q; 3]>) -> Result<Self> {
        let cfg = SurfaceConfig::unchecked(centers)?;
        let gp = check_general_position(&cfg);
        if !gp.ok {
            return Err(Error::GeneralPosition(format!(
                "offending centers {:?}",
                gp.witness.unwrap_or_default().iter().map(|a| a + 1).collect::<Vec<_>>()
            )));
        }
        Ok(cfg)
    }

    /// Only checks the count bound and nonzero coordinates.
    pub fn unchecked(centers: Vec<[Q; 3]>) -> Result<Self> {
        if centers.len() > MAX_CENTERS {
            return Err(Error::GeneralPosition(format!(
                "{} centers exceed the limit of {MAX_CENTERS}",
                centers.len()
            )));
        }
        if centers.iter().any(|p| p.iter().all(Zero::is_zero)) {
            return Err(Error::GeneralPosition("zero coordinate vector".into()));
        }
        Ok(SurfaceConfig { centers })
    }

    pub fn from_integers(pts: &[[i64; 3]]) -> Result<Self> {
        SurfaceConfig::new(pts.iter().map(|p| [q(p[0]), q(p[1]), q(p[2])]).collect())
    }

    pub fn plane() -> Self {
        SurfaceConfig {
            centers: Vec::new(),
        }
    }

    pub fn r(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[[Q; 3]] {
        &self.centers
    }

    pub fn center(&self, a: usize) -> &[Q; 3] {
        &self.centers[a]
    }

    /// Surface with center `a` contracted.
    pub fn without(&self, a: usize) -> Self {
        let mut c = self.centers.clone();
        c.remove(a);
        SurfaceConfig { centers: c }
    }

    /// Surface with an extra center inserted at index `a`, revalidated.
    pub fn with_center(&self, a: usize, p: [Q; 3]) -> Result<Self> {
        let mut c = self.centers.clone();
        c.insert(a, p);
        SurfaceConfig::new(c)
    }

    pub fn check_class(&self, d: &DivisorClass) -> Result<()> {
        if d.r() != self.r() {
            return Err(Error::DimensionMismatch {
                expected: self.r(),
                found: d.r(),
            });
        }
        Ok(())
    }
}

fn det3(a: &[Q; 3], b: &[Q; 3], c: &[Q; 3]) -> Q {
    &a[0] * (&b[1] * &c[2] - &b[2] * &c[1]) - &a[1] * (&b[0] * &c[2] - &b[2] * &c[0])
        + &a[2] * (&b[0] * &c[1] - &b[1] * &c[0])
}

fn veronese_row(p: &[Q; 3]) -> Vec<Q> {
    monomials(2)
        .iter()
        .map(|e| {
            let mut t = Q::from_integer(1.into());
            for i in 0..3 {
                for _ in 0..e[i] {
                    t *= &p[i];
                }
            }
            t
        })
        .collect()
}

/// No two centers equal, no three collinear, no six on a conic.
pub fn check_general_position(cfg: &SurfaceConfig) -> GeneralPosition {
    let c = cfg.centers();
    let r = c.len();
    for i in 0..r {
        for j in i + 1..r {
            let rows: Vec<Vec<Q>> = vec![c[i].to_vec(), c[j].to_vec()];
            if linalg::rank(&rows, 3) < 2 {
                return GeneralPosition {
                    ok: false,
                    witness: Some(vec![i, j]),
                };
            }
        }
    }
    for i in 0..r {
        for j in i + 1..r {
            for k in j + 1..r {
                if det3(&c[i], &c[j], &c[k]).is_zero() {
                    return GeneralPosition {
                        ok: false,
                        witness: Some(vec![i, j, k]),
                    };
                }
            }
        }
    }
    if r >= 6 {
        let idx: Vec<usize> = (0..r).collect();
        for sub in subsets(&idx, 6) {
            let rows: Vec<Vec<Q>> = sub.iter().map(|&a| veronese_row(&c[a])).collect();
            if linalg::rank(&rows, 6) < 6 {
                return GeneralPosition {
                    ok: false,
                    witness: Some(sub),
                };
            }
        }
    }
    GeneralPosition {
        ok: true,
        witness: None,
    }
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}
