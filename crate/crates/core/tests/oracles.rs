//! Independent reference computations checked against the library.

use dpquiver::fixtures::{table1_system, TABLE1};
use dpquiver::linalg::{q, Q};
use dpquiver::moduli::{exceptional_fiber_analysis, ext1_dimension, fiber_representation};
use dpquiver::picard::{intersect, DivisorClass, SurfaceConfig};
use dpquiver::pipeline::fixture_top_step;
use dpquiver::quiver::build_quiver_of_sections;
use dpquiver::sections::{section_dim, SurfacePoint};
use dpquiver::solver::relation_equations;
use dpquiver::stability::{augment_weight, fine_moduli_check, tautological_rep, Weight};
use dpquiver::toric_system::ToricSystem;
use num_traits::{One, Zero};

fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Rank of a dense rational matrix by plain Gaussian elimination.
fn gauss_rank(mut m: Vec<Vec<Q>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let piv = m[rank][c].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &piv;
                for j in c..cols {
                    let d = &f * &m[rank][j];
                    m[r][j] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `h^0(dH - sum m_a E_a)` from affine partial derivatives at each center.
fn h0_by_derivatives(d: i64, mults: &[i64], centers: &[[i64; 3]]) -> usize {
    if d < 0 {
        return 0;
    }
    let monos: Vec<[i64; 3]> = (0..=d)
        .flat_map(|i| (0..=d - i).map(move |j| [i, j, d - i - j]))
        .collect();
    let mut rows = Vec::new();
    for (a, &m) in mults.iter().enumerate() {
        let p = centers[a];
        // Chart: the first nonzero coordinate is set to one.
        let c = (0..3).find(|&i| p[i] != 0).unwrap();
        let others: Vec<usize> = (0..3).filter(|&i| i != c).collect();
        for s in 0..m {
            for i in 0..=s {
                let alpha = [i, s - i];
                let row: Vec<Q> = monos
                    .iter()
                    .map(|e| {
                        let mut val = Q::one() * Q::from_integer(p[c].pow(e[c] as u32).into());
                        for (t, &v) in others.iter().enumerate() {
                            let (ex, k) = (e[v], alpha[t]);
                            if ex < k {
                                return Q::zero();
                            }
                            let ff: i64 = (0..k).map(|j| ex - j).product();
                            val *= q(ff) * Q::from_integer(p[v].pow((ex - k) as u32).into());
                        }
                        val / Q::from_integer(p[c].pow(e[c] as u32).into())
                    })
                    .collect();
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return monos.len();
    }
    monos.len() - gauss_rank(rows)
}

const CENTERS: [[i64; 3]; 4] = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]];

#[test]
fn section_dimensions_match_derivative_conditions() {
    let cfg = SurfaceConfig::from_integers(&CENTERS).unwrap();
    for d in 0..=4i64 {
        for m0 in 0..=2i64 {
            for m1 in 0..=2i64 {
                for m3 in 0..=1i64 {
                    let mults = [m0, m1, 0, m3];
                    let cls = DivisorClass::new(d, mults.to_vec());
                    let want = h0_by_derivatives(d, &mults, &CENTERS);
                    assert_eq!(section_dim(&cls, &cfg).unwrap(), want, "{cls}");
                }
            }
        }
    }
}

#[test]
fn nonspecial_classes_follow_the_interpolation_count() {
    let cfg = SurfaceConfig::from_integers(&CENTERS).unwrap();
    for (d, m) in [(3i64, [1i64, 1, 1, 1]), (4, [2, 1, 1, 1]), (4, [2, 2, 2, 2]), (2, [1, 1, 0, 0])] {
        let expected = binom(d + 2, 2) - m.iter().map(|&x| binom(x + 1, 2)).sum::<i64>();
        let cls = DivisorClass::new(d, m.to_vec());
        assert_eq!(section_dim(&cls, &cfg).unwrap() as i64, expected, "{cls}");
    }
}

#[test]
fn every_fixture_hom_class_has_h0_equal_to_self_intersection_plus_two() {
    for row in TABLE1.iter() {
        let (ts, cfg) = table1_system(row.degree).unwrap();
        let quiv = build_quiver_of_sections(&ts, &cfg, None).unwrap();
        for i in 0..quiv.n {
            for j in i + 1..quiv.n {
                let d = quiv.hom(i, j);
                let want = intersect(&d, &d).unwrap() + 2;
                assert_eq!(section_dim(&d, &cfg).unwrap() as i64, want, "degree {} Hom({i},{j})", row.degree);
            }
        }
    }
}

#[test]
fn plane_semi_invariant_counts_are_plane_cubic_dimensions() {
    let ts = ToricSystem::parse(&["H", "H", "H"], 0).unwrap();
    let quiv = build_quiver_of_sections(&ts, &SurfaceConfig::plane(), None).unwrap();
    let w = Weight::from_toric(&[1, 2]);
    for k in 1..=3u32 {
        let want = ((3 * k + 1) * (3 * k + 2) / 2) as usize;
        assert_eq!(dpquiver::moduli::semi_invariant_rank(&quiv, &w, k, 100_000).unwrap(), want);
    }
}

#[test]
fn f1_weight_is_the_augmented_plane_weight() {
    for (a, b) in [(1i64, 1i64), (2, 3), (5, 2)] {
        let t = augment_weight(&[a, b], 2).unwrap();
        assert_eq!(Weight::from_toric(&t).theta, vec![-2 * a, 1 - 2 * b, 2 * a - 1, 2 * b]);
    }
}

#[test]
fn fine_check_agrees_with_subset_sums() {
    for theta in [vec![-2, -1, 1, 2], vec![-1, 0, 1], vec![-3, -2, 5], vec![-2, -3, 1, 4], vec![-4, 1, 1, 2]] {
        let n = theta.len();
        let zero_subset = (1u32..(1 << n) - 1)
            .any(|m| (0..n).filter(|&v| m >> v & 1 == 1).map(|v| theta[v]).sum::<i64>() == 0);
        assert_eq!(fine_moduli_check(&Weight::new(theta.clone()).unwrap()).fine, !zero_subset, "{theta:?}");
    }
}

/// `ext1 = dim T_R(relations) - dim(orbit)` with the orbit of a stable rep
/// of dimension `n - 1`.
fn ext1_by_tangent_space(r: &dpquiver::stability::Representation, quiv: &dpquiver::quiver::QuiverOfSections) -> usize {
    let na = quiv.arrows.len();
    let jac: Vec<Vec<Q>> = relation_equations(quiv)
        .iter()
        .map(|e| (0..na).map(|v| e.derivative(v, &r.values)).collect())
        .collect();
    na - gauss_rank(jac) - (quiv.n - 1)
}

#[test]
fn ext1_matches_tangent_space_minus_orbit() {
    for deg in [8u32, 7] {
        let step = fixture_top_step(deg).unwrap();
        let rep = exceptional_fiber_analysis(&step.q, &step.weight, 11).unwrap();
        let on_e = fiber_representation(&step.q, rep.seed_pair, &q(3), &q(-2)).unwrap();
        let off_e = tautological_rep(&SurfacePoint::Plane([q(2), q(-5), q(7)]), &step.q).unwrap();
        for r in [on_e, off_e] {
            assert_eq!(ext1_dimension(&r, &step.q), ext1_by_tangent_space(&r, &step.q));
            assert_eq!(ext1_dimension(&r, &step.q), 2);
        }
    }
}
