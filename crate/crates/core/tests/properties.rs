//! Property tests of the algebraic invariants.

use dpquiver::fixtures::{table1_system, TABLE1};
use dpquiver::linalg::{frac, Q};
use dpquiver::moduli::{
    apply_f, build_blowdown_map, descend_gauge, ext1_dimension, lift_gauge, ArrowMap,
};
use dpquiver::picard::SurfaceConfig;
use dpquiver::pipeline::{fixture_top_step, Step};
use dpquiver::quiver::QuiverOfSections;
use dpquiver::sections::{evaluate_at_point, SurfacePoint};
use dpquiver::stability::{
    augment_weight, check_stability, enumerate_subreps, fine_moduli_check, gauge_act,
    tautological_rep, Representation, Weight,
};
use dpquiver::toric_system::{augment, blow_down, opposite, validate_toric_system};
use num_traits::Zero;
use proptest::prelude::*;
use std::sync::OnceLock;

fn steps() -> &'static [(Step, ArrowMap)] {
    static S: OnceLock<Vec<(Step, ArrowMap)>> = OnceLock::new();
    S.get_or_init(|| {
        [8u32, 7, 6]
            .iter()
            .map(|&d| {
                let st = fixture_top_step(d).unwrap();
                let map = build_blowdown_map(&st.q, &st.q0).unwrap();
                (st, map)
            })
            .collect()
    })
}

fn nonzero() -> impl Strategy<Value = Q> {
    (1i64..=30, prop::bool::ANY, 1i64..=6).prop_map(|(p, neg, d)| frac(if neg { -p } else { p }, d))
}

fn gauge_for(n: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(nonzero(), n)
}

fn plane_pt() -> impl Strategy<Value = [Q; 3]> {
    (nonzero(), nonzero(), nonzero()).prop_map(|(a, b, c)| [a, b, c])
}

fn taut(q: &QuiverOfSections, p: &[Q; 3]) -> Option<Representation> {
    let pt = SurfacePoint::Plane(p.clone());
    pt.validate(&q.cfg).ok()?;
    tautological_rep(&pt, q).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn augmentation_is_inverted_by_blow_down(row in 0usize..6, m in 1usize..=9) {
        let (ts, _) = table1_system(TABLE1[row].degree).unwrap();
        let m = 1 + (m - 1) % (ts.n() + 1);
        let (up, meta) = augment(&ts, m, ts.r()).unwrap();
        prop_assert!(validate_toric_system(&up).pass);
        prop_assert_eq!(meta.k.is_some(), m <= ts.n());
        if m <= ts.n() {
            let (down, _) = blow_down(&up, m).unwrap();
            prop_assert_eq!(down, ts);
        }
    }

    #[test]
    fn opposite_is_an_involution(row in 0usize..7) {
        let (ts, _) = table1_system(TABLE1[row].degree).unwrap();
        prop_assert_eq!(opposite(&opposite(&ts)), ts);
    }

    #[test]
    fn toric_form_round_trips(t in prop::collection::vec(1i64..=20, 1..8)) {
        prop_assert_eq!(Weight::from_toric(&t).toric_form(), t);
    }

    #[test]
    fn augmentation_preserves_fine_weights(
        t in prop::collection::vec(1i64..=20, 2..8),
        k in 1usize..=8,
    ) {
        prop_assume!(fine_moduli_check(&Weight::from_toric(&t)).fine);
        let k = 1 + (k - 1) % (t.len() + 1);
        let up = augment_weight(&t, k).unwrap();
        prop_assert!(up.iter().all(|&x| x > 0));
        prop_assert!(fine_moduli_check(&Weight::from_toric(&up)).fine);
    }

    #[test]
    fn stability_is_gauge_invariant(s in 0usize..3, p in plane_pt(), g in gauge_for(8)) {
        let (st, _) = &steps()[s];
        let Some(r) = taut(&st.q, &p) else { return Ok(()) };
        let gr = gauge_act(&g[..st.q.n], &r, &st.q).unwrap();
        let a = check_stability(&r, &st.weight, &st.q).unwrap();
        let b = check_stability(&gr, &st.weight, &st.q).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(ext1_dimension(&r, &st.q), ext1_dimension(&gr, &st.q));
    }

    #[test]
    fn zeroing_arrows_only_adds_subrepresentations(
        s in 0usize..3,
        p in plane_pt(),
        kill in prop::collection::vec(prop::bool::ANY, 20),
    ) {
        let (st, _) = &steps()[s];
        let Some(r) = taut(&st.q, &p) else { return Ok(()) };
        let mut z = r.clone();
        for (v, &k) in z.values.iter_mut().zip(&kill) {
            if k {
                *v = Q::zero();
            }
        }
        let before = enumerate_subreps(&r, &st.q);
        let after = enumerate_subreps(&z, &st.q);
        prop_assert!(before.iter().all(|m| after.contains(m)));
    }

    #[test]
    fn blow_down_map_intertwines_gauges(s in 0usize..3, p in plane_pt(), g in gauge_for(8)) {
        let (st, map) = &steps()[s];
        let Some(r) = taut(&st.q, &p) else { return Ok(()) };
        let g = &g[..st.q.n];
        let lhs = apply_f(map, &gauge_act(g, &r, &st.q).unwrap());
        let rhs = gauge_act(&descend_gauge(g, map.k), &apply_f(map, &r), &st.q0).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lifted_gauge_recovers_the_orbit(s in 0usize..3, p in plane_pt(), g in gauge_for(8)) {
        let (st, map) = &steps()[s];
        let Some(r2) = taut(&st.q, &p) else { return Ok(()) };
        let e = st.q.marking.as_ref().unwrap().e;
        let g = &g[..st.q.n];
        let r1 = gauge_act(g, &r2, &st.q).unwrap();
        let h = lift_gauge(&descend_gauge(g, map.k), &r1.values[e], &r2.values[e], map.k);
        prop_assert_eq!(gauge_act(&h, &r2, &st.q).unwrap(), r1);
    }

    #[test]
    fn blow_down_map_preserves_relations(s in 0usize..3, p in plane_pt()) {
        let (st, map) = &steps()[s];
        let Some(r) = taut(&st.q, &p) else { return Ok(()) };
        prop_assert!(r.satisfies_relations(&st.q));
        prop_assert!(apply_f(map, &r).satisfies_relations(&st.q0));
    }

    #[test]
    fn evaluation_is_linear(s in 0usize..3, p in plane_pt(), c in nonzero(), i in 0usize..40, j in 0usize..40) {
        let (st, _) = &steps()[s];
        let cfg: &SurfaceConfig = &st.q.cfg;
        let (a, b) = (&st.q.arrows[i % st.q.arrows.len()], &st.q.arrows[j % st.q.arrows.len()]);
        prop_assume!(a.divisor == b.divisor);
        let pt = SurfacePoint::Plane(p);
        prop_assume!(pt.validate(cfg).is_ok());
        let f = a.section.add(&b.section.scale(&c));
        let lhs = evaluate_at_point(&f, &a.divisor, &pt, cfg).unwrap();
        let rhs = evaluate_at_point(&a.section, &a.divisor, &pt, cfg).unwrap()
            + &c * evaluate_at_point(&b.section, &b.divisor, &pt, cfg).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn path_sections_compose_associatively(s in 0usize..3, pick in prop::collection::vec(0usize..64, 3)) {
        let (st, _) = &steps()[s];
        let q = &st.q;
        // A random path built arrow by arrow.
        let mut path = vec![q.arrows[pick[0] % q.arrows.len()].id];
        for &x in &pick[1..] {
            let end = q.arrows[*path.last().unwrap()].target;
            let out: Vec<usize> = q.arrows.iter().filter(|a| a.source == end).map(|a| a.id).collect();
            if out.is_empty() {
                break;
            }
            path.push(out[x % out.len()]);
        }
        prop_assert!(q.is_path(&path));
        for cut in 0..=path.len() {
            let (l, r) = path.split_at(cut);
            prop_assert_eq!(q.path_section(&path), q.path_section(l).mul(&q.path_section(r)));
        }
    }

    #[test]
    fn tautological_reps_satisfy_the_relations(row in 0usize..7, p in plane_pt()) {
        let (ts, cfg) = table1_system(TABLE1[row].degree).unwrap();
        let q = dpquiver::quiver::build_quiver_of_sections(&ts, &cfg, None).unwrap();
        let Some(r) = taut(&q, &p) else { return Ok(()) };
        prop_assert!(r.satisfies_relations(&q));
    }
}
