mod common;

use common::{cayley_distance, h1_distance, random_point, random_real_symplectic, random_sl2, rel_close, rng, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use siegel_core::metric::cross_ratio_eigenvalues;
use siegel_core::{
    block_embed, distance, flat_coordinates, mobius_act, random_symplectic_word, sl2_product_embed, RealSymplectic,
    SiegelPoint,
};

#[test]
fn action_law_and_preservation() {
    let mut r = rng(41);
    for case in 0..1000 {
        let g = 1 + case % 4;
        let z = random_point(&mut r, g);
        let (a, b) = (random_real_symplectic(&mut r, g), random_real_symplectic(&mut r, g));
        let lhs = mobius_act(&a, &mobius_act(&b, &z).unwrap()).unwrap();
        let rhs = mobius_act(&a.mul(&b).unwrap(), &z).unwrap();
        assert!(rel_close(&lhs, &rhs) <= 1e-8, "case {case}");
        assert!(lhs.min_im_eigenvalue() > 0.0);

        let w = random_symplectic_word(g, 1 + case % 5, case as u64).unwrap();
        let zw = mobius_act(&w, &z).unwrap();
        assert!(zw.im().cholesky().is_some());
        let back = mobius_act(&w.inverse(), &zw).unwrap();
        assert!(rel_close(&back, &z) <= 1e-8, "case {case}");
    }
}

#[test]
fn metric_axioms_and_invariance() {
    let mut r = rng(42);
    for case in 0..1000 {
        let g = 1 + case % 4;
        let (p, q, s) = (random_point(&mut r, g), random_point(&mut r, g), random_point(&mut r, g));
        let dpq = distance(&p, &q).unwrap();
        let dqp = distance(&q, &p).unwrap();
        assert!((dpq - dqp).abs() <= 1e-8 * dpq.max(1.0));
        let (dps, dsq) = (distance(&p, &s).unwrap(), distance(&s, &q).unwrap());
        assert!(dpq <= dps + dsq + 1e-8 * dpq.max(1.0));

        let gamma = random_real_symplectic(&mut r, g);
        let moved = distance(&mobius_act(&gamma, &p).unwrap(), &mobius_act(&gamma, &q).unwrap()).unwrap();
        assert!((moved - dpq).abs() <= 1e-8 * dpq.max(1.0), "case {case}: {moved} vs {dpq}");
    }
}

#[test]
fn agrees_with_cayley_oracle() {
    let mut r = rng(43);
    for case in 0..1000 {
        let g = 1 + case % 4;
        let (p, q) = (random_point(&mut r, g), random_point(&mut r, g));
        let d = distance(&p, &q).unwrap();
        let oracle = cayley_distance(&p, &q);
        assert!((d - oracle).abs() <= 1e-8 * oracle.max(1.0), "case {case}: {d} vs {oracle}");
    }
}

#[test]
fn product_of_upper_half_planes_is_isometric() {
    let mut r = rng(44);
    for case in 0..1000 {
        let g = 1 + case % 4;
        let zs: Vec<C64> = (0..g).map(|_| C64::new(r.random_range(-2.0..2.0), r.random_range(0.1..5.0))).collect();
        let ws: Vec<C64> = (0..g).map(|_| C64::new(r.random_range(-2.0..2.0), r.random_range(0.1..5.0))).collect();
        let (p, q) = (SiegelPoint::diagonal(&zs).unwrap(), SiegelPoint::diagonal(&ws).unwrap());
        let want = zs.iter().zip(&ws).map(|(z, w)| h1_distance(*z, *w).powi(2)).sum::<f64>().sqrt();
        let got = distance(&p, &q).unwrap();
        assert!((got - want).abs() <= 1e-8 * want.max(1.0), "case {case}: {got} vs {want}");

        let factors: Vec<RealSymplectic> = (0..g).map(|_| random_sl2(&mut r)).collect();
        let phi = sl2_product_embed(&factors).unwrap();
        let moved = mobius_act(&phi, &p).unwrap();
        for k in 0..g {
            let f = &factors[k];
            let (a, b, c, d) = (f.a()[(0, 0)], f.b()[(0, 0)], f.c()[(0, 0)], f.d()[(0, 0)]);
            let single = (zs[k] * a + b) / (zs[k] * c + d);
            assert!((moved.entry(k, k) - single).norm() <= 1e-8 * single.norm().max(1.0));
        }
    }
}

#[test]
fn block_embedding_is_isometric() {
    let mut r = rng(45);
    for _ in 0..200 {
        let (k, l) = (r.random_range(1..=2), r.random_range(1..=2));
        let (p1, q1) = (random_point(&mut r, k), random_point(&mut r, k));
        let (p2, q2) = (random_point(&mut r, l), random_point(&mut r, l));
        let want = (distance(&p1, &q1).unwrap().powi(2) + distance(&p2, &q2).unwrap().powi(2)).sqrt();
        let got = distance(&block_embed(&p1, &p2), &block_embed(&q1, &q2)).unwrap();
        assert!((got - want).abs() <= 1e-8 * want.max(1.0));
    }
}

#[test]
fn flat_coordinates_reconstruct_im() {
    let mut r = rng(46);
    for case in 0..300 {
        let z = random_point(&mut r, 1 + case % 5);
        let fc = flat_coordinates(&z).unwrap();
        let y = &fc.u * DMatrix::from_diagonal(&fc.d) * fc.u.transpose();
        let err = (&y - z.im()).abs().max();
        assert!(err <= 1e-10 * z.im().abs().max());
        for i in 0..fc.u.nrows() {
            assert_eq!(fc.u[(i, i)], 1.0);
            for j in 0..i {
                assert_eq!(fc.u[(i, j)], 0.0);
            }
        }
    }
}

fn arb_point(g: usize) -> impl Strategy<Value = SiegelPoint> {
    (proptest::collection::vec(-2.0f64..2.0, g * g), proptest::collection::vec(-1.0f64..1.0, g * g), 0.05f64..2.0)
        .prop_map(move |(xs, ms, shift)| {
            let x = DMatrix::from_row_slice(g, g, &xs);
            let m = DMatrix::from_row_slice(g, g, &ms);
            let y = &m * m.transpose() + DMatrix::identity(g, g) * shift;
            SiegelPoint::from_parts(&((&x + x.transpose()) * 0.5), &y).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn cross_ratio_eigenvalues_in_unit_interval(p in arb_point(3), q in arb_point(3)) {
        let ev = cross_ratio_eigenvalues(&p, &q).unwrap();
        prop_assert!(ev.iter().all(|&l| (0.0..1.0).contains(&l)));
        prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn distance_nonnegative_and_zero_on_diagonal(p in arb_point(2), q in arb_point(2)) {
        prop_assert!(distance(&p, &q).unwrap() >= 0.0);
        prop_assert!(distance(&p, &p).unwrap() <= 1e-6);
    }

    #[test]
    fn json_round_trip(p in arb_point(3)) {
        let s = serde_json::to_string(&p).unwrap();
        let back: SiegelPoint = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, p);
    }
}
