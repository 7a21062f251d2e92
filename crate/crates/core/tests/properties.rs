use std::f64::consts::TAU;

use num_complex::Complex;
use proptest::prelude::*;

use stokes_cluster::cluster::{
    all_triangulations, chart_coords, mutate_coords, mutate_quiver, quiver_of, reconstruct, ClusterChart,
    Configuration,
};
use stokes_cluster::{Mobius, Polynomial64, ProjPoint};

fn complex(r: f64) -> impl Strategy<Value = Complex<f64>> {
    (-r..r, -r..r).prop_map(|(a, b)| Complex::new(a, b))
}

fn polynomial(max_n: usize) -> impl Strategy<Value = Polynomial64> {
    (1..=max_n)
        .prop_flat_map(|n| proptest::collection::vec(complex(1.0), n).prop_map(move |a| (n, a)))
        .prop_filter_map("near the discriminant", |(n, a)| Polynomial64::from_coefficients(n, a).ok())
}

fn triangulation_and_values() -> impl Strategy<Value = ClusterChart<f64>> {
    (4usize..=8)
        .prop_flat_map(|m| {
            let count = all_triangulations(m).unwrap().len();
            (Just(m), 0..count, proptest::collection::vec((-2.0..2.0f64, -3.0..3.0f64), m - 3))
        })
        .prop_map(|(m, i, logs)| {
            let t = all_triangulations(m).unwrap()[i].clone();
            let x = logs.into_iter().map(|(re, im)| Complex::new(re, im).exp()).collect();
            ClusterChart::new(t, x).unwrap()
        })
}

fn same_set(a: &[Complex<f64>], b: &[Complex<f64>], tol: f64) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.iter().any(|y| (x - y).norm() < tol))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roots_reexpand_to_the_coefficients(p in polynomial(6)) {
        let expanded = p.roots().expand();
        let full = p.full_coefficients();
        let scale = 1.0 + p.roots().max_modulus().powi(p.degree() as i32);
        for (e, f) in expanded.iter().zip(&full) {
            prop_assert!((e - f).norm() < 1e-9 * scale, "{e} vs {f}");
        }
    }

    #[test]
    fn scaling_multiplies_the_roots(p in polynomial(4), t in complex(2.0)) {
        prop_assume!(t.norm() > 0.2);
        let q = p.scale_action(t).unwrap();
        let expected: Vec<_> = p.roots().roots.iter().map(|r| r * t).collect();
        prop_assert!(same_set(&q.roots().roots, &expected, 1e-8 * (1.0 + t.norm())));
    }

    #[test]
    fn framing_rotation_has_order_n_plus_3(p in polynomial(5)) {
        let mut q = p.clone();
        for _ in 0..p.marked_points() {
            q = q.rotate_framing();
        }
        for (a, b) in p.coefficients().iter().zip(q.coefficients()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn framing_rotation_turns_the_roots_backwards(p in polynomial(5)) {
        let w = Complex::from_polar(1.0, -TAU / p.marked_points() as f64);
        let expected: Vec<_> = p.roots().roots.iter().map(|r| r * w).collect();
        prop_assert!(same_set(&p.rotate_framing().roots().roots, &expected, 1e-9));
    }

    #[test]
    fn periods_are_antisymmetric(p in polynomial(3)) {
        let forward = p.period(0, 1).unwrap().value;
        let backward = p.period(1, 0).unwrap().value;
        prop_assert!((forward + backward).norm() < 1e-8 * (1.0 + forward.norm()));
    }

    #[test]
    fn cross_ratios_are_projectively_invariant(
        chart in triangulation_and_values(),
        coeffs in proptest::collection::vec(complex(2.0), 4),
    ) {
        let g = Mobius::new(coeffs[0], coeffs[1], coeffs[2], coeffs[3]);
        prop_assume!(g.determinant().norm() > 0.1);
        let c = reconstruct(&chart);
        let moved = Configuration::new(c.points.iter().map(|p| g.apply(p)).collect());
        let again = chart_coords(&moved, &chart.triangulation).unwrap();
        prop_assert!(again.max_relative_error(&chart) < 1e-8);
    }

    #[test]
    fn reconstruction_inverts_the_chart(chart in triangulation_and_values()) {
        let back = chart_coords(&reconstruct(&chart), &chart.triangulation).unwrap();
        prop_assert!(back.max_relative_error(&chart) < 1e-10);
    }

    #[test]
    fn mutation_is_an_involution(chart in triangulation_and_values(), k in 0usize..5) {
        let k = k % chart.x.len();
        let twice = mutate_coords(&mutate_coords(&chart, k).unwrap(), k).unwrap();
        prop_assert_eq!(&twice.triangulation, &chart.triangulation);
        prop_assert!(twice.max_relative_error(&chart) < 1e-12);
    }

    #[test]
    fn mutation_matches_flips(chart in triangulation_and_values(), k in 0usize..5) {
        let k = k % chart.x.len();
        let t = &chart.triangulation;
        prop_assert_eq!(mutate_quiver(&quiver_of(t), k), quiver_of(&t.flip_at(k)));
        prop_assert_eq!(mutate_quiver(&mutate_quiver(&quiver_of(t), k), k), quiver_of(t));
        let flipped = mutate_coords(&chart, k).unwrap();
        let direct = chart_coords(&reconstruct(&chart), &flipped.triangulation).unwrap();
        prop_assert!(direct.max_relative_error(&flipped) < 1e-9);
    }
}

#[test]
fn reconstruction_fixes_the_reference_triangle() {
    let t = all_triangulations(6).unwrap()[3].clone();
    let chart = ClusterChart::new(t, vec![Complex::new(0.5, 1.0), Complex::new(-2.0, 0.1), Complex::new(0.3, -0.7)]).unwrap();
    let c = reconstruct(&chart);
    assert!(c.points.iter().any(|p| p.chordal_distance(&ProjPoint::infinity()) < 1e-12));
    assert!(c.points[0].chordal_distance(&ProjPoint::zero()) < 1e-12);
    assert!(c.points[1].chordal_distance(&ProjPoint::one()) < 1e-12);
}
