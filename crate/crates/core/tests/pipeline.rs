use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stokes_cluster::foliation::wkb_triangulation;
use stokes_cluster::main_map::{map_report, wkb_chart};
use stokes_cluster::sampling::random_saddle_free;
use stokes_cluster::stokes::{asymptotic_values, normalize_tuple};
use stokes_cluster::{HbarParam64, Polynomial64};

fn poly(n: usize, a: &[(f64, f64)]) -> Polynomial64 {
    Polynomial64::from_coefficients(n, a.iter().map(|&(r, i)| Complex::new(r, i)).collect()).unwrap()
}

#[test]
fn wkb_triangulation_rotates_with_the_framing() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=3 {
        let (p, _, t) = random_saddle_free(&mut rng, n).unwrap();
        let rotated = wkb_triangulation(&p.rotate_framing()).unwrap();
        assert_eq!(rotated.shift_labels(1).arc_set(), t.arc_set(), "n = {n}");
    }
}

#[test]
fn nearby_points_of_a_chamber_share_a_torus() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let h = HbarParam64::real(0.2).unwrap();
    for n in 1..=3 {
        let (p, _, t) = random_saddle_free(&mut rng, n).unwrap();
        let nudged: Vec<_> = p.coefficients().iter().map(|a| a + Complex::new(1e-4, -1e-4)).collect();
        let q = Polynomial64::from_coefficients(n, nudged).unwrap();
        assert_eq!(wkb_triangulation(&q).unwrap().arc_set(), t.arc_set());
        let a = wkb_chart(&p, &h).unwrap();
        let b = wkb_chart(&q, &h).unwrap();
        assert_eq!(a.triangulation, b.triangulation);
        assert!(b.max_relative_error(&a) < 0.5, "{:?} vs {:?}", a.x, b.x);
    }
}

#[test]
fn symmetric_potential_has_periodic_values() {
    let p = poly(1, &[(-1.0, 0.0)]);
    let twice = p.rotate_framing().rotate_framing();
    assert!((twice.coefficients()[0] - p.coefficients()[0]).norm() < 1e-14);
    let t = normalize_tuple(&asymptotic_values(&p).unwrap()).unwrap();
    let shifted = normalize_tuple(&asymptotic_values(&p).unwrap().shift().shift()).unwrap();
    assert!(t.max_distance(&shifted) < 1e-9);
}

#[test]
fn report_of_a_saddle_free_point_is_complete() {
    let p = poly(2, &[(0.3, -0.2), (0.5, 0.4)]);
    let r = map_report(&p, &HbarParam64::real(0.5).unwrap()).unwrap();
    assert!(r.errors.is_empty(), "{:?}", r.errors);
    assert!(r.tuple.is_some());
    assert_eq!(r.chart.as_ref().unwrap().triangulation, r.wkb_triangulation.clone().unwrap());
    assert!(r.jacobian_condition.unwrap().is_finite());
    assert!(r.wall_proximity > 0.0);
}
