//! Seeded random samples of polynomials, configurations and charts.

use num_complex::Complex;
use rand::Rng;

use crate::cluster::coords::{ClusterChart, Configuration};
use crate::cluster::triangulation::{all_triangulations, Triangulation};
use crate::error::Result;
use crate::foliation::{classify, wkb_from_structure, TrajectoryStructure};
use crate::polynomial::Polynomial;
use crate::projective::ProjPoint;

/// Attempts made by the rejection samplers before giving up.
pub const MAX_ATTEMPTS: usize = 1000;

/// A point uniformly distributed in the disk of the given radius.
pub fn complex_in_disk<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Complex<f64> {
    loop {
        let z = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm_sqr() <= 1.0 {
            return z * radius;
        }
    }
}

/// A polynomial with coefficients uniform in the unit disk, resampled until
/// it lies off the discriminant.
pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Polynomial<f64> {
    loop {
        let a = (0..n).map(|_| complex_in_disk(rng, 1.0)).collect();
        if let Ok(p) = Polynomial::from_coefficients(n, a) {
            return p;
        }
    }
}

/// A random polynomial whose foliation classifies as saddle-free, with its
/// trajectory structure and WKB triangulation.
pub fn random_saddle_free<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
) -> Result<(Polynomial<f64>, TrajectoryStructure<f64>, Triangulation)> {
    let mut last = None;
    for _ in 0..MAX_ATTEMPTS {
        let p = random_polynomial(rng, n);
        match classify(&p).and_then(|s| wkb_from_structure(&p, &s).map(|t| (s, t))) {
            Ok((s, t)) => return Ok((p, s, t)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// `m` points whose affine parts are uniform in the disk of radius 2.
pub fn random_configuration<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Configuration<f64> {
    Configuration::new((0..m).map(|_| ProjPoint::finite(complex_in_disk(rng, 2.0))).collect())
}

/// A uniformly chosen triangulation of the `m`-gon.
pub fn random_triangulation<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Result<Triangulation> {
    let all = all_triangulations(m)?;
    Ok(all[rng.gen_range(0..all.len())].clone())
}

/// A chart on a random triangulation with `log X_j` uniform in
/// `[−2, 2] × [−π, π]`.
pub fn random_chart<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Result<ClusterChart<f64>> {
    let t = random_triangulation(rng, m)?;
    let x = (0..t.len())
        .map(|_| Complex::new(rng.gen_range(-2.0..2.0), rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).exp())
        .collect();
    ClusterChart::new(t, x)
}
