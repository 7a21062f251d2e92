//! Configurations of points in `ℂP¹` and their cross-ratio coordinates.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::quiver::quiver_of;
use super::triangulation::{is_boundary_segment, Arc, Triangulation};
use crate::error::{Error, Result};
use crate::projective::{det, Mobius, ProjPoint};
use crate::scalar::Real;

/// Default tolerance for deciding that two points of `ℂP¹` coincide, in the
/// spherical metric.
pub const PROJ_TOL: f64 = 1e-7;

/// Distance below which a cross-ratio factor is treated as exactly zero.
const DEGENERATE_TOL: f64 = 1e-13;

/// Distance at which `X_k` is considered to sit on the pole `X_k = −1`.
const POLE_TOL: f64 = 1e-12;

/// A map from the `m` marked points to `ℂP¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration<T: Real> {
    pub points: Vec<ProjPoint<T>>,
}

impl<T: Real> Configuration<T> {
    pub fn new(points: Vec<ProjPoint<T>>) -> Self {
        Self { points }
    }

    pub fn m(&self) -> usize {
        self.points.len()
    }

    pub fn distance(&self, i: usize, j: usize) -> T {
        self.points[i].spherical_distance(&self.points[j])
    }

    /// Applies a Möbius map to every point.
    pub fn transform(&self, g: &Mobius<T>) -> Self {
        Self::new(self.points.iter().map(|p| g.apply(p)).collect())
    }

    /// Relabels so that marked point `k` carries the old value at `k + 1`.
    pub fn shift(&self) -> Self {
        let mut points = self.points.clone();
        points.rotate_left(1);
        Self::new(points)
    }

    /// Smallest spherical distance between cyclically adjacent points.
    pub fn adjacent_margin(&self) -> T {
        let m = self.m();
        (0..m).map(|k| self.distance(k, (k + 1) % m)).fold(T::infinity(), T::min)
    }

    /// Largest, over triples of points, of the smallest pairwise distance within
    /// the triple; positive iff at least three distinct values occur.
    pub fn triple_margin(&self) -> T {
        let m = self.m();
        let mut best = T::zero();
        for i in 0..m {
            for j in i + 1..m {
                let dij = self.distance(i, j);
                if dij <= best {
                    continue;
                }
                for k in j + 1..m {
                    best = best.max(dij.min(self.distance(i, k)).min(self.distance(j, k)));
                }
            }
        }
        best
    }

    /// The margin by which both Sibuya genericity conditions hold.
    pub fn sibuya_margin(&self) -> T {
        self.adjacent_margin().min(self.triple_margin())
    }

    /// Whether adjacent values are distinct and at least three values occur.
    pub fn satisfies_sibuya(&self, tol: T) -> bool {
        self.sibuya_margin() > tol
    }

    /// First index `k` with `ψ(k), ψ(k+1), ψ(k+2)` pairwise distinct.
    pub fn first_distinct_triple(&self, tol: T) -> Option<usize> {
        let m = self.m();
        (0..m).find(|&k| {
            let (a, b, c) = (k, (k + 1) % m, (k + 2) % m);
            self.distance(a, b) > tol && self.distance(b, c) > tol && self.distance(a, c) > tol
        })
    }

    /// Applies the Möbius map sending points `k, k+1, k+2` to `0, 1, ∞`.
    pub fn normalized_at(&self, k: usize, tol: T) -> Result<Self> {
        let m = self.m();
        let g = Mobius::to_standard_triple(
            &self.points[k % m],
            &self.points[(k + 1) % m],
            &self.points[(k + 2) % m],
            tol,
        )
        .ok_or_else(|| Error::GenericityViolation(format!("points {k}, {}, {} are not distinct", k + 1, k + 2)))?;
        let mut out = self.transform(&g);
        out.points[k % m] = ProjPoint::zero();
        out.points[(k + 1) % m] = ProjPoint::one();
        out.points[(k + 2) % m] = ProjPoint::infinity();
        Ok(out)
    }

    /// Canonical representative of the `PGL₂` orbit: normalization at the
    /// first triple of consecutive pairwise distinct points.
    pub fn normalized(&self, tol: T) -> Result<Self> {
        if self.m() < 3 {
            return Err(Error::GenericityViolation("fewer than three points".into()));
        }
        let k = self
            .first_distinct_triple(tol)
            .ok_or_else(|| Error::GenericityViolation("no three consecutive distinct points".into()))?;
        self.normalized_at(k, tol)
    }

    /// Largest entrywise spherical distance to another configuration.
    pub fn max_distance(&self, other: &Self) -> T {
        self.points
            .iter()
            .zip(&other.points)
            .map(|(p, q)| p.spherical_distance(q))
            .fold(T::zero(), T::max)
    }
}

/// Coordinates on the torus of a triangulation: one nonzero `X_j` per arc,
/// aligned with the arc order of the triangulation.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterChart<T: Real> {
    pub triangulation: Triangulation,
    pub x: Vec<Complex<T>>,
}

impl<T: Real> ClusterChart<T> {
    pub fn new(triangulation: Triangulation, x: Vec<Complex<T>>) -> Result<Self> {
        if x.len() != triangulation.len() {
            return Err(Error::DimensionMismatch {
                expected: triangulation.len(),
                got: x.len(),
            });
        }
        if let Some(bad) = x
            .iter()
            .position(|v| !(v.norm() > T::zero()) || !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::PreconditionViolation(format!(
                "coordinate on arc {} must be finite and nonzero",
                triangulation.arcs()[bad]
            )));
        }
        Ok(Self { triangulation, x })
    }

    /// Coordinate attached to `arc`, if it belongs to the triangulation.
    pub fn get(&self, arc: Arc) -> Option<Complex<T>> {
        self.triangulation.index_of(arc).map(|k| self.x[k])
    }

    /// Largest relative difference `|X_j − Y_j| / |Y_j|` against a chart on the
    /// same arc set, matched by arc.
    pub fn max_relative_error(&self, reference: &Self) -> T {
        self.triangulation
            .arcs()
            .iter()
            .zip(&self.x)
            .map(|(arc, x)| match reference.get(*arc) {
                Some(y) => (x - y).norm() / y.norm(),
                None => T::infinity(),
            })
            .fold(T::zero(), T::max)
    }
}

/// The cross ratio `X_j` of the quadrilateral around arc `k` of `t`.
///
/// With the quadrilateral labelled `p₁, …, p₄` counterclockwise from the
/// smaller endpoint of the arc,
/// `X = (z₁ − z₂)(z₃ − z₄) / ((z₂ − z₃)(z₁ − z₄))`, evaluated through
/// homogeneous determinants.
pub fn cross_ratio<T: Real>(c: &Configuration<T>, t: &Triangulation, k: usize) -> Result<Complex<T>> {
    check_len(c, t)?;
    let q = t.quadrilateral(k);
    let z = q.map(|v| c.points[v]);
    let tol = T::lit(DEGENERATE_TOL);
    let sides = [(0, 1), (1, 2), (2, 3), (3, 0)];
    if sides.iter().any(|&(i, j)| z[i].chordal_distance(&z[j]) <= tol) {
        let arc = t.arcs()[k];
        return Err(Error::NonGeneric(arc.a, arc.b));
    }
    let num = det(&z[0], &z[1]) * det(&z[2], &z[3]);
    let den = det(&z[1], &z[2]) * det(&z[0], &z[3]);
    Ok(num / den)
}

fn check_len<T: Real>(c: &Configuration<T>, t: &Triangulation) -> Result<()> {
    if c.m() != t.m() {
        return Err(Error::DimensionMismatch {
            expected: t.m(),
            got: c.m(),
        });
    }
    Ok(())
}

/// All coordinates `X_j` of `c` in the chart of `t`.
pub fn chart_coords<T: Real>(c: &Configuration<T>, t: &Triangulation) -> Result<ClusterChart<T>> {
    let x = (0..t.len()).map(|k| cross_ratio(c, t, k)).collect::<Result<Vec<_>>>()?;
    ClusterChart::new(t.clone(), x)
}

/// A configuration with the prescribed coordinates: the triangle on the
/// boundary segment `{0, 1}` is seeded with `(0, 1, ∞)` and the remaining
/// points are solved for one quadrilateral at a time.
pub fn reconstruct<T: Real>(chart: &ClusterChart<T>) -> Configuration<T> {
    let t = &chart.triangulation;
    let m = t.m();
    let mut z: Vec<Option<ProjPoint<T>>> = vec![None; m];
    let seed = t
        .triangles()
        .into_iter()
        .find(|tri| tri.contains(&0) && tri.contains(&1))
        .expect("every boundary segment lies in a triangle");
    let apex = seed.into_iter().find(|&v| v != 0 && v != 1).expect("triangle has a third vertex");
    z[0] = Some(ProjPoint::zero());
    z[1] = Some(ProjPoint::one());
    z[apex] = Some(ProjPoint::infinity());

    let mut progress = true;
    while progress {
        progress = false;
        for k in 0..t.len() {
            let q = t.quadrilateral(k);
            let unknown: Vec<usize> = (0..4).filter(|&i| z[q[i]].is_none()).collect();
            if unknown.len() != 1 {
                continue;
            }
            let slot = unknown[0];
            let f = |candidate: ProjPoint<T>| -> Complex<T> {
                let p = q.map(|v| z[v].unwrap_or(candidate));
                chart.x[k] * det(&p[1], &p[2]) * det(&p[0], &p[3]) - det(&p[0], &p[1]) * det(&p[2], &p[3])
            };
            let e_u = ProjPoint {
                u: Complex::one(),
                v: Complex::zero(),
            };
            let e_v = ProjPoint {
                u: Complex::zero(),
                v: Complex::one(),
            };
            let alpha = f(e_u);
            let beta = f(e_v);
            z[q[slot]] = Some(ProjPoint::new(beta, -alpha).expect("cross-ratio equation is nondegenerate"));
            progress = true;
        }
    }
    Configuration::new(z.into_iter().map(|p| p.expect("triangulation is connected")).collect())
}

/// The coordinate change for the flip at arc position `k`:
/// `X'_k = X_k^{-1}` and `X'_j = X_j (1 + X_k^{-sgn ε_jk})^{-ε_jk}`.
pub fn mutate_coords<T: Real>(chart: &ClusterChart<T>, k: usize) -> Result<ClusterChart<T>> {
    let xk = chart.x[k];
    if (xk + Complex::one()).norm() < T::lit(POLE_TOL) {
        return Err(Error::TransitionPole);
    }
    let eps = quiver_of(&chart.triangulation).eps;
    let x = chart
        .x
        .iter()
        .enumerate()
        .map(|(j, &xj)| {
            if j == k {
                return xk.inv();
            }
            let e = eps[j][k];
            if e == 0 {
                return xj;
            }
            let base = Complex::<T>::one() + xk.powi(-e.signum());
            xj * base.powi(-e)
        })
        .collect();
    ClusterChart::new(chart.triangulation.flip_at(k), x)
}

/// Whether the endpoints of every arc and boundary segment of `t` are distinct.
pub fn is_generic<T: Real>(c: &Configuration<T>, t: &Triangulation, tol: T) -> bool {
    if c.m() != t.m() {
        return false;
    }
    let m = t.m();
    let boundary = (0..m).all(|k| c.distance(k, (k + 1) % m) > tol);
    boundary && t.arcs().iter().all(|arc| c.distance(arc.a, arc.b) > tol)
}

/// A triangulation with respect to which `c` is generic, or `None` when the
/// Sibuya conditions fail.
///
/// Repeatedly cuts off a vertex whose neighbours carry distinct values, as
/// long as the remaining points still carry three distinct values; otherwise
/// finishes with the fan from the vertex that was about to be cut.
pub fn find_generic_triangulation<T: Real>(c: &Configuration<T>, tol: T) -> Option<Triangulation> {
    let m = c.m();
    if m < 3 || !c.satisfies_sibuya(tol) {
        return None;
    }
    let mut remaining: Vec<usize> = (0..m).collect();
    let mut arcs = Vec::with_capacity(m - 3);
    while remaining.len() > 3 {
        let len = remaining.len();
        let k = (0..len).find(|&i| {
            let prev = remaining[(i + len - 1) % len];
            let next = remaining[(i + 1) % len];
            c.distance(prev, next) > tol
        })?;
        let cut = remaining[k];
        let others: Vec<usize> = remaining.iter().copied().filter(|&v| v != cut).collect();
        if has_three_distinct(c, &others, tol) {
            let prev = remaining[(k + len - 1) % len];
            let next = remaining[(k + 1) % len];
            arcs.push(Arc::new(prev, next));
            remaining.remove(k);
        } else {
            for (i, &v) in remaining.iter().enumerate() {
                let adjacent = i == (k + 1) % len || i == (k + len - 1) % len;
                if v != cut && !adjacent {
                    arcs.push(Arc::new(cut, v));
                }
            }
            break;
        }
    }
    let arcs = arcs
        .into_iter()
        .filter(|a| !is_boundary_segment(m, a.a, a.b))
        .collect();
    let t = Triangulation::new(m, arcs).ok()?;
    is_generic(c, &t, tol).then_some(t)
}

fn has_three_distinct<T: Real>(c: &Configuration<T>, idx: &[usize], tol: T) -> bool {
    let mut reps: Vec<usize> = Vec::new();
    for &i in idx {
        if reps.iter().all(|&r| c.distance(r, i) > tol) {
            reps.push(i);
            if reps.len() >= 3 {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(re: f64, im: f64) -> ProjPoint<f64> {
        ProjPoint::finite(Complex::new(re, im))
    }

    fn inf() -> ProjPoint<f64> {
        ProjPoint::infinity()
    }

    #[test]
    fn standard_cross_ratio() {
        let t = Triangulation::from_pairs(4, &[(0, 2)]).unwrap();
        let c = Configuration::new(vec![fin(0.0, 0.0), fin(1.0, 0.0), inf(), fin(-1.0, 0.0)]);
        let x = cross_ratio(&c, &t, 0).unwrap();
        assert!((x - Complex::new(1.0, 0.0)).norm() < 1e-15);
        let c = Configuration::new(vec![fin(0.0, 0.0), fin(1.0, 0.0), inf(), fin(0.5, 2.0)]);
        let x = cross_ratio(&c, &t, 0).unwrap();
        let expected = -Complex::new(0.5, 2.0).inv();
        assert!((x - expected).norm() < 1e-15);
    }

    #[test]
    fn degenerate_side_is_non_generic() {
        let t = Triangulation::from_pairs(4, &[(0, 2)]).unwrap();
        let c = Configuration::new(vec![fin(0.0, 0.0), fin(0.0, 0.0), inf(), fin(2.0, 0.0)]);
        assert_eq!(cross_ratio(&c, &t, 0).unwrap_err(), Error::NonGeneric(0, 2));
    }

    #[test]
    fn square_reconstruction() {
        let t = Triangulation::from_pairs(4, &[(0, 2)]).unwrap();
        let chart = ClusterChart::new(t, vec![Complex::new(1.0, 0.0)]).unwrap();
        let c = reconstruct(&chart);
        assert!(c.points[3].chordal_distance(&fin(-1.0, 0.0)) < 1e-15);
    }

    #[test]
    fn square_mutation_fixed_point() {
        let t = Triangulation::from_pairs(4, &[(0, 2)]).unwrap();
        let chart = ClusterChart::new(t, vec![Complex::new(1.0, 0.0)]).unwrap();
        let next = mutate_coords(&chart, 0).unwrap();
        assert_eq!(next.x, vec![Complex::new(1.0, 0.0)]);
        assert_eq!(next.triangulation.arcs(), &[Arc::new(1, 3)]);
        let pole = ClusterChart::new(chart.triangulation.clone(), vec![Complex::new(-1.0, 0.0)]).unwrap();
        assert_eq!(mutate_coords(&pole, 0).unwrap_err(), Error::TransitionPole);
    }

    #[test]
    fn generic_triangulation_examples() {
        let tri = Configuration::new(vec![fin(0.0, 0.0), fin(1.0, 0.0), inf()]);
        assert!(find_generic_triangulation(&tri, 1e-7).unwrap().is_empty());
        let two = Configuration::new(vec![fin(0.0, 0.0), fin(1.0, 0.0), fin(0.0, 0.0), fin(1.0, 0.0)]);
        assert!(find_generic_triangulation(&two, 1e-7).is_none());
        let c = Configuration::new(vec![fin(0.0, 0.0), fin(1.0, 0.0), inf(), fin(1.0, 0.0)]);
        let t = find_generic_triangulation(&c, 1e-7).unwrap();
        assert_eq!(t.arcs(), &[Arc::new(0, 2)]);
        assert!(!is_generic(&c, &Triangulation::from_pairs(4, &[(1, 3)]).unwrap(), 1e-7));
    }

    #[test]
    fn fan_fallback_when_cut_would_lose_a_value() {
        // Only vertex 0 carries the third value.
        let c = Configuration::new(vec![inf(), fin(0.0, 0.0), fin(1.0, 0.0), fin(0.0, 0.0), fin(1.0, 0.0)]);
        let t = find_generic_triangulation(&c, 1e-7).unwrap();
        assert_eq!(t.sorted_arcs(), vec![Arc::new(0, 2), Arc::new(0, 3)]);
    }

    #[test]
    fn normalization_is_idempotent() {
        let c = Configuration::new(vec![fin(1.0, 0.0), fin(2.0, 0.0), fin(3.0, 0.0), fin(4.0, 0.0)]);
        let n = c.normalized(1e-7).unwrap();
        assert!(n.points[0].chordal_distance(&ProjPoint::zero()) < 1e-15);
        assert!(n.points[2].is_infinity());
        // z -> (z-1)(2-3)/((z-3)(2-1)) sends 4 to -3
        assert!(n.points[3].chordal_distance(&fin(-3.0, 0.0)) < 1e-14);
        let again = n.normalized(1e-7).unwrap();
        assert!(again.max_distance(&n) < 1e-15);
    }

    #[test]
    fn mutation_matches_flip_of_cross_ratios() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for m in 4..=8 {
            let all = super::super::triangulation::all_triangulations(m).unwrap();
            for t in &all {
                let c = Configuration::new(
                    (0..m)
                        .map(|_| fin(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                        .collect(),
                );
                let chart = chart_coords(&c, t).unwrap();
                for k in 0..t.len() {
                    let direct = chart_coords(&c, &t.flip_at(k)).unwrap();
                    let mutated = mutate_coords(&chart, k).unwrap();
                    assert!(mutated.max_relative_error(&direct) < 1e-9, "m={m} T={:?} k={k}", t.arcs());
                }
            }
        }
    }
}
