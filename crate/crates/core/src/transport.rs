//! Cluster coordinates of `F_ħ(p)` from Wronskians of subdominant solutions
//! evaluated along generic trajectories.
//!
//! For small `ħ` every asymptotic value, seen from a single base point, sits
//! exponentially close to one of two points, so the configuration cannot be
//! resolved in one frame. The cross ratio on an arc only needs the Wronskians
//! `W(Y_a, Y_b)` of the edges `{a, b}` of the surrounding quadrilateral, and
//! each of those is computed where `Y_a` and `Y_b` are transverse: on the
//! generic trajectory joining the directions `a` and `b`. Along that leaf
//! `Y_a` grows monotonically away from the `a` end and `Y_b` away from the
//! `b` end, so both are carried in their stable direction.
//!
//! Solutions are transported with their accumulated log-scale, so that every
//! copy of `Y_a` is the same solution with the same normalization.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::cluster::coords::{ClusterChart, PROJ_TOL};
use crate::cluster::triangulation::{Arc, Triangulation};
use crate::error::{Error, Result};
use crate::foliation::{edge_trajectories, EdgeTrajectory, TraceParams, TrajectoryStructure};
use crate::main_map::HbarParam;
use crate::ode::State;
use crate::polynomial::Polynomial;
use crate::scalar::Real;
use crate::stokes::{
    chordal_cauchy, escape_radius, integrate_segment, ray_direction, subdominant_seed, Damping, StokesParams,
};

/// Relative agreement required between the charts from two seed radii.
const SEED_AGREEMENT: f64 = 1e-8;

/// A nonzero complex number `mantissa · e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue<T: Real> {
    pub mantissa: Complex<T>,
    pub log_scale: T,
}

impl<T: Real> ScaledValue<T> {
    fn mul(self, other: Self) -> Self {
        Self {
            mantissa: self.mantissa * other.mantissa,
            log_scale: self.log_scale + other.log_scale,
        }
    }

    fn div(self, other: Self) -> Self {
        Self {
            mantissa: self.mantissa / other.mantissa,
            log_scale: self.log_scale - other.log_scale,
        }
    }

    fn neg(self) -> Self {
        Self {
            mantissa: -self.mantissa,
            ..self
        }
    }

    pub fn value(&self) -> Complex<T> {
        self.mantissa * self.log_scale.exp()
    }
}

/// A solution known by normalized Cauchy data and the log of its scale.
#[derive(Debug, Clone, Copy)]
struct Carried<T: Real> {
    point: Complex<T>,
    state: State<T, 2>,
    log_scale: T,
}

fn scaled_relative<T: Real>(p: &Polynomial<T>, a: &State<T, 2>, b: &State<T, 2>, z: Complex<T>) -> T {
    let sc = T::one() / p.eval(z).norm().sqrt().max(T::one());
    let diff = (a[0] - b[0]).norm().max((a[1] - b[1]).norm() * sc);
    let size = a[0].norm().max(a[1].norm() * sc);
    diff / size
}

fn carry<T: Real>(p: &Polynomial<T>, from: Carried<T>, path: &[Complex<T>], tol: T) -> Result<Carried<T>> {
    let none = Damping::none();
    let mut cur = from;
    for &z in path {
        let (state, log) = integrate_segment(p, cur.point, z, cur.state, tol, &none, |a, b, w| {
            scaled_relative(p, a, b, w)
        })?;
        cur = Carried {
            point: z,
            state,
            log_scale: cur.log_scale + log,
        };
    }
    Ok(cur)
}

/// Chords of the circle `|z| = r` from angle `from` to angle `to` (shorter way).
fn arc_points<T: Real>(r: T, from: T, to: T) -> Vec<Complex<T>> {
    let mut delta = to - from;
    while delta > T::PI() {
        delta = delta - T::TAU();
    }
    while delta <= -T::PI() {
        delta = delta + T::TAU();
    }
    let pieces = (delta.abs() / (T::PI() / T::lit(64.0))).ceil().to_usize().unwrap_or(1).max(1);
    (1..=pieces)
        .map(|i| Complex::from_polar(r, from + delta * T::lit(i as f64) / T::lit(pieces as f64)))
        .collect()
}

struct Setup<T: Real> {
    scaled: Polynomial<T>,
    t: Complex<T>,
    cut_radius: T,
    edges: Vec<EdgeTrajectory<T>>,
}

/// Wronskians `W(Y_from, Y_to)` of every edge, from seeds at `radius`.
fn edge_wronskians<T: Real>(
    setup: &Setup<T>,
    radius: T,
    params: &StokesParams<T>,
) -> Result<BTreeMap<(usize, usize), ScaledValue<T>>> {
    let q = &setup.scaled;
    let m = q.marked_points();
    let hub_radius = setup.t.norm() * setup.cut_radius;
    let damping = Damping::new(q);
    let mut hubs = Vec::with_capacity(m);
    for k in 0..m {
        let (z_s, seed) = subdominant_seed(q, k, radius, T::zero());
        let hub = ray_direction(q, k, T::zero()) * hub_radius;
        let (state, log_scale) = integrate_segment(q, z_s, hub, seed, params.tol, &damping, |a, b, z| {
            chordal_cauchy(q, a, b, z)
        })?;
        hubs.push(Carried {
            point: hub,
            state,
            log_scale,
        });
    }
    let mut out = BTreeMap::new();
    for e in &setup.edges {
        let inside: Vec<usize> = (0..e.points.len())
            .filter(|&i| e.points[i].norm() <= setup.cut_radius)
            .collect();
        let (first, last) = (inside[0].min(e.anchor), inside[inside.len() - 1].max(e.anchor));
        let scaled_points: Vec<Complex<T>> = e.points[first..=last].iter().map(|z| *z * setup.t).collect();
        let anchor = e.anchor - first;

        let leg = |k: usize, entry: Complex<T>, along: Vec<Complex<T>>| -> Result<Carried<T>> {
            let hub = hubs[k];
            let mut path = arc_points(hub_radius, hub.point.arg(), entry.arg());
            path.push(entry);
            path.extend(along);
            carry(q, hub, &path, params.tol)
        };
        let ya = leg(e.from, scaled_points[0], scaled_points[1..=anchor].to_vec())?;
        let back: Vec<Complex<T>> = scaled_points[anchor..scaled_points.len() - 1].iter().rev().copied().collect();
        let yb = leg(e.to, scaled_points[scaled_points.len() - 1], back)?;

        let z = ya.point;
        if chordal_cauchy(q, &ya.state, &yb.state, z) < T::lit(PROJ_TOL) {
            let arc = e.edge();
            return Err(Error::NonGeneric(arc.a, arc.b));
        }
        let det = ya.state[0] * yb.state[1] - ya.state[1] * yb.state[0];
        out.insert(
            (e.from, e.to),
            ScaledValue {
                mantissa: det,
                log_scale: ya.log_scale + yb.log_scale,
            },
        );
    }
    Ok(out)
}

fn oriented<T: Real>(w: &BTreeMap<(usize, usize), ScaledValue<T>>, a: usize, b: usize) -> Result<ScaledValue<T>> {
    if let Some(v) = w.get(&(a, b)) {
        return Ok(*v);
    }
    w.get(&(b, a))
        .map(|v| v.neg())
        .ok_or_else(|| Error::PreconditionViolation(format!("edge {} is not an edge of the WKB triangulation", Arc::new(a, b))))
}

fn chart_from_wronskians<T: Real>(
    t: &Triangulation,
    w: &BTreeMap<(usize, usize), ScaledValue<T>>,
) -> Result<ClusterChart<T>> {
    let x = (0..t.len())
        .map(|k| {
            let [p1, p2, p3, p4] = t.quadrilateral(k);
            let num = oriented(w, p1, p2)?.mul(oriented(w, p3, p4)?);
            let den = oriented(w, p2, p3)?.mul(oriented(w, p1, p4)?);
            Ok(num.div(den).value())
        })
        .collect::<Result<Vec<_>>>()?;
    ClusterChart::new(t.clone(), x)
}

/// `F_ħ(p)` in the chart of its WKB triangulation `t`, computed from edge
/// Wronskians. The subdominant seeds are placed at two radii and the charts
/// must agree to `10⁻⁸`.
pub fn transported_chart<T: Real>(
    p: &Polynomial<T>,
    structure: &TrajectoryStructure<T>,
    t: &Triangulation,
    hbar: &HbarParam<T>,
    params: &StokesParams<T>,
) -> Result<ClusterChart<T>> {
    if t.is_empty() {
        return ClusterChart::new(t.clone(), Vec::new());
    }
    let trace = TraceParams::for_polynomial(p);
    let scale = hbar.scaling(p.n());
    let setup = Setup {
        scaled: p.scale_action(scale)?,
        t: scale,
        cut_radius: T::lit(3.0) * (T::one() + p.roots().max_modulus()),
        edges: edge_trajectories(p, structure, &trace)?,
    };
    let hub_radius = scale.norm() * setup.cut_radius;
    let radius = params
        .radius
        .unwrap_or_else(|| T::lit(3.0) * escape_radius(&setup.scaled))
        .max(T::lit(2.0) * hub_radius);
    let first = chart_from_wronskians(t, &edge_wronskians(&setup, radius, params)?)?;
    if !params.check_doubling {
        return Ok(first);
    }
    let second = chart_from_wronskians(t, &edge_wronskians(&setup, radius * T::lit(2.0), params)?)?;
    let change = second.max_relative_error(&first);
    if !(change < T::lit(SEED_AGREEMENT)) {
        return Err(Error::ConvergenceCheckFailure {
            sector: 0,
            change: change.to_f64_lossy(),
        });
    }
    Ok(second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::coords::chart_coords;
    use crate::foliation::{classify, wkb_from_structure};
    use crate::stokes::asymptotic_values;

    fn poly(n: usize, a: &[(f64, f64)]) -> Polynomial<f64> {
        Polynomial::from_coefficients(n, a.iter().map(|&(r, i)| Complex::new(r, i)).collect()).unwrap()
    }

    fn both_routes(p: &Polynomial<f64>, h: f64) -> (ClusterChart<f64>, ClusterChart<f64>) {
        let s = classify(p).unwrap();
        let t = wkb_from_structure(p, &s).unwrap();
        let hbar = HbarParam::real(h).unwrap();
        let transported = transported_chart(p, &s, &t, &hbar, &StokesParams::default()).unwrap();
        let scaled = p.scale_action(hbar.scaling(p.n())).unwrap();
        let direct = chart_coords(&asymptotic_values(&scaled).unwrap().configuration(), &t).unwrap();
        (transported, direct)
    }

    #[test]
    fn square_matches_quantization() {
        let p = poly(1, &[(-1.0, 0.0)]);
        for h in [1.0, 0.25, 0.05, 0.01] {
            let s = classify(&p).unwrap();
            let t = wkb_from_structure(&p, &s).unwrap();
            let hbar = HbarParam::real(h).unwrap();
            let chart = transported_chart(&p, &s, &t, &hbar, &StokesParams::default()).unwrap();
            let expected = (Complex::new(0.0, -std::f64::consts::PI) / h).exp();
            assert!((chart.x[0] - expected).norm() < 1e-8, "{h}: {} vs {expected}", chart.x[0]);
        }
    }

    #[test]
    fn agrees_with_base_point_frame() {
        let cases = [
            poly(1, &[(0.4, 0.7)]),
            poly(2, &[(0.3, -0.2), (0.5, 0.4)]),
            poly(3, &[(0.2, 0.1), (-0.4, 0.3), (0.1, -0.6)]),
        ];
        for p in &cases {
            let (a, b) = both_routes(p, 1.0);
            assert!(a.max_relative_error(&b) < 1e-8, "{:?} vs {:?}", a.x, b.x);
        }
    }
}
