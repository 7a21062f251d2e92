//! Horizontal foliation of `φ = P(z) dz²`.
//!
//! Trajectories are integrated in the distinguished coordinate: along a
//! horizontal leaf `dz/ds = 1/√P`, so that `w = ∫√P dz` advances by real unit
//! speed and `Im w` stays constant. The three separatrices leaving each simple
//! zero decide the trajectory structure, and when none of them ends at another
//! zero their terminal Stokes directions give the WKB triangulation.

use num_complex::Complex;
use num_traits::Zero;

use crate::cluster::triangulation::{is_boundary_segment, Arc, Triangulation};
use crate::error::{Error, Result};
use crate::ode::{dopri_step, next_step_size};
use crate::polynomial::Polynomial;
use crate::quad::gl5;
use crate::scalar::{angle_between, sqrt_near, wrap_angle, Real};

/// Hard cap on accepted plus rejected steps for one trajectory.
const MAX_STEPS: usize = 200_000;

/// Largest allowed change of the argument of `√P` across one step.
const BRANCH_JUMP: f64 = std::f64::consts::FRAC_PI_4;

/// Tolerances and budgets for tracing trajectories of one polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceParams<T: Real> {
    /// Leaves reaching `|z| > escape_radius` are assigned a Stokes direction.
    pub escape_radius: T,
    /// Radius around each zero inside which a leaf is said to end there.
    pub zero_exclusion: T,
    /// Distance from a zero at which separatrices are launched.
    pub launch_offset: T,
    /// Minimal angular distance from a sector boundary for a classification.
    pub angular_tol: T,
    /// Budget on the `|dw|`-length of a single trajectory.
    pub max_w_length: T,
    /// Local error tolerance per unit of `w`-length.
    pub rtol: T,
}

impl<T: Real> TraceParams<T> {
    pub fn for_polynomial(p: &Polynomial<T>) -> Self {
        let roots = p.roots();
        let scale = roots.scale();
        let escape_radius = T::lit(10.0) * (T::one() + roots.max_modulus());
        let m = T::lit(p.marked_points() as f64);
        Self {
            escape_radius,
            zero_exclusion: T::lit(1e-4) * scale,
            launch_offset: T::lit(1e-3) * scale,
            angular_tol: T::lit(0.1) * T::PI() / m,
            max_w_length: T::lit(50.0) * escape_radius.powf(m / T::lit(2.0)),
            rtol: T::lit(1e-9).max(T::eps_floor(1e3)),
        }
    }
}

/// Where a traced trajectory ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminus {
    /// Escaped to infinity asymptotic to the ray at angle `2πk/(n+3)`.
    StokesDirection(usize),
    /// Entered the exclusion disk of a zero along one of its prongs.
    Zero(usize),
    /// Ran out of length or step budget.
    Truncated,
}

/// A traced horizontal trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Real> {
    pub points: Vec<Complex<T>>,
    pub origin: Option<usize>,
    pub terminus: Terminus,
    /// Length in the flat metric `|dw|`.
    pub w_length: T,
    /// Accumulated `|Im Δw|` over all steps.
    pub horizontality_defect: T,
    /// For escaping leaves, the angular distance from the terminal point's
    /// argument to the nearest sector boundary.
    pub boundary_clearance: Option<T>,
}

impl<T: Real> Trajectory<T> {
    /// Whether the horizontality defect is below `tol · w_length`.
    pub fn is_horizontal(&self, tol: T) -> bool {
        self.horizontality_defect <= tol * self.w_length
    }
}

/// A separatrix running from one zero to another.
#[derive(Debug, Clone, PartialEq)]
pub struct Saddle<T: Real> {
    pub from: usize,
    pub to: usize,
    pub trajectory: Trajectory<T>,
}

/// The separatrices of every zero and what they imply.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStructure<T: Real> {
    pub separatrices: Vec<[Trajectory<T>; 3]>,
    /// Launch angles of the separatrices, increasing for each zero.
    pub launch_angles: Vec<[T; 3]>,
    pub saddles: Vec<Saddle<T>>,
    pub saddle_free: bool,
    /// Terminal Stokes directions of each zero's separatrices, listed by
    /// launch angle; `None` when one of them ends at a zero.
    pub zero_fan: Vec<Option<[usize; 3]>>,
}

impl<T: Real> TrajectoryStructure<T> {
    pub fn trajectories(&self) -> impl Iterator<Item = &Trajectory<T>> {
        self.separatrices.iter().flat_map(|s| s.iter())
    }

    /// Largest ratio `horizontality_defect / w_length` over all separatrices.
    pub fn max_relative_defect(&self) -> T {
        self.trajectories()
            .map(|t| t.horizontality_defect / t.w_length.max(T::min_positive_value()))
            .fold(T::zero(), T::max)
    }
}

/// Stokes direction nearest to `z` and the clearance to the sector boundary.
fn sector_of<T: Real>(z: Complex<T>, m: usize) -> (usize, T) {
    let width = T::TAU() / T::lit(m as f64);
    let arg = wrap_angle(z.arg());
    let k = (arg / width).round();
    let offset = (arg - k * width).abs();
    let k = k.to_usize().unwrap_or(0) % m;
    (k, width / T::lit(2.0) - offset)
}

/// `∫ √P dz` along the chord from `za` to `zb`, continuing the branch `s`.
fn chord_increment<T: Real>(p: &Polynomial<T>, za: Complex<T>, zb: Complex<T>, s: Complex<T>) -> Complex<T> {
    let (_, da) = p.roots().nearest(za);
    let (_, db) = p.roots().nearest(zb);
    let len = (zb - za).norm();
    let pieces = (len / (T::lit(0.25) * da.min(db)))
        .ceil()
        .to_usize()
        .unwrap_or(1)
        .clamp(1, 64);
    let rule = gl5();
    let half = T::lit(0.5);
    let dz = (zb - za) / T::lit(pieces as f64);
    let mut branch = s;
    let mut total = Complex::zero();
    for piece in 0..pieces {
        let a = za + dz * T::lit(piece as f64);
        for (x, w) in rule {
            let z = a + dz * ((T::lit(*x) + T::one()) * half);
            branch = sqrt_near(p.eval(z), branch);
            total = total + branch * dz * (T::lit(*w) * half);
        }
    }
    total
}

/// Integrates the horizontal leaf from `start` with the initial branch of `√P`
/// nearest to `branch`.
fn integrate_leaf<T: Real>(
    p: &Polynomial<T>,
    start: Complex<T>,
    branch: Complex<T>,
    origin: Option<usize>,
    params: &TraceParams<T>,
) -> Result<Trajectory<T>> {
    let roots = p.roots();
    let m = p.marked_points();
    let mut z = start;
    let mut s = sqrt_near(p.eval(z), branch);
    let mut points = vec![z];
    let mut w_length = T::zero();
    let mut defect = T::zero();
    let (_, d0) = roots.nearest(z);
    let mut h = T::lit(0.05) * d0.min(T::one()) * s.norm();
    let jump = T::lit(BRANCH_JUMP);
    let branch_failure = |z: Complex<T>| Error::BranchTrackingFailure {
        re: z.re.to_f64_lossy(),
        im: z.im.to_f64_lossy(),
    };

    for _ in 0..MAX_STEPS {
        let (_, dist) = roots.nearest(z);
        let cap = T::lit(0.5) * dist * s.norm();
        if h > cap {
            h = cap;
        }
        if !(h > T::zero()) || h < T::epsilon() * (T::one() + w_length) {
            return Err(branch_failure(z));
        }
        let reference = s;
        let mut rhs = |_t: T, y: &[Complex<T>; 1]| [sqrt_near(p.eval(y[0]), reference).inv()];
        let trial = dopri_step(&mut rhs, T::zero(), &[z], h);
        let z_new = trial.y[0];
        let err = s.norm() * trial.err[0].norm() / (params.rtol * h);
        let s_new = sqrt_near(p.eval(z_new), s);
        let finite = z_new.re.is_finite() && z_new.im.is_finite() && err.is_finite();
        if !finite || angle_between(s_new, s) > jump {
            h = h * T::lit(0.25);
            continue;
        }
        if err > T::one() {
            h = next_step_size(h, err);
            continue;
        }

        let dw = chord_increment(p, z, z_new, s);
        defect = defect + dw.im.abs();
        w_length = w_length + h;
        z = z_new;
        s = s_new;
        points.push(z);
        h = next_step_size(h, err);

        let (j, dj) = roots.nearest(z);
        if dj < params.zero_exclusion && enters_along_prong(p, j, z) {
            return Ok(finish(points, origin, Terminus::Zero(j), w_length, defect, None));
        }
        if z.norm() > params.escape_radius {
            let (k, clearance) = sector_of(z, m);
            return Ok(finish(
                points,
                origin,
                Terminus::StokesDirection(k),
                w_length,
                defect,
                Some(clearance),
            ));
        }
        if w_length > params.max_w_length {
            break;
        }
    }
    Ok(finish(points, origin, Terminus::Truncated, w_length, defect, None))
}

/// Whether `z`, close to zero `j`, lies on a horizontal prong of that zero,
/// i.e. `∫_{α_j}^{z} √P dz` is nearly real.
fn enters_along_prong<T: Real>(p: &Polynomial<T>, j: usize, z: Complex<T>) -> bool {
    let alpha = p.roots().roots[j];
    let c = p.derivative_at(alpha);
    // Leading-order local model: w ≈ (2/3) √c (z − α)^{3/2}, so w² ∝ c (z − α)³.
    let w2 = c * (z - alpha).powi(3);
    w2.im.abs() < T::lit(0.25) * w2.norm() && w2.re > T::zero()
}

fn finish<T: Real>(
    points: Vec<Complex<T>>,
    origin: Option<usize>,
    terminus: Terminus,
    w_length: T,
    horizontality_defect: T,
    boundary_clearance: Option<T>,
) -> Trajectory<T> {
    Trajectory {
        points,
        origin,
        terminus,
        w_length,
        horizontality_defect,
        boundary_clearance,
    }
}

/// Traces the horizontal leaf through `start` in the direction in which
/// `sign · √P` (principal root at `start`) gives positive `dw`.
pub fn trace_trajectory<T: Real>(
    p: &Polynomial<T>,
    start: Complex<T>,
    sign: i8,
    params: &TraceParams<T>,
) -> Result<Trajectory<T>> {
    let (zero, dist) = p.roots().nearest(start);
    if dist < params.zero_exclusion {
        return Err(Error::StartTooCloseToZero {
            zero,
            radius: params.zero_exclusion.to_f64_lossy(),
        });
    }
    let principal = p.eval(start).sqrt();
    let branch = if sign < 0 { -principal } else { principal };
    integrate_leaf(p, start, branch, None, params)
}

/// The three launch angles at zero `i`, `θ_m = (2πm − arg P'(α))/3`, each refined
/// by Newton's method so that `∫_α^{α + r e^{iθ}} √P dz` is real.
pub fn prong_angles<T: Real>(p: &Polynomial<T>, i: usize, r: T) -> [T; 3] {
    let alpha = p.roots().roots[i];
    let c = p.derivative_at(alpha);
    let three = T::lit(3.0);
    let mut out = [T::zero(); 3];
    for (m, slot) in out.iter_mut().enumerate() {
        let mut theta = (T::TAU() * T::lit(m as f64) - c.arg()) / three;
        for _ in 0..4 {
            let dir = Complex::from_polar(T::one(), theta);
            let start = alpha + dir * r;
            let Ok(v) = p.integrate_sqrt_along(&[alpha, start]) else {
                break;
            };
            let s_end = sqrt_near(p.eval(start), v * T::lit(1.5) / (start - alpha));
            let g = (v * v).im;
            let dg = (v * s_end * Complex::i() * dir * r * T::lit(2.0)).im;
            if dg == T::zero() {
                break;
            }
            let step = g / dg;
            theta = theta - step;
            if step.abs() < T::epsilon() * T::lit(8.0) {
                break;
            }
        }
        *slot = theta;
    }
    out
}

/// The three separatrices leaving zero `i`, ordered by launch angle.
pub fn separatrices<T: Real>(p: &Polynomial<T>, i: usize, params: &TraceParams<T>) -> Result<[Trajectory<T>; 3]> {
    let (traj, _) = separatrices_with_angles(p, i, params)?;
    Ok(traj)
}

fn separatrices_with_angles<T: Real>(
    p: &Polynomial<T>,
    i: usize,
    params: &TraceParams<T>,
) -> Result<([Trajectory<T>; 3], [T; 3])> {
    if i >= p.roots().len() {
        return Err(Error::PreconditionViolation(format!("zero index {i} out of range")));
    }
    let alpha = p.roots().roots[i];
    let r = params.launch_offset;
    let angles = prong_angles(p, i, r);
    let trace = |theta: T| {
        let offset = Complex::from_polar(r, theta);
        let start = alpha + offset;
        integrate_leaf(p, start, offset.conj(), Some(i), params)
    };
    Ok(([trace(angles[0])?, trace(angles[1])?, trace(angles[2])?], angles))
}

/// Traces all separatrices and records saddles and fans.
pub fn classify<T: Real>(p: &Polynomial<T>) -> Result<TrajectoryStructure<T>> {
    classify_with(p, &TraceParams::for_polynomial(p))
}

pub fn classify_with<T: Real>(p: &Polynomial<T>, params: &TraceParams<T>) -> Result<TrajectoryStructure<T>> {
    let count = p.roots().len();
    let mut separatrices = Vec::with_capacity(count);
    let mut launch_angles = Vec::with_capacity(count);
    let mut saddles: Vec<Saddle<T>> = Vec::new();
    let mut zero_fan = Vec::with_capacity(count);
    for i in 0..count {
        let (traj, angles) = separatrices_with_angles(p, i, params)?;
        let mut fan = [0usize; 3];
        let mut complete = true;
        for (slot, t) in fan.iter_mut().zip(&traj) {
            match t.terminus {
                Terminus::Truncated => {
                    return Err(Error::AmbiguousStructure(format!(
                        "separatrix of zero {i} exhausted its length budget"
                    )))
                }
                Terminus::StokesDirection(k) => {
                    if t.boundary_clearance.is_some_and(|c| c < params.angular_tol) {
                        return Err(Error::AmbiguousStructure(format!(
                            "separatrix of zero {i} escapes near a sector boundary"
                        )));
                    }
                    *slot = k;
                }
                Terminus::Zero(j) => {
                    complete = false;
                    let known = saddles
                        .iter()
                        .any(|s| (s.from == j && s.to == i) || (s.from == i && s.to == j));
                    if !known {
                        saddles.push(Saddle {
                            from: i,
                            to: j,
                            trajectory: t.clone(),
                        });
                    }
                }
            }
        }
        zero_fan.push(complete.then_some(fan));
        separatrices.push(traj);
        launch_angles.push(angles);
    }
    Ok(TrajectoryStructure {
        separatrices,
        launch_angles,
        saddle_free: saddles.is_empty(),
        saddles,
        zero_fan,
    })
}

/// A generic trajectory joining the Stokes directions `from` and `to`,
/// listed from the `from` end.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTrajectory<T: Real> {
    pub from: usize,
    pub to: usize,
    pub points: Vec<Complex<T>>,
    /// Index of the point from which both halves were traced.
    pub anchor: usize,
}

impl<T: Real> EdgeTrajectory<T> {
    pub fn edge(&self) -> Arc {
        Arc::new(self.from, self.to)
    }
}

/// One generic trajectory for every edge of the WKB triangulation, boundary
/// segments included.
///
/// Each zero contributes the three edges of its fan: the leaf through a point
/// on the bisector of two consecutive prongs runs along both separatrices
/// and so ends at their two Stokes directions.
pub fn edge_trajectories<T: Real>(
    p: &Polynomial<T>,
    s: &TrajectoryStructure<T>,
    params: &TraceParams<T>,
) -> Result<Vec<EdgeTrajectory<T>>> {
    if let Some(saddle) = s.saddles.first() {
        return Err(Error::NotSaddleFree(saddle.from, saddle.to));
    }
    let roots = p.roots();
    let mut found: std::collections::BTreeMap<Arc, EdgeTrajectory<T>> = Default::default();
    for (i, (fan, angles)) in s.zero_fan.iter().zip(&s.launch_angles).enumerate() {
        let fan = fan.ok_or_else(|| Error::StructureInconsistent("incomplete fan".into()))?;
        for j in 0..3 {
            let edge = Arc::new(fan[j], fan[(j + 1) % 3]);
            if found.contains_key(&edge) {
                continue;
            }
            let next = if j == 2 { angles[0] + T::TAU() } else { angles[j + 1] };
            let mid = (angles[j] + next) / T::lit(2.0);
            let mut radius = T::lit(0.1) * roots.sep;
            let mut traced = None;
            for _ in 0..4 {
                let start = roots.roots[i] + Complex::from_polar(radius, mid);
                let forward = trace_trajectory(p, start, 1, params)?;
                let backward = trace_trajectory(p, start, -1, params)?;
                if let (Terminus::StokesDirection(x), Terminus::StokesDirection(y)) =
                    (backward.terminus, forward.terminus)
                {
                    if Arc::new(x, y) == edge && x != y {
                        traced = Some((x, y, backward.points, forward.points));
                        break;
                    }
                }
                radius = radius / T::lit(4.0);
            }
            let (x, y, back, fwd) = traced.ok_or_else(|| {
                Error::StructureInconsistent(format!("no generic trajectory found for edge {edge}"))
            })?;
            let anchor = back.len() - 1;
            let mut points: Vec<Complex<T>> = back.into_iter().rev().collect();
            points.extend(fwd.into_iter().skip(1));
            found.insert(
                edge,
                EdgeTrajectory {
                    from: x,
                    to: y,
                    points,
                    anchor,
                },
            );
        }
    }
    Ok(found.into_values().collect())
}

/// Whether `(k₁, k₂, k₃)` are distinct and occur counterclockwise.
fn is_ccw_triple(f: &[usize; 3]) -> bool {
    let descents = (0..3).filter(|&i| f[(i + 1) % 3] < f[i]).count();
    f[0] != f[1] && f[1] != f[2] && f[0] != f[2] && descents == 1
}

/// Assembles and validates the triangulation whose triangles are the given fans.
pub fn triangulation_from_fans(m: usize, fans: &[[usize; 3]]) -> Result<Triangulation> {
    let inconsistent = |msg: String| Error::StructureInconsistent(msg);
    if fans.len() + 2 != m {
        return Err(inconsistent(format!("{} fans for a {m}-gon", fans.len())));
    }
    let mut counts: std::collections::BTreeMap<Arc, usize> = Default::default();
    for f in fans {
        if !is_ccw_triple(f) {
            return Err(inconsistent(format!("fan {f:?} is not a counterclockwise triple")));
        }
        for e in 0..3 {
            *counts.entry(Arc::new(f[e], f[(e + 1) % 3])).or_default() += 1;
        }
    }
    let mut arcs = Vec::new();
    for (arc, count) in &counts {
        let boundary = is_boundary_segment(m, arc.a, arc.b);
        match (boundary, count) {
            (true, 1) => {}
            (false, 2) => arcs.push(*arc),
            _ => {
                return Err(inconsistent(format!(
                    "edge {arc} is covered {count} times"
                )))
            }
        }
    }
    let boundary_covered = counts.keys().filter(|a| is_boundary_segment(m, a.a, a.b)).count();
    if boundary_covered != m {
        return Err(inconsistent(format!("{boundary_covered} of {m} boundary segments covered")));
    }
    let t = Triangulation::new(m, arcs).map_err(|e| inconsistent(e.to_string()))?;
    let mut expected: Vec<[usize; 3]> = fans
        .iter()
        .map(|f| {
            let mut s = *f;
            s.sort();
            s
        })
        .collect();
    expected.sort();
    if expected != t.triangles() {
        return Err(inconsistent("fan triangles do not tile the polygon".into()));
    }
    Ok(t)
}

/// The WKB triangulation of a saddle-free differential.
pub fn wkb_triangulation<T: Real>(p: &Polynomial<T>) -> Result<Triangulation> {
    wkb_from_structure(p, &classify(p)?)
}

pub fn wkb_from_structure<T: Real>(p: &Polynomial<T>, s: &TrajectoryStructure<T>) -> Result<Triangulation> {
    if let Some(saddle) = s.saddles.first() {
        return Err(Error::NotSaddleFree(saddle.from, saddle.to));
    }
    let fans: Vec<[usize; 3]> = s
        .zero_fan
        .iter()
        .map(|f| f.ok_or_else(|| Error::StructureInconsistent("incomplete fan".into())))
        .collect::<Result<_>>()?;
    triangulation_from_fans(p.marked_points(), &fans)
}

/// `min |Im Z| / |Z|` over the periods `Z` between pairs of zeros; a saddle
/// needs a real period, so small values flag proximity to a wall.
pub fn wall_proximity<T: Real>(p: &Polynomial<T>) -> T {
    let count = p.roots().len();
    let mut best = T::infinity();
    for i in 0..count {
        for j in i + 1..count {
            if let Ok(per) = p.period(i, j) {
                let v = per.value;
                if v.norm() > T::zero() {
                    best = best.min(v.im.abs() / v.norm());
                }
            }
        }
    }
    best
}
