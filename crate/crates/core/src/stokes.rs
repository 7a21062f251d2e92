//! Subdominant solutions of `y'' = P(z) y` and the Sibuya asymptotic values.
//!
//! In the Stokes sector `𝒮_k` centred on the ray `arg z = 2πk/(n+3)` there is
//! a solution `Y_k`, unique up to scale, decaying as `z → ∞` inside the sector.
//! For a fundamental basis `(y₁, y₂)` the ratio `y₁/y₂` tends to the
//! asymptotic value `w_k = W(y₁, Y_k) / W(y₂, Y_k)` along every ray of `𝒮_k`.
//!
//! Two independent computations are provided. The Wronskian method seeds
//! `Y_k` far out on the central ray from its WKB leading term and integrates
//! it inward, the stable direction for a subdominant solution. The direct
//! method integrates the basis outward and reads off the limit of `y₁/y₂`.
//!
//! Both integrators carry the state projectively (rescaled every step) and
//! measure the local error in a scale-free way. Far from the zeros the
//! component that local errors excite is damped by roughly
//! `exp(−(2/(n+3))(r^{(n+3)/2} − r_in^{(n+3)/2}))` before it can reach the
//! answer, so the tolerance is relaxed by that factor (capped at `1e9`).

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::cluster::coords::{Configuration, PROJ_TOL};
use crate::error::{Error, Result};
use crate::ode::{dopri_step, next_step_size, State};
use crate::polynomial::Polynomial;
use crate::projective::{Mobius, ProjPoint};
use crate::scalar::Real;

/// Step budget for a single ray integration.
const MAX_STEPS: usize = 2_000_000;

/// Parameters of the Stokes computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesParams<T: Real> {
    /// Seed radius of the Wronskian method; `None` uses three escape radii.
    pub radius: Option<T>,
    /// Base local error tolerance of both integrators.
    pub tol: T,
    /// Agreement required between successive radii (seed doubling, or
    /// checkpoints of the direct method), in the chordal metric.
    pub asym_tol: T,
    /// Whether the Wronskian method re-runs from twice the radius to confirm.
    pub check_doubling: bool,
    /// Maximal number of radius doublings before giving up.
    pub max_doublings: usize,
    /// Angular offset of the integration ray from the sector centre, as a
    /// fraction of the half-width `π/(n+3)`.
    pub ray_offset: T,
    /// Largest radius the direct method may reach; `None` uses
    /// `100 (1 + max|α|)`.
    pub direct_max_radius: Option<T>,
}

impl<T: Real> Default for StokesParams<T> {
    fn default() -> Self {
        Self {
            radius: None,
            tol: T::lit(1e-12).max(T::eps_floor(64.0)),
            asym_tol: T::lit(1e-10).max(T::eps_floor(256.0)),
            check_doubling: true,
            max_doublings: 3,
            ray_offset: T::zero(),
            direct_max_radius: None,
        }
    }
}

/// A fundamental basis given by its Cauchy data at a base point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionFrame<T: Real> {
    pub base_point: Complex<T>,
    pub y1: Complex<T>,
    pub dy1: Complex<T>,
    pub y2: Complex<T>,
    pub dy2: Complex<T>,
}

impl<T: Real> SolutionFrame<T> {
    /// `(y₁, y₁') = (1, 0)`, `(y₂, y₂') = (0, 1)` at `base_point`.
    pub fn standard(base_point: Complex<T>) -> Self {
        Self {
            base_point,
            y1: Complex::one(),
            dy1: Complex::zero(),
            y2: Complex::zero(),
            dy2: Complex::one(),
        }
    }

    pub fn wronskian(&self) -> Complex<T> {
        self.y1 * self.dy2 - self.dy1 * self.y2
    }

    /// The frame `(ỹ₁, ỹ₂) = (a y₁ + b y₂, c y₁ + d y₂)`.
    pub fn transformed(&self, m: &Mobius<T>) -> Self {
        Self {
            base_point: self.base_point,
            y1: m.a * self.y1 + m.b * self.y2,
            dy1: m.a * self.dy1 + m.b * self.dy2,
            y2: m.c * self.y1 + m.d * self.y2,
            dy2: m.c * self.dy1 + m.d * self.dy2,
        }
    }
}

/// Cauchy data `(y, y')` of a solution at a point, up to a common scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionValue<T: Real> {
    pub point: Complex<T>,
    pub y: Complex<T>,
    pub dy: Complex<T>,
}

impl<T: Real> SolutionValue<T> {
    /// Wronskian `W(f, self) = f·y' − f'·y` with a solution given by `(f, f')`.
    pub fn wronskian_with(&self, f: Complex<T>, df: Complex<T>) -> Complex<T> {
        f * self.dy - df * self.y
    }
}

/// Which computation produced an asymptotic tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Wronskian,
    Direct,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Wronskian => "wronskian",
            Method::Direct => "projective",
        }
    }
}

/// The `n + 3` asymptotic values as points of `ℂP¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticTuple<T: Real> {
    pub w: Vec<ProjPoint<T>>,
    pub method: Method,
    pub normalized: bool,
    pub base_point: Complex<T>,
}

impl<T: Real> AsymptoticTuple<T> {
    pub fn configuration(&self) -> Configuration<T> {
        Configuration::new(self.w.clone())
    }

    /// Relabelling `w_k ↦ w_{k+1}`.
    pub fn shift(&self) -> Self {
        let mut out = self.clone();
        out.w.rotate_left(1);
        out
    }

    pub fn check_genericity(&self, tol: T) -> Result<()> {
        let c = self.configuration();
        let adjacent = c.adjacent_margin();
        if !(adjacent > tol) {
            return Err(Error::GenericityViolation(format!(
                "adjacent asymptotic values coincide (distance {:e})",
                adjacent.to_f64_lossy()
            )));
        }
        if !(c.triple_margin() > tol) {
            return Err(Error::GenericityViolation("fewer than three distinct asymptotic values".into()));
        }
        Ok(())
    }

    /// Largest entrywise spherical distance.
    pub fn max_distance(&self, other: &Self) -> T {
        self.configuration().max_distance(&other.configuration())
    }
}

/// Base point of the standard frame: the origin, or `0.1·sep` along the
/// positive real axis when the origin is within `10⁻⁴·sep` of a zero.
pub fn base_point<T: Real>(p: &Polynomial<T>) -> Complex<T> {
    let roots = p.roots();
    let scale = roots.scale();
    let (_, d) = roots.nearest(Complex::zero());
    if d < T::lit(1e-4) * scale {
        Complex::new(T::lit(0.1) * scale, T::zero())
    } else {
        Complex::zero()
    }
}

pub(crate) fn escape_radius<T: Real>(p: &Polynomial<T>) -> T {
    T::lit(10.0) * (T::one() + p.roots().max_modulus())
}

/// Direction of the integration ray for sector `k`.
pub(crate) fn ray_direction<T: Real>(p: &Polynomial<T>, k: usize, offset: T) -> Complex<T> {
    let m = T::lit(p.marked_points() as f64);
    let theta = T::TAU() * T::lit(k as f64) / m + offset * T::PI() / m;
    Complex::from_polar(T::one(), theta)
}

pub(crate) struct Damping<T: Real> {
    q: T,
    r_in_q: T,
}

impl<T: Real> Damping<T> {
    pub(crate) fn new(p: &Polynomial<T>) -> Self {
        let q = T::lit(p.marked_points() as f64) / T::lit(2.0);
        let r_in = T::lit(2.0) * p.roots().max_modulus() + T::one();
        Self { q, r_in_q: r_in.powf(q) }
    }

    /// No relaxation anywhere.
    pub(crate) fn none() -> Self {
        Self {
            q: T::one(),
            r_in_q: T::infinity(),
        }
    }

    fn boost(&self, r: T) -> T {
        let d = ((r.powf(self.q) - self.r_in_q) / self.q).max(T::zero());
        d.min(T::lit(50.0)).exp().min(T::lit(1e9))
    }
}

/// Integrates `N/2` solutions of `y'' = P y` (state `[y, y', y, y', …]`)
/// along the segment from `z0` to `z1`, renormalizing every step. Returns the
/// final state and the logarithm of the total factor divided out.
pub(crate) fn integrate_segment<T: Real, const N: usize>(
    p: &Polynomial<T>,
    z0: Complex<T>,
    z1: Complex<T>,
    mut state: State<T, N>,
    tol: T,
    damping: &Damping<T>,
    error: impl Fn(&State<T, N>, &State<T, N>, Complex<T>) -> T,
) -> Result<(State<T, N>, T)> {
    let d = z1 - z0;
    let len = d.norm();
    let mut log_scale = T::zero();
    if len == T::zero() {
        return Ok((state, log_scale));
    }
    let e = d / len;
    let mut rhs = |t: T, s: &State<T, N>| {
        let z = z0 + e * t;
        let pz = p.eval(z);
        let mut out = [Complex::zero(); N];
        for c in 0..N / 2 {
            out[2 * c] = s[2 * c + 1] * e;
            out[2 * c + 1] = pz * s[2 * c] * e;
        }
        out
    };
    let mut t = T::zero();
    let mut h = len.min(T::lit(0.05));
    for _ in 0..MAX_STEPS {
        if t >= len {
            return Ok((state, log_scale));
        }
        h = h.min(len - t);
        let trial = dopri_step(&mut rhs, t, &state, h);
        let mut y4 = trial.y;
        for (a, b) in y4.iter_mut().zip(&trial.err) {
            *a = *a - b;
        }
        let z = z0 + e * t;
        let boost = damping.boost(z.norm().max((z0 + e * (t + h)).norm()));
        let err = error(&trial.y, &y4, z) / (tol * boost);
        if err.is_finite() && err <= T::one() {
            t = t + h;
            let scale = trial.y.iter().map(|c| c.norm()).fold(T::zero(), T::max);
            log_scale = log_scale + scale.ln();
            state = trial.y;
            for c in state.iter_mut() {
                *c = *c / scale;
            }
        }
        h = next_step_size(h, err);
        if !(h > len * T::epsilon()) {
            break;
        }
    }
    let z = z0 + e * t;
    Err(Error::BranchTrackingFailure {
        re: z.re.to_f64_lossy(),
        im: z.im.to_f64_lossy(),
    })
}

/// Chordal distance between two Cauchy data `(y, y')`, with `y'` measured in
/// units of the local WKB scale `|√P|`.
pub(crate) fn chordal_cauchy<T: Real>(p: &Polynomial<T>, a: &State<T, 2>, b: &State<T, 2>, z: Complex<T>) -> T {
    let sc = T::one() / p.eval(z).norm().sqrt().max(T::one());
    let (a0, a1) = (a[0], a[1] * sc);
    let (b0, b1) = (b[0], b[1] * sc);
    let det = (a0 * b1 - a1 * b0).norm();
    let na = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
    let nb = (b0.norm_sqr() + b1.norm_sqr()).sqrt();
    det / (na * nb)
}

fn relative_max<T: Real, const N: usize>(a: &State<T, N>, b: &State<T, N>) -> T {
    let scale = a.iter().map(|c| c.norm()).fold(T::zero(), T::max);
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(T::zero(), T::max);
    diff / scale
}

/// The subdominant solution `Y_k`, seeded at `R e^{iθ}` on the ray of sector `k`
/// and integrated to the base point.
///
/// The seed is the WKB leading term `y = P^{−1/4} e^{−∫√P}`, i.e. projectively
/// `(y : y') = (1 : −√P − P'/(4P))` with the branch of `√P` for which
/// `∫√P dz` grows outward along the ray.
pub fn subdominant_solution<T: Real>(
    p: &Polynomial<T>,
    k: usize,
    radius: T,
    params: &StokesParams<T>,
) -> Result<SolutionValue<T>> {
    let m = p.marked_points();
    if k >= m {
        return Err(Error::PreconditionViolation(format!("sector {k} out of range 0..{m}")));
    }
    if radius < escape_radius(p) {
        return Err(Error::PreconditionViolation(format!(
            "seed radius {} is inside the escape radius",
            radius.to_f64_lossy()
        )));
    }
    let (z_r, seed) = subdominant_seed(p, k, radius, params.ray_offset);
    let base = base_point(p);
    let damping = Damping::new(p);
    let (out, _) = integrate_segment(p, z_r, base, seed, params.tol, &damping, |a, b, z| {
        chordal_cauchy(p, a, b, z)
    })?;
    Ok(SolutionValue {
        point: base,
        y: out[0],
        dy: out[1],
    })
}

/// The point `R e^{iθ}` on the ray of sector `k` and the normalized WKB
/// Cauchy data of `Y_k` there.
pub(crate) fn subdominant_seed<T: Real>(p: &Polynomial<T>, k: usize, radius: T, offset: T) -> (Complex<T>, State<T, 2>) {
    let dir = ray_direction(p, k, offset);
    let z_r = dir * radius;
    let (pz, dpz) = p.eval_with_derivative(z_r);
    let mut s = pz.sqrt();
    if (s * dir).re < T::zero() {
        s = -s;
    }
    let dy = -s - dpz / (pz * T::lit(4.0));
    (z_r, normalize_state([Complex::one(), dy]))
}

fn normalize_state<T: Real, const N: usize>(mut s: State<T, N>) -> State<T, N> {
    let scale = s.iter().map(|c| c.norm()).fold(T::zero(), T::max);
    for c in s.iter_mut() {
        *c = *c / scale;
    }
    s
}

fn wronskian_value<T: Real>(frame: &SolutionFrame<T>, y: &SolutionValue<T>) -> Result<ProjPoint<T>> {
    let u = y.wronskian_with(frame.y1, frame.dy1);
    let v = y.wronskian_with(frame.y2, frame.dy2);
    ProjPoint::new(u, v).ok_or_else(|| Error::GenericityViolation("subdominant solution vanished".into()))
}

/// Asymptotic value of sector `k` for the standard frame, with the seed radius
/// doubled until two consecutive radii agree (if enabled).
fn sector_value<T: Real>(
    p: &Polynomial<T>,
    k: usize,
    frame: &SolutionFrame<T>,
    params: &StokesParams<T>,
) -> Result<ProjPoint<T>> {
    let mut radius = params.radius.unwrap_or_else(|| T::lit(3.0) * escape_radius(p));
    let mut value = wronskian_value(frame, &subdominant_solution(p, k, radius, params)?)?;
    if !params.check_doubling {
        return Ok(value);
    }
    let mut change = T::infinity();
    for _ in 0..=params.max_doublings {
        radius = radius * T::lit(2.0);
        let next = wronskian_value(frame, &subdominant_solution(p, k, radius, params)?)?;
        change = next.chordal_distance(&value);
        value = next;
        if change <= params.asym_tol {
            return Ok(value);
        }
    }
    Err(Error::ConvergenceCheckFailure {
        sector: k,
        change: change.to_f64_lossy(),
    })
}

/// The asymptotic values `(w₀, …, w_{n+2})` for the standard frame at the base point.
pub fn asymptotic_values<T: Real>(p: &Polynomial<T>) -> Result<AsymptoticTuple<T>> {
    asymptotic_values_with(p, &StokesParams::default())
}

pub fn asymptotic_values_with<T: Real>(p: &Polynomial<T>, params: &StokesParams<T>) -> Result<AsymptoticTuple<T>> {
    asymptotic_values_with_frame(p, &SolutionFrame::standard(base_point(p)), params)
}

/// Asymptotic values with respect to an arbitrary frame at the base point.
pub fn asymptotic_values_with_frame<T: Real>(
    p: &Polynomial<T>,
    frame: &SolutionFrame<T>,
    params: &StokesParams<T>,
) -> Result<AsymptoticTuple<T>> {
    if (frame.base_point - base_point(p)).norm() > T::zero() {
        return Err(Error::PreconditionViolation("frame must be given at the base point".into()));
    }
    let w = (0..p.marked_points())
        .map(|k| sector_value(p, k, frame, params))
        .collect::<Result<Vec<_>>>()?;
    let tuple = AsymptoticTuple {
        w,
        method: Method::Wronskian,
        normalized: false,
        base_point: frame.base_point,
    };
    tuple.check_genericity(T::lit(PROJ_TOL))?;
    Ok(tuple)
}

/// Asymptotic values from integrating the standard frame outward along each ray.
pub fn asymptotic_values_direct<T: Real>(p: &Polynomial<T>) -> Result<AsymptoticTuple<T>> {
    asymptotic_values_direct_with(p, &StokesParams::default())
}

pub fn asymptotic_values_direct_with<T: Real>(
    p: &Polynomial<T>,
    params: &StokesParams<T>,
) -> Result<AsymptoticTuple<T>> {
    let base = base_point(p);
    let rho = p.roots().max_modulus();
    let max_radius = params
        .direct_max_radius
        .unwrap_or_else(|| T::lit(100.0) * (T::one() + rho));
    let damping = Damping::new(p);
    let first = rho.max(T::one());
    let mut w = Vec::with_capacity(p.marked_points());
    for k in 0..p.marked_points() {
        let dir = ray_direction(p, k, params.ray_offset);
        let mut state: State<T, 4> = [Complex::one(), Complex::zero(), Complex::zero(), Complex::one()];
        let mut from = base;
        let mut radius = first;
        let mut previous: Option<ProjPoint<T>> = None;
        let value = loop {
            let to = dir * radius;
            state = integrate_segment(p, from, to, state, params.tol, &damping, |a, b, _| relative_max(a, b))?.0;
            let current = ProjPoint::new(state[0], state[2]).ok_or(Error::NoConvergence {
                sector: k,
                radius: radius.to_f64_lossy(),
            })?;
            if let Some(prev) = previous {
                if current.chordal_distance(&prev) < params.asym_tol {
                    break current;
                }
            }
            if radius >= max_radius {
                return Err(Error::NoConvergence {
                    sector: k,
                    radius: radius.to_f64_lossy(),
                });
            }
            previous = Some(current);
            from = to;
            radius = (radius * T::lit(2.0)).min(max_radius);
        };
        w.push(value);
    }
    let tuple = AsymptoticTuple {
        w,
        method: Method::Direct,
        normalized: false,
        base_point: base,
    };
    tuple.check_genericity(T::lit(PROJ_TOL))?;
    Ok(tuple)
}

/// The canonical representative: the first three consecutive pairwise
/// distinct values are sent to `0, 1, ∞`.
pub fn normalize_tuple<T: Real>(t: &AsymptoticTuple<T>) -> Result<AsymptoticTuple<T>> {
    let c = t.configuration().normalized(T::lit(PROJ_TOL))?;
    Ok(AsymptoticTuple {
        w: c.points,
        normalized: true,
        ..t.clone()
    })
}

/// Normalization sending `w_k, w_{k+1}, w_{k+2}` to `0, 1, ∞`.
pub fn normalize_tuple_at<T: Real>(t: &AsymptoticTuple<T>, k: usize) -> Result<AsymptoticTuple<T>> {
    let c = t.configuration().normalized_at(k, T::lit(PROJ_TOL))?;
    Ok(AsymptoticTuple {
        w: c.points,
        normalized: true,
        ..t.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(n: usize, a: &[(f64, f64)]) -> Polynomial<f64> {
        Polynomial::from_coefficients(n, a.iter().map(|&(r, i)| Complex::new(r, i)).collect()).unwrap()
    }

    /// `Ai'(x)/Ai(x)` from the power series of `y'' = x y` with `Ai(0)`, `Ai'(0)`.
    fn airy_log_derivative(x: f64) -> f64 {
        let mut c = vec![0.355_028_053_887_817_2, -0.258_819_403_792_806_8, 0.0];
        for k in 1..60 {
            let next = c[k - 1] / ((k + 2) as f64 * (k + 1) as f64);
            c.push(next);
        }
        let y: f64 = c.iter().enumerate().map(|(k, ck)| ck * x.powi(k as i32)).sum();
        let dy: f64 = c.iter().enumerate().skip(1).map(|(k, ck)| k as f64 * ck * x.powi(k as i32 - 1)).sum();
        dy / y
    }

    #[test]
    fn airy_logarithmic_derivative() {
        let p = poly(0, &[]);
        // The zero sits at the origin, so the base point moves to 0.1.
        let base = base_point(&p);
        assert_eq!(base, Complex::new(0.1, 0.0));
        let expected = airy_log_derivative(0.1);
        let params = StokesParams::default();
        for radius in [10.0, 30.0] {
            let y = subdominant_solution(&p, 0, radius, &params).unwrap();
            assert_eq!(y.point, base);
            let ratio = y.dy / y.y;
            assert!((ratio - Complex::new(expected, 0.0)).norm() < 1e-9, "{ratio} vs {expected}");
        }
    }

    #[test]
    fn seed_radius_must_exceed_escape_radius() {
        let p = poly(0, &[]);
        let err = subdominant_solution(&p, 0, 1.0, &StokesParams::default()).unwrap_err();
        assert_eq!(err.name(), "PreconditionViolation");
    }

    #[test]
    fn airy_values_are_distinct_and_methods_agree() {
        let p = poly(0, &[]);
        let a = normalize_tuple(&asymptotic_values(&p).unwrap()).unwrap();
        let b = normalize_tuple(&asymptotic_values_direct(&p).unwrap()).unwrap();
        assert!(a.max_distance(&b) < 1e-9);
    }

    #[test]
    fn subdominant_is_independent_of_a_dominant_solution() {
        let p = poly(1, &[(-1.0, 0.5)]);
        let params = StokesParams::default();
        let y0 = subdominant_solution(&p, 0, 40.0, &params).unwrap();
        let y2 = subdominant_solution(&p, 2, 40.0, &params).unwrap();
        assert!(y0.y.norm() + y0.dy.norm() > 0.0);
        assert!(y0.wronskian_with(y2.y, y2.dy).norm() > 1e-6);
    }

    #[test]
    fn frame_covariance() {
        let p = poly(2, &[(0.3, -0.2), (-0.7, 0.4)]);
        let params = StokesParams::default();
        let base = base_point(&p);
        let g = Mobius::new(
            Complex::new(1.0, 0.5),
            Complex::new(-0.3, 0.0),
            Complex::new(0.2, 0.1),
            Complex::new(0.8, -0.6),
        );
        let w = asymptotic_values_with_frame(&p, &SolutionFrame::standard(base), &params).unwrap();
        let frame = SolutionFrame::standard(base).transformed(&g);
        let wt = asymptotic_values_with_frame(&p, &frame, &params).unwrap();
        for (a, b) in w.w.iter().zip(&wt.w) {
            assert!(g.apply(a).spherical_distance(b) < 1e-8);
        }
    }

    #[test]
    fn normalization_examples() {
        let pts = |v: &[f64]| -> AsymptoticTuple<f64> {
            AsymptoticTuple {
                w: v.iter().map(|&x| ProjPoint::finite(Complex::new(x, 0.0))).collect(),
                method: Method::Wronskian,
                normalized: false,
                base_point: Complex::zero(),
            }
        };
        let mut t = pts(&[0.0, 1.0, 0.0, 2.5]);
        t.w[2] = ProjPoint::infinity();
        let n = normalize_tuple(&t).unwrap();
        assert!(n.max_distance(&t) < 1e-15);
        let n = normalize_tuple(&pts(&[1.0, 2.0, 3.0, 4.0])).unwrap();
        assert!(n.w[3].spherical_distance(&ProjPoint::finite(Complex::new(-3.0, 0.0))) < 1e-14);
        assert!(normalize_tuple(&n).unwrap().max_distance(&n) < 1e-15);
    }
}
