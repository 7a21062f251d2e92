//! The map from polynomials to configurations of asymptotic values, its
//! `ħ`-deformation, and the charts it lands in.
//!
//! `F(p)` is the configuration `(w₀, …, w_{n+2})` of Sibuya asymptotic values
//! of `y'' = P y`, with marked point `k` carrying the value of the sector
//! centred on `arg z = 2πk/(n+3)`. `F_ħ(p) = F(t·p)` for
//! `t = ħ^{−2/(n+3)}` on the principal branch, which is the same as solving
//! `y'' = ħ^{−2} P y`.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Zero;

use crate::cluster::coords::{
    chart_coords, find_generic_triangulation, is_generic, reconstruct, ClusterChart, Configuration, PROJ_TOL,
};
use crate::cluster::triangulation::Triangulation;
use crate::error::{Error, Result};
use crate::foliation::{classify, wall_proximity, wkb_from_structure, TrajectoryStructure};
use crate::polynomial::Polynomial;
use crate::scalar::Real;
use crate::stokes::{asymptotic_values, asymptotic_values_with, AsymptoticTuple, StokesParams};
use crate::transport::transported_chart;

/// Largest relative drift tolerated between the Jacobians at steps `h` and `h/2`.
pub const RICHARDSON_DRIFT: f64 = 0.1;

/// Bound on `|log|X_j||` for a chart to count in the small-`ħ` search.
pub const LOG_BOUND: f64 = 40.0;

/// First `ε` tried by [`chamber_search`].
pub const EPSILON_START: f64 = 0.5;

/// The search gives up once `ε` drops below this value.
pub const EPSILON_FLOOR: f64 = 1e-3;

/// A point of the right half plane, optionally constrained to `|ħ| < ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HbarParam<T: Real> {
    hbar: Complex<T>,
}

impl<T: Real> HbarParam<T> {
    pub fn new(hbar: Complex<T>) -> Result<Self> {
        if !(hbar.re.is_finite() && hbar.im.is_finite()) {
            return Err(Error::InvalidHbar("hbar must be finite".into()));
        }
        if !(hbar.re > T::zero()) {
            return Err(Error::InvalidHbar(format!(
                "hbar must have positive real part, got {}{:+}i",
                hbar.re.to_f64_lossy(),
                hbar.im.to_f64_lossy()
            )));
        }
        Ok(Self { hbar })
    }

    pub fn real(hbar: T) -> Result<Self> {
        Self::new(Complex::new(hbar, T::zero()))
    }

    /// `ħ` checked to lie in `{|ħ| < ε, Re ħ > 0}`.
    pub fn within(hbar: Complex<T>, epsilon: T) -> Result<Self> {
        let h = Self::new(hbar)?;
        if !h.in_region(epsilon) {
            return Err(Error::InvalidHbar(format!(
                "|hbar| = {} is not below {}",
                hbar.norm().to_f64_lossy(),
                epsilon.to_f64_lossy()
            )));
        }
        Ok(h)
    }

    pub fn value(&self) -> Complex<T> {
        self.hbar
    }

    pub fn in_region(&self, epsilon: T) -> bool {
        self.hbar.norm() < epsilon && self.hbar.re > T::zero()
    }

    /// `t = exp(−(2/(n+3)) Log ħ)`.
    pub fn scaling(&self, n: usize) -> Complex<T> {
        let power = -T::lit(2.0) / T::lit((n + 3) as f64);
        (self.hbar.ln() * power).exp()
    }
}

/// `F(p)`: the configuration of asymptotic values in the standard frame.
pub fn sibuya_map<T: Real>(p: &Polynomial<T>) -> Result<Configuration<T>> {
    Ok(asymptotic_values(p)?.configuration())
}

/// `F_ħ(p) = F(t·p)` with `t = ħ^{−2/(n+3)}`.
pub fn sibuya_map_hbar<T: Real>(p: &Polynomial<T>, hbar: &HbarParam<T>) -> Result<Configuration<T>> {
    sibuya_map(&p.scale_action(hbar.scaling(p.n()))?)
}

fn check_generic<T: Real>(c: &Configuration<T>, t: &Triangulation) -> Result<()> {
    let tol = T::lit(PROJ_TOL);
    if is_generic(c, t, tol) {
        return Ok(());
    }
    let m = t.m();
    let boundary = (0..m).map(|k| (k, (k + 1) % m));
    let arcs = t.arcs().iter().map(|a| (a.a, a.b));
    let (a, b) = boundary
        .chain(arcs)
        .find(|&(a, b)| !(c.distance(a, b) > tol))
        .unwrap_or((0, 1));
    Err(Error::NonGeneric(a.min(b), a.max(b)))
}

/// Coordinates of `c` in the chart of `t`, failing with [`Error::NonGeneric`]
/// when an edge of `t` joins points closer than the projective tolerance.
pub fn generic_chart<T: Real>(c: &Configuration<T>, t: &Triangulation) -> Result<ClusterChart<T>> {
    check_generic(c, t)?;
    chart_coords(c, t)
}

/// `F_ħ(p)` in the chart of the WKB triangulation of `p`.
///
/// The coordinates come from Wronskians along generic trajectories, which
/// stays accurate when `ħ` is small and the asymptotic values crowd together
/// in any single frame.
pub fn wkb_chart<T: Real>(p: &Polynomial<T>, hbar: &HbarParam<T>) -> Result<ClusterChart<T>> {
    let structure = classify(p)?;
    let t = wkb_from_structure(p, &structure)?;
    transported_chart(p, &structure, &t, hbar, &StokesParams::default())
}

/// `F_ħ(p)` as a configuration, in the frame of [`asymptotic_values`]; for a
/// saddle-free `p` whose values cannot be resolved there, the representative
/// rebuilt from [`wkb_chart`].
pub fn sibuya_map_hbar_resolved<T: Real>(p: &Polynomial<T>, hbar: &HbarParam<T>) -> Result<Configuration<T>> {
    match sibuya_map_hbar(p, hbar) {
        Err(Error::GenericityViolation(msg)) => match wkb_chart(p, hbar) {
            Ok(chart) => Ok(reconstruct(&chart)),
            Err(_) => Err(Error::GenericityViolation(msg)),
        },
        other => other,
    }
}

/// The triangulation used as reference chart at `p`: the WKB triangulation
/// when `p` is saddle-free, otherwise one for which `F(p)` is generic.
pub fn reference_triangulation<T: Real>(p: &Polynomial<T>, c: &Configuration<T>) -> Result<Triangulation> {
    if let Ok(t) = classify(p).and_then(|s| wkb_from_structure(p, &s)) {
        if is_generic(c, &t, T::lit(PROJ_TOL)) {
            return Ok(t);
        }
    }
    find_generic_triangulation(c, T::lit(PROJ_TOL))
        .ok_or_else(|| Error::GenericityViolation("no triangulation is generic for F(p)".into()))
}

/// Finite-difference Jacobian of `(log X_j)` with respect to `(a₀, …, a_{n−1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    pub triangulation: Triangulation,
    /// `matrix[j][i] = ∂ log X_j / ∂ a_i`, from the step `h/2`.
    pub matrix: Vec<Vec<Complex<f64>>>,
    pub singular_values: Vec<f64>,
    /// Relative difference between the estimates at `h` and `h/2`.
    pub drift: f64,
}

impl Jacobian {
    pub fn smallest_singular_value(&self) -> f64 {
        self.singular_values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn condition_number(&self) -> f64 {
        let largest = self.singular_values.iter().copied().fold(0.0, f64::max);
        largest / self.smallest_singular_value()
    }
}

fn central_difference<T: Real>(
    p: &Polynomial<T>,
    t: &Triangulation,
    i: usize,
    step: T,
) -> Result<Vec<Complex<T>>> {
    let shifted = |sign: T| -> Result<ClusterChart<T>> {
        let mut a = p.coefficients().to_vec();
        a[i] = a[i] + Complex::new(sign * step, T::zero());
        let q = Polynomial::from_coefficients(p.n(), a)?;
        generic_chart(&sibuya_map(&q)?, t)
    };
    let plus = shifted(T::one())?;
    let minus = shifted(-T::one())?;
    let two_h = T::lit(2.0) * step;
    Ok(plus.x.iter().zip(&minus.x).map(|(x, y)| (x / y).ln() / two_h).collect())
}

fn difference_matrix<T: Real>(p: &Polynomial<T>, t: &Triangulation, factor: T) -> Result<Vec<Vec<Complex<T>>>> {
    let n = p.n();
    let mut m = vec![vec![Complex::zero(); n]; n];
    for (i, a) in p.coefficients().iter().enumerate() {
        let step = T::lit(1e-5) * (T::one() + a.norm()) * factor;
        for (row, d) in m.iter_mut().zip(central_difference(p, t, i, step)?) {
            row[i] = d;
        }
    }
    Ok(m)
}

/// Jacobian of the log-coordinates of `F` in the reference chart at `p`.
///
/// Column `i` uses the step `h_i = 10⁻⁵(1 + |a_i|)`; the result is the
/// estimate at `h_i/2`, and [`Error::StepTooLarge`] is returned when it
/// differs from the estimate at `h_i` by more than 10% in max norm.
pub fn jacobian<T: Real>(p: &Polynomial<T>) -> Result<Jacobian> {
    let c = sibuya_map(p)?;
    let t = reference_triangulation(p, &c)?;
    jacobian_in(p, &t)
}

pub fn jacobian_in<T: Real>(p: &Polynomial<T>, t: &Triangulation) -> Result<Jacobian> {
    let n = p.n();
    if n == 0 {
        return Ok(Jacobian {
            triangulation: t.clone(),
            matrix: Vec::new(),
            singular_values: Vec::new(),
            drift: 0.0,
        });
    }
    let coarse = difference_matrix(p, t, T::one())?;
    let fine = difference_matrix(p, t, T::lit(0.5))?;
    let to64 = |z: &Complex<T>| Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy());
    let fine64: Vec<Vec<Complex<f64>>> = fine.iter().map(|r| r.iter().map(to64).collect()).collect();
    let mut diff = 0.0f64;
    let mut size = 0.0f64;
    for (rc, rf) in coarse.iter().zip(&fine64) {
        for (c, f) in rc.iter().zip(rf) {
            diff = diff.max((to64(c) - f).norm());
            size = size.max(f.norm());
        }
    }
    let drift = if size > 0.0 { diff / size } else { 0.0 };
    if !(drift < RICHARDSON_DRIFT) {
        return Err(Error::StepTooLarge { drift });
    }
    let matrix = DMatrix::from_fn(n, n, |j, i| fine64[j][i]);
    let mut singular_values: Vec<f64> = matrix.singular_values().iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    Ok(Jacobian {
        triangulation: t.clone(),
        matrix: fine64,
        singular_values,
        drift,
    })
}

/// `max_j |X'_j − Y_j| / |Y_j|` between the chart of `F(p)` on `flip(t, k)`
/// and the mutation at `k` of its chart on `t`.
pub fn flip_coherence<T: Real>(p: &Polynomial<T>, t: &Triangulation, k: usize) -> Result<T> {
    flip_coherence_of(&sibuya_map(p)?, t, k)
}

pub fn flip_coherence_of<T: Real>(c: &Configuration<T>, t: &Triangulation, k: usize) -> Result<T> {
    if k >= t.len() {
        return Err(Error::PreconditionViolation(format!("arc index {k} out of range")));
    }
    let flipped = t.flip_at(k);
    let direct = generic_chart(c, &flipped)?;
    let mutated = crate::cluster::coords::mutate_coords(&generic_chart(c, t)?, k)?;
    Ok(mutated.max_relative_error(&direct))
}

/// Largest `|log|X_j||` of a chart.
pub fn max_abs_log<T: Real>(chart: &ClusterChart<T>) -> T {
    chart.x.iter().map(|x| x.norm().ln().abs()).fold(T::zero(), T::max)
}

/// Outcome of the small-`ħ` search for one polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct ChamberReport<T: Real> {
    pub triangulation: Triangulation,
    pub epsilon: T,
    /// Charts at `ħ = ε, ε/2, ε/4`.
    pub charts: Vec<(T, ClusterChart<T>)>,
    pub max_abs_log: T,
}

/// Starting from `ε = 0.5`, halves `ε` until the WKB chart exists at the real
/// points `ε, ε/2, ε/4` with `|log|X_j|| < 40`, or `ε < 10⁻³`.
pub fn chamber_search<T: Real>(p: &Polynomial<T>) -> Result<ChamberReport<T>> {
    let structure = classify(p)?;
    let t = wkb_from_structure(p, &structure)?;
    let mut epsilon = T::lit(EPSILON_START);
    let mut last_error = None;
    while epsilon >= T::lit(EPSILON_FLOOR) {
        match charts_at(p, &structure, &t, epsilon) {
            Ok(charts) => {
                let worst = charts.iter().map(|(_, c)| max_abs_log(c)).fold(T::zero(), T::max);
                return Ok(ChamberReport {
                    triangulation: t,
                    epsilon,
                    charts,
                    max_abs_log: worst,
                });
            }
            Err(e) => last_error = Some(e),
        }
        epsilon = epsilon / T::lit(2.0);
    }
    Err(last_error.unwrap_or_else(|| Error::PreconditionViolation("empty search".into())))
}

fn charts_at<T: Real>(
    p: &Polynomial<T>,
    structure: &TrajectoryStructure<T>,
    t: &Triangulation,
    epsilon: T,
) -> Result<Vec<(T, ClusterChart<T>)>> {
    let params = StokesParams::default();
    let mut out = Vec::with_capacity(3);
    let mut h = epsilon;
    for _ in 0..3 {
        let chart = transported_chart(p, structure, t, &HbarParam::real(h)?, &params)?;
        let size = max_abs_log(&chart);
        if !(size < T::lit(LOG_BOUND)) {
            return Err(Error::GenericityViolation(format!(
                "|log|X|| = {} at hbar = {}",
                size.to_f64_lossy(),
                h.to_f64_lossy()
            )));
        }
        out.push((h, chart));
        h = h / T::lit(2.0);
    }
    Ok(out)
}

/// Everything computed for one polynomial at one value of `ħ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MapReport<T: Real> {
    pub polynomial: Polynomial<T>,
    pub hbar: HbarParam<T>,
    /// Asymptotic values of the rescaled polynomial in the standard frame,
    /// absent when they cannot be resolved there.
    pub tuple: Option<AsymptoticTuple<T>>,
    pub wkb_triangulation: Option<Triangulation>,
    /// Present only when the configuration is generic for the chart's triangulation.
    pub chart: Option<ClusterChart<T>>,
    pub wall_proximity: T,
    pub jacobian_condition: Option<f64>,
    /// Names of the errors met along the way, in the order encountered.
    pub errors: Vec<String>,
}

/// Builds the report for `F_ħ(p)`. The chart is the WKB chart when `p` is
/// saddle-free, otherwise the chart of the first triangulation for which the
/// asymptotic values are generic.
pub fn map_report<T: Real>(p: &Polynomial<T>, hbar: &HbarParam<T>) -> Result<MapReport<T>> {
    map_report_with(p, hbar, &StokesParams::default())
}

pub fn map_report_with<T: Real>(p: &Polynomial<T>, hbar: &HbarParam<T>, params: &StokesParams<T>) -> Result<MapReport<T>> {
    let scaled = p.scale_action(hbar.scaling(p.n()))?;
    let mut errors = Vec::new();
    let tuple = match asymptotic_values_with(&scaled, params) {
        Ok(t) => Some(t),
        Err(e @ Error::GenericityViolation(_)) => {
            errors.push(e.name().to_string());
            None
        }
        Err(e) => return Err(e),
    };
    let (wkb, chart) = best_chart(p, hbar, tuple.as_ref().map(|t| t.configuration()), params, &mut errors);
    let jacobian_condition = chart
        .as_ref()
        .and_then(|ch| jacobian_in(&scaled, &ch.triangulation).ok())
        .map(|j| j.condition_number());
    Ok(MapReport {
        polynomial: p.clone(),
        hbar: *hbar,
        tuple,
        wkb_triangulation: wkb,
        chart,
        wall_proximity: wall_proximity(p),
        jacobian_condition,
        errors,
    })
}

/// The chart of [`map_report_with`] without the Jacobian: the WKB triangulation
/// (if any) and the chart, with the names of the errors met appended to `errors`.
/// `config` is `F_ħ(p)` in the standard frame when it could be resolved.
pub fn best_chart<T: Real>(
    p: &Polynomial<T>,
    hbar: &HbarParam<T>,
    config: Option<Configuration<T>>,
    params: &StokesParams<T>,
    errors: &mut Vec<String>,
) -> (Option<Triangulation>, Option<ClusterChart<T>>) {
    let structure = classify(p);
    let wkb = match structure.as_ref().map_err(Error::name).and_then(|s| wkb_from_structure(p, s).map_err(|e| e.name())) {
        Ok(t) => Some(t),
        Err(name) => {
            errors.push(name.to_string());
            None
        }
    };
    let chart = match (&wkb, &structure) {
        (Some(t), Ok(s)) => match transported_chart(p, s, t, hbar, params) {
            Ok(chart) => Some(chart),
            Err(e) => {
                errors.push(e.name().to_string());
                config.as_ref().and_then(fallback_chart)
            }
        },
        _ => config.as_ref().and_then(fallback_chart),
    };
    (wkb, chart)
}

fn fallback_chart<T: Real>(c: &Configuration<T>) -> Option<ClusterChart<T>> {
    find_generic_triangulation(c, T::lit(PROJ_TOL)).and_then(|t| chart_coords(c, &t).ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stokes::normalize_tuple;

    fn poly(n: usize, a: &[(f64, f64)]) -> Polynomial<f64> {
        Polynomial::from_coefficients(n, a.iter().map(|&(r, i)| Complex::new(r, i)).collect()).unwrap()
    }

    #[test]
    fn hbar_region() {
        assert!(HbarParam::real(0.0).is_err());
        assert!(HbarParam::new(Complex::new(-0.1, 0.2)).is_err());
        assert_eq!(HbarParam::within(Complex::new(0.5, 0.0), 0.25).unwrap_err().name(), "InvalidHbar");
        let h = HbarParam::within(Complex::new(0.1, 0.05), 0.25).unwrap();
        assert!(h.in_region(0.25));
    }

    #[test]
    fn scaling_branch() {
        let one = HbarParam::real(1.0).unwrap();
        for n in 0..5 {
            assert!((one.scaling(n) - Complex::new(1.0, 0.0)).norm() < 1e-15);
        }
        let t = HbarParam::real(0.25).unwrap().scaling(1);
        assert!((t - Complex::new(2.0, 0.0)).norm() < 1e-14);
        // ħ = e^{iπ/4}/2, n = 1: t = 2 e^{−iπ/8}
        let h = HbarParam::new(Complex::from_polar(0.5, std::f64::consts::FRAC_PI_4)).unwrap();
        let expected = Complex::from_polar(2f64.sqrt(), -std::f64::consts::PI / 8.0);
        assert!((h.scaling(1) - expected).norm() < 1e-14);
        // t^{n+3} ħ² = 1
        for n in 0..5 {
            let t = h.scaling(n);
            assert!((t.powi(n as i32 + 3) * h.value() * h.value() - Complex::new(1.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn hbar_one_is_f() {
        let p = poly(1, &[(-1.0, 0.0)]);
        let a = sibuya_map(&p).unwrap();
        let b = sibuya_map_hbar(&p, &HbarParam::real(1.0).unwrap()).unwrap();
        assert!(a.max_distance(&b) < 1e-14);
    }

    #[test]
    fn airy_is_generic_triple() {
        let c = sibuya_map(&poly(0, &[])).unwrap();
        assert_eq!(c.m(), 3);
        assert!(c.satisfies_sibuya(1e-3));
    }

    #[test]
    fn square_diagonal_along_hbar() {
        // For the quadratic potential the diagonal coordinate is exactly
        // exp(−2Z/ħ) with period Z = iπ/2.
        let p = poly(1, &[(-1.0, 0.0)]);
        for h in [Complex::new(0.5, 0.0), Complex::new(0.2, 0.0), Complex::new(0.1, 0.0), Complex::new(0.3, 0.1)] {
            let chart = wkb_chart(&p, &HbarParam::new(h).unwrap()).unwrap();
            assert_eq!(chart.x.len(), 1);
            let x = chart.x[0];
            assert!(x.norm() > 0.0 && x.norm().is_finite());
            let expected = (Complex::new(0.0, -std::f64::consts::PI) / h).exp();
            assert!((x - expected).norm() < 1e-9 * expected.norm(), "{h}: {x} vs {expected}");
        }
    }

    #[test]
    fn saddle_has_no_wkb_chart() {
        let p = poly(1, &[(0.0, -1.0)]);
        let err = wkb_chart(&p, &HbarParam::real(0.1).unwrap()).unwrap_err();
        assert_eq!(err.name(), "NotSaddleFree");
    }

    #[test]
    fn square_jacobian_nonsingular() {
        let p = poly(1, &[(-1.0, 0.0)]);
        let j = jacobian(&p).unwrap();
        assert_eq!(j.matrix.len(), 1);
        assert!(j.matrix[0][0].norm() > 1e-6);
        assert!(j.drift < 1e-3, "drift {}", j.drift);
    }

    #[test]
    fn rotation_shifts_configuration() {
        let p = poly(2, &[(0.3, -0.2), (0.5, 0.4)]);
        let a = normalize_tuple(&asymptotic_values(&p.rotate_framing()).unwrap()).unwrap();
        let b = normalize_tuple(&asymptotic_values(&p).unwrap().shift()).unwrap();
        assert!(a.max_distance(&b) < 1e-7, "{}", a.max_distance(&b));
    }

    #[test]
    fn flips_are_coherent() {
        let p = poly(2, &[(0.3, -0.2), (0.5, 0.4)]);
        let c = sibuya_map(&p).unwrap();
        for t in crate::cluster::triangulation::all_triangulations(5).unwrap() {
            for k in 0..t.len() {
                if let Ok(e) = flip_coherence_of(&c, &t, k) {
                    assert!(e < 1e-8);
                }
            }
        }
    }

    #[test]
    fn search_on_square() {
        let p = poly(1, &[(-1.0, 0.0)]);
        let r = chamber_search(&p).unwrap();
        assert!(r.epsilon >= EPSILON_FLOOR);
        assert_eq!(r.charts.len(), 3);
        assert!(r.max_abs_log < LOG_BOUND);
    }

    #[test]
    fn report_fields() {
        let p = poly(1, &[(-1.0, 0.0)]);
        let r = map_report(&p, &HbarParam::real(1.0).unwrap()).unwrap();
        assert!(r.wkb_triangulation.is_some());
        assert!(r.chart.is_some());
        assert!(r.jacobian_condition.is_some());
        let r = map_report(&poly(1, &[(0.0, -1.0)]), &HbarParam::real(1.0).unwrap()).unwrap();
        assert!(r.wkb_triangulation.is_none());
    }
}
