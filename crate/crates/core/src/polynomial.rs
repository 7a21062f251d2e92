//! Normalized polynomials `P(z) = z^{n+1} + a_{n-1} z^{n-1} + … + a_0` and
//! the coordinate-side structure of the moduli space: roots, the `ℂ*` and
//! `ℤ/(n+3)` actions, and period integrals of `√P dz` between zeros.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::quad::gl10;
use crate::scalar::{angle_between, sqrt_near, Real};

const ABERTH_MAX_ITERS: usize = 500;

/// A point of `ℂⁿ ∖ Δ`: a monic polynomial of degree `n + 1` with vanishing
/// `zⁿ` coefficient and simple roots.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T: Real> {
    n: usize,
    a: Vec<Complex<T>>,
    roots: RootSet<T>,
}

/// The zeros `α₁, …, α_{n+1}` sorted lexicographically by `(Re, Im)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet<T: Real> {
    pub roots: Vec<Complex<T>>,
    /// Minimal pairwise distance; `+∞` for a single root.
    pub sep: T,
}

impl<T: Real> RootSet<T> {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn max_modulus(&self) -> T {
        self.roots.iter().map(|r| r.norm()).fold(T::zero(), T::max)
    }

    /// Length scale used to size launch offsets and exclusion disks.
    ///
    /// Equal to `sep`, except for the single-root case where it is 1.
    pub fn scale(&self) -> T {
        if self.sep.is_finite() {
            self.sep
        } else {
            T::one()
        }
    }

    /// Index and distance of the root closest to `z`.
    pub fn nearest(&self, z: Complex<T>) -> (usize, T) {
        self.roots
            .iter()
            .enumerate()
            .map(|(i, r)| (i, (z - r).norm()))
            .fold((0, T::infinity()), |best, cur| if cur.1 < best.1 { cur } else { best })
    }

    /// Coefficients of `∏(z − αᵢ)`, lowest degree first (monic, length `len + 1`).
    pub fn expand(&self) -> Vec<Complex<T>> {
        let mut coeffs = vec![Complex::one()];
        for r in &self.roots {
            let mut next = vec![Complex::zero(); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] = next[k + 1] + c;
                next[k] = next[k] - c * r;
            }
            coeffs = next;
        }
        coeffs
    }
}

/// Integral of `√P dz` between two zeros along a polyline, with the branch
/// continued along the path and fixed to the principal root at the midpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Period<T: Real> {
    pub from_zero: usize,
    pub to_zero: usize,
    pub value: Complex<T>,
    pub path: Vec<Complex<T>>,
}

impl<T: Real> Polynomial<T> {
    /// Builds `P` from `(a₀, …, a_{n−1})`, finds its roots and rejects points
    /// on (or numerically near) the discriminant.
    pub fn from_coefficients(n: usize, a: Vec<Complex<T>>) -> Result<Self> {
        if a.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.len(),
            });
        }
        if a.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::PreconditionViolation("non-finite coefficient".into()));
        }
        let full = full_coefficients(&a);
        let roots = find_roots(&full)?;
        let tol = T::lit(1e-6) * (T::one() + roots.max_modulus());
        if roots.sep <= tol {
            return Err(Error::DiscriminantViolation {
                separation: roots.sep.to_f64_lossy(),
                tolerance: tol.to_f64_lossy(),
            });
        }
        Ok(Self { n, a, roots })
    }

    /// `z^{n+1} − 1`, whose zeros are the `(n+1)`st roots of unity.
    pub fn roots_of_unity(n: usize) -> Self {
        let mut a = vec![Complex::zero(); n];
        if n > 0 {
            a[0] = -Complex::one();
        }
        Self::from_coefficients(n, a).expect("roots of unity are simple")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Degree `n + 1`.
    pub fn degree(&self) -> usize {
        self.n + 1
    }

    /// Number of marked points `n + 3`.
    pub fn marked_points(&self) -> usize {
        self.n + 3
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.a
    }

    pub fn roots(&self) -> &RootSet<T> {
        &self.roots
    }

    /// All coefficients of `P`, lowest degree first, including the leading 1.
    pub fn full_coefficients(&self) -> Vec<Complex<T>> {
        full_coefficients(&self.a)
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        // z^{n+1} + 0·z^n + a_{n-1} z^{n-1} + ... + a_0
        let mut acc = z;
        for c in self.a.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// `(P(z), P'(z))`.
    pub fn eval_with_derivative(&self, z: Complex<T>) -> (Complex<T>, Complex<T>) {
        horner_with_derivative(&self.full_coefficients(), z)
    }

    pub fn derivative_at(&self, z: Complex<T>) -> Complex<T> {
        self.eval_with_derivative(z).1
    }

    /// The `ℂ*`-action `t·(a₀, …, a_{n−1}) = (t^{n+1}a₀, tⁿa₁, …, t²a_{n−1})`.
    ///
    /// The zeros of the result are `t` times the zeros of `self`.
    pub fn scale_action(&self, t: Complex<T>) -> Result<Self> {
        if t.norm() == T::zero() {
            return Err(Error::PreconditionViolation("scale factor must be nonzero".into()));
        }
        let a = self
            .a
            .iter()
            .enumerate()
            .map(|(j, c)| c * t.powi((self.n + 1 - j) as i32))
            .collect();
        Self::from_coefficients(self.n, a)
    }

    /// Changes the framing by one step: `ã_j = ω^{j+2} a_j` with `ω = e^{2πi/(n+3)}`,
    /// so that `P̃(z) = ω^{−(n+1)} P(ωz)` and the zeros are multiplied by `ω^{−1}`.
    pub fn rotate_framing(&self) -> Self {
        let m = T::lit((self.n + 3) as f64);
        let a = self
            .a
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let phase = T::TAU() * T::lit((j + 2) as f64) / m;
                c * Complex::from_polar(T::one(), phase)
            })
            .collect();
        Self::from_coefficients(self.n, a).expect("rotation preserves simple roots")
    }

    /// Minimal distance from the straight segment `[αᵢ, αⱼ]` to the other zeros.
    pub fn segment_clearance(&self, i: usize, j: usize) -> T {
        polyline_clearance(&[self.roots.roots[i], self.roots.roots[j]], &self.roots.roots, &[i, j])
    }

    /// The path used for `period(i, j)`: the straight segment, or a two-segment
    /// detour through a displaced midpoint when another zero is too close.
    /// The path from `j` to `i` is the reverse of the path from `i` to `j`.
    pub fn period_path(&self, i: usize, j: usize) -> Vec<Complex<T>> {
        if i > j {
            let mut path = self.period_path(j, i);
            path.reverse();
            return path;
        }
        let zi = self.roots.roots[i];
        let zj = self.roots.roots[j];
        let sep = self.roots.scale();
        let needed = T::lit(0.05) * sep;
        if self.segment_clearance(i, j) >= needed {
            return vec![zi, zj];
        }
        let mid = (zi + zj) * T::lit(0.5);
        let dir = zj - zi;
        let normal = Complex::new(-dir.im, dir.re) / dir.norm();
        let mut best = vec![zi, zj];
        let mut best_clear = self.segment_clearance(i, j);
        for factor in [0.1, -0.1, 0.2, -0.2, 0.4, -0.4, 0.8, -0.8] {
            let kink = mid + normal * (sep * T::lit(factor));
            let path = vec![zi, kink, zj];
            let clear = polyline_clearance(&path, &self.roots.roots, &[i, j]);
            if clear >= needed {
                return path;
            }
            if clear > best_clear {
                best_clear = clear;
                best = path;
            }
        }
        best
    }

    /// Period of `√P dz` from zero `i` to zero `j`.
    ///
    /// The branch is continued along the path and normalized so that at the path
    /// midpoint it equals the principal square root of `P`; hence
    /// `period(i, j) = −period(j, i)`.
    pub fn period(&self, i: usize, j: usize) -> Result<Period<T>> {
        let count = self.roots.len();
        if i >= count || j >= count {
            return Err(Error::PreconditionViolation(format!(
                "zero index out of range (have {count} zeros)"
            )));
        }
        if i == j {
            return Err(Error::PreconditionViolation("period endpoints must differ".into()));
        }
        let path = self.period_path(i, j);
        let value = self.integrate_sqrt_along(&path)?;
        Ok(Period {
            from_zero: i,
            to_zero: j,
            value,
            path,
        })
    }

    /// `∫ √P dz` along a polyline whose endpoints may be zeros of `P`.
    ///
    /// Each segment is parametrized by `t = sin²(θ/2)`, which removes the
    /// square-root behaviour at zero endpoints; panels are doubled until the
    /// result settles and consecutive samples of `√P` stay on one sheet.
    /// The returned value uses the branch equal to the principal root at the
    /// path midpoint (for an even vertex count, the midpoint of the middle segment).
    pub fn integrate_sqrt_along(&self, path: &[Complex<T>]) -> Result<Complex<T>> {
        let mut panels = 4usize;
        let mut previous: Option<Complex<T>> = None;
        let tol = T::lit(1e-13).max(T::eps_floor(50.0));
        while panels <= 4096 {
            match self.sqrt_quadrature(path, panels) {
                Ok(value) => {
                    if let Some(prev) = previous {
                        if (value - prev).norm() <= tol * (T::one() + value.norm()) {
                            return Ok(value);
                        }
                    }
                    previous = Some(value);
                }
                Err(e) => {
                    if panels >= 4096 {
                        return Err(e);
                    }
                    previous = None;
                }
            }
            panels *= 2;
        }
        match previous {
            Some(v) => Ok(v),
            None => {
                let mid = path_midpoint(path);
                Err(Error::BranchTrackingFailure {
                    re: mid.re.to_f64_lossy(),
                    im: mid.im.to_f64_lossy(),
                })
            }
        }
    }

    fn sqrt_quadrature(&self, path: &[Complex<T>], panels: usize) -> Result<Complex<T>> {
        let rule = gl10();
        let half = T::lit(0.5);
        let max_jump = T::FRAC_PI_4();
        let mid_segment = (path.len() - 1) / 2;
        let kink_mid = path.len() % 2 == 1;
        let mut branch: Option<Complex<T>> = None;
        let mut total = Complex::zero();
        let mut sign_at_mid: Option<T> = None;

        let track = |z: Complex<T>, branch: &mut Option<Complex<T>>| -> Result<Complex<T>> {
            let p = self.eval(z);
            let s = match branch {
                Some(b) => {
                    let s = sqrt_near(p, *b);
                    if s.norm() > T::zero() && b.norm() > T::zero() && angle_between(s, *b) >= max_jump {
                        return Err(Error::BranchTrackingFailure {
                            re: z.re.to_f64_lossy(),
                            im: z.im.to_f64_lossy(),
                        });
                    }
                    s
                }
                None => p.sqrt(),
            };
            if s.norm() > T::zero() {
                *branch = Some(s);
            }
            Ok(s)
        };

        for seg in 0..path.len() - 1 {
            let za = path[seg];
            let zb = path[seg + 1];
            let dz = zb - za;
            let width = T::PI() / T::lit(panels as f64);
            for panel in 0..panels {
                let lo = width * T::lit(panel as f64);
                for (x, w) in rule {
                    let theta = lo + width * (T::lit(*x) + T::one()) * half;
                    let st = (theta * half).sin();
                    let t = st * st;
                    let z = za + dz * t;
                    let s = track(z, &mut branch)?;
                    let jac = theta.sin() * half * width * half * T::lit(*w);
                    total = total + s * dz * jac;
                }
                // Probe the midpoint on the sheet reached so far.
                let at_mid = if kink_mid {
                    seg + 1 == path.len() / 2 && panel + 1 == panels
                } else {
                    seg == mid_segment && panel + 1 == panels / 2
                };
                if at_mid {
                    let zm = path_midpoint(path);
                    let s = track(zm, &mut branch)?;
                    let principal = self.eval(zm).sqrt();
                    sign_at_mid = Some(if (s * principal.conj()).re < T::zero() {
                        -T::one()
                    } else {
                        T::one()
                    });
                }
            }
        }
        let sign = sign_at_mid.unwrap_or_else(T::one);
        Ok(total * sign)
    }
}

fn path_midpoint<T: Real>(path: &[Complex<T>]) -> Complex<T> {
    if path.len() % 2 == 1 {
        path[path.len() / 2]
    } else {
        let k = path.len() / 2;
        (path[k - 1] + path[k]) * T::lit(0.5)
    }
}

fn full_coefficients<T: Real>(a: &[Complex<T>]) -> Vec<Complex<T>> {
    if a.is_empty() {
        return vec![Complex::zero(), Complex::one()];
    }
    let mut full = Vec::with_capacity(a.len() + 2);
    full.extend_from_slice(a);
    full.push(Complex::zero());
    full.push(Complex::one());
    full
}

fn horner_with_derivative<T: Real>(coeffs: &[Complex<T>], z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut p = Complex::zero();
    let mut dp = Complex::zero();
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn point_segment_distance<T: Real>(p: Complex<T>, a: Complex<T>, b: Complex<T>) -> T {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == T::zero() {
        return (p - a).norm();
    }
    let t = ((p - a) * ab.conj()).re / len2;
    let t = t.max(T::zero()).min(T::one());
    (p - (a + ab * t)).norm()
}

fn polyline_clearance<T: Real>(path: &[Complex<T>], points: &[Complex<T>], skip: &[usize]) -> T {
    let mut best = T::infinity();
    for (k, p) in points.iter().enumerate() {
        if skip.contains(&k) {
            continue;
        }
        for w in path.windows(2) {
            best = best.min(point_segment_distance(*p, w[0], w[1]));
        }
    }
    best
}

/// All zeros of the monic polynomial with coefficients `coeffs` (lowest first)
/// by Aberth–Ehrlich simultaneous iteration from perturbed roots-of-unity
/// guesses, followed by a Newton polish.
pub fn find_roots<T: Real>(coeffs: &[Complex<T>]) -> Result<RootSet<T>> {
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Err(Error::PreconditionViolation("constant polynomial has no roots".into()));
    }
    let lead = coeffs[degree];
    let monic: Vec<Complex<T>> = coeffs.iter().map(|c| c / lead).collect();
    let coef_scale = monic.iter().map(|c| c.norm()).fold(T::one(), T::max);
    let residual_tol = T::lit(1e-10).max(T::eps_floor(1e3)) * coef_scale;

    let mut z: Vec<Complex<T>> = if degree == 1 {
        vec![-monic[0]]
    } else {
        // Fujiwara bound on the root modulus.
        let mut radius = T::zero();
        for k in 1..=degree {
            let c = monic[degree - k].norm();
            let mut r = c.powf(T::one() / T::lit(k as f64));
            if k == degree {
                r = (c * T::lit(0.5)).powf(T::one() / T::lit(k as f64));
            }
            radius = radius.max(r);
        }
        radius = (radius * T::lit(2.0)).max(T::lit(1e-3));
        (0..degree)
            .map(|k| {
                let angle = T::TAU() * T::lit(k as f64) / T::lit(degree as f64) + T::lit(0.4);
                let bump = T::one() + T::lit(0.05) * T::lit(((k * 7 + 3) % 11) as f64) / T::lit(11.0);
                Complex::from_polar(radius * bump, angle)
            })
            .collect()
    };

    let mut iterations = 0;
    if degree > 1 {
        let step_tol = T::epsilon() * T::lit(4.0);
        while iterations < ABERTH_MAX_ITERS {
            iterations += 1;
            let mut max_step = T::zero();
            for i in 0..degree {
                let (p, dp) = horner_with_derivative(&monic, z[i]);
                if p.norm() == T::zero() {
                    continue;
                }
                let ratio = p / dp;
                let mut repulsion: Complex<T> = Complex::zero();
                for j in 0..degree {
                    if j != i {
                        repulsion = repulsion + Complex::<T>::one() / (z[i] - z[j]);
                    }
                }
                let step: Complex<T> = ratio / (Complex::<T>::one() - ratio * repulsion);
                if !step.re.is_finite() || !step.im.is_finite() {
                    continue;
                }
                z[i] = z[i] - step;
                max_step = max_step.max(step.norm() / (T::one() + z[i].norm()));
            }
            if max_step <= step_tol {
                break;
            }
        }
        for zi in z.iter_mut() {
            for _ in 0..2 {
                let (p, dp) = horner_with_derivative(&monic, *zi);
                if dp.norm() > T::zero() {
                    let next = *zi - p / dp;
                    let (pn, _) = horner_with_derivative(&monic, next);
                    if pn.norm() < p.norm() {
                        *zi = next;
                    }
                }
            }
        }
    }

    let residual = z
        .iter()
        .map(|zi| horner_with_derivative(&monic, *zi).0.norm())
        .fold(T::zero(), T::max);
    if !(residual < residual_tol) {
        return Err(Error::ConvergenceFailure {
            iterations,
            residual: residual.to_f64_lossy(),
        });
    }

    z.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap().then(x.im.partial_cmp(&y.im).unwrap()));
    let mut sep = T::infinity();
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            sep = sep.min((z[i] - z[j]).norm());
        }
    }
    Ok(RootSet { roots: z, sep })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn airy_case_has_single_root() {
        let p = Polynomial::<f64>::from_coefficients(0, vec![]).unwrap();
        assert_eq!(p.roots().roots, vec![c(0.0, 0.0)]);
        assert_eq!(p.eval(c(2.0, 1.0)), c(2.0, 1.0));
    }

    #[test]
    fn z_squared_minus_one() {
        let p = Polynomial::from_coefficients(1, vec![c(-1.0, 0.0)]).unwrap();
        let r = &p.roots().roots;
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn cubic_with_zero_root() {
        let p = Polynomial::from_coefficients(2, vec![c(0.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let r = &p.roots().roots;
        for (got, want) in r.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - c(want, 0.0)).norm() < 1e-13, "{got} vs {want}");
        }
    }

    #[test]
    fn double_root_is_on_discriminant() {
        let err = Polynomial::from_coefficients(1, vec![c(0.0, 0.0)]).unwrap_err();
        assert_eq!(err.name(), "DiscriminantViolation");
    }

    #[test]
    fn wrong_length_rejected() {
        let err = Polynomial::<f64>::from_coefficients(2, vec![c(1.0, 0.0)]).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, got: 1 });
    }

    #[test]
    fn scale_action_by_two() {
        let p = Polynomial::from_coefficients(1, vec![c(-1.0, 0.0)]).unwrap();
        let q = p.scale_action(c(2.0, 0.0)).unwrap();
        assert_eq!(q.coefficients(), &[c(-4.0, 0.0)]);
        assert!((q.roots().roots[1] - c(2.0, 0.0)).norm() < 1e-14);
        let id = p.scale_action(c(1.0, 0.0)).unwrap();
        assert_eq!(id.coefficients(), p.coefficients());
    }

    #[test]
    fn rotate_framing_square_negates_constant() {
        let p = Polynomial::from_coefficients(1, vec![c(0.3, -0.7)]).unwrap();
        let q = p.rotate_framing();
        assert!((q.coefficients()[0] + c(0.3, -0.7)).norm() < 1e-15);
    }

    #[test]
    fn period_of_z2_minus_1() {
        let p = Polynomial::from_coefficients(1, vec![c(-1.0, 0.0)]).unwrap();
        // roots sorted: -1, 1
        let per = p.period(0, 1).unwrap();
        assert!((per.value - c(0.0, FRAC_PI_2)).norm() < 1e-12, "{}", per.value);
        let back = p.period(1, 0).unwrap();
        assert!((back.value + per.value).norm() < 1e-12);
    }

    #[test]
    fn period_scales_with_c() {
        // P = z^2 - c has period c·(±iπ/2) between its zeros.
        let cc = c(0.4, 1.3);
        let p = Polynomial::from_coefficients(1, vec![-cc]).unwrap();
        let per = p.period(0, 1).unwrap().value;
        let expected = cc * c(0.0, PI / 2.0);
        assert!((per - expected).norm().min((per + expected).norm()) < 1e-11);
    }

    #[test]
    fn equal_indices_rejected() {
        let p = Polynomial::from_coefficients(1, vec![c(-1.0, 0.0)]).unwrap();
        assert_eq!(p.period(1, 1).unwrap_err().name(), "PreconditionViolation");
    }

    #[test]
    fn detour_when_zero_sits_on_segment() {
        // zeros -1, 0, 1: the segment from -1 to 1 passes through 0.
        let p = Polynomial::from_coefficients(2, vec![c(0.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let path = p.period_path(0, 2);
        assert_eq!(path.len(), 3);
        let per = p.period(0, 2).unwrap();
        let back = p.period(2, 0).unwrap();
        assert!((per.value + back.value).norm() < 1e-10);
    }

    #[test]
    fn generic_over_f32() {
        let p = Polynomial::<f32>::from_coefficients(1, vec![Complex::new(-1.0, 0.0)]).unwrap();
        assert!((p.roots().roots[1] - Complex::new(1.0, 0.0)).norm() < 1e-5);
    }
}
