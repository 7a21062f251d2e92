//! Points of the Riemann sphere in homogeneous coordinates and Möbius maps.
//!
//! A point is stored as a pair `(u : v)` rescaled so that `max(|u|, |v|) = 1`,
//! with `∞ = (1 : 0)`. Every comparison goes through 2×2 determinants
//! `u₁v₂ − v₁u₂`, so the point at infinity never needs special handling.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjPoint<T: Real> {
    pub u: Complex<T>,
    pub v: Complex<T>,
}

impl<T: Real> ProjPoint<T> {
    /// Builds `(u : v)`; returns `None` for the degenerate pair `(0, 0)` or non-finite input.
    pub fn new(u: Complex<T>, v: Complex<T>) -> Option<Self> {
        let scale = u.norm().max(v.norm());
        if !(scale > T::zero()) || !scale.is_finite() {
            return None;
        }
        Some(Self {
            u: u / scale,
            v: v / scale,
        })
    }

    pub fn finite(z: Complex<T>) -> Self {
        Self::new(z, Complex::one()).expect("finite point")
    }

    pub fn infinity() -> Self {
        Self {
            u: Complex::one(),
            v: Complex::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::finite(Complex::zero())
    }

    pub fn one() -> Self {
        Self::finite(Complex::one())
    }

    /// Affine value `u / v`, or `None` at infinity.
    pub fn to_complex(&self) -> Option<Complex<T>> {
        if self.v.norm() == T::zero() {
            None
        } else {
            Some(self.u / self.v)
        }
    }

    pub fn is_infinity(&self) -> bool {
        self.v.norm() == T::zero()
    }

    pub fn norm(&self) -> T {
        (self.u.norm_sqr() + self.v.norm_sqr()).sqrt()
    }

    /// Chordal distance `|det| / (‖p‖‖q‖)`, the sine of the Fubini–Study angle.
    pub fn chordal_distance(&self, other: &Self) -> T {
        det(self, other).norm() / (self.norm() * other.norm())
    }

    /// Fubini–Study (spherical) distance in `[0, π/2]`.
    pub fn spherical_distance(&self, other: &Self) -> T {
        let d = det(self, other).norm();
        let inner = (self.u * other.u.conj() + self.v * other.v.conj()).norm();
        d.atan2(inner)
    }
}

/// Homogeneous determinant `p.u·q.v − p.v·q.u`; proportional to `p − q` for finite points.
#[inline]
pub fn det<T: Real>(p: &ProjPoint<T>, q: &ProjPoint<T>) -> Complex<T> {
    p.u * q.v - p.v * q.u
}

/// A Möbius transformation `z ↦ (a z + b) / (c z + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius<T: Real> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    pub d: Complex<T>,
}

impl<T: Real> Mobius<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new(Complex::one(), Complex::zero(), Complex::zero(), Complex::one())
    }

    pub fn determinant(&self) -> Complex<T> {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, p: &ProjPoint<T>) -> ProjPoint<T> {
        let u = self.a * p.u + self.b * p.v;
        let v = self.c * p.u + self.d * p.v;
        ProjPoint::new(u, v).expect("Möbius map must be nondegenerate")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    /// The unique map sending `(p, q, r)` to `(0, 1, ∞)`; `None` if two of them coincide.
    ///
    /// `z ↦ det(z,p)·det(q,r) : det(z,r)·det(q,p)`.
    pub fn to_standard_triple(
        p: &ProjPoint<T>,
        q: &ProjPoint<T>,
        r: &ProjPoint<T>,
        tol: T,
    ) -> Option<Self> {
        if p.chordal_distance(q) <= tol || q.chordal_distance(r) <= tol || p.chordal_distance(r) <= tol {
            return None;
        }
        let qr = det(q, r);
        let qp = det(q, p);
        // det(z, p) = z.u p.v − z.v p.u
        Some(Self::new(qr * p.v, -qr * p.u, qp * r.v, -qp * r.u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn standard_triple_sends_points_to_zero_one_infinity() {
        let p = ProjPoint::finite(c(1.0, 2.0));
        let q = ProjPoint::infinity();
        let r = ProjPoint::finite(c(-0.5, 0.25));
        let g = Mobius::to_standard_triple(&p, &q, &r, 1e-12).unwrap();
        assert!(g.apply(&p).chordal_distance(&ProjPoint::zero()) < 1e-14);
        assert!(g.apply(&q).chordal_distance(&ProjPoint::one()) < 1e-14);
        assert!(g.apply(&r).chordal_distance(&ProjPoint::infinity()) < 1e-14);
    }

    #[test]
    fn coincident_triple_rejected() {
        let p = ProjPoint::finite(c(1.0, 0.0));
        assert!(Mobius::to_standard_triple(&p, &p, &ProjPoint::infinity(), 1e-12).is_none());
    }

    #[test]
    fn distances_handle_infinity() {
        let inf = ProjPoint::<f64>::infinity();
        let big = ProjPoint::finite(c(1e12, 0.0));
        assert!(inf.chordal_distance(&big) < 1e-11);
        let d = ProjPoint::<f64>::zero().spherical_distance(&inf);
        assert!((d - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn compose_and_inverse() {
        let m = Mobius::new(c(1.0, 1.0), c(2.0, 0.0), c(0.0, 1.0), c(3.0, -1.0));
        let id = m.compose(&m.inverse());
        let z = ProjPoint::finite(c(0.3, -0.7));
        assert!(id.apply(&z).chordal_distance(&z) < 1e-14);
    }
}
