//! Scalar abstraction shared by every numerical module.

use std::fmt::Debug;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating point type the numerical layer is generic over: `f32` or `f64`.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Default + Send + Sync + 'static {
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Widens `self` to `f64` (used for reporting and serialization).
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance floor for this precision, `factor` ulps of 1.
    #[inline]
    fn eps_floor(factor: f64) -> Self {
        Self::epsilon() * Self::lit(factor)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type C<T> = Complex<T>;

#[inline]
pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// The square root of `value` on the sheet closest to `reference`.
#[inline]
pub fn sqrt_near<T: Real>(value: Complex<T>, reference: Complex<T>) -> Complex<T> {
    let s = value.sqrt();
    if (s * reference.conj()).re < T::zero() {
        -s
    } else {
        s
    }
}

/// Angle between two nonzero complex numbers, in `[0, π]`.
#[inline]
pub fn angle_between<T: Real>(a: Complex<T>, b: Complex<T>) -> T {
    (a * b.conj()).arg().abs()
}

/// Reduces an angle into `[0, 2π)`.
#[inline]
pub fn wrap_angle<T: Real>(theta: T) -> T {
    let tau = T::TAU();
    let r = theta % tau;
    if r < T::zero() {
        r + tau
    } else {
        r
    }
}

/// Converts a pair of `f64`s into a complex number of the target precision.
#[inline]
pub fn from_pair<T: Real>(pair: [f64; 2]) -> Complex<T> {
    cplx(pair[0], pair[1])
}

#[inline]
pub fn to_pair<T: Real>(z: Complex<T>) -> [f64; 2] {
    [z.re.to_f64_lossy(), z.im.to_f64_lossy()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_near_follows_reference_sheet() {
        let v = Complex::new(-1.0_f64, 1e-12);
        let up = sqrt_near(v, Complex::new(0.0, 1.0));
        let down = sqrt_near(v, Complex::new(0.0, -1.0));
        assert!((up - Complex::new(0.0, 1.0)).norm() < 1e-9);
        assert!((down + Complex::new(0.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn wrap_angle_range() {
        assert!((wrap_angle(-0.5_f64) - (std::f64::consts::TAU - 0.5)).abs() < 1e-15);
        assert!(wrap_angle(7.0_f32) < std::f32::consts::TAU);
    }
}
