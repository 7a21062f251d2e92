//! Embedded Dormand–Prince 5(4) stepping for small complex systems.
//!
//! Only the single step and the step-size update live here; each caller owns
//! its accept/reject loop because the error norms differ (arc length in the
//! distinguished coordinate for trajectories, projective distance for the
//! Stokes solver).

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Real;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// b - b* (fifth minus embedded fourth order weights)
const E1: f64 = 35.0 / 384.0 - 5179.0 / 57600.0;
const E3: f64 = 500.0 / 1113.0 - 7571.0 / 16695.0;
const E4: f64 = 125.0 / 192.0 - 393.0 / 640.0;
const E5: f64 = -2187.0 / 6784.0 + 92097.0 / 339200.0;
const E6: f64 = 11.0 / 84.0 - 187.0 / 2100.0;
const E7: f64 = -1.0 / 40.0;

pub type State<T, const N: usize> = [Complex<T>; N];

/// Result of one trial step: the fifth-order solution and the embedded error vector.
#[derive(Debug, Clone, Copy)]
pub struct Trial<T: Real, const N: usize> {
    pub y: State<T, N>,
    pub err: State<T, N>,
}

fn axpy<T: Real, const N: usize>(y: &State<T, N>, terms: &[(f64, &State<T, N>)], h: T) -> State<T, N> {
    let mut out = *y;
    for (coef, k) in terms {
        let c = h * T::lit(*coef);
        for i in 0..N {
            out[i] = out[i] + k[i] * c;
        }
    }
    out
}

/// Performs one Dormand–Prince step of size `h` from `(t, y)`.
pub fn dopri_step<T, const N: usize, F>(f: &mut F, t: T, y: &State<T, N>, h: T) -> Trial<T, N>
where
    T: Real,
    F: FnMut(T, &State<T, N>) -> State<T, N>,
{
    let k1 = f(t, y);
    let k2 = f(t + h * T::lit(C2), &axpy(y, &[(A21, &k1)], h));
    let k3 = f(t + h * T::lit(C3), &axpy(y, &[(A31, &k1), (A32, &k2)], h));
    let k4 = f(t + h * T::lit(C4), &axpy(y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
    let k5 = f(
        t + h * T::lit(C5),
        &axpy(y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
    );
    let k6 = f(
        t + h,
        &axpy(y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h),
    );
    let y5 = axpy(y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
    let k7 = f(t + h, &y5);
    let zero = [Complex::<T>::zero(); N];
    let err = axpy(
        &zero,
        &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
        h,
    );
    Trial { y: y5, err }
}

/// Standard step-size update from a scaled error estimate (`err <= 1` accepts).
pub fn next_step_size<T: Real>(h: T, err: T) -> T {
    let factor = if err <= T::zero() || !err.is_finite() {
        if err.is_finite() {
            T::lit(5.0)
        } else {
            T::lit(0.1)
        }
    } else {
        (T::lit(0.9) * err.powf(T::lit(-0.2))).max(T::lit(0.2)).min(T::lit(5.0))
    };
    h * factor
}
