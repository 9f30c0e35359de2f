//! Scalar abstraction shared by every numeric routine.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real field the library is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Send
    + Sync
    + Debug
    + Display
    + LowerExp
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in target float")
}

/// Converts a count into `T`.
#[inline]
pub fn cnt<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in target float")
}

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn creal<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// `exp(i theta)`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Integer power of a complex number; `z^0 = 1` including `z = 0`.
pub fn cpowi<T: Real>(z: Complex<T>, n: usize) -> Complex<T> {
    let mut acc = creal(T::one());
    let mut base = z;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

/// `ln n!`, exact running sum below 150 and Stirling series above.
pub fn ln_factorial<T: Real>(n: usize) -> T {
    if n < 150 {
        let mut acc = T::zero();
        for k in 2..=n {
            acc += cnt::<T>(k).ln();
        }
        return acc;
    }
    let x = cnt::<T>(n) + T::one();
    let half = lit::<T>(0.5);
    let two_pi = T::PI() + T::PI();
    let inv = T::one() / x;
    let inv2 = inv * inv;
    let series = inv * (lit::<T>(1.0 / 12.0)
        - inv2 * (lit::<T>(1.0 / 360.0) - inv2 * (lit::<T>(1.0 / 1260.0) - inv2 * lit::<T>(1.0 / 1680.0))));
    (x - half) * x.ln() - x + half * two_pi.ln() + series
}

/// `sqrt(n!)`; direct product up to 150, log space above.
pub fn sqrt_factorial<T: Real>(n: usize) -> T {
    if n <= 150 {
        let mut acc = T::one();
        for k in 2..=n {
            acc *= cnt::<T>(k).sqrt();
        }
        acc
    } else {
        (lit::<T>(0.5) * ln_factorial::<T>(n)).exp()
    }
}

/// Binomial coefficient as a float.
pub fn binom<T: Real>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * cnt::<T>(n - i) / cnt::<T>(i + 1);
    }
    acc
}

/// `|a - b| <= tol * max(1, |b|)`.
pub fn rel_close<T: Real>(a: T, b: T, tol: T) -> bool {
    (a - b).abs() <= tol * T::one().max(b.abs())
}

/// Relative discrepancy used by the agreement checks.
pub fn rel_err<T: Real>(a: T, b: T) -> T {
    (a - b).abs() / T::one().max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn stirling_branch_matches_running_sum() {
        let mut acc = 0.0f64;
        for k in 2..=200usize {
            acc += (k as f64).ln();
            if k >= 150 {
                assert_relative_eq!(ln_factorial::<f64>(k), acc, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn sqrt_factorial_small() {
        assert_relative_eq!(sqrt_factorial::<f64>(5), 120f64.sqrt(), max_relative = 1e-15);
        assert_eq!(sqrt_factorial::<f64>(0), 1.0);
    }

    #[test]
    fn cpowi_zero_base() {
        let z = Complex::new(0.0f64, 0.0);
        assert_eq!(cpowi(z, 0), Complex::new(1.0, 0.0));
        assert_eq!(cpowi(z, 3), Complex::new(0.0, 0.0));
        let w = Complex::new(0.3f64, -1.2);
        let d = cpowi(w, 5) - w.powi(5);
        assert!(d.norm() < 1e-14);
    }

    #[test]
    fn binomials() {
        assert_eq!(binom::<f64>(6, 2), 15.0);
        assert_eq!(binom::<f64>(3, 5), 0.0);
    }
}
