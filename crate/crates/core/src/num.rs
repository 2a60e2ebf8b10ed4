//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the library is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts a count into the scalar type.
    #[inline]
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over the library scalar.
pub type Cx<T> = Complex<T>;

#[inline]
pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn i_unit<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::one())
}

/// `ln(1 + u)` without cancellation for small `|u|`.
pub(crate) fn ln_1p<T: Real>(u: Cx<T>) -> Cx<T> {
    let r = u.norm();
    if r < T::lit(1e-3) {
        // alternating series, five terms reach full precision for |u| < 1e-3
        let mut term = u;
        let mut sum = Cx::new(T::zero(), T::zero());
        for k in 1..=6 {
            let kk = T::count(k);
            if k % 2 == 1 {
                sum = sum + term / kk;
            } else {
                sum = sum - term / kk;
            }
            term = term * u;
        }
        sum
    } else {
        (Cx::new(T::one(), T::zero()) + u).ln()
    }
}

/// Logarithmically spaced grid with `n` points spanning `[lo, hi]`.
pub fn log_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    assert!(n >= 2 && lo > T::zero() && hi > lo, "invalid log grid request");
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / T::count(n - 1);
    (0..n)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == n - 1 {
                hi
            } else {
                (a + step * T::count(k)).exp()
            }
        })
        .collect()
}

/// Uniformly spaced grid with `n` points spanning `[lo, hi]`.
pub fn linear_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    assert!(n >= 2 && hi > lo, "invalid linear grid request");
    let step = (hi - lo) / T::count(n - 1);
    (0..n)
        .map(|k| if k == n - 1 { hi } else { lo + step * T::count(k) })
        .collect()
}

pub(crate) fn is_strictly_increasing<T: Real>(xs: &[T]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0])
}
