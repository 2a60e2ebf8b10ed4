//! Shape-preserving (monotone) piecewise cubic Hermite interpolation.

use crate::error::{Error, Result};
use crate::num::{is_strictly_increasing, Real};

/// Monotone cubic interpolant in the Fritsch–Carlson family: slopes are the
/// weighted harmonic mean of neighbouring secants and vanish at local
/// extrema of the data, so no overshoot is introduced between samples.
#[derive(Debug, Clone)]
pub struct MonotoneCubic<T> {
    x: Vec<T>,
    y: Vec<T>,
    d: Vec<T>,
}

impl<T: Real> MonotoneCubic<T> {
    pub fn new(x: Vec<T>, y: Vec<T>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch { expected: x.len(), found: y.len() });
        }
        if x.len() < 2 {
            return Err(Error::InvalidInput("interpolation needs at least two samples".into()));
        }
        if !is_strictly_increasing(&x) {
            return Err(Error::InvalidInput("interpolation abscissae must be strictly increasing".into()));
        }
        let n = x.len();
        let h: Vec<T> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<T> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut d = vec![T::zero(); n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for k in 1..n - 1 {
                let (a, b) = (delta[k - 1], delta[k]);
                if a == T::zero() || b == T::zero() || a.signum() != b.signum() {
                    d[k] = T::zero();
                } else {
                    let w1 = T::lit(2.0) * h[k] + h[k - 1];
                    let w2 = h[k] + T::lit(2.0) * h[k - 1];
                    d[k] = (w1 + w2) / (w1 / a + w2 / b);
                }
            }
            d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Self { x, y, d })
    }

    pub fn domain(&self) -> (T, T) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn knots(&self) -> &[T] {
        &self.x
    }

    pub fn values(&self) -> &[T] {
        &self.y
    }

    fn locate(&self, t: T) -> Result<usize> {
        let (lo, hi) = self.domain();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfRange { omega: t.as_f64(), min: lo.as_f64(), max: hi.as_f64() });
        }
        let idx = self.x.partition_point(|v| *v <= t);
        Ok(idx.saturating_sub(1).min(self.x.len() - 2))
    }

    /// Value and first derivative at `t`; extrapolation is an error.
    pub fn eval_with_slope(&self, t: T) -> Result<(T, T)> {
        let k = self.locate(t)?;
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let (y0, y1, d0, d1) = (self.y[k], self.y[k + 1], self.d[k] * h, self.d[k + 1] * h);
        let one = T::one();
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = two * s3 - three * s2 + one;
        let h10 = s3 - two * s2 + s;
        let h01 = -two * s3 + three * s2;
        let h11 = s3 - s2;
        let value = h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1;
        let dh00 = T::lit(6.0) * (s2 - s);
        let dh10 = three * s2 - T::lit(4.0) * s + one;
        let dh01 = -dh00;
        let dh11 = three * s2 - two * s;
        let slope = (dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1) / h;
        Ok((value, slope))
    }

    pub fn eval(&self, t: T) -> Result<T> {
        self.eval_with_slope(t).map(|(v, _)| v)
    }
}

fn end_slope<T: Real>(h0: T, h1: T, del0: T, del1: T) -> T {
    let d = ((T::lit(2.0) * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() || del0 == T::zero() {
        T::zero()
    } else if del0.signum() != del1.signum() && d.abs() > T::lit(3.0) * del0.abs() {
        T::lit(3.0) * del0
    } else {
        d
    }
}
