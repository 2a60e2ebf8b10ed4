//! Globally adaptive Gauss–Legendre quadrature with interval bisection.
//!
//! Each panel is integrated with a 10-point rule on the whole panel and on
//! its two halves; the difference is the panel error estimate and the
//! refined value is kept. Panels with the largest estimate are bisected
//! until the summed estimate meets the tolerance.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::num::{Cx, Real};

const GL10_NODES: [f64; 5] = [
    0.148_874_338_981_631_210_884_826_001_130,
    0.433_395_394_129_247_190_799_265_943_166,
    0.679_409_568_299_024_406_234_327_365_115,
    0.865_063_366_688_984_510_732_096_688_424,
    0.973_906_528_517_171_720_077_964_012_085,
];
const GL10_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_870_173_892_994_651,
    0.269_266_719_309_996_355_091_226_921_569,
    0.219_086_362_515_982_043_995_534_934_228,
    0.149_451_349_150_580_593_145_776_339_658,
    0.066_671_344_308_688_137_593_568_809_893,
];

/// Values that can be integrated: real scalars and complex numbers.
pub trait Integrand<T: Real>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> T;
    fn is_finite_value(&self) -> bool;
}

impl<T: Real> Integrand<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn magnitude(&self) -> T {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl<T: Real> Integrand<T> for Cx<T> {
    fn zero() -> Self {
        Cx::new(T::zero(), T::zero())
    }
    fn magnitude(&self) -> T {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadSettings<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_panels: usize,
}

impl<T: Real> Default for QuadSettings<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::lit(1e-12),
            rel_tol: T::lit(1e-10),
            max_panels: 4000,
        }
    }
}

/// Integral estimate with its error bound and the number of integrand calls.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature<V, T> {
    pub value: V,
    pub error: T,
    pub evaluations: usize,
}

fn gl10<T: Real, V: Integrand<T>, F: Fn(T) -> V>(f: &F, a: T, b: T) -> V {
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    let mut acc = V::zero();
    for (x, w) in GL10_NODES.iter().zip(GL10_WEIGHTS.iter()) {
        let dx = half * T::lit(*x);
        let w = T::lit(*w);
        acc = acc + (f(mid - dx) + f(mid + dx)) * w;
    }
    acc * half
}

/// Nodes and weights of the 10-point rule mapped to `[a, b]`.
pub(crate) fn gl10_rule<T: Real>(a: T, b: T) -> Vec<(T, T)> {
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    let mut rule = Vec::with_capacity(10);
    for (x, w) in GL10_NODES.iter().zip(GL10_WEIGHTS.iter()) {
        let dx = half * T::lit(*x);
        rule.push((mid - dx, half * T::lit(*w)));
        rule.push((mid + dx, half * T::lit(*w)));
    }
    rule
}

struct Panel<T, V> {
    a: T,
    b: T,
    coarse: V,
    left: V,
    right: V,
}

impl<T: Real, V: Integrand<T>> Panel<T, V> {
    fn new<F: Fn(T) -> V>(f: &F, a: T, b: T, coarse: V) -> Self {
        let m = (a + b) / T::lit(2.0);
        Self {
            a,
            b,
            coarse,
            left: gl10(f, a, m),
            right: gl10(f, m, b),
        }
    }
    fn fine(&self) -> V {
        self.left + self.right
    }
    fn error(&self) -> T {
        (self.fine() - self.coarse).magnitude()
    }
}

/// Integrates `f` over `[a, b]`, with optional interior breakpoints that seed
/// the initial panel partition.
pub fn integrate<T, V, F>(f: F, a: T, b: T, breaks: &[T], settings: &QuadSettings<T>) -> Result<Quadrature<V, T>>
where
    T: Real,
    V: Integrand<T>,
    F: Fn(T) -> V,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInput("quadrature limits must be finite".into()));
    }
    if a == b {
        return Ok(Quadrature { value: V::zero(), error: T::zero(), evaluations: 0 });
    }
    let mut edges = vec![a];
    edges.extend(breaks.iter().copied().filter(|x| (*x - a) * (*x - b) < T::zero()));
    edges.push(b);
    if b < a {
        edges.sort_by(|x, y| y.partial_cmp(x).unwrap());
    } else {
        edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    }

    let mut panels: Vec<Panel<T, V>> = edges
        .windows(2)
        .map(|w| Panel::new(&f, w[0], w[1], gl10(&f, w[0], w[1])))
        .collect();
    let mut evaluations = panels.len() * 60;

    loop {
        let value = panels.iter().fold(V::zero(), |acc, p| acc + p.fine());
        let errors: Vec<T> = panels.iter().map(|p| p.error()).collect();
        let error = errors.iter().fold(T::zero(), |acc, e| acc + *e);
        if !value.is_finite_value() || !error.is_finite() {
            return Err(Error::Accuracy { estimate: value.magnitude().as_f64(), error_bound: f64::INFINITY });
        }
        let target = settings.abs_tol.max(settings.rel_tol * value.magnitude());
        if error <= target {
            return Ok(Quadrature { value, error, evaluations });
        }
        if panels.len() >= settings.max_panels {
            return Err(Error::Accuracy { estimate: value.magnitude().as_f64(), error_bound: error.as_f64() });
        }
        let (worst, _) = errors
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |(bi, be), (i, e)| if *e > be { (i, *e) } else { (bi, be) });
        let p = panels.swap_remove(worst);
        let m = (p.a + p.b) / T::lit(2.0);
        if (m - p.a).abs() <= T::epsilon() * m.abs().max(T::one()) {
            return Err(Error::Accuracy { estimate: value.magnitude().as_f64(), error_bound: error.as_f64() });
        }
        panels.push(Panel::new(&f, p.a, m, p.left));
        panels.push(Panel::new(&f, m, p.b, p.right));
        evaluations += 40;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x: f64| 3.0 * x * x, 0.0, 2.0, &[], &QuadSettings::default()).unwrap();
        assert!((q.value - 8.0).abs() < 1e-14);
    }

    #[test]
    fn peaked_integrand_converges() {
        let s = QuadSettings { abs_tol: 1e-13, rel_tol: 1e-13, max_panels: 4000 };
        let q = integrate(|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, &[], &s).unwrap();
        let exact = 2.0 * (1.0 / 1e-4_f64.sqrt()) * (1.0 / 1e-4_f64.sqrt()).atan();
        assert!((q.value - exact).abs() < 1e-9 * exact, "{} vs {}", q.value, exact);
    }

    #[test]
    fn complex_integrand() {
        let q = integrate(
            |x: f64| Cx::new(x.cos(), x.sin()),
            0.0,
            std::f64::consts::PI,
            &[],
            &QuadSettings::default(),
        )
        .unwrap();
        assert!((q.value - Cx::new(0.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let q = integrate(|x: f64| x, 1.0, 0.0, &[0.5], &QuadSettings::default()).unwrap();
        assert!((q.value + 0.5).abs() < 1e-15);
    }

    #[test]
    fn singular_integrand_reports_accuracy_error() {
        let s = QuadSettings { abs_tol: 1e-14, rel_tol: 1e-14, max_panels: 50 };
        let r = integrate(|x: f64| 1.0 / x.abs().sqrt().max(1e-300) / x.abs().sqrt().max(1e-300), -1.0, 1.0, &[], &s);
        assert!(matches!(r, Err(Error::Accuracy { .. })));
    }

    #[test]
    fn single_precision_works() {
        let q = integrate(|x: f32| x.exp(), 0.0, 1.0, &[], &QuadSettings { abs_tol: 1e-6, rel_tol: 1e-6, max_panels: 100 }).unwrap();
        assert!((q.value - (1.0f32.exp() - 1.0)).abs() < 1e-5);
    }
}
