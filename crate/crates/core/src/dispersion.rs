//! Dispersion relations for the cutoff function and the time-domain kernel.
//!
//! Even real spectra (`Γ_R`, `Re r`, `Z_R`) are handled through
//! [`EvenSpectrum`], which carries the samples on `[0, W]` together with a
//! fitted `(a + b ln ω)/ω²` tail used beyond the last sample.

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::MirrorMechanics;
use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::num::{cx, i_unit, is_strictly_increasing, ln_1p, log_grid, Cx, Real};
use crate::quadrature::{integrate, Integrand, QuadSettings};
use crate::susceptibility::{ResponseCurve, SusceptibilityResult};

/// High-frequency model `f(ω) ≈ (a + b ln ω)/ω²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailModel<T> {
    pub a: T,
    pub b: T,
}

impl<T: Real> TailModel<T> {
    /// Least-squares fit of `ω² f` against `ln ω` over the top decade of the samples.
    pub fn fit(grid: &[T], values: &[T]) -> Result<Self> {
        let top = *grid.last().ok_or_else(|| Error::Fit("empty tail sample".into()))?;
        let start = top / T::lit(10.0);
        let pts: Vec<(T, T)> = grid
            .iter()
            .zip(values)
            .filter(|(w, _)| **w >= start && **w > T::zero())
            .map(|(w, f)| (w.ln(), *w * *w * *f))
            .collect();
        if pts.len() < 3 {
            return Err(Error::Fit("fewer than three samples in the top decade".into()));
        }
        let n = T::count(pts.len());
        let mx = pts.iter().fold(T::zero(), |s, p| s + p.0) / n;
        let my = pts.iter().fold(T::zero(), |s, p| s + p.1) / n;
        let sxx = pts.iter().fold(T::zero(), |s, p| s + (p.0 - mx) * (p.0 - mx));
        let sxy = pts.iter().fold(T::zero(), |s, p| s + (p.0 - mx) * (p.1 - my));
        let b = if sxx > T::epsilon() { sxy / sxx } else { T::zero() };
        Ok(Self { a: my - b * mx, b })
    }

    pub fn value(&self, omega: T) -> T {
        (self.a + self.b * omega.ln()) / (omega * omega)
    }

    /// `∫_W^∞ f(ω) dω`.
    pub fn integral_from(&self, w: T) -> T {
        (self.a + self.b * (w.ln() + T::one())) / w
    }

    /// `∫_W^∞ f(ω) k(ω) dω` by the substitution `ω = W/u`.
    pub fn integrate_against<V, K>(&self, w: T, kernel: K) -> Result<V>
    where
        V: Integrand<T>,
        K: Fn(T) -> V,
    {
        let f = |u: T| {
            let omega = w / u;
            kernel(omega) * (self.value(omega) * w / (u * u))
        };
        let breaks: Vec<T> = (1..=8).map(|k| T::lit(10f64.powi(-k))).collect();
        let qs = QuadSettings { abs_tol: T::lit(1e-15), rel_tol: T::lit(1e-10), max_panels: 2000 };
        Ok(integrate(f, T::zero(), T::one(), &breaks, &qs)?.value)
    }
}

/// Decay test: `ω f(ω)` must drop by more than half across the top decade.
pub(crate) fn decays_faster_than_inverse<T: Real>(grid: &[T], values: &[T]) -> bool {
    let top = grid[grid.len() - 1];
    let lo = top / T::lit(10.0);
    if grid[0] > lo {
        return false;
    }
    let k = grid.partition_point(|w| *w < lo);
    let a = (grid[k] * values[k]).abs();
    let b = (top * values[values.len() - 1]).abs();
    a > T::zero() && b < T::lit(0.5) * a
}

/// Even real function of frequency known on `[0, W]` plus a fitted tail.
#[derive(Debug, Clone)]
pub struct EvenSpectrum<T> {
    grid: Vec<T>,
    values: Vec<T>,
    interp: MonotoneCubic<T>,
    tail: TailModel<T>,
    ext_grid: Vec<T>,
    ext_values: Vec<T>,
}

const EXTENSION_DECADES: i32 = 3;

impl<T: Real> EvenSpectrum<T> {
    /// Samples on a nonnegative increasing grid; a missing `ω = 0` sample is
    /// filled with the first value (even functions are flat at the origin).
    pub fn new(grid: Vec<T>, values: Vec<T>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), found: values.len() });
        }
        if grid.len() < 4 || grid[0] < T::zero() || !is_strictly_increasing(&grid) {
            return Err(Error::InvalidInput("spectrum grid must have ≥ 4 nonnegative increasing samples".into()));
        }
        let (mut grid, mut values) = (grid, values);
        if grid[0] > T::zero() {
            grid.insert(0, T::zero());
            values.insert(0, values[0]);
        }
        let tail = TailModel::fit(&grid, &values)?;
        let interp = MonotoneCubic::new(grid.clone(), values.clone())?;
        let w = grid[grid.len() - 1];
        let mut ext_grid = grid.clone();
        let mut ext_values = values.clone();
        let far = w * T::lit(10f64.powi(EXTENSION_DECADES));
        for x in log_grid(w, far, 100 * EXTENSION_DECADES as usize + 1).into_iter().skip(1) {
            ext_grid.push(x);
            ext_values.push(tail.value(x));
        }
        Ok(Self { grid, values, interp, tail, ext_grid, ext_values })
    }

    /// Real parts of a Hermitian response curve.
    pub fn from_real_part(curve: &ResponseCurve<T>) -> Result<Self> {
        Self::new(curve.grid().to_vec(), curve.real_parts())
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn tail(&self) -> TailModel<T> {
        self.tail
    }

    pub fn band_max(&self) -> T {
        self.grid[self.grid.len() - 1]
    }

    pub fn decays(&self) -> bool {
        decays_faster_than_inverse(&self.grid, &self.values)
    }

    /// Value at any real frequency (interpolated in band, tail model beyond).
    pub fn value(&self, omega: T) -> T {
        let w = omega.abs();
        if w <= self.band_max() {
            self.interp.eval(w).unwrap_or_else(|_| self.tail.value(w))
        } else {
            self.tail.value(w)
        }
    }

    /// `∫₀^∞ f`.
    pub fn integral(&self) -> T {
        let band = self
            .grid
            .windows(2)
            .zip(self.values.windows(2))
            .fold(T::zero(), |s, (g, v)| s + (g[1] - g[0]) * (v[0] + v[1]) / T::lit(2.0));
        band + self.tail.integral_from(self.band_max())
    }

    /// Principal-value transform `-(1/π) PV ∫ f(ω')/(ω' - ω) dω'` over the
    /// whole real line, by singularity subtraction and the trapezoid rule.
    /// For `f = Γ_R` this is `Γ_I`.
    pub fn hilbert(&self, omega: T) -> Result<T> {
        if omega < T::zero() {
            return self.hilbert(-omega).map(|v| -v);
        }
        if omega == T::zero() {
            return Ok(T::zero());
        }
        let w = self.band_max();
        if omega >= w {
            return Err(Error::OutOfRange { omega: omega.as_f64(), min: 0.0, max: w.as_f64() });
        }
        let (f0, slope) = self.interp.eval_with_slope(omega)?;
        let half = T::lit(2.0).recip();
        let coincide = T::lit(1e-12) * omega;
        let mut singular = T::zero();
        let mut regular = T::zero();
        let g = |x: T, f: T| -> (T, T) {
            let d = x - omega;
            let sub = if d.abs() <= coincide { slope } else { (f - f0) / d };
            (sub, f / (x + omega))
        };
        for k in 0..self.grid.len() - 1 {
            let h = self.grid[k + 1] - self.grid[k];
            let (s0, r0) = g(self.grid[k], self.values[k]);
            let (s1, r1) = g(self.grid[k + 1], self.values[k + 1]);
            singular = singular + h * half * (s0 + s1);
            regular = regular + h * half * (r0 + r1);
        }
        let log_term = f0 * ((w - omega) / omega).ln();
        let two_w = T::lit(2.0) * omega;
        let tail: T = self.tail.integrate_against(w, |x: T| two_w / (x * x - omega * omega))?;
        Ok(-(singular + log_term - regular + tail) / T::PI())
    }

    /// Cauchy integral `(1/(iπ)) ∫ f(ω')/(ω' - z) dω'` for `Im z > 0`, with
    /// piecewise-linear product integration in band and the fitted tail beyond.
    pub fn cauchy(&self, z: Cx<T>) -> Result<Cx<T>> {
        if !(z.im > T::zero()) {
            return Err(Error::Domain(format!("Cauchy continuation needs Im ω > 0, got {}", z.im)));
        }
        let w = self.band_max();
        let band = pl_cauchy(&self.grid, &self.values, z) - pl_cauchy(&self.grid, &self.values, -z);
        let two_z = z * T::lit(2.0);
        let tail: Cx<T> = self.tail.integrate_against(w, |x: T| two_z / (z * z * (-T::one()) + x * x))?;
        Ok((band + tail) / (i_unit::<T>() * T::PI()))
    }

    /// Cosine transform `∫₀^∞ f(ω) cos(ωt) dω`; Filon-type integration of the
    /// piecewise-linear samples, with the tail sampled for three more decades.
    pub fn fourier_cosine(&self, t: T) -> T {
        let vals: Vec<Cx<T>> = self.ext_values.iter().map(|v| cx(*v, T::zero())).collect();
        let band = filon_fourier(&self.ext_grid, &vals, t).re;
        let far = self.ext_grid[self.ext_grid.len() - 1];
        band + self.tail.integral_from(far) * sinc(far * t)
    }
}

fn sinc<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1e-4) {
        T::one() - x * x / T::lit(6.0)
    } else {
        x.sin() / x
    }
}

/// `∫ f(x)/(x - z) dx` over the grid for piecewise-linear `f` and `z` off the segment.
pub(crate) fn pl_cauchy<T: Real>(grid: &[T], values: &[T], z: Cx<T>) -> Cx<T> {
    let mut acc = cx(T::zero(), T::zero());
    for k in 0..grid.len() - 1 {
        let (a, b) = (grid[k], grid[k + 1]);
        let h = b - a;
        let slope = (values[k + 1] - values[k]) / h;
        let at_z = (z - a) * slope + values[k];
        let ratio = cx(h, T::zero()) / (cx(a, T::zero()) - z);
        acc = acc + at_z * ln_1p(ratio) + slope * h;
    }
    acc
}

/// `(∫₀¹ e^{zs} ds, ∫₀¹ s e^{zs} ds)`.
fn phi12<T: Real>(z: Cx<T>) -> (Cx<T>, Cx<T>) {
    if z.norm() < T::one() {
        // ∫₀¹ e^{zs} ds = Σ zⁿ/(n!(n+1)),  ∫₀¹ s e^{zs} ds = Σ zⁿ/(n!(n+2))
        let mut p1 = cx(T::zero(), T::zero());
        let mut p2 = cx(T::zero(), T::zero());
        let mut term = cx(T::one(), T::zero());
        for n in 0..24 {
            p1 = p1 + term / T::count(n + 1);
            p2 = p2 + term / T::count(n + 2);
            term = term * z / T::count(n + 1);
        }
        (p1, p2)
    } else {
        let e = z.exp();
        let one = cx(T::one(), T::zero());
        ((e - one) / z, ((z - one) * e + one) / (z * z))
    }
}

/// `∫ F(ω) e^{-iωt} dω` over the grid for piecewise-linear complex `F`.
pub(crate) fn filon_fourier<T: Real>(grid: &[T], values: &[Cx<T>], t: T) -> Cx<T> {
    let s = cx(T::zero(), -t);
    let mut acc = cx(T::zero(), T::zero());
    for k in 0..grid.len() - 1 {
        let h = grid[k + 1] - grid[k];
        let slope = (values[k + 1] - values[k]) / h;
        let (p1, p2) = phi12(s * h);
        let phase = (s * grid[k]).exp();
        acc = acc + phase * (values[k] * p1 * h + slope * p2 * (h * h));
    }
    acc
}

/// Dispersion-relation reconstruction of `Γ[ω] = Γ_R[ω] + iΓ_I[ω]` on the real axis.
pub fn kk_reconstruct<T: Real>(gamma_r: &EvenSpectrum<T>, omega: T) -> Result<Cx<T>> {
    let im = gamma_r.hilbert(omega)?;
    Ok(cx(gamma_r.value(omega), im))
}

/// Analytic continuation of `Γ` into `Im ω > 0` from `Γ_R` alone.
pub fn continue_upper_half<T: Real>(gamma_r: &EvenSpectrum<T>, omega: Cx<T>) -> Result<Cx<T>> {
    gamma_r.cauchy(omega)
}

/// Result of fitting `Γ ≈ ω_C/(-iω)` to the top decade of a curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CutoffFit {
    pub omega_c: f64,
    /// Relative rms misfit of the `1/ω` law over the fitted decade.
    pub residual: f64,
    pub no_cutoff: bool,
}

/// Least-squares estimate of `ω_C` from the `1/ω` high-frequency law.
pub fn fit_high_frequency_cutoff<T: Real>(gamma: &ResponseCurve<T>) -> Result<CutoffFit> {
    let grid = gamma.grid();
    let vals = gamma.values();
    let top = grid[grid.len() - 1];
    let start = top / T::lit(10.0);
    if grid[0] > start {
        return Err(Error::Fit("curve spans less than one decade".into()));
    }
    let half = T::lit(0.5);
    if let Some(k) = vals.iter().position(|z| z.norm() <= half) {
        if top < grid[k] * T::lit(10.0) {
            return Err(Error::Fit(format!(
                "curve must extend a decade beyond the knee at {}",
                grid[k].as_f64()
            )));
        }
    }
    let (mut num, mut den) = (T::zero(), T::zero());
    for (w, z) in grid.iter().zip(vals) {
        if *w >= start {
            num = num + z.im / *w;
            den = den + (*w * *w).recip();
        }
    }
    let c = num / den;
    let (mut miss, mut norm) = (T::zero(), T::zero());
    for (w, z) in grid.iter().zip(vals) {
        if *w >= start {
            miss = miss + (*z - cx(T::zero(), c / *w)).norm_sqr();
            norm = norm + z.norm_sqr();
        }
    }
    let residual = if norm > T::zero() { (miss / norm).sqrt().as_f64() } else { 0.0 };
    Ok(CutoffFit { omega_c: c.as_f64(), residual, no_cutoff: residual > 0.5 || !(c > T::zero()) })
}

/// Size of the negative-time part of a reconstructed causal response.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CausalityResidual {
    /// `max_{t<0} |f(t)| / max_{t>0} |f(t)|`.
    pub residual: f64,
    pub peak: f64,
    pub worst_time: f64,
}

/// Inverse transform of `Γ[ω]` at `±t` for `t` in `times` (all positive).
///
/// The `ω_C/(λ - iω)` asymptote (`λ = ω_C`), whose transform is the causal
/// `ω_C e^{-λt}θ(t)`, is removed before the numerical transform so the
/// remainder is absolutely integrable; real and imaginary remainders get
/// their own fitted tails.
pub fn gamma_causality<T: Real>(gamma: &ResponseCurve<T>, omega_c: T, times: &[T]) -> Result<CausalityResidual> {
    let lambda = omega_c;
    let grid = gamma.grid().to_vec();
    let rem: Vec<Cx<T>> = grid
        .iter()
        .zip(gamma.values())
        .map(|(w, z)| *z - cx(omega_c, T::zero()) / cx(lambda, -*w))
        .collect();
    let re = EvenSpectrum::new(grid.clone(), rem.iter().map(|z| z.re).collect())?;
    let im_tail = TailModel::fit(&grid, &rem.iter().map(|z| z.im).collect::<Vec<_>>())?;
    let g = re.ext_grid[re.grid.len()..].to_vec();
    let mut ext_grid = re.grid.clone();
    let mut ext_vals: Vec<Cx<T>> = re.values.iter().map(|v| cx(*v, T::zero())).collect();
    // the even spectrum may have prepended ω = 0; imaginary part is odd there
    let offset = re.grid.len() - grid.len();
    for (k, v) in ext_vals.iter_mut().enumerate() {
        if k >= offset {
            v.im = rem[k - offset].im;
        }
    }
    for x in g {
        ext_grid.push(x);
        ext_vals.push(cx(re.tail.value(x), im_tail.value(x)));
    }
    let transform = |t: T| -> T {
        let band = filon_fourier(&ext_grid, &ext_vals, t).re / T::PI();
        let asym = if t > T::zero() { omega_c * (-lambda * t).exp() } else { T::zero() };
        band + asym
    };
    let pos: Vec<T> = times.par_iter().map(|t| transform(*t).abs()).collect();
    let neg: Vec<T> = times.par_iter().map(|t| transform(-*t).abs()).collect();
    let peak = pos.iter().fold(T::zero(), |m, v| m.max(*v));
    let (worst_idx, worst) = neg
        .iter()
        .enumerate()
        .fold((0, T::zero()), |(bi, bv), (i, v)| if *v > bv { (i, *v) } else { (bi, bv) });
    Ok(CausalityResidual {
        residual: if peak > T::zero() { (worst / peak).as_f64() } else { 0.0 },
        peak: peak.as_f64(),
        worst_time: -times.get(worst_idx).map_or(0.0, |t| t.as_f64()),
    })
}

/// Memory kernel acting on the mirror's acceleration.
///
/// The motional force is split as `μ q''(t) + ∫₀^∞ κ(s) q''(t - s) ds`, where
/// `κ[ω] = (χ[ω] + μω²)/(-ω²)` and in the time domain `κ(t) = m τ Γ'(t)` for
/// `t > 0`. The kernel is stored as weights against hat functions centred on
/// `j dt`, `w_j = ∫ κ(s) h_j(s) ds`, which reduce to differences of cell
/// averages of `Γ` (with `Γ(0⁺) = ω_C`) and stay finite where `κ` is singular.
#[derive(Debug, Clone)]
pub struct TimeKernel<T> {
    /// Lags `j dt`.
    pub times: Vec<T>,
    /// Kernel samples `w_j / dt`.
    pub values: Vec<T>,
    /// Hat-function weights `w_j`.
    pub weights: Vec<T>,
    pub mu_subtracted: T,
    pub dt: T,
    pub window: T,
    pub omega_max: T,
    pub causality: CausalityResidual,
}

impl<T: Real> TimeKernel<T> {
    /// `∫₀^T κ dt`, which tends to `κ[0] = -μ` for long windows.
    pub fn integral(&self) -> T {
        self.weights.iter().fold(T::zero(), |s, w| s + *w)
    }

    /// Drops trailing cells whose magnitude is below `rel` times the peak.
    pub fn truncated(mut self, rel: T) -> Self {
        let peak = self.weights.iter().fold(T::zero(), |m, w| m.max(w.abs()));
        let keep = self.weights.iter().rposition(|w| w.abs() >= rel * peak).map_or(0, |k| k + 1);
        self.weights.truncate(keep);
        self.values.truncate(keep);
        self.times.truncate(keep);
        self.window = self.dt * T::count(keep);
        self
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Kernel with no memory, for the decoupled limit.
    pub fn zero(dt: T, mu: T) -> Self {
        Self {
            times: vec![],
            values: vec![],
            weights: vec![],
            mu_subtracted: mu,
            dt,
            window: T::zero(),
            omega_max: T::zero(),
            causality: CausalityResidual { residual: 0.0, peak: 0.0, worst_time: 0.0 },
        }
    }
}

/// Builds the acceleration memory kernel on `[0, window]` with step `dt`.
pub fn build_time_kernel<T: Real>(
    sus: &SusceptibilityResult<T>,
    mech: &MirrorMechanics<T>,
    window: T,
    dt: T,
) -> Result<TimeKernel<T>> {
    if !(dt > T::zero() && window >= dt) {
        return Err(Error::InvalidInput("kernel needs 0 < dt ≤ window".into()));
    }
    let mu = sus
        .mu
        .ok_or_else(|| Error::Regularization("no finite induced mass: χ + μω² cannot decay".into()))?;
    check_regularized_decay(&sus.chi, mu)?;

    let spectrum = EvenSpectrum::from_real_part(&sus.gamma)?;
    let omega_c = mu / (mech.mass * mech.tau);
    let n = (window / dt).round().to_usize().unwrap_or(0).max(1);
    let half = dt / T::lit(2.0);
    let two_over_pi = T::lit(2.0) / T::PI();
    let gamma_t: Vec<T> = (0..=2 * n)
        .into_par_iter()
        .map(|i| if i == 0 { omega_c } else { two_over_pi * spectrum.fourier_cosine(half * T::count(i)) })
        .collect();
    // cell averages of Γ by Simpson's rule
    let six = T::lit(6.0);
    let cell: Vec<T> = (0..n)
        .map(|j| (gamma_t[2 * j] + T::lit(4.0) * gamma_t[2 * j + 1] + gamma_t[2 * j + 2]) / six)
        .collect();
    let scale = mech.mass * mech.tau;
    let weights: Vec<T> = (0..n)
        .map(|j| scale * if j == 0 { cell[0] - omega_c } else { cell[j] - cell[j - 1] })
        .collect();
    let times: Vec<T> = (0..n).map(|j| dt * T::count(j)).collect();
    let values = weights.iter().map(|w| *w / dt).collect();

    let probe = crate::num::linear_grid(dt, window.max(dt * T::lit(2.0)), 200.min(n.max(2)));
    let causality = gamma_causality(&sus.gamma, omega_c, &probe)?;

    Ok(TimeKernel {
        times,
        values,
        weights,
        mu_subtracted: mu,
        dt,
        window: dt * T::count(n),
        omega_max: spectrum.band_max(),
        causality,
    })
}

fn check_regularized_decay<T: Real>(chi: &ResponseCurve<T>, mu: T) -> Result<()> {
    let grid = chi.grid();
    let top = grid[grid.len() - 1];
    let lo = top / T::lit(10.0);
    if grid[0] > lo || !(top > T::zero()) {
        return Err(Error::Regularization("χ must be sampled over at least one decade".into()));
    }
    let k = grid.partition_point(|w| *w < lo);
    let reg = |i: usize| {
        let w = grid[i];
        ((chi.values()[i] + cx(mu * w * w, T::zero())) / (w * w)).norm()
    };
    let (a, b) = (reg(k), reg(grid.len() - 1));
    if !(b < T::lit(0.5) * a) {
        return Err(Error::Regularization(format!(
            "(χ + μω²)/ω² does not decay across [{}, {}] (ratio {})",
            grid[k].as_f64(),
            top.as_f64(),
            (b / a).as_f64()
        )));
    }
    Ok(())
}

/// Discrepancy between the two sides of `χ(t) - χ(-t) = 2 m τ Γ_R'''(t)`.
#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    /// `max |lhs - rhs| / max |rhs|` over the probe times.
    pub defect: f64,
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
}

/// Evaluates both sides of the linear-response consistency condition on the
/// band-limited spectrum (Gaussian band window `exp(-(5ω/W)²)` applied to both).
///
/// The left side is the trapezoid inverse transform of the complex `χ[ω]` over
/// the mirrored grid; the right side multiplies `Γ_R` by `(-iω)³` and uses
/// Simpson's rule. `gamma` must be sampled on a uniform grid starting at 0
/// with an even number of intervals.
pub fn consistency_check<T: Real>(gamma: &ResponseCurve<T>, mech: &MirrorMechanics<T>, times: &[T]) -> Result<ConsistencyReport> {
    let grid = gamma.grid();
    let n = grid.len();
    if n < 5 || grid[0] != T::zero() || !(n - 1).is_multiple_of(2) {
        return Err(Error::InvalidInput("consistency check needs a uniform grid from 0 with an even interval count".into()));
    }
    let h = grid[1] - grid[0];
    let uniform = grid.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= T::lit(1e-9) * h);
    if !uniform {
        return Err(Error::InvalidInput("consistency check needs a uniform grid".into()));
    }
    let top = grid[n - 1];
    let band = top / T::lit(5.0);
    let window = |w: T| (-(w / band) * (w / band)).exp();
    let mtau = mech.mass * mech.tau;

    let chi: Vec<Cx<T>> = grid
        .iter()
        .zip(gamma.values())
        .map(|(w, g)| crate::susceptibility::chi_from_gamma(mech, *w, *g) * window(*w))
        .collect();
    let mut sym_w = Vec::with_capacity(2 * n);
    let mut sym_v = Vec::with_capacity(2 * n);
    for k in (1..n).rev() {
        sym_w.push(-grid[k]);
        sym_v.push(chi[k].conj());
    }
    for k in 0..n {
        sym_w.push(grid[k]);
        sym_v.push(chi[k]);
    }
    let two_pi = T::lit(2.0) * T::PI();
    let chi_t = |t: T| -> Cx<T> {
        let mut acc = cx(T::zero(), T::zero());
        let last = sym_w.len() - 1;
        for (k, (w, v)) in sym_w.iter().zip(&sym_v).enumerate() {
            let weight = if k == 0 || k == last { h / T::lit(2.0) } else { h };
            let (s, c) = (*w * t).sin_cos();
            acc = acc + *v * cx(c, -s) * weight;
        }
        acc / two_pi
    };
    let rhs_at = |t: T| -> T {
        let mut acc = T::zero();
        for (k, (w, g)) in grid.iter().zip(gamma.values()).enumerate() {
            let coef = if k == 0 || k == n - 1 {
                T::one()
            } else if k % 2 == 1 {
                T::lit(4.0)
            } else {
                T::lit(2.0)
            };
            acc = acc + coef * *w * *w * *w * g.re * window(*w) * (*w * t).sin();
        }
        T::lit(2.0) * mtau * acc * h / T::lit(3.0) / T::PI()
    };
    let lhs: Vec<T> = times.par_iter().map(|t| (chi_t(*t) - chi_t(-*t)).re).collect();
    let rhs: Vec<T> = times.par_iter().map(|t| rhs_at(*t)).collect();
    let scale = rhs.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let worst = lhs.iter().zip(&rhs).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
    let defect = if scale > T::zero() {
        (worst / scale).as_f64()
    } else if worst > T::zero() {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(ConsistencyReport {
        defect,
        times: times.iter().map(|t| t.as_f64()).collect(),
        lhs: lhs.iter().map(|v| v.as_f64()).collect(),
        rhs: rhs.iter().map(|v| v.as_f64()).collect(),
    })
}
