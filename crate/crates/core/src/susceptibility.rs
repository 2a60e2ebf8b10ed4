//! Motional susceptibility of a partially transmitting mirror.
//!
//! `χ[ω] = i m τ ω³ Γ[ω]`, where the cutoff function `Γ` is the weighted
//! convolution of the two-photon amplitude `α[ω-ω', ω']` over `[0, ω]`.

use std::cell::RefCell;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::MirrorMechanics;
use crate::dispersion::TailModel;
use crate::error::{Error, Result};
use crate::num::{cx, i_unit, is_strictly_increasing, log_grid, Cx, Real};
use crate::quadrature::{integrate, QuadSettings};
use crate::scattering::MirrorModel;

/// Which physical quantity a [`ResponseCurve`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Gamma,
    Chi,
    Impedance,
    Admittance,
    Reflectivity,
    Transmissivity,
}

/// Symmetry of a sampled response under `ω → -ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    /// `f[-ω] = conj(f[ω])`: the time-domain function is real.
    HermitianReal,
}

/// Complex response sampled on an increasing frequency grid.
#[derive(Debug, Clone)]
pub struct ResponseCurve<T> {
    grid: Vec<T>,
    values: Vec<Cx<T>>,
    pub quantity: Quantity,
    pub parity: Parity,
}

impl<T: Real> ResponseCurve<T> {
    pub fn new(grid: Vec<T>, values: Vec<Cx<T>>, quantity: Quantity) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), found: values.len() });
        }
        if grid.is_empty() || !is_strictly_increasing(&grid) {
            return Err(Error::InvalidInput("response grid must be nonempty and strictly increasing".into()));
        }
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput("response values must be finite".into()));
        }
        Ok(Self { grid, values, quantity, parity: Parity::HermitianReal })
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn values(&self) -> &[Cx<T>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn real_parts(&self) -> Vec<T> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn imag_parts(&self) -> Vec<T> {
        self.values.iter().map(|z| z.im).collect()
    }

    /// Linear interpolation; negative frequencies use the parity metadata.
    pub fn value_at(&self, omega: T) -> Result<Cx<T>> {
        let (lo, hi) = (self.grid[0], self.grid[self.grid.len() - 1]);
        if omega < lo && lo >= T::zero() {
            let mirrored = -omega;
            if mirrored >= lo && mirrored <= hi {
                return self.value_at(mirrored).map(|z| match self.parity {
                    Parity::HermitianReal => z.conj(),
                });
            }
        }
        if !(omega >= lo && omega <= hi) {
            return Err(Error::OutOfRange { omega: omega.as_f64(), min: lo.as_f64(), max: hi.as_f64() });
        }
        let k = self.grid.partition_point(|w| *w <= omega).saturating_sub(1).min(self.grid.len().saturating_sub(2));
        if self.grid.len() == 1 {
            return Ok(self.values[0]);
        }
        let t = (omega - self.grid[k]) / (self.grid[k + 1] - self.grid[k]);
        Ok(self.values[k] * (T::one() - t) + self.values[k + 1] * t)
    }

    /// Samples on the mirrored grid `[-ω_n, …, -ω_1, (0,) ω_1, …, ω_n]`
    /// built from the stored nonnegative half.
    pub fn symmetric(&self) -> (Vec<T>, Vec<Cx<T>>) {
        let mut grid = Vec::with_capacity(2 * self.len());
        let mut vals = Vec::with_capacity(2 * self.len());
        for (w, z) in self.grid.iter().zip(&self.values).rev() {
            if *w > T::zero() {
                grid.push(-*w);
                vals.push(z.conj());
            }
        }
        for (w, z) in self.grid.iter().zip(&self.values) {
            if *w >= T::zero() {
                grid.push(*w);
                vals.push(*z);
            }
        }
        (grid, vals)
    }
}

/// Two-photon amplitude `α[ω, ω'] = 1 - s[ω]s[ω'] + r[ω]r[ω']`.
pub fn alpha<T: Real>(model: &MirrorModel<T>, omega: T, omega_p: T) -> Result<Cx<T>> {
    let (r1, r2) = (model.reflectivity_real(omega)?, model.reflectivity_real(omega_p)?);
    let (s1, s2) = (model.transmissivity_real(omega)?, model.transmissivity_real(omega_p)?);
    Ok(cx(T::one(), T::zero()) - s1 * s2 + r1 * r2)
}

/// Companion amplitude `β[ω, ω'] = s[ω]r[ω'] - r[ω]s[ω']`.
pub fn beta<T: Real>(model: &MirrorModel<T>, omega: T, omega_p: T) -> Result<Cx<T>> {
    let (r1, r2) = (model.reflectivity_real(omega)?, model.reflectivity_real(omega_p)?);
    let (s1, s2) = (model.transmissivity_real(omega)?, model.transmissivity_real(omega_p)?);
    Ok(s1 * r2 - r1 * s2)
}

/// Quadrature controls for the cutoff function.
#[derive(Debug, Clone, Copy)]
pub struct GammaSettings<T> {
    /// Absolute tolerance on `ω³Γ` is this factor times `ω³`.
    pub abs_tol_scale: T,
    pub rel_tol: T,
    pub max_panels: usize,
}

impl<T: Real> Default for GammaSettings<T> {
    fn default() -> Self {
        Self { abs_tol_scale: T::lit(1e-10), rel_tol: T::lit(1e-12), max_panels: 4000 }
    }
}

/// `Γ[ω]` with its quadrature error bound.
#[derive(Debug, Clone, Copy)]
pub struct GammaValue<T> {
    pub value: Cx<T>,
    pub error: T,
}

/// Cutoff function `Γ[ω]` by adaptive quadrature of the convolution integral.
///
/// `Γ[0]` is returned as `r[0]²`. Negative frequencies come from
/// `Γ[-ω] = conj(Γ[ω])`.
pub fn gamma<T: Real>(model: &MirrorModel<T>, omega: T, settings: &GammaSettings<T>) -> Result<GammaValue<T>> {
    if omega < T::zero() {
        return gamma(model, -omega, settings).map(|g| GammaValue { value: g.value.conj(), error: g.error });
    }
    if omega == T::zero() {
        let r0 = model.reflectivity_real(T::zero())?;
        return Ok(GammaValue { value: r0 * r0, error: T::zero() });
    }
    if let MirrorModel::Tabulated(t) = model {
        let (_, hi) = t.range();
        if omega > hi {
            return Err(Error::OutOfRange { omega: omega.as_f64(), min: 0.0, max: hi.as_f64() });
        }
    }
    let w3 = omega * omega * omega;
    let three = T::lit(3.0);
    let failure = RefCell::new(None);
    let integrand = |wp: T| -> Cx<T> {
        let wq = (omega - wp).max(T::zero());
        match alpha(model, wq, wp) {
            Ok(a) => a * (three * wq * wp),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                cx(T::nan(), T::nan())
            }
        }
    };
    // resolve the structure near both ends of long intervals
    let breaks: Vec<T> = [1e-3, 1e-2, 0.1, 0.5, 0.9, 0.99, 0.999].iter().map(|f| omega * T::lit(*f)).collect();
    let qs = QuadSettings {
        abs_tol: settings.abs_tol_scale * w3,
        rel_tol: settings.rel_tol,
        max_panels: settings.max_panels,
    };
    let result = integrate(integrand, T::zero(), omega, &breaks, &qs);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let q = result?;
    Ok(GammaValue { value: q.value / w3, error: q.error / w3 })
}

/// Closed-form `Γ` of the Lorentzian mirror at any frequency off the
/// logarithm's branch cut (which lies in the lower half plane).
pub fn gamma_lorentzian_closed_form<T: Real>(cutoff: T, omega: Cx<T>) -> Result<Cx<T>> {
    let x = i_unit::<T>() * omega / cutoff;
    let one = cx(T::one(), T::zero());
    let six = T::lit(6.0);
    if x.norm() < T::lit(0.5) {
        // Γ = 6 Σ xⁿ / ((n+2)(n+3))
        let mut sum = cx(T::zero(), T::zero());
        let mut pow = one;
        for n in 0..64 {
            let d = T::count((n + 2) * (n + 3));
            sum = sum + pow / d;
            pow = pow * x;
        }
        return Ok(sum * six);
    }
    let arg = one - x;
    if arg.re <= T::zero() && arg.im.abs() <= T::lit(1e-12) * arg.norm() {
        return Err(Error::Domain(format!(
            "frequency {} + {}i lies on the branch cut of the Lorentzian cutoff function",
            omega.re, omega.im
        )));
    }
    let bracket = -x + x * x / T::lit(2.0) - arg * arg.ln();
    Ok(bracket * six / (-(x * x * x)))
}

/// Motional susceptibility `χ[ω] = i m τ ω³ Γ[ω]`.
pub fn chi<T: Real>(model: &MirrorModel<T>, mech: &MirrorMechanics<T>, omega: T, settings: &GammaSettings<T>) -> Result<Cx<T>> {
    let g = gamma(model, omega, settings)?;
    Ok(chi_from_gamma(mech, omega, g.value))
}

pub(crate) fn chi_from_gamma<T: Real>(mech: &MirrorMechanics<T>, omega: T, gamma: Cx<T>) -> Cx<T> {
    i_unit::<T>() * gamma * (mech.mass * mech.tau * omega * omega * omega)
}

/// Controls for the reflection-cutoff integral.
#[derive(Debug, Clone, Copy)]
pub struct CutoffSettings<T> {
    /// Upper end of the numerically integrated band (clipped to tabulated range).
    pub band_max: T,
    /// Samples in the top decade used to fit the tail.
    pub tail_points: usize,
    pub rel_tol: T,
    pub gamma: GammaSettings<T>,
}

impl<T: Real> Default for CutoffSettings<T> {
    fn default() -> Self {
        Self { band_max: T::lit(1e3), tail_points: 24, rel_tol: T::lit(1e-8), gamma: GammaSettings::default() }
    }
}

/// Reflection cutoff `ω_C = ∫ dω/π Γ_R[ω]` with the tail split out.
#[derive(Debug, Clone, Copy)]
pub struct CutoffEstimate<T> {
    pub omega_c: T,
    /// `∫₀^W Γ_R` over the integrated band.
    pub band_integral: T,
    /// Analytic integral of the fitted tail beyond the band.
    pub tail_integral: T,
    pub tail_fraction: T,
    pub band_max: T,
    pub tail: TailModel<T>,
}

/// Computes `ω_C` by nested quadrature over `[0, W]` plus a fitted
/// `(a + b ln ω)/ω²` tail. A non-integrable `Γ_R` yields [`Error::Divergent`].
pub fn reflection_cutoff<T: Real>(model: &MirrorModel<T>, settings: &CutoffSettings<T>) -> Result<CutoffEstimate<T>> {
    let w = match model.max_frequency() {
        Some(hi) => hi.min(settings.band_max),
        None => settings.band_max,
    };
    let ten = T::lit(10.0);
    let tail_grid = log_grid(w / ten, w, settings.tail_points.max(3));
    let tail_vals = tail_grid
        .iter()
        .map(|x| gamma(model, *x, &settings.gamma).map(|g| g.value.re))
        .collect::<Result<Vec<_>>>()?;
    let (first, last) = (tail_vals[0], tail_vals[tail_vals.len() - 1]);
    let growth = (w * last) / ((w / ten) * first);
    if !(first > T::zero()) || !(growth < T::lit(0.5)) {
        return Err(Error::Divergent(format!(
            "Γ_R does not decay faster than 1/ω over [{}, {}]: ω·Γ_R ratio {}",
            (w / ten).as_f64(),
            w.as_f64(),
            growth.as_f64()
        )));
    }
    let tail = TailModel::fit(&tail_grid, &tail_vals)?;

    let failure = RefCell::new(None);
    let integrand = |x: T| -> T {
        match gamma(model, x, &settings.gamma) {
            Ok(g) => g.value.re,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                T::nan()
            }
        }
    };
    let breaks: Vec<T> = (1..=7).map(|k| w / ten.powi(k)).collect();
    let qs = QuadSettings { abs_tol: T::lit(1e-14), rel_tol: settings.rel_tol, max_panels: 2000 };
    let band = integrate(integrand, T::zero(), w, &breaks, &qs);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let band_integral = band?.value;
    let tail_integral = tail.integral_from(w);
    let total = band_integral + tail_integral;
    Ok(CutoffEstimate {
        omega_c: total * T::lit(2.0) / T::PI(),
        band_integral,
        tail_integral,
        tail_fraction: tail_integral / total,
        band_max: w,
        tail,
    })
}

/// High-frequency induced mass `μ = m ω_C τ`.
pub fn induced_mass<T: Real>(mech: &MirrorMechanics<T>, omega_c: T) -> T {
    mech.mass * omega_c * mech.tau
}

/// Γ and χ sampled on a grid together with the cutoff and induced mass.
#[derive(Debug, Clone)]
pub struct SusceptibilityResult<T> {
    pub gamma: ResponseCurve<T>,
    pub chi: ResponseCurve<T>,
    /// `None` when the cutoff integral diverges (perfect mirror).
    pub omega_c: Option<T>,
    pub mu: Option<T>,
    pub cutoff: Option<CutoffEstimate<T>>,
    /// Per-point quadrature error bound on Γ.
    pub quad_errors: Vec<T>,
}

impl<T: Real> SusceptibilityResult<T> {
    pub fn cutoff_divergent(&self) -> bool {
        self.omega_c.is_none()
    }
}

/// Evaluates Γ and χ on `grid` in parallel and computes `ω_C` and `μ`.
pub fn compute_susceptibility<T: Real>(
    model: &MirrorModel<T>,
    mech: &MirrorMechanics<T>,
    grid: &[T],
    cutoff: &CutoffSettings<T>,
) -> Result<SusceptibilityResult<T>> {
    let points = grid
        .par_iter()
        .map(|w| gamma(model, *w, &cutoff.gamma))
        .collect::<Result<Vec<_>>>()?;
    let gamma_vals: Vec<Cx<T>> = points.iter().map(|g| g.value).collect();
    let chi_vals: Vec<Cx<T>> = grid.iter().zip(&gamma_vals).map(|(w, g)| chi_from_gamma(mech, *w, *g)).collect();
    let estimate = match reflection_cutoff(model, cutoff) {
        Ok(e) => Some(e),
        Err(Error::Divergent(_)) => None,
        Err(e) => return Err(e),
    };
    let omega_c = estimate.map(|e| e.omega_c);
    Ok(SusceptibilityResult {
        gamma: ResponseCurve::new(grid.to_vec(), gamma_vals, Quantity::Gamma)?,
        chi: ResponseCurve::new(grid.to_vec(), chi_vals, Quantity::Chi)?,
        omega_c,
        mu: omega_c.map(|wc| induced_mass(mech, wc)),
        cutoff: estimate,
        quad_errors: points.iter().map(|g| g.error).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::ScatteringTable;
    use proptest::prelude::*;

    fn lorentz() -> MirrorModel<f64> {
        MirrorModel::lorentzian(1.0)
    }

    #[test]
    fn alpha_reference_values() {
        let p = MirrorModel::<f64>::Perfect;
        assert_eq!(alpha(&p, 0.3, 7.0).unwrap(), cx(2.0, 0.0));
        assert!((alpha(&lorentz(), 0.0, 0.0).unwrap() - cx(2.0, 0.0)).norm() < 1e-15);
        assert!((alpha(&lorentz(), 1.0, 1.0).unwrap() - cx(1.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn beta_reference_values() {
        assert_eq!(beta(&MirrorModel::<f64>::Perfect, 0.3, 2.0).unwrap(), cx(0.0, 0.0));
        assert_eq!(beta(&lorentz(), 0.7, 0.7).unwrap(), cx(0.0, 0.0));
        assert!((beta(&lorentz(), 1.0, 0.0).unwrap() - cx(-0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn gamma_at_zero_is_r0_squared() {
        let g = gamma(&lorentz(), 0.0, &GammaSettings::default()).unwrap();
        assert_eq!(g.value, cx(1.0, 0.0));
    }

    /// `6[-x + x²/2 - (1-x)ln(1-x)]/(-x³)` with `x = iω`, straight from the complex logarithm.
    fn lorentz_oracle(w: f64) -> Cx<f64> {
        let x = Cx::new(0.0, w);
        let one = Cx::new(1.0, 0.0);
        (-x + x * x / 2.0 - (one - x) * (one - x).ln()) * 6.0 / -(x * x * x)
    }

    #[test]
    fn gamma_at_knee_matches_hand_evaluation() {
        let g = gamma(&lorentz(), 1.0, &GammaSettings::default()).unwrap().value;
        assert!((g - lorentz_oracle(1.0)).norm() < 1e-10, "{g}");
        assert!((g.re - 0.7922).abs() < 1e-3 && (g.im - 0.3672).abs() < 1e-3, "{g}");
    }

    #[test]
    fn perfect_mirror_gamma_is_one() {
        for w in [1e-3, 0.5, 10.0, 1e4] {
            let g = gamma(&MirrorModel::<f64>::Perfect, w, &GammaSettings::default()).unwrap();
            assert!((g.value - cx(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn closed_form_series_and_branch() {
        let g0 = gamma_lorentzian_closed_form(1.0_f64, cx(0.0, 0.0)).unwrap();
        assert_eq!(g0, cx(1.0, 0.0));
        let w = 1e-3;
        let x = cx(0.0, w);
        let series = cx(1.0, 0.0) + x / 2.0 + x * x * 0.3;
        assert!((gamma_lorentzian_closed_form(1.0, cx(w, 0.0)).unwrap() - series).norm() < 1e-9);
        assert!(matches!(gamma_lorentzian_closed_form(1.0_f64, cx(0.0, -3.0)), Err(Error::Domain(_))));
        // the series and the logarithmic form agree where they hand over
        let a = gamma_lorentzian_closed_form(1.0_f64, cx(0.4999, 0.0)).unwrap();
        let b = gamma_lorentzian_closed_form(1.0_f64, cx(0.5001, 0.0)).unwrap();
        assert!((a - b).norm() < 1e-3);
    }

    #[test]
    fn chi_reference_values() {
        let mech = MirrorMechanics::new(1.0, 0.0, 1e-3).unwrap();
        let s = GammaSettings::default();
        let c = chi(&MirrorModel::Perfect, &mech, 1.0, &s).unwrap();
        assert!((c - cx(0.0, 1e-3)).norm() < 1e-15);
        let c = chi(&lorentz(), &mech, 1.0, &s).unwrap();
        assert!((c - i_unit::<f64>() * lorentz_oracle(1.0) * 1e-3).norm() < 1e-13);
        assert!((c - cx(-3.672e-4, 7.922e-4)).norm() < 1e-6);
        assert_eq!(chi(&lorentz(), &mech, 0.0, &s).unwrap(), cx(0.0, 0.0));
    }

    #[test]
    fn chi_vanishes_to_second_order_at_origin() {
        let mech = MirrorMechanics::new(1.0, 0.0, 1e-3).unwrap();
        let s = GammaSettings::default();
        let h = 1e-3;
        let f = |w: f64| chi(&lorentz(), &mech, w, &s).unwrap();
        let d1 = (f(h) - f(-h)) / (2.0 * h);
        let d2 = (f(h) - f(0.0) * 2.0 + f(-h)) / (h * h);
        assert!(d1.norm() < 1e-8 && d2.norm() < 1e-5, "{d1} {d2}");
    }

    #[test]
    fn perfect_mirror_cutoff_diverges() {
        let r = reflection_cutoff(&MirrorModel::<f64>::Perfect, &CutoffSettings::default());
        assert!(matches!(r, Err(Error::Divergent(_))));
    }

    #[test]
    fn induced_mass_values() {
        let mech = MirrorMechanics::<f64>::new(1.0, 0.0, 1e-3).unwrap();
        assert!((induced_mass(&mech, 3.0) - 3e-3).abs() < 1e-18);
        let boundary = MirrorMechanics::<f64>::new(1.0, 0.0, 1.0 / 3.0).unwrap();
        assert!((induced_mass(&boundary, 3.0) - 1.0).abs() < 1e-15);
        assert_eq!(induced_mass(&mech, 0.0), 0.0);
    }

    #[test]
    fn tabulated_range_is_enforced() {
        let t = ScatteringTable::sample(&lorentz(), log_grid(1e-3, 10.0, 100)).unwrap();
        let m = MirrorModel::Tabulated(t);
        assert!(gamma(&m, 20.0, &GammaSettings::default()).is_err());
    }

    #[test]
    fn response_curve_parity() {
        let c = ResponseCurve::new(vec![0.0, 1.0, 2.0], vec![cx(1.0, 0.0), cx(0.5, 0.5), cx(0.2, 0.4)], Quantity::Gamma).unwrap();
        assert_eq!(c.value_at(-1.0).unwrap(), cx(0.5, -0.5));
        assert_eq!(c.value_at(1.5).unwrap(), cx(0.35, 0.45));
        assert!(c.value_at(3.0).is_err());
        let (g, v) = c.symmetric();
        assert_eq!(g, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(v[0], cx(0.2, -0.4));
        assert!(ResponseCurve::new(vec![1.0, 0.0], vec![cx(0.0, 0.0); 2], Quantity::Chi).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn unitarity_identity_lorentzian(w in -50.0f64..50.0, wp in -50.0f64..50.0) {
            let a = alpha(&lorentz(), w, wp).unwrap();
            let b = beta(&lorentz(), w, wp).unwrap();
            prop_assert!((2.0 * a.re - a.norm_sqr() - b.norm_sqr()).abs() < 1e-12);
            let b_swapped = beta(&lorentz(), wp, w).unwrap();
            prop_assert!((b + b_swapped).norm() < 1e-15);
        }

        #[test]
        fn gamma_parity(w in 0.01f64..20.0) {
            let s = GammaSettings::default();
            let plus = gamma(&lorentz(), w, &s).unwrap().value;
            let minus = gamma(&lorentz(), -w, &s).unwrap().value;
            prop_assert!((plus - minus.conj()).norm() < 1e-12);
            prop_assert!(plus.re >= -1e-9);
        }
    }
}
