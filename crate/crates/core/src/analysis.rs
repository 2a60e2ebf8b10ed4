//! Mechanical impedance, stability and passivity of the suspended mirror.

use rayon::prelude::*;
use serde::Serialize;

use crate::dispersion::{kk_reconstruct, pl_cauchy, EvenSpectrum};
use crate::error::{Error, Result};
use crate::num::{cx, i_unit, log_grid, Cx, Real};
use crate::scattering::{MirrorModel, ModelKind};
use crate::susceptibility::{gamma, gamma_lorentzian_closed_form, GammaSettings};

/// Mass, spring constant `k = mω₀²` and vacuum coupling time `τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorMechanics<T> {
    pub mass: T,
    pub stiffness: T,
    pub tau: T,
}

impl<T: Real> MirrorMechanics<T> {
    /// `τ = 0` is accepted and describes the decoupled oscillator.
    pub fn new(mass: T, stiffness: T, tau: T) -> Result<Self> {
        if !(mass > T::zero() && mass.is_finite()) {
            return Err(Error::InvalidInput(format!("mass must be positive, got {mass}")));
        }
        if !(stiffness >= T::zero() && stiffness.is_finite()) {
            return Err(Error::InvalidInput(format!("stiffness must be nonnegative, got {stiffness}")));
        }
        if !(tau >= T::zero() && tau.is_finite()) {
            return Err(Error::InvalidInput(format!("coupling time must be nonnegative, got {tau}")));
        }
        Ok(Self { mass, stiffness, tau })
    }

    pub fn omega0(&self) -> T {
        (self.stiffness / self.mass).sqrt()
    }
}

/// `Z[ω] = (k - mω² - χ[ω])/(-iω)` with `Γ` from direct quadrature.
pub fn impedance<T: Real>(
    model: &MirrorModel<T>,
    mech: &MirrorMechanics<T>,
    omega: T,
    settings: &GammaSettings<T>,
) -> Result<Cx<T>> {
    if omega == T::zero() {
        return zero_frequency(mech);
    }
    let g = gamma(model, omega, settings)?.value;
    Ok(impedance_from_gamma(mech, omega, g))
}

fn zero_frequency<T: Real>(mech: &MirrorMechanics<T>) -> Result<Cx<T>> {
    if mech.stiffness > T::zero() {
        Err(Error::Pole { omega: 0.0 })
    } else {
        Ok(cx(T::zero(), T::zero()))
    }
}

pub(crate) fn impedance_from_gamma<T: Real>(mech: &MirrorMechanics<T>, omega: T, g: Cx<T>) -> Cx<T> {
    let chi = i_unit::<T>() * g * (mech.mass * mech.tau * omega * omega * omega);
    (cx(mech.stiffness - mech.mass * omega * omega, T::zero()) - chi) / cx(T::zero(), -omega)
}

/// `Y[ω] = 1/Z[ω]`.
pub fn admittance<T: Real>(
    model: &MirrorModel<T>,
    mech: &MirrorMechanics<T>,
    omega: T,
    settings: &GammaSettings<T>,
) -> Result<Cx<T>> {
    let z = impedance(model, mech, omega, settings)?;
    invert(mech, omega, z)
}

fn invert<T: Real>(mech: &MirrorMechanics<T>, omega: T, z: Cx<T>) -> Result<Cx<T>> {
    let w = omega.abs();
    let scale = if w > T::zero() { mech.mass * w + mech.stiffness / w } else { mech.mass };
    if z.norm() < T::lit(1e-12) * scale {
        return Err(Error::NearSingular { re: omega.as_f64(), im: 0.0 });
    }
    Ok(z.inv())
}

/// How `Γ` is evaluated on and off the real axis.
#[derive(Debug, Clone)]
pub enum GammaSource<T> {
    /// `Γ ≡ 1`.
    Unity,
    /// Closed form of the Lorentzian mirror.
    Lorentzian { cutoff: T },
    /// Dispersion relations applied to sampled `Γ_R`.
    Spectrum(EvenSpectrum<T>),
}

/// Impedance evaluator bound to a mirror model and its mechanics.
#[derive(Debug, Clone)]
pub struct Impedance<T> {
    pub mech: MirrorMechanics<T>,
    pub kind: ModelKind,
    pub source: GammaSource<T>,
    /// Reflection cutoff, if finite.
    pub omega_c: Option<T>,
}

impl<T: Real> Impedance<T> {
    /// Tabulated models are continued from `Γ_R` sampled at the table
    /// frequencies; the caller supplies `ω_C` (from the cutoff integral).
    pub fn new(model: &MirrorModel<T>, mech: MirrorMechanics<T>, omega_c: Option<T>) -> Result<Self> {
        let source = match model {
            MirrorModel::Perfect => GammaSource::Unity,
            MirrorModel::Lorentzian { cutoff } => GammaSource::Lorentzian { cutoff: *cutoff },
            MirrorModel::Tabulated(table) => {
                let settings = GammaSettings::default();
                let grid: Vec<T> = table.frequencies().iter().copied().filter(|w| *w >= T::zero()).collect();
                let vals = grid
                    .par_iter()
                    .map(|w| gamma(model, *w, &settings).map(|g| g.value.re))
                    .collect::<Result<Vec<_>>>()?;
                GammaSource::Spectrum(EvenSpectrum::new(grid, vals)?)
            }
        };
        Ok(Self { mech, kind: model.kind(), source, omega_c })
    }

    pub fn from_spectrum(spectrum: EvenSpectrum<T>, mech: MirrorMechanics<T>, omega_c: Option<T>) -> Self {
        Self { mech, kind: ModelKind::Tabulated, source: GammaSource::Spectrum(spectrum), omega_c }
    }

    /// `μ = m ω_C τ`.
    pub fn mu(&self) -> Option<T> {
        self.omega_c.map(|wc| self.mech.mass * wc * self.mech.tau)
    }

    /// `Γ[ω]` on the real axis.
    pub fn gamma_real(&self, omega: T) -> Result<Cx<T>> {
        match &self.source {
            GammaSource::Unity => Ok(cx(T::one(), T::zero())),
            GammaSource::Lorentzian { cutoff } => gamma_lorentzian_closed_form(*cutoff, cx(omega, T::zero())),
            GammaSource::Spectrum(s) => kk_reconstruct(s, omega),
        }
    }

    /// `Γ{p} = Γ[ip]` for `Re p > 0`.
    pub fn gamma_laplace(&self, p: Cx<T>) -> Result<Cx<T>> {
        if !(p.re > T::zero()) {
            return Err(Error::Domain(format!("Laplace variable needs Re p > 0, got {}", p.re)));
        }
        match &self.source {
            GammaSource::Unity => Ok(cx(T::one(), T::zero())),
            GammaSource::Lorentzian { cutoff } => gamma_lorentzian_closed_form(*cutoff, i_unit::<T>() * p),
            GammaSource::Spectrum(s) => s.cauchy(i_unit::<T>() * p),
        }
    }

    pub fn at(&self, omega: T) -> Result<Cx<T>> {
        if omega == T::zero() {
            return zero_frequency(&self.mech);
        }
        Ok(impedance_from_gamma(&self.mech, omega, self.gamma_real(omega)?))
    }

    pub fn admittance(&self, omega: T) -> Result<Cx<T>> {
        invert(&self.mech, omega, self.at(omega)?)
    }

    /// `Z{p} = (k + mp² - χ{p})/p` with `χ{p} = mτp³Γ{p}`.
    pub fn laplace(&self, p: Cx<T>) -> Result<Cx<T>> {
        let g = self.gamma_laplace(p)?;
        let m = &self.mech;
        let chi = g * p * p * p * (m.mass * m.tau);
        Ok((p * p * m.mass + m.stiffness - chi) / p)
    }

    /// The motional part `-χ{p}/p` alone.
    pub fn motional_laplace(&self, p: Cx<T>) -> Result<Cx<T>> {
        let g = self.gamma_laplace(p)?;
        Ok(-(g * p * p * (self.mech.mass * self.mech.tau)))
    }

    /// Modulus scale used by the zero-on-contour and root tolerances.
    fn scale(&self, p: Cx<T>) -> T {
        let r = p.norm();
        self.mech.mass * r + self.mech.stiffness / r
    }
}

/// `Z{p}` by direct evaluation (see [`Impedance::laplace`]).
pub fn impedance_laplace<T: Real>(imp: &Impedance<T>, p: Cx<T>) -> Result<Cx<T>> {
    imp.laplace(p)
}

/// Rectangle `Re p ∈ [δ, re_max]`, `|Im p| ≤ im_max`.
#[derive(Debug, Clone, Copy)]
pub struct Contour<T> {
    pub delta: T,
    pub re_max: T,
    pub im_max: T,
    /// Initial number of segments per edge.
    pub initial_segments: usize,
    /// Largest phase change accepted between neighbouring samples.
    pub max_phase_step: T,
}

impl<T: Real> Contour<T> {
    pub fn new(delta: T, re_max: T, im_max: T) -> Self {
        Self { delta, re_max, im_max, initial_segments: 64, max_phase_step: T::FRAC_PI_4() }
    }

    /// Covers `10/τ`, `10 ω_C` and `10 ω₀` (and at least 10) in both directions.
    pub fn covering(mech: &MirrorMechanics<T>, omega_c: Option<T>) -> Self {
        let ten = T::lit(10.0);
        let mut r = ten.max(ten * mech.omega0());
        if mech.tau > T::zero() {
            r = r.max(ten / mech.tau);
        }
        if let Some(wc) = omega_c {
            r = r.max(ten * wc);
        }
        Self::new(T::lit(1e-6), r, r)
    }

    fn corners(&self) -> [Cx<T>; 4] {
        [
            cx(self.delta, -self.im_max),
            cx(self.re_max, -self.im_max),
            cx(self.re_max, self.im_max),
            cx(self.delta, self.im_max),
        ]
    }
}

/// Winding of `Z{p}` around the contour.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ZeroCount {
    pub count: i64,
    /// Accumulated phase divided by `2π` before rounding.
    pub winding: f64,
    pub samples: usize,
}

/// Counts zeros of `Z{p}` inside the contour by the argument principle.
pub fn count_rhp_zeros<T: Real>(imp: &Impedance<T>, contour: &Contour<T>) -> Result<ZeroCount> {
    let corners = contour.corners();
    let mut total = T::zero();
    let mut samples = 0usize;
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        let n = contour.initial_segments.max(1);
        let pts: Vec<Cx<T>> = (0..=n)
            .map(|j| {
                let s = T::count(j) / T::count(n);
                a * (T::one() - s) + b * s
            })
            .collect();
        let vals = pts.par_iter().map(|p| checked_value(imp, *p)).collect::<Result<Vec<_>>>()?;
        samples += vals.len();
        for j in 0..n {
            total = total + phase_change(imp, contour, pts[j], pts[j + 1], vals[j], vals[j + 1], 0, &mut samples)?;
        }
    }
    let winding = total / (T::lit(2.0) * T::PI());
    Ok(ZeroCount {
        count: winding.round().to_i64().unwrap_or(0),
        winding: winding.as_f64(),
        samples,
    })
}

fn checked_value<T: Real>(imp: &Impedance<T>, p: Cx<T>) -> Result<Cx<T>> {
    let z = imp.laplace(p)?;
    if !(z.norm() >= T::lit(1e-12) * imp.scale(p)) {
        return Err(Error::Contour { re: p.re.as_f64(), im: p.im.as_f64() });
    }
    Ok(z)
}

#[allow(clippy::too_many_arguments)]
fn phase_change<T: Real>(
    imp: &Impedance<T>,
    contour: &Contour<T>,
    a: Cx<T>,
    b: Cx<T>,
    za: Cx<T>,
    zb: Cx<T>,
    depth: usize,
    samples: &mut usize,
) -> Result<T> {
    let step = (zb / za).arg();
    if step.abs() < contour.max_phase_step {
        return Ok(step);
    }
    if depth > 60 {
        return Err(Error::Contour { re: a.re.as_f64(), im: a.im.as_f64() });
    }
    let mid = (a + b) / T::lit(2.0);
    let zm = checked_value(imp, mid)?;
    *samples += 1;
    Ok(phase_change(imp, contour, a, mid, za, zm, depth + 1, samples)?
        + phase_change(imp, contour, mid, b, zm, zb, depth + 1, samples)?)
}

/// A refined zero of `Z{p}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Root {
    pub re: f64,
    pub im: f64,
    /// `|Z{p*}|`.
    pub residual: f64,
}

/// Secant iteration on `Z{p}` from `seed`.
pub fn refine_root<T: Real>(imp: &Impedance<T>, seed: Cx<T>) -> Result<Root> {
    let mut p0 = seed;
    let mut p1 = seed * T::lit(1.0 + 1e-4) + cx(T::zero(), T::lit(1e-7) * seed.norm());
    if !(p0.re > T::zero()) {
        return Err(Error::Domain(format!("root seed needs Re p > 0, got {}", seed.re)));
    }
    let mut z0 = imp.laplace(p0)?;
    let mut z1 = imp.laplace(p1)?;
    for _ in 0..100 {
        if z1.norm() < T::lit(1e-10) * imp.mech.mass * p1.norm() {
            return Ok(Root { re: p1.re.as_f64(), im: p1.im.as_f64(), residual: z1.norm().as_f64() });
        }
        let denom = z1 - z0;
        if denom.norm() == T::zero() {
            break;
        }
        let p2 = p1 - z1 * (p1 - p0) / denom;
        if !(p2.re > T::zero()) || !p2.re.is_finite() {
            return Err(Error::Convergence { iterations: 0 });
        }
        p0 = p1;
        z0 = z1;
        p1 = p2;
        z1 = imp.laplace(p1)?;
    }
    Err(Error::Convergence { iterations: 100 })
}

/// Sign changes of `Z{p}` along real `p` in `[lo, hi]`, refined by bisection.
pub fn real_axis_roots<T: Real>(imp: &Impedance<T>, lo: T, hi: T, samples: usize) -> Result<Vec<T>> {
    let grid = log_grid(lo, hi, samples.max(2));
    let vals = grid
        .par_iter()
        .map(|p| imp.laplace(cx(*p, T::zero())).map(|z| z.re))
        .collect::<Result<Vec<_>>>()?;
    let mut roots = Vec::new();
    for k in 0..grid.len() - 1 {
        if vals[k] == T::zero() {
            roots.push(grid[k]);
            continue;
        }
        if vals[k].signum() != vals[k + 1].signum() && vals[k + 1] != T::zero() {
            let (mut a, mut b, mut fa) = (grid[k], grid[k + 1], vals[k]);
            for _ in 0..200 {
                let m = (a + b) / T::lit(2.0);
                if m <= a || m >= b {
                    break;
                }
                let fm = imp.laplace(cx(m, T::zero()))?.re;
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push((a + b) / T::lit(2.0));
        }
    }
    Ok(roots)
}

/// Probe points `p = ρ e^{iθ}` in the open right half plane.
#[derive(Debug, Clone)]
pub struct ProbeSet<T> {
    pub points: Vec<Cx<T>>,
}

impl<T: Real> ProbeSet<T> {
    /// `moduli` log-spaced moduli in `[lo, hi]` times `arguments` angles
    /// strictly inside `(-π/2, π/2)`.
    pub fn polar(lo: T, hi: T, moduli: usize, arguments: usize) -> Self {
        let rs = log_grid(lo, hi, moduli);
        let mut points = Vec::with_capacity(moduli * arguments);
        for r in rs {
            for j in 0..arguments {
                let theta = -T::FRAC_PI_2() + T::PI() * (T::count(j) + T::lit(0.5)) / T::count(arguments);
                points.push(Cx::from_polar(r, theta));
            }
        }
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl<T: Real> Default for ProbeSet<T> {
    /// 40 moduli over `[1e-3, 1e3]` times 25 arguments.
    fn default() -> Self {
        Self::polar(T::lit(1e-3), T::lit(1e3), 40, 25)
    }
}

/// Smallest `Re Z{p}` found and where.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MinReZ {
    pub value: f64,
    pub p_re: f64,
    pub p_im: f64,
}

/// Passivity verdict over a probe set.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PassivityProbe {
    pub min_re_z: MinReZ,
    /// Smallest `Re Z{p} / (m|p|)`.
    pub min_normalized: f64,
    pub positive_real: bool,
}

/// Evaluates `f(p)` over the probe set and checks `Re f ≥ -1e-9 m|p|`.
pub fn passivity_probe<T, F>(mech: &MirrorMechanics<T>, probes: &ProbeSet<T>, f: F) -> Result<PassivityProbe>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<Cx<T>> + Sync,
{
    let vals = probes.points.par_iter().map(|p| f(*p)).collect::<Result<Vec<_>>>()?;
    let mut best = (T::infinity(), T::infinity(), cx(T::zero(), T::zero()));
    for (p, z) in probes.points.iter().zip(&vals) {
        let normalized = z.re / (mech.mass * p.norm());
        if normalized < best.1 {
            best = (z.re, normalized, *p);
        }
    }
    Ok(PassivityProbe {
        min_re_z: MinReZ { value: best.0.as_f64(), p_re: best.2.re.as_f64(), p_im: best.2.im.as_f64() },
        min_normalized: best.1.as_f64(),
        positive_real: best.1 >= T::lit(-1e-9),
    })
}

/// Passivity of the full impedance `Z{p}`.
pub fn passivity_check<T: Real>(imp: &Impedance<T>, probes: &ProbeSet<T>) -> Result<PassivityProbe> {
    passivity_probe(&imp.mech, probes, |p| imp.laplace(p))
}

/// `Z{p}` from the spectral representation
/// `∫dΦ(ρ)(1 - ipρ)/(p - iρ) + k/p + p(m - μ)` with `dΦ = Z_R[ρ]dρ/(π(1+ρ²))`.
///
/// Folding `±ρ` gives `(2p/π)∫₀^∞ Z_R[ρ]/(p² + ρ²) dρ`; the band part uses
/// piecewise-linear product integration of `Z_R = mτρ²Γ_R` and the rest the
/// fitted tail of `Γ_R`.
pub fn spectral_representation<T: Real>(
    gamma_r: &EvenSpectrum<T>,
    mech: &MirrorMechanics<T>,
    mu: Option<T>,
    p: Cx<T>,
) -> Result<Cx<T>> {
    let mu = mu.ok_or_else(|| Error::Divergent("spectral measure is not finite: no induced mass".into()))?;
    if !(p.re > T::zero()) {
        return Err(Error::Domain(format!("spectral representation needs Re p > 0, got {}", p.re)));
    }
    let mtau = mech.mass * mech.tau;
    let measure = if mtau == T::zero() {
        cx(T::zero(), T::zero())
    } else {
        let grid = gamma_r.grid();
        let zr: Vec<T> = grid.iter().zip(gamma_r.values()).map(|(r, g)| *r * *r * *g).collect();
        let ip = i_unit::<T>() * p;
        // 1/(ρ² + p²) = (1/(2ip)) [1/(ρ - ip) - 1/(ρ + ip)]
        let band = (pl_cauchy(grid, &zr, ip) - pl_cauchy(grid, &zr, -ip)) / (ip * T::lit(2.0));
        let tail: Cx<T> = gamma_r
            .tail()
            .integrate_against(gamma_r.band_max(), |r: T| cx(r * r, T::zero()) / (p * p + r * r))?;
        (band + tail) * p * (T::lit(2.0) * mtau / T::PI())
    };
    Ok(measure + cx(mech.stiffness, T::zero()) / p + p * (mech.mass - mu))
}

/// Serialized stability summary.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub model: ModelKind,
    pub tau_omega: f64,
    pub k_over_m: f64,
    #[serde(rename = "omega_C")]
    pub omega_c: Option<f64>,
    pub mu_over_m: Option<f64>,
    pub rhp_zero_count: i64,
    pub roots: Vec<Root>,
    pub passive: bool,
    #[serde(rename = "min_ReZ")]
    pub min_re_z: MinReZ,
}

/// Zero count, root refinement from real-axis seeds, and the passivity probe.
pub fn stability_report<T: Real>(imp: &Impedance<T>, contour: &Contour<T>, probes: &ProbeSet<T>) -> Result<StabilityReport> {
    let count = count_rhp_zeros(imp, contour)?;
    let seeds = real_axis_roots(imp, contour.delta.max(T::lit(1e-6)), contour.re_max, 400)?;
    let mut roots: Vec<Root> = Vec::new();
    for s in seeds {
        if let Ok(r) = refine_root(imp, cx(s, T::zero())) {
            let dup = roots.iter().any(|q| ((q.re - r.re).powi(2) + (q.im - r.im).powi(2)).sqrt() < 1e-8 * r.re.abs().max(1.0));
            if !dup {
                roots.push(r);
            }
        }
    }
    let probe = passivity_check(imp, probes)?;
    let m = imp.mech.mass;
    Ok(StabilityReport {
        model: imp.kind,
        tau_omega: imp.mech.tau.as_f64(),
        k_over_m: (imp.mech.stiffness / m).as_f64(),
        omega_c: imp.omega_c.map(|w| w.as_f64()),
        mu_over_m: imp.mu().map(|mu| (mu / m).as_f64()),
        rhp_zero_count: count.count,
        roots,
        passive: count.count == 0 && probe.positive_real,
        min_re_z: probe.min_re_z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free(tau: f64) -> MirrorMechanics<f64> {
        MirrorMechanics::new(1.0, 0.0, tau).unwrap()
    }

    #[test]
    fn mechanics_validation() {
        assert!(MirrorMechanics::new(0.0, 0.0, 1e-3).is_err());
        assert!(MirrorMechanics::new(1.0, -1.0, 1e-3).is_err());
        assert!(MirrorMechanics::new(1.0, 0.0, -1e-3).is_err());
        assert_eq!(MirrorMechanics::new(2.0, 8.0, 0.0).unwrap().omega0(), 2.0);
    }

    #[test]
    fn perfect_mirror_impedance() {
        let m = free(0.01);
        let z = impedance(&MirrorModel::Perfect, &m, 3.0, &GammaSettings::default()).unwrap();
        assert!((z - cx(0.01 * 9.0, -3.0)).norm() < 1e-12);
        let imp = Impedance::new(&MirrorModel::Perfect, m, None).unwrap();
        let p = cx(2.0, 1.0);
        let expected = p * (cx(1.0, 0.0) - p * 0.01);
        assert!((imp.laplace(p).unwrap() - expected).norm() < 1e-12);
    }

    #[test]
    fn zero_frequency_handling() {
        let spring = MirrorMechanics::new(1.0, 1.0, 0.0).unwrap();
        let s = GammaSettings::default();
        assert!(matches!(impedance(&MirrorModel::Perfect, &spring, 0.0, &s), Err(Error::Pole { .. })));
        assert_eq!(impedance(&MirrorModel::Perfect, &free(1e-3), 0.0, &s).unwrap(), cx(0.0, 0.0));
    }

    #[test]
    fn decoupled_resonance_is_singular() {
        let m = MirrorMechanics::new(1.0, 4.0, 0.0).unwrap();
        let s = GammaSettings::default();
        let z = impedance(&MirrorModel::Perfect, &m, 1.0, &s).unwrap();
        assert!((z - cx(0.0, 3.0)).norm() < 1e-14);
        assert!(matches!(admittance(&MirrorModel::Perfect, &m, 2.0, &s), Err(Error::NearSingular { .. })));
    }

    #[test]
    fn laplace_is_real_on_real_axis() {
        let imp = Impedance::new(&MirrorModel::lorentzian(1.0), MirrorMechanics::new(1.0, 0.5, 1e-3).unwrap(), Some(3.0)).unwrap();
        for p in [1e-3_f64, 0.3, 2.0, 50.0] {
            assert!(imp.laplace(cx(p, 0.0)).unwrap().im.abs() < 1e-10);
        }
        let z: Cx<f64> = imp.laplace(cx(1e-6, 0.0)).unwrap();
        assert!((z.re * 1e-6 - 0.5).abs() < 1e-6);
    }

    #[test]
    fn probe_set_shape() {
        let p = ProbeSet::<f64>::default();
        assert_eq!(p.len(), 1000);
        assert!(p.points.iter().all(|z| z.re > 0.0));
    }

    #[test]
    fn bare_mass_spectral_representation() {
        let g: Vec<f64> = log_grid(1e-3, 1e3, 200);
        let v = vec![0.0; 200];
        let s = EvenSpectrum::new(g, v).unwrap();
        let p = cx(0.7, 0.2);
        let z = spectral_representation(&s, &free(0.0), Some(0.0), p).unwrap();
        assert_eq!(z, p);
        assert!(matches!(spectral_representation(&s, &free(1e-3), None, p), Err(Error::Divergent(_))));
    }
}
