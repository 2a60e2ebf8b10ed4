//! Time-domain integration of the mirror's equation of motion.

use serde::Serialize;

use crate::analysis::MirrorMechanics;
use crate::dispersion::TimeKernel;
use crate::error::{Error, Result};
use crate::quadrature::gl10_rule;
use crate::num::Real;

/// Applied force `F_a(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ForceProfile<T> {
    Zero,
    GaussianPulse { amplitude: T, center: T, width: T },
    Step { amplitude: T, start: T },
    /// `A cos(ωt)` switched on smoothly over `ramp` (a `sin²` envelope).
    Sinusoid { amplitude: T, omega: T, ramp: T },
    /// Samples at `start + j dt`, linearly interpolated, zero outside.
    Custom { start: T, dt: T, samples: Vec<T> },
}

impl<T: Real> ForceProfile<T> {
    pub fn value(&self, t: T) -> T {
        match self {
            Self::Zero => T::zero(),
            Self::GaussianPulse { amplitude, center, width } => {
                let x = (t - *center) / *width;
                *amplitude * (-x * x / T::lit(2.0)).exp()
            }
            Self::Step { amplitude, start } => {
                if t >= *start {
                    *amplitude
                } else {
                    T::zero()
                }
            }
            Self::Sinusoid { amplitude, omega, ramp } => {
                let env = if t <= T::zero() {
                    T::zero()
                } else if t < *ramp {
                    let s = (T::FRAC_PI_2() * t / *ramp).sin();
                    s * s
                } else {
                    T::one()
                };
                *amplitude * env * (*omega * t).cos()
            }
            Self::Custom { start, dt, samples } => {
                let x = (t - *start) / *dt;
                if x < T::zero() || samples.is_empty() {
                    return T::zero();
                }
                let k = x.floor().to_usize().unwrap_or(usize::MAX);
                if k + 1 < samples.len() {
                    let f = x - T::count(k);
                    samples[k] * (T::one() - f) + samples[k + 1] * f
                } else if k + 1 == samples.len() && x == T::count(k) {
                    samples[k]
                } else {
                    T::zero()
                }
            }
        }
    }
}

/// Initial position, velocity and acceleration.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InitialState<T> {
    pub q: T,
    pub v: T,
    pub a: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Fourth-order Runge–Kutta on `(q, v, a)` with the local `mτq'''` force.
    Rk4Local,
    /// Energy-conserving midpoint scheme with the acceleration memory kernel.
    MidpointMemory,
    /// Runge–Kutta on `(q, v)` plus exponential memory modes.
    Rk4Modal,
}

/// Sampled motion on a uniform time grid.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub q: Vec<T>,
    pub v: Vec<T>,
    pub a: Vec<T>,
    pub applied_force: Vec<T>,
    /// Motional force; per node, or per step (index `n` is the step ending at
    /// `t_n`) when `step_forces` is set.
    pub motional_force: Vec<T>,
    pub step_forces: bool,
    pub dt: T,
    pub method: Method,
    pub kernel_window: Option<T>,
    pub diverged: bool,
    pub divergence_time: Option<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn with_capacity(n: usize, dt: T, method: Method, step_forces: bool) -> Self {
        Self {
            times: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            v: Vec::with_capacity(n),
            a: Vec::with_capacity(n),
            applied_force: Vec::with_capacity(n),
            motional_force: Vec::with_capacity(n),
            step_forces,
            dt,
            method,
            kernel_window: None,
            diverged: false,
            divergence_time: None,
        }
    }

    fn push(&mut self, t: T, q: T, v: T, a: T, fa: T, fm: T) {
        self.times.push(t);
        self.q.push(q);
        self.v.push(v);
        self.a.push(a);
        self.applied_force.push(fa);
        self.motional_force.push(fm);
    }
}

const BLOWUP: f64 = 1e100;

fn blown<T: Real>(xs: &[T]) -> bool {
    xs.iter().any(|x| !(x.abs() < T::lit(BLOWUP)))
}

fn steps<T: Real>(t_end: T, dt: T) -> Result<usize> {
    if !(dt > T::zero() && t_end > T::zero() && t_end.is_finite()) {
        return Err(Error::InvalidInput("need 0 < dt and a finite positive duration".into()));
    }
    Ok((t_end / dt).round().to_usize().unwrap_or(0).max(1))
}

/// Integrates `kq + mq'' = F_a + mτq'''` with `a' = (kq + ma - F_a)/(mτ)`.
///
/// With `τ = 0` this is the plain oscillator on `(q, v)`. Runs whose state
/// exceeds `1e100` stop there and are marked diverged.
pub fn simulate_perfect<T: Real>(
    mech: &MirrorMechanics<T>,
    force: &ForceProfile<T>,
    init: InitialState<T>,
    t_end: T,
    dt: T,
) -> Result<Trajectory<T>> {
    let n = steps(t_end, dt)?;
    let (m, k, tau) = (mech.mass, mech.stiffness, mech.tau);
    let mut traj = Trajectory::with_capacity(n + 1, dt, Method::Rk4Local, false);
    let half = dt / T::lit(2.0);
    let sixth = dt / T::lit(6.0);
    let two = T::lit(2.0);

    if tau == T::zero() {
        let rhs = |t: T, s: [T; 2]| [s[1], (force.value(t) - k * s[0]) / m];
        let mut s = [init.q, init.v];
        for i in 0..=n {
            let t = dt * T::count(i);
            let a = rhs(t, s)[1];
            if blown(&s) {
                traj.diverged = true;
                traj.divergence_time = Some(t);
                break;
            }
            traj.push(t, s[0], s[1], a, force.value(t), T::zero());
            if i == n {
                break;
            }
            let k1 = rhs(t, s);
            let k2 = rhs(t + half, [s[0] + half * k1[0], s[1] + half * k1[1]]);
            let k3 = rhs(t + half, [s[0] + half * k2[0], s[1] + half * k2[1]]);
            let k4 = rhs(t + dt, [s[0] + dt * k3[0], s[1] + dt * k3[1]]);
            for j in 0..2 {
                s[j] = s[j] + sixth * (k1[j] + two * k2[j] + two * k3[j] + k4[j]);
            }
        }
        return Ok(traj);
    }

    let mtau = m * tau;
    let rhs = |t: T, s: [T; 3]| [s[1], s[2], (k * s[0] + m * s[2] - force.value(t)) / mtau];
    let mut s = [init.q, init.v, init.a];
    for i in 0..=n {
        let t = dt * T::count(i);
        if blown(&s) {
            traj.diverged = true;
            traj.divergence_time = Some(t);
            break;
        }
        let jerk = rhs(t, s)[2];
        traj.push(t, s[0], s[1], s[2], force.value(t), mtau * jerk);
        if i == n {
            break;
        }
        let k1 = rhs(t, s);
        let step = |s: [T; 3], d: [T; 3], h: T| [s[0] + h * d[0], s[1] + h * d[1], s[2] + h * d[2]];
        let k2 = rhs(t + half, step(s, k1, half));
        let k3 = rhs(t + half, step(s, k2, half));
        let k4 = rhs(t + dt, step(s, k3, dt));
        for j in 0..3 {
            s[j] = s[j] + sixth * (k1[j] + two * k2[j] + two * k3[j] + k4[j]);
        }
    }
    Ok(traj)
}

/// Integrates `kq + (m - μ)q'' = F_a + ∫κ(s) q''(t - s) ds` with the
/// kernel's step.
///
/// Each step balances forces averaged over the step: velocity and position
/// follow the trapezoid rule, the acceleration is constant within a step,
/// and the memory force is the hat-weighted sum over past step
/// accelerations. Multiplying the balance by the mean velocity telescopes the
/// kinetic and potential energies exactly, so the energy ledger closes to
/// rounding error. The mirror is held at `q₀` with `a = 0` before `t = 0`.
pub fn simulate_memory<T: Real>(
    mech: &MirrorMechanics<T>,
    kernel: &TimeKernel<T>,
    force: &ForceProfile<T>,
    init: InitialState<T>,
    t_end: T,
) -> Result<Trajectory<T>> {
    let (m, k) = (mech.mass, mech.stiffness);
    let mu = kernel.mu_subtracted;
    let eff = m - mu;
    if !(eff > T::zero()) {
        return Err(Error::Configuration(format!(
            "memory integrator needs μ < m (μ/m = {}); use the modal or local integrator",
            (mu / m).as_f64()
        )));
    }
    let dt = kernel.dt;
    let n = steps(t_end, dt)?;
    let w = &kernel.weights;
    let w0 = w.first().copied().unwrap_or(T::zero());
    let lhs = eff + k * dt * dt / T::lit(4.0) - w0;
    if !(lhs > T::zero()) {
        return Err(Error::Configuration("step too large for the memory kernel".into()));
    }
    let mut traj = Trajectory::with_capacity(n + 1, dt, Method::MidpointMemory, true);
    traj.kernel_window = Some(kernel.window);
    let two = T::lit(2.0);
    let mut abar: Vec<T> = Vec::with_capacity(n + 1);
    let (mut q, mut v) = (init.q, init.v);
    let mut f_prev = force.value(T::zero());
    traj.push(T::zero(), q, v, T::zero(), f_prev, T::zero());
    abar.push(T::zero());
    for i in 1..=n {
        let t = dt * T::count(i);
        let f_now = force.value(t);
        let fbar = (f_prev + f_now) / two;
        // memory from earlier steps: abar[i - j] for j ≥ 1 (abar[0] is the rest history)
        let mut hist = T::zero();
        for (j, wj) in w.iter().enumerate().skip(1) {
            if j >= i {
                break;
            }
            hist = hist + *wj * abar[i - j];
        }
        let dv = dt * (fbar - k * q - k * dt * v / two + hist) / lhs;
        let a_step = dv / dt;
        let v_new = v + dv;
        let q_new = q + dt * (v + v_new) / two;
        let memory = w0 * a_step + hist;
        abar.push(a_step);
        q = q_new;
        v = v_new;
        f_prev = f_now;
        if blown(&[q, v, a_step]) {
            traj.diverged = true;
            traj.divergence_time = Some(t);
            break;
        }
        traj.push(t, q, v, a_step, f_now, mu * a_step + memory);
    }
    Ok(traj)
}

/// Exponential-mode expansion of the Lorentzian mirror's memory,
/// `Γ(t) = 6Ω ∫₀¹ (1 - u) e^{-Ωt/u} du`, discretized by composite
/// Gauss–Legendre panels in `u`. Modes faster than `1/dt` are folded into the
/// mass.
#[derive(Debug, Clone)]
pub struct LorentzianModes<T> {
    /// `(g_j, λ_j)` with `Γ(t) ≈ Σ g_j e^{-λ_j t}`.
    pub modes: Vec<(T, T)>,
}

impl<T: Real> LorentzianModes<T> {
    pub fn new(cutoff: T) -> Self {
        let mut modes = Vec::new();
        let mut edges: Vec<T> = (0..=8).rev().map(|e| T::lit(10f64.powi(-e))).collect();
        edges.insert(0, T::zero());
        for pair in edges.windows(2) {
            for (u, wt) in gl10_rule(pair[0], pair[1]) {
                modes.push((T::lit(6.0) * cutoff * wt * (T::one() - u), cutoff / u));
            }
        }
        Self { modes }
    }

    /// `Γ(0⁺) = Σ g_j`, the discrete reflection cutoff.
    pub fn omega_c(&self) -> T {
        self.modes.iter().fold(T::zero(), |s, m| s + m.0)
    }

    /// `Γ{p} = Σ g_j/(p + λ_j)`.
    pub fn laplace(&self, p: T) -> T {
        self.modes.iter().fold(T::zero(), |s, m| s + m.0 / (p + m.1))
    }
}

/// Integrates the Lorentzian mirror with its memory written as exponential
/// modes `y_j' = q'' - λ_j y_j`, so that `F_m = μq'' - mτ Σ g_j λ_j y_j`
/// with `μ = mτ Σ g_j`. No sign condition on `m - μ` is needed, which makes
/// this the integrator for runs with `μ > m`.
pub fn simulate_modal<T: Real>(
    mech: &MirrorMechanics<T>,
    modes: &LorentzianModes<T>,
    force: &ForceProfile<T>,
    init: InitialState<T>,
    t_end: T,
    dt: T,
) -> Result<Trajectory<T>> {
    let n = steps(t_end, dt)?;
    let (m, k) = (mech.mass, mech.stiffness);
    let mtau = m * mech.tau;
    let slow: Vec<(T, T)> = modes.modes.iter().copied().filter(|(_, l)| *l * dt <= T::one()).collect();
    let slow_sum = slow.iter().fold(T::zero(), |s, x| s + x.0);
    let eff = m - mtau * slow_sum;
    if eff == T::zero() {
        return Err(Error::Configuration("effective mass vanishes for this step".into()));
    }
    let accel = |t: T, s: &[T]| -> T {
        let mut mem = T::zero();
        for (j, (g, l)) in slow.iter().enumerate() {
            mem = mem + *g * *l * s[2 + j];
        }
        (force.value(t) - k * s[0] - mtau * mem) / eff
    };
    let rhs = |t: T, s: &[T]| -> Vec<T> {
        let a = accel(t, s);
        let mut d = Vec::with_capacity(s.len());
        d.push(s[1]);
        d.push(a);
        for (j, (_, l)) in slow.iter().enumerate() {
            d.push(a - *l * s[2 + j]);
        }
        d
    };
    let dim = 2 + slow.len();
    let mut s = vec![T::zero(); dim];
    s[0] = init.q;
    s[1] = init.v;
    let mut traj = Trajectory::with_capacity(n + 1, dt, Method::Rk4Modal, false);
    let half = dt / T::lit(2.0);
    let sixth = dt / T::lit(6.0);
    let two = T::lit(2.0);
    let axpy = |s: &[T], d: &[T], h: T| -> Vec<T> { s.iter().zip(d).map(|(x, y)| *x + h * *y).collect() };
    for i in 0..=n {
        let t = dt * T::count(i);
        if blown(&s) {
            traj.diverged = true;
            traj.divergence_time = Some(t);
            break;
        }
        let a = accel(t, &s);
        let fa = force.value(t);
        traj.push(t, s[0], s[1], a, fa, m * a + k * s[0] - fa);
        if i == n {
            break;
        }
        let k1 = rhs(t, &s);
        let k2 = rhs(t + half, &axpy(&s, &k1, half));
        let k3 = rhs(t + half, &axpy(&s, &k2, half));
        let k4 = rhs(t + dt, &axpy(&s, &k3, dt));
        for j in 0..dim {
            s[j] = s[j] + sixth * (k1[j] + two * k2[j] + two * k3[j] + k4[j]);
        }
    }
    Ok(traj)
}

/// Work and energy bookkeeping `W_a = ΔE + W_m` along a trajectory.
#[derive(Debug, Clone)]
pub struct EnergyLedger<T> {
    pub times: Vec<T>,
    /// Work done by the applied force.
    pub work_applied: Vec<T>,
    /// `½kq² + ½mv²`.
    pub energy: Vec<T>,
    /// Energy given to the vacuum, `W_a - ΔE`.
    pub work_motional: Vec<T>,
    /// `W_a - ΔE + ∫F_m v`, with `F_m` from the integrator.
    pub residual: Vec<T>,
}

impl<T: Real> EnergyLedger<T> {
    pub fn max_energy(&self) -> T {
        self.energy.iter().fold(T::zero(), |m, e| m.max(e.abs()))
    }

    pub fn max_residual(&self) -> T {
        self.residual.iter().fold(T::zero(), |m, r| m.max(r.abs()))
    }

    pub fn final_applied(&self) -> T {
        self.work_applied.last().copied().unwrap_or(T::zero())
    }

    pub fn final_motional(&self) -> T {
        self.work_motional.last().copied().unwrap_or(T::zero())
    }
}

/// Cumulative `∫f` on a uniform grid with the four-point interval rule,
/// one-sided at the ends; trapezoid below four samples.
fn cumulative<T: Real>(f: &[T], h: T) -> Vec<T> {
    let n = f.len();
    let mut out = vec![T::zero(); n];
    if n < 4 {
        for i in 1..n {
            out[i] = out[i - 1] + h * (f[i - 1] + f[i]) / T::lit(2.0);
        }
        return out;
    }
    let c = |a: f64, b: f64, cc: f64, d: f64, i: usize| {
        T::lit(a) * f[i] + T::lit(b) * f[i + 1] + T::lit(cc) * f[i + 2] + T::lit(d) * f[i + 3]
    };
    let h24 = h / T::lit(24.0);
    for i in 1..n {
        let piece = if i == 1 {
            c(9.0, 19.0, -5.0, 1.0, 0)
        } else if i == n - 1 {
            c(1.0, -5.0, 19.0, 9.0, n - 4)
        } else {
            c(-1.0, 13.0, 13.0, -1.0, i - 2)
        };
        out[i] = out[i - 1] + h24 * piece;
    }
    out
}

/// Accumulates `∫F_a v` and `∫F_m v`. Step-force trajectories use
/// `dt · v̄ · F̄` per step, matching their scheme; node-sampled ones use a
/// fourth-order cumulative rule.
pub fn energy_ledger<T: Real>(traj: &Trajectory<T>, mech: &MirrorMechanics<T>) -> Result<EnergyLedger<T>> {
    let n = traj.times.len();
    for len in [traj.q.len(), traj.v.len(), traj.applied_force.len(), traj.motional_force.len()] {
        if len != n {
            return Err(Error::LengthMismatch { expected: n, found: len });
        }
    }
    let two = T::lit(2.0);
    let energy: Vec<T> = traj
        .q
        .iter()
        .zip(&traj.v)
        .map(|(q, v)| (mech.stiffness * *q * *q + mech.mass * *v * *v) / two)
        .collect();
    let (wa, wm_direct) = if traj.step_forces {
        let mut wa = vec![T::zero(); n];
        let mut wm = vec![T::zero(); n];
        for i in 1..n {
            let h = traj.times[i] - traj.times[i - 1];
            let vbar = (traj.v[i - 1] + traj.v[i]) / two;
            let fbar = (traj.applied_force[i - 1] + traj.applied_force[i]) / two;
            wa[i] = wa[i - 1] + h * vbar * fbar;
            wm[i] = wm[i - 1] - h * vbar * traj.motional_force[i];
        }
        (wa, wm)
    } else {
        let pa: Vec<T> = traj.applied_force.iter().zip(&traj.v).map(|(f, v)| *f * *v).collect();
        let pm: Vec<T> = traj.motional_force.iter().zip(&traj.v).map(|(f, v)| -(*f * *v)).collect();
        (cumulative(&pa, traj.dt), cumulative(&pm, traj.dt))
    };
    let e0 = energy.first().copied().unwrap_or(T::zero());
    let wm: Vec<T> = wa.iter().zip(&energy).map(|(w, e)| *w - (*e - e0)).collect();
    let residual = wm.iter().zip(&wm_direct).map(|(a, b)| *a - *b).collect();
    Ok(EnergyLedger { times: traj.times.clone(), work_applied: wa, energy, work_motional: wm, residual })
}

/// Fitted exponential growth rate with a 95% interval.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GrowthRate {
    pub rate: f64,
    pub lower: f64,
    pub upper: f64,
    pub e_folds: f64,
}

/// Log-linear regression of `|a(t)|` over the part of the run where
/// `ln|a|` lies in the top 90% of its range.
pub fn fit_runaway_rate<T: Real>(traj: &Trajectory<T>) -> Result<GrowthRate> {
    let logs: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(&traj.a)
        .filter(|(_, a)| a.abs() > T::zero() && a.is_finite())
        .map(|(t, a)| (t.as_f64(), a.abs().as_f64().ln()))
        .collect();
    if logs.len() < 3 {
        return Err(Error::Fit("too few nonzero samples".into()));
    }
    let lo = logs.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi = logs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    // envelope growth between the first and last tenth of the run
    let tenth = (logs.len() / 10).max(1);
    let early = logs[..tenth].iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let late = logs[logs.len() - tenth..].iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let e_folds = late - early;
    if e_folds < 3.0 || logs[logs.len() - 1].1 < hi - 1.0 {
        return Err(Error::Fit(format!("insufficient growth: {e_folds:.2} e-folds")));
    }
    let threshold = lo + 0.1 * (hi - lo);
    let start = logs.iter().rposition(|p| p.1 < threshold).map_or(0, |k| k + 1);
    let pts = &logs[start..];
    if pts.len() < 3 {
        return Err(Error::Fit("growth window too short".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let rate = sxy / sxx;
    let sse: f64 = pts.iter().map(|p| (p.1 - my - rate * (p.0 - mx)).powi(2)).sum();
    let se = if n > 2.0 { (sse / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(GrowthRate { rate, lower: rate - 1.96 * se, upper: rate + 1.96 * se, e_folds })
}
