//! Fixed-format CSV writers for curves, kernels and trajectories.

use std::fmt::Write as _;

use crate::dispersion::TimeKernel;
use crate::dynamics::{EnergyLedger, Trajectory};
use crate::error::{Error, Result};
use crate::num::{Cx, Real};
use crate::susceptibility::ResponseCurve;

fn e<T: Real>(x: T) -> String {
    format!("{:.11e}", x.as_f64() + 0.0)
}

/// Columns `omega, <name>_re, <name>_im`.
pub fn curve_csv<T: Real>(name: &str, curve: &ResponseCurve<T>) -> String {
    let mut out = format!("omega,{name}_re,{name}_im\n");
    for (w, z) in curve.grid().iter().zip(curve.values()) {
        let _ = writeln!(out, "{},{},{}", e(*w), e(z.re), e(z.im));
    }
    out
}

/// Columns `omega, gamma_re, gamma_im, chi_re, chi_im, quad_err`.
pub fn susceptibility_csv<T: Real>(gamma: &ResponseCurve<T>, chi: &ResponseCurve<T>, quad_err: &[T]) -> Result<String> {
    if gamma.len() != chi.len() || gamma.len() != quad_err.len() {
        return Err(Error::LengthMismatch { expected: gamma.len(), found: chi.len().min(quad_err.len()) });
    }
    let mut out = String::from("omega,gamma_re,gamma_im,chi_re,chi_im,quad_err\n");
    for k in 0..gamma.len() {
        let (g, c) = (gamma.values()[k], chi.values()[k]);
        let _ = writeln!(out, "{},{},{},{},{},{}", e(gamma.grid()[k]), e(g.re), e(g.im), e(c.re), e(c.im), e(quad_err[k]));
    }
    Ok(out)
}

/// Columns `omega, Z_re, Z_im, Y_re, Y_im`; a singular admittance is written as `nan`.
pub fn impedance_csv<T: Real>(grid: &[T], z: &[Cx<T>], y: &[Option<Cx<T>>]) -> String {
    let mut out = String::from("omega,Z_re,Z_im,Y_re,Y_im\n");
    for k in 0..grid.len() {
        let (yr, yi) = match y[k] {
            Some(v) => (e(v.re), e(v.im)),
            None => ("nan".into(), "nan".into()),
        };
        let _ = writeln!(out, "{},{},{},{},{}", e(grid[k]), e(z[k].re), e(z[k].im), yr, yi);
    }
    out
}

/// Columns `t, kappa` after a commented header with the kernel parameters.
pub fn kernel_csv<T: Real>(kernel: &TimeKernel<T>) -> String {
    let mut out = format!(
        "# mu_subtracted={} dt={} T={} omega_max={}\nt,kappa\n",
        e(kernel.mu_subtracted),
        e(kernel.dt),
        e(kernel.window),
        e(kernel.omega_max)
    );
    for (t, k) in kernel.times.iter().zip(&kernel.values) {
        let _ = writeln!(out, "{},{}", e(*t), e(*k));
    }
    out
}

/// Columns `t, q, v, a, F_a, W_a, E, W_m`.
pub fn trajectory_csv<T: Real>(traj: &Trajectory<T>, ledger: &EnergyLedger<T>) -> Result<String> {
    let n = traj.len();
    if ledger.times.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: ledger.times.len() });
    }
    let mut out = String::from("t,q,v,a,F_a,W_a,E,W_m\n");
    for k in 0..n {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            e(traj.times[k]),
            e(traj.q[k]),
            e(traj.v[k]),
            e(traj.a[k]),
            e(traj.applied_force[k]),
            e(ledger.work_applied[k]),
            e(ledger.energy[k]),
            e(ledger.work_motional[k])
        );
    }
    Ok(out)
}

/// Columns `t, W_a, E, W_m, residual`.
pub fn ledger_csv<T: Real>(ledger: &EnergyLedger<T>) -> String {
    let mut out = String::from("t,W_a,E,W_m,residual\n");
    for k in 0..ledger.times.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            e(ledger.times[k]),
            e(ledger.work_applied[k]),
            e(ledger.energy[k]),
            e(ledger.work_motional[k]),
            e(ledger.residual[k])
        );
    }
    out
}
