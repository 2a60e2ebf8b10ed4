use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use vacmirror::export::{curve_csv, impedance_csv, kernel_csv, ledger_csv, susceptibility_csv, trajectory_csv};
use vacmirror::{
    build_time_kernel, compute_susceptibility, consistency_check, energy_ledger, fit_runaway_rate, gamma, linear_grid,
    log_grid, passivity_check, simulate_memory, simulate_modal, simulate_perfect, spectral_representation,
    stability_report, validate_model, Complex64, Contour, CutoffSettings, EvenSpectrum, GammaSettings, Impedance, LorentzianModes,
    MirrorModel, ProbeSet, Quantity, ResponseCurve, SusceptibilityResult, ValidationReport,
};

use crate::config::{Format, Integrator, Loaded, Spacing};

/// Command failure with its exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(m) => write!(f, "config error: {m}"),
            Self::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn num<E: std::fmt::Display>(context: &str) -> impl Fn(E) -> Failure + '_ {
    move |e| Failure::Numerical(format!("{context}: {e}"))
}

fn write(dir: &Path, name: &str, body: &str) -> Outcome {
    std::fs::write(dir.join(name), body).map_err(|e| Failure::Config(format!("cannot write {}: {e}", dir.join(name).display())))
}

fn write_json<S: Serialize>(dir: &Path, name: &str, value: &S) -> Outcome {
    let mut body = serde_json::to_string_pretty(value).map_err(num("serializing"))?;
    body.push('\n');
    write(dir, name, &body)
}

/// Positive grid from the config, clipped to a tabulated model's range.
fn positive_grid(l: &Loaded) -> Outcome<Vec<f64>> {
    let g = &l.config.grid;
    let (mut lo, mut hi) = (g.omega_min, g.omega_max);
    if let MirrorModel::Tabulated(t) = &l.model {
        let (a, b) = t.range();
        lo = lo.max(a.max(f64::MIN_POSITIVE));
        hi = hi.min(b);
        if hi <= lo {
            return Err(Failure::Config(format!("grid [{}, {}] misses the table range [{a}, {b}]", g.omega_min, g.omega_max)));
        }
    }
    Ok(match g.spacing {
        Spacing::Log => log_grid(lo, hi, g.points),
        Spacing::Linear => linear_grid(lo, hi, g.points),
    })
}

/// Zero frequency is prepended when the model is defined there.
fn susceptibility_grid(l: &Loaded) -> Outcome<Vec<f64>> {
    let mut grid = positive_grid(l)?;
    let has_zero = match &l.model {
        MirrorModel::Tabulated(t) => t.range().0 <= 0.0,
        _ => true,
    };
    if has_zero {
        grid.insert(0, 0.0);
    }
    Ok(grid)
}

const UNITARITY_TOL: f64 = 1e-9;

/// Largest `|r|² + |s|² - 1` over the table's own samples.
fn sample_gain(l: &Loaded) -> Outcome<Option<f64>> {
    let MirrorModel::Tabulated(t) = &l.model else {
        return Ok(None);
    };
    let mut worst = f64::NEG_INFINITY;
    for w in t.frequencies() {
        let r = l.model.reflectivity_real(*w).map_err(num("model validation"))?;
        let s = l.model.transmissivity_real(*w).map_err(num("model validation"))?;
        worst = worst.max(r.norm_sqr() + s.norm_sqr() - 1.0);
    }
    Ok(Some(worst))
}

/// Validation gate; tabulated models with `|r|² + |s|² > 1 + tol` at a sample
/// stop the command.
fn validate(l: &Loaded) -> Outcome<(ValidationReport, Option<f64>)> {
    let report = validate_model(&l.model, &positive_grid(l)?).map_err(num("model validation"))?;
    let gain = sample_gain(l)?;
    if let Some(g) = gain.filter(|g| *g > UNITARITY_TOL) {
        return Err(Failure::Numerical(format!(
            "model validation failed: |r|² + |s|² exceeds 1 by {g:.3e} at a table sample (tolerance {UNITARITY_TOL:e})"
        )));
    }
    Ok((report, gain))
}

fn susceptibility(l: &Loaded) -> Outcome<SusceptibilityResult<f64>> {
    compute_susceptibility(&l.model, &l.mech, &susceptibility_grid(l)?, &CutoffSettings::default())
        .map_err(num("susceptibility"))
}

fn header(l: &Loaded, seed: u64) -> Value {
    json!({
        "model": l.model.kind(),
        "tau_omega": l.mech.tau,
        "k_over_m": l.mech.stiffness / l.mech.mass,
        "seed": seed,
    })
}

pub fn analyze(l: &Loaded, out: &Path, seed: u64) -> Outcome {
    let (validation, gain) = validate(l)?;
    let sus = susceptibility(l)?;
    let m = &l.mech;
    let (mut zgrid, mut z, mut y) = (Vec::new(), Vec::new(), Vec::new());
    for (w, chi) in sus.chi.grid().iter().zip(sus.chi.values()) {
        if *w > 0.0 {
            let zw = (Complex64::new(m.stiffness - m.mass * w * w, 0.0) - chi) / Complex64::new(0.0, -w);
            let scale = m.mass * w + m.stiffness / w;
            zgrid.push(*w);
            z.push(zw);
            y.push((zw.norm() >= 1e-12 * scale).then(|| zw.inv()));
        }
    }

    if l.writes(Format::Csv) {
        write(out, "gamma.csv", &curve_csv("gamma", &sus.gamma))?;
        write(out, "chi.csv", &curve_csv("chi", &sus.chi))?;
        write(out, "susceptibility.csv", &susceptibility_csv(&sus.gamma, &sus.chi, &sus.quad_errors).map_err(num("export"))?)?;
        write(out, "impedance.csv", &impedance_csv(&zgrid, &z, &y))?;
    }
    let gamma0 =
        gamma(&l.model, 0.0, &GammaSettings::default()).ok().map(|g| json!({"re": g.value.re + 0.0, "im": g.value.im + 0.0}));
    let mut summary = header(l, seed);
    let extra = json!({
        "omega_C": sus.omega_c,
        "mu_over_m": sus.mu.map(|mu| mu / l.mech.mass),
        "gamma0": gamma0,
        "cutoff_divergent": sus.cutoff_divergent(),
        "cutoff_tail_fraction": sus.cutoff.map(|c| c.tail_fraction),
        "max_quad_error": sus.quad_errors.iter().copied().fold(0.0, f64::max),
        "min_gamma_re": sus.gamma.real_parts().into_iter().fold(f64::INFINITY, f64::min),
        "grid_points": sus.gamma.len(),
        "validation": validation,
        "table_unitarity_excess": gain,
    });
    merge(&mut summary, extra);
    if l.writes(Format::Json) {
        write_json(out, "summary.json", &summary)?;
    }
    Ok(())
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

fn cutoff(l: &Loaded) -> Outcome<Option<f64>> {
    if matches!(l.model, MirrorModel::Perfect) {
        return Ok(None);
    }
    vacmirror::reflection_cutoff(&l.model, &CutoffSettings::default())
        .map(|c| Some(c.omega_c))
        .map_err(num("reflection cutoff"))
}

pub fn stability(l: &Loaded, out: &Path, seed: u64) -> Outcome {
    validate(l)?;
    let omega_c = cutoff(l)?;
    let imp = Impedance::new(&l.model, l.mech, omega_c).map_err(num("impedance"))?;
    let mut contour = Contour::covering(&l.mech, omega_c);
    if let Some(r) = l.config.analysis.contour_re_max {
        contour.re_max = r;
    }
    if let Some(i) = l.config.analysis.contour_im_max {
        contour.im_max = i;
    }
    let a = &l.config.analysis;
    let hi = if l.mech.tau > 0.0 { (10.0 / l.mech.tau).max(1e3) } else { 1e3 };
    let probes = ProbeSet::polar(1e-3, hi, a.probe_moduli, a.probe_arguments);
    let report = stability_report(&imp, &contour, &probes).map_err(num("stability"))?;
    let mut body = serde_json::to_value(&report).map_err(num("serializing"))?;
    merge(
        &mut body,
        json!({
            "seed": seed,
            "contour": {"delta": contour.delta, "re_max": contour.re_max, "im_max": contour.im_max},
            "probe_count": probes.len(),
        }),
    );
    if l.writes(Format::Json) {
        write_json(out, "stability.json", &body)?;
    }
    Ok(())
}

pub fn simulate(l: &Loaded, out: &Path, seed: u64) -> Outcome {
    let sim = &l.config.simulation;
    let force = sim.force.profile();
    let init = l.init();
    let perfect = matches!(l.model, MirrorModel::Perfect);
    let omega_c = if perfect { None } else { cutoff(l)? };
    let heavy = omega_c.is_some_and(|wc| l.mech.mass * wc * l.mech.tau >= l.mech.mass);
    let integrator = match sim.integrator {
        Integrator::Auto if perfect => Integrator::Local,
        Integrator::Auto if heavy => Integrator::Modal,
        Integrator::Auto => Integrator::Memory,
        other => other,
    };
    let default_dt = match integrator {
        Integrator::Local if l.mech.tau > 0.0 => l.mech.tau / 50.0,
        _ => 0.01,
    };
    let dt = sim.dt.unwrap_or(default_dt);

    let traj = match integrator {
        Integrator::Local => {
            if !perfect {
                return Err(Failure::Config("the local integrator needs the perfect mirror".into()));
            }
            simulate_perfect(&l.mech, &force, init, sim.t_end, dt).map_err(num("simulation"))?
        }
        Integrator::Modal => {
            let MirrorModel::Lorentzian { cutoff } = l.model else {
                return Err(Failure::Config("the modal integrator needs the Lorentzian mirror".into()));
            };
            simulate_modal(&l.mech, &LorentzianModes::new(cutoff), &force, init, sim.t_end, dt).map_err(num("simulation"))?
        }
        Integrator::Memory => {
            if perfect {
                return Err(Failure::Config("the memory integrator needs a mirror with a reflection cutoff".into()));
            }
            validate(l)?;
            let sus = susceptibility(l)?;
            let kernel = build_time_kernel(&sus, &l.mech, sim.kernel_window, dt).map_err(num("memory kernel"))?;
            if l.writes(Format::Csv) {
                write(out, "kernel.csv", &kernel_csv(&kernel))?;
            }
            simulate_memory(&l.mech, &kernel, &force, init, sim.t_end).map_err(num("simulation"))?
        }
        Integrator::Auto => unreachable!(),
    };
    let ledger = energy_ledger(&traj, &l.mech).map_err(num("energy ledger"))?;
    if l.writes(Format::Csv) {
        write(out, "trajectory.csv", &trajectory_csv(&traj, &ledger).map_err(num("export"))?)?;
        write(out, "energy.csv", &ledger_csv(&ledger))?;
    }
    let scale = ledger.max_energy();
    let mut run = header(l, seed);
    merge(
        &mut run,
        json!({
            "omega_C": omega_c,
            "method": traj.method,
            "dt": traj.dt,
            "t_end": sim.t_end,
            "steps": traj.len().saturating_sub(1),
            "kernel_window": traj.kernel_window,
            "diverged": traj.diverged,
            "divergence_time": traj.divergence_time,
            "W_a_final": ledger.final_applied(),
            "W_m_final": ledger.final_motional(),
            "E_final": ledger.energy.last().copied(),
            "E_max": scale,
            "max_residual": ledger.max_residual(),
            "runaway_rate": fit_runaway_rate(&traj).ok(),
        }),
    );
    if l.writes(Format::Json) {
        write_json(out, "run.json", &run)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Defect {
    value: f64,
    threshold: f64,
    pass: bool,
}

impl Defect {
    fn new(value: f64, threshold: f64) -> Self {
        Self { value, threshold, pass: value < threshold }
    }
}

pub fn crosscheck(l: &Loaded, out: &Path, seed: u64) -> Outcome {
    if matches!(l.model, MirrorModel::Perfect) {
        return Err(Failure::Numerical(
            "spectral representation diverges: Γ_R does not decay, so the induced mass is infinite".into(),
        ));
    }
    let c = &l.config.crosscheck;
    validate(l)?;
    let sus = susceptibility(l)?;
    let spectrum = EvenSpectrum::from_real_part(&sus.gamma).map_err(num("spectrum"))?;

    let mut kk = 0.0_f64;
    for (w, g) in sus.gamma.grid().iter().zip(sus.gamma.values()) {
        if (0.1..=5.0).contains(w) {
            let rebuilt = spectrum.hilbert(*w).map_err(num("Kramers-Kronig"))?;
            kk = kk.max((rebuilt - g.im).abs());
        }
    }

    let imp = Impedance::new(&l.model, l.mech, sus.omega_c).map_err(num("impedance"))?;
    let mut spectral = 0.0_f64;
    for p in ProbeSet::polar(1e-2, 1e2, 10, 10).points {
        let a = spectral_representation(&spectrum, &l.mech, sus.mu, p).map_err(num("spectral representation"))?;
        let b = imp.laplace(p).map_err(num("impedance"))?;
        spectral = spectral.max((a - b).norm() / b.norm());
    }

    let top = match &l.model {
        MirrorModel::Tabulated(t) => t.range().1.min(30.0),
        _ => 30.0,
    };
    let ugrid = linear_grid(0.0, top, 301);
    let settings = GammaSettings::default();
    let values = ugrid
        .iter()
        .map(|w| gamma(&l.model, *w, &settings).map(|g| g.value))
        .collect::<Result<Vec<_>, _>>()
        .map_err(num("consistency grid"))?;
    let uniform = ResponseCurve::new(ugrid, values, Quantity::Gamma).map_err(num("consistency grid"))?;
    let cons = consistency_check(&uniform, &l.mech, &linear_grid(0.05, 5.0, 60)).map_err(num("consistency"))?;

    let passive = passivity_check(&imp, &ProbeSet::polar(1e-3, 1e3, 10, 10)).map_err(num("passivity"))?;
    let kk = Defect::new(kk, c.kk_threshold);
    let spectral = Defect::new(spectral, c.spectral_threshold);
    let consistency = Defect::new(cons.defect, c.consistency_threshold);
    let all = kk.pass && spectral.pass && consistency.pass;
    let mut body = header(l, seed);
    merge(
        &mut body,
        json!({
            "kk_defect": kk,
            "spectral_rep_defect": spectral,
            "consistency_defect": consistency,
            "all_pass": all,
            "positive_real": passive.positive_real,
        }),
    );
    if l.writes(Format::Json) {
        write_json(out, "crosscheck.json", &body)?;
    }
    Ok(())
}
