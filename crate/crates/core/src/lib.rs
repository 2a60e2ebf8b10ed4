//! Motional response of a partially transmitting mirror to vacuum radiation
//! pressure in one space dimension.
//!
//! The pipeline runs from scattering amplitudes ([`scattering`]) to the
//! cutoff function and motional susceptibility ([`susceptibility`]), through
//! dispersion relations and the time-domain kernel ([`dispersion`]), to the
//! mechanical impedance, stability and passivity ([`analysis`]) and the
//! equation of motion ([`dynamics`]).
//!
//! Frequencies are in units of a reference frequency `Ω`, times in `1/Ω`,
//! and all routines are generic over `f32`/`f64`.

pub mod analysis;
pub mod dispersion;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod interp;
pub mod num;
pub mod quadrature;
pub mod scattering;
pub mod susceptibility;

pub use analysis::{
    admittance, count_rhp_zeros, impedance, impedance_laplace, passivity_check, real_axis_roots, refine_root,
    spectral_representation, stability_report, Contour, GammaSource, Impedance, MirrorMechanics, PassivityProbe,
    ProbeSet, Root, StabilityReport,
};
pub use dispersion::{
    build_time_kernel, consistency_check, continue_upper_half, fit_high_frequency_cutoff, gamma_causality,
    kk_reconstruct, ConsistencyReport, CutoffFit, EvenSpectrum, TailModel, TimeKernel,
};
pub use dynamics::{
    energy_ledger, fit_runaway_rate, simulate_memory, simulate_modal, simulate_perfect, EnergyLedger, ForceProfile,
    GrowthRate, InitialState, LorentzianModes, Method, Trajectory,
};
pub use error::{Error, Result};
pub use num::{linear_grid, log_grid, Cx, Real};
pub use scattering::{validate_model, MirrorModel, ModelKind, ScatteringTable, ValidationReport};
pub use susceptibility::{
    alpha, beta, chi, compute_susceptibility, gamma, gamma_lorentzian_closed_form, induced_mass, reflection_cutoff,
    CutoffEstimate, CutoffSettings, GammaSettings, GammaValue, Quantity, ResponseCurve, SusceptibilityResult,
};

pub type MirrorModelF64 = MirrorModel<f64>;
pub type MirrorMechanicsF64 = MirrorMechanics<f64>;
pub type ResponseCurveF64 = ResponseCurve<f64>;
pub type ImpedanceF64 = Impedance<f64>;
pub type TimeKernelF64 = TimeKernel<f64>;
pub type TrajectoryF64 = Trajectory<f64>;
pub type EvenSpectrumF64 = EvenSpectrum<f64>;
pub type Complex64 = Cx<f64>;
