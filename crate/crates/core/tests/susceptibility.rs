use proptest::prelude::*;
use vacmirror::{
    alpha, beta, chi, compute_susceptibility, gamma, gamma_lorentzian_closed_form, induced_mass, log_grid,
    reflection_cutoff, Complex64, CutoffSettings, Error, GammaSettings, MirrorMechanics, MirrorModel,
    ScatteringTable,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn amplitude_examples() {
    let l = MirrorModel::lorentzian(1.0);
    assert!((alpha(&l, 1.0, 1.0).unwrap() - c(1.0, 1.0)).norm() < 1e-15);
    assert!((beta(&l, 1.0, 0.0).unwrap() - c(-0.5, 0.5)).norm() < 1e-15);
    assert_eq!(alpha(&MirrorModel::Perfect, 0.2, 9.0).unwrap(), c(2.0, 0.0));
    assert_eq!(beta(&MirrorModel::Perfect, 0.2, 9.0).unwrap(), c(0.0, 0.0));
}

#[test]
fn perfect_mirror_has_divergent_cutoff() {
    let r = reflection_cutoff(&MirrorModel::<f64>::Perfect, &CutoffSettings::default());
    assert!(matches!(r, Err(Error::Divergent(_))));
    let mech = MirrorMechanics::new(1.0, 0.0, 1e-3).unwrap();
    let sus = compute_susceptibility(&MirrorModel::Perfect, &mech, &log_grid(0.01, 100.0, 20), &CutoffSettings::default()).unwrap();
    assert!(sus.cutoff_divergent() && sus.mu.is_none());
}

#[test]
fn cutoff_scales_with_lorentzian_frequency() {
    let est = reflection_cutoff(&MirrorModel::lorentzian(2.0_f64), &CutoffSettings::default()).unwrap();
    assert!((est.omega_c - 6.0).abs() < 1e-3 * 6.0, "{}", est.omega_c);
}

#[test]
fn tabulated_copy_reproduces_cutoff() {
    let mut omega = vec![0.0];
    omega.extend(log_grid(1e-3_f64, 1e3, 2000));
    let table = ScatteringTable::sample(&MirrorModel::lorentzian(1.0), omega).unwrap();
    let est = reflection_cutoff(&MirrorModel::Tabulated(table), &CutoffSettings::default()).unwrap();
    assert!((est.omega_c - 3.0).abs() < 0.03, "{}", est.omega_c);
}

#[test]
fn susceptibility_result_invariants() {
    let mech = MirrorMechanics::new(1.0, 0.0, 1e-3).unwrap();
    let mut grid = vec![0.0];
    grid.extend(log_grid(1e-2, 1e2, 200));
    let sus = compute_susceptibility(&MirrorModel::lorentzian(1.0), &mech, &grid, &CutoffSettings::default()).unwrap();
    assert_eq!(sus.gamma.values()[0], c(1.0, 0.0));
    let wc = sus.omega_c.unwrap();
    assert_eq!(sus.mu.unwrap(), induced_mass(&mech, wc));
    assert!((sus.mu.unwrap() - 3e-3).abs() < 3e-5);
    for (k, w) in grid.iter().enumerate() {
        let g = sus.gamma.values()[k];
        assert!(g.re >= -1e-9);
        assert!(sus.chi.values()[k].im >= -1e-9 * 1e-3 * w * w * w);
        assert!(sus.quad_errors[k] <= 1e-9);
    }
}

#[test]
fn chi_vanishes_to_third_order_at_zero() {
    let mech = MirrorMechanics::new(1.0, 0.0, 1e-3).unwrap();
    let s = GammaSettings::default();
    let l = MirrorModel::lorentzian(1.0);
    assert_eq!(chi(&l, &mech, 0.0, &s).unwrap(), c(0.0, 0.0));
    for h in [1e-2, 5e-3] {
        let x: Complex64 = chi(&l, &mech, h, &s).unwrap();
        assert!((x / (h * h * h) - c(0.0, 1e-3)).norm() < 1e-5);
    }
}

#[test]
fn high_frequency_law() {
    // ω·|Γ - ω_C/(-iω)| stays bounded (it grows only logarithmically)
    let s = GammaSettings::default();
    let l = MirrorModel::lorentzian(1.0);
    let misfit = |w: f64| {
        let g = gamma(&l, w, &s).unwrap().value;
        (g - c(0.0, 3.0 / w)).norm() * w
    };
    let (a, b) = (misfit(100.0), misfit(1000.0));
    assert!(b / a < 2.0, "{a} {b}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitarity_identity(w in 0.0f64..50.0, wp in 0.0f64..50.0, cutoff in 0.2f64..5.0) {
        let m = MirrorModel::lorentzian(cutoff);
        let a = alpha(&m, w, wp).unwrap();
        let b = beta(&m, w, wp).unwrap();
        prop_assert!((2.0 * a.re - a.norm_sqr() - b.norm_sqr()).abs() < 1e-12);
        prop_assert!((b + beta(&m, wp, w).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn gamma_positivity_and_parity(w in 1e-3f64..100.0) {
        let m = MirrorModel::lorentzian(1.0);
        let s = GammaSettings::default();
        let g = gamma(&m, w, &s).unwrap().value;
        let gm = gamma(&m, -w, &s).unwrap().value;
        prop_assert!(g.re >= -1e-9);
        prop_assert_eq!(gm, g.conj());
    }

    #[test]
    fn oracle_equivalence(w in 0.01f64..10.0) {
        let g = gamma(&MirrorModel::lorentzian(1.0), w, &GammaSettings::default()).unwrap().value;
        let closed = gamma_lorentzian_closed_form(1.0, c(w, 0.0)).unwrap();
        prop_assert!((g - closed).norm() < 1e-6 * closed.norm());
    }

    #[test]
    fn perfect_mirror_reduction(w in 1e-4f64..1e4) {
        let g = gamma(&MirrorModel::<f64>::Perfect, w, &GammaSettings::default()).unwrap().value;
        prop_assert!((g - c(1.0, 0.0)).norm() < 1e-10);
    }
}
