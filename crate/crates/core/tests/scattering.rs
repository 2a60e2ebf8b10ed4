use proptest::prelude::*;
use vacmirror::{log_grid, validate_model, Complex64, MirrorModel, ScatteringTable};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn reference_amplitudes() {
    let l = MirrorModel::lorentzian(1.0);
    assert_eq!(l.reflectivity_real(0.0).unwrap(), c(-1.0, 0.0));
    assert!((l.reflectivity_real(1.0).unwrap() - c(-0.5, -0.5)).norm() < 1e-15);
    assert_eq!(l.transmissivity_real(0.0).unwrap(), c(0.0, 0.0));
    assert!((l.transmissivity_real(1.0).unwrap() - c(0.5, -0.5)).norm() < 1e-15);
    let p = MirrorModel::<f64>::Perfect;
    for w in [-3.0, 0.0, 1e6] {
        assert_eq!(p.reflectivity_real(w).unwrap(), c(-1.0, 0.0));
        assert_eq!(p.transmissivity_real(w).unwrap(), c(0.0, 0.0));
    }
}

#[test]
fn lower_half_plane_is_rejected() {
    let l = MirrorModel::lorentzian(1.0_f64);
    assert!(l.reflectivity(c(1.0, -0.1)).is_err());
}

#[test]
fn tabulated_table_from_text_round_trips() {
    let grid = log_grid(0.01_f64, 100.0, 300);
    let l = MirrorModel::lorentzian(1.0);
    let mut text = String::from("# omega re_r im_r re_s im_s\n");
    for w in &grid {
        let (r, s) = (l.reflectivity_real(*w).unwrap(), l.transmissivity_real(*w).unwrap());
        text.push_str(&format!("{w:.17e} {:.17e} {:.17e} {:.17e} {:.17e}\n", r.re, r.im, s.re, s.im));
    }
    let t = MirrorModel::Tabulated(ScatteringTable::<f64>::parse(&text).unwrap());
    for w in &grid {
        assert!((t.reflectivity_real(*w).unwrap() - l.reflectivity_real(*w).unwrap()).norm() < 1e-15);
    }
    let rep = validate_model(&t, &grid).unwrap();
    assert!(rep.unitarity_defect < 1e-9);
    assert!(rep.tail_decays_fast_enough() && !rep.no_cutoff);
}

#[test]
fn corrupted_table_fails_unitarity() {
    let grid = log_grid(0.01_f64, 100.0, 200);
    let l = MirrorModel::lorentzian(1.0);
    let r: Vec<Complex64> = grid.iter().map(|w| l.reflectivity_real(*w).unwrap() * 1.2).collect();
    let s: Vec<Complex64> = grid.iter().map(|w| l.transmissivity_real(*w).unwrap()).collect();
    let t = MirrorModel::Tabulated(ScatteringTable::new(grid.clone(), r, s).unwrap());
    assert!(validate_model(&t, &grid).unwrap().unitarity_defect > 0.1);
}

#[test]
fn slowly_decaying_tail_is_reported() {
    let grid = log_grid(0.01_f64, 100.0, 200);
    let r: Vec<Complex64> = grid.iter().map(|w| c(-1.0 / (1.0 + w).sqrt(), 0.0)).collect();
    let s: Vec<Complex64> = r.iter().map(|r| c((1.0 - r.norm_sqr()).sqrt(), 0.0)).collect();
    let t = MirrorModel::Tabulated(ScatteringTable::new(grid.clone(), r, s).unwrap());
    let rep = validate_model(&t, &grid).unwrap();
    assert!(!rep.tail_decays_fast_enough());
    assert!(rep.tail_decay_exponent.unwrap() < 0.6);
}

proptest! {
    #[test]
    fn reality_symmetry(w in 0.0f64..500.0, cutoff in 0.1f64..10.0) {
        let table = ScatteringTable::sample(&MirrorModel::lorentzian(cutoff), log_grid(1e-3, 1e3, 400)).unwrap();
        for m in [MirrorModel::lorentzian(cutoff), MirrorModel::Perfect, MirrorModel::Tabulated(table)] {
            if w < 1e-3 && matches!(m, MirrorModel::Tabulated(_)) {
                continue;
            }
            prop_assert_eq!(m.reflectivity_real(-w).unwrap(), m.reflectivity_real(w).unwrap().conj());
            prop_assert_eq!(m.transmissivity_real(-w).unwrap(), m.transmissivity_real(w).unwrap().conj());
        }
    }

    #[test]
    fn imaginary_axis_reflectivity_is_real_negative(y in 1e-6f64..1e6, cutoff in 0.1f64..10.0) {
        let r = MirrorModel::lorentzian(cutoff).reflectivity(c(0.0, y)).unwrap();
        prop_assert!(r.im.abs() < 1e-15);
        prop_assert!(r.re > -1.0 && r.re < 0.0);
        prop_assert!((r.re + 1.0 / (1.0 + y / cutoff)).abs() < 1e-14);
    }

    #[test]
    fn tabulated_samples_stay_unitary(w in 1e-3f64..1e3) {
        let table = ScatteringTable::sample(&MirrorModel::lorentzian(1.0), log_grid(1e-3, 1e3, 2000)).unwrap();
        let m = MirrorModel::Tabulated(table);
        let (r, s) = (m.reflectivity_real(w).unwrap(), m.transmissivity_real(w).unwrap());
        prop_assert!(r.norm_sqr() + s.norm_sqr() <= 1.0 + 1e-5);
    }
}
