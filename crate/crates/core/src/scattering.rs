//! Mirror scattering models: reflectivity `r[ω]` and transmissivity `s[ω]`.

use serde::Serialize;

use crate::dispersion::EvenSpectrum;
use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::num::{cx, i_unit, is_strictly_increasing, Cx, Real};

/// Tabulated scattering amplitudes on a nonnegative frequency grid.
///
/// Real and imaginary parts are interpolated separately with monotone cubics.
/// Negative frequencies are served from the reality condition
/// `r[-ω] = conj(r[ω])`; extrapolation beyond the last sample is refused.
#[derive(Debug, Clone)]
pub struct ScatteringTable<T> {
    r_re: MonotoneCubic<T>,
    r_im: MonotoneCubic<T>,
    s_re: MonotoneCubic<T>,
    s_im: MonotoneCubic<T>,
}

impl<T: Real> ScatteringTable<T> {
    pub fn new(omega: Vec<T>, r: Vec<Cx<T>>, s: Vec<Cx<T>>) -> Result<Self> {
        if r.len() != omega.len() || s.len() != omega.len() {
            return Err(Error::LengthMismatch { expected: omega.len(), found: r.len().min(s.len()) });
        }
        if omega.first().is_none_or(|w| *w < T::zero()) {
            return Err(Error::InvalidInput("table frequencies must be nonnegative".into()));
        }
        if !is_strictly_increasing(&omega) {
            return Err(Error::InvalidInput("table frequencies must be strictly increasing".into()));
        }
        let part = |f: fn(&Cx<T>) -> T, v: &[Cx<T>]| MonotoneCubic::new(omega.clone(), v.iter().map(f).collect());
        Ok(Self {
            r_re: part(|z| z.re, &r)?,
            r_im: part(|z| z.im, &r)?,
            s_re: part(|z| z.re, &s)?,
            s_im: part(|z| z.im, &s)?,
        })
    }

    /// Samples another model on `omega` (all points must be nonnegative).
    pub fn sample(model: &MirrorModel<T>, omega: Vec<T>) -> Result<Self> {
        let r = omega.iter().map(|w| model.reflectivity_real(*w)).collect::<Result<Vec<_>>>()?;
        let s = omega.iter().map(|w| model.transmissivity_real(*w)).collect::<Result<Vec<_>>>()?;
        Self::new(omega, r, s)
    }

    /// Parses the whitespace-separated five-column text format
    /// `omega re_r im_r re_s im_s`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut omega = Vec::new();
        let mut r = Vec::new();
        let mut s = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 5 {
                return Err(Error::InvalidInput(format!(
                    "line {}: expected 5 columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let mut vals = [T::zero(); 5];
            for (slot, c) in vals.iter_mut().zip(cols) {
                let x: f64 = c
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("line {}: cannot parse '{}'", lineno + 1, c)))?;
                *slot = T::lit(x);
            }
            omega.push(vals[0]);
            r.push(cx(vals[1], vals[2]));
            s.push(cx(vals[3], vals[4]));
        }
        Self::new(omega, r, s)
    }

    pub fn frequencies(&self) -> &[T] {
        self.r_re.knots()
    }

    pub fn range(&self) -> (T, T) {
        self.r_re.domain()
    }

    fn lookup(&self, omega: T, re: &MonotoneCubic<T>, im: &MonotoneCubic<T>) -> Result<Cx<T>> {
        let w = omega.abs();
        let (lo, hi) = self.range();
        if !(w >= lo && w <= hi) {
            return Err(Error::OutOfRange { omega: omega.as_f64(), min: lo.as_f64(), max: hi.as_f64() });
        }
        let z = cx(re.eval(w)?, im.eval(w)?);
        Ok(if omega < T::zero() { z.conj() } else { z })
    }
}

/// Scatterer seen by the vacuum field.
#[derive(Debug, Clone)]
pub enum MirrorModel<T> {
    /// `r ≡ -1`, `s ≡ 0`: no reflection cutoff.
    Perfect,
    /// `r = -1/(1 - iω/Ω)`, `s = 1 + r`.
    Lorentzian { cutoff: T },
    Tabulated(ScatteringTable<T>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Perfect,
    Lorentzian,
    Tabulated,
}

impl<T: Real> MirrorModel<T> {
    pub fn lorentzian(cutoff: T) -> Self {
        MirrorModel::Lorentzian { cutoff }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            MirrorModel::Perfect => ModelKind::Perfect,
            MirrorModel::Lorentzian { .. } => ModelKind::Lorentzian,
            MirrorModel::Tabulated(_) => ModelKind::Tabulated,
        }
    }

    fn check_causal_region(omega: Cx<T>) -> Result<()> {
        if omega.im < T::zero() {
            return Err(Error::Domain(format!(
                "scattering amplitudes are continued only into Im ω ≥ 0, got Im ω = {}",
                omega.im
            )));
        }
        Ok(())
    }

    /// Reflectivity at a real or upper-half-plane frequency.
    pub fn reflectivity(&self, omega: Cx<T>) -> Result<Cx<T>> {
        Self::check_causal_region(omega)?;
        match self {
            MirrorModel::Perfect => Ok(cx(-T::one(), T::zero())),
            MirrorModel::Lorentzian { cutoff } => {
                let denom = Cx::new(T::one(), T::zero()) - i_unit::<T>() * omega / *cutoff;
                Ok(-denom.inv())
            }
            MirrorModel::Tabulated(t) => {
                if omega.im != T::zero() {
                    return Err(Error::UnsupportedContinuation);
                }
                t.lookup(omega.re, &t.r_re, &t.r_im)
            }
        }
    }

    /// Transmissivity at a real or upper-half-plane frequency.
    pub fn transmissivity(&self, omega: Cx<T>) -> Result<Cx<T>> {
        Self::check_causal_region(omega)?;
        match self {
            MirrorModel::Perfect => Ok(cx(T::zero(), T::zero())),
            MirrorModel::Lorentzian { .. } => Ok(self.reflectivity(omega)? + T::one()),
            MirrorModel::Tabulated(t) => {
                if omega.im != T::zero() {
                    return Err(Error::UnsupportedContinuation);
                }
                t.lookup(omega.re, &t.s_re, &t.s_im)
            }
        }
    }

    pub fn reflectivity_real(&self, omega: T) -> Result<Cx<T>> {
        self.reflectivity(cx(omega, T::zero()))
    }

    pub fn transmissivity_real(&self, omega: T) -> Result<Cx<T>> {
        self.transmissivity(cx(omega, T::zero()))
    }

    /// Largest frequency at which the model can be evaluated on the real axis.
    pub fn max_frequency(&self) -> Option<T> {
        match self {
            MirrorModel::Tabulated(t) => Some(t.range().1),
            _ => None,
        }
    }
}

/// Defects measured by [`validate_model`]; thresholds are left to the caller.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ValidationReport {
    /// `max | |r|² + |s|² - 1 |` over the grid.
    pub unitarity_defect: f64,
    /// `max |r|` over the top decade of the grid.
    pub transparency_tail: f64,
    /// Power-law decay exponent of `|r|` over the top decade, when measurable.
    pub tail_decay_exponent: Option<f64>,
    /// Max deviation between `Im r` and its dispersion-relation reconstruction from `Re r`.
    pub causality_defect: f64,
    /// True when `|r|` does not decay at high frequency (no reflection cutoff).
    pub no_cutoff: bool,
}

impl ValidationReport {
    /// `|r|` must fall like `1/ω` or faster over the top decade (exponent ≥ 0.95,
    /// allowing for the finite distance from the asymptotic regime).
    pub fn tail_decays_fast_enough(&self) -> bool {
        self.tail_decay_exponent.is_some_and(|p| p >= 0.95)
    }
}

/// Measures unitarity, transparency and causality defects of `model` on `grid`.
pub fn validate_model<T: Real>(model: &MirrorModel<T>, grid: &[T]) -> Result<ValidationReport> {
    if grid.is_empty() || !is_strictly_increasing(grid) || grid[0] <= T::zero() {
        return Err(Error::InvalidInput("validation grid must be nonempty, positive and strictly increasing".into()));
    }
    let r = grid.iter().map(|w| model.reflectivity_real(*w)).collect::<Result<Vec<_>>>()?;
    let s = grid.iter().map(|w| model.transmissivity_real(*w)).collect::<Result<Vec<_>>>()?;

    let unitarity_defect = r
        .iter()
        .zip(&s)
        .map(|(a, b)| (a.norm_sqr() + b.norm_sqr() - T::one()).abs().as_f64())
        .fold(0.0, f64::max);

    let top = grid[grid.len() - 1];
    let decade_start = top / T::lit(10.0);
    let transparency_tail = grid
        .iter()
        .zip(&r)
        .filter(|(w, _)| **w >= decade_start)
        .map(|(_, z)| z.norm().as_f64())
        .fold(0.0, f64::max);

    let spans_decade = grid[0] <= decade_start;
    let tail_decay_exponent = if spans_decade {
        let lo = grid.partition_point(|w| *w < decade_start);
        let (r_lo, r_hi) = (r[lo].norm().as_f64(), r[r.len() - 1].norm().as_f64());
        let span = (top / grid[lo]).as_f64().log10();
        if r_lo > 0.0 && r_hi > 0.0 && span > 0.0 {
            Some(-(r_hi / r_lo).log10() / span)
        } else if r_hi == 0.0 {
            Some(f64::INFINITY)
        } else {
            None
        }
    } else {
        None
    };
    let no_cutoff = tail_decay_exponent.map_or(transparency_tail > 0.5, |p| p < 0.5);

    let causality_defect = if no_cutoff || grid.len() < 8 {
        f64::INFINITY
    } else {
        let re: Vec<T> = r.iter().map(|z| z.re).collect();
        let spectrum = EvenSpectrum::new(grid.to_vec(), re)?;
        let (lo, hi) = interior_band(grid);
        let mut worst = 0.0_f64;
        for (w, z) in grid.iter().zip(&r) {
            if *w < lo || *w > hi {
                continue;
            }
            let rebuilt = spectrum.hilbert(*w)?;
            worst = worst.max((rebuilt - z.im).abs().as_f64());
        }
        worst
    };

    Ok(ValidationReport {
        unitarity_defect,
        transparency_tail,
        tail_decay_exponent,
        causality_defect,
        no_cutoff,
    })
}

/// Interior band used for dispersion checks: a decade inside each end of the
/// grid when the grid spans more than two decades, otherwise the middle half.
pub(crate) fn interior_band<T: Real>(grid: &[T]) -> (T, T) {
    let (a, b) = (grid[0], grid[grid.len() - 1]);
    let ten = T::lit(10.0);
    if a > T::zero() && b / a > ten * ten {
        (a * ten, b / ten)
    } else {
        let q = (b - a) / T::lit(4.0);
        (a + q, b - q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::log_grid;
    use proptest::prelude::*;

    fn close(a: Cx<f64>, b: Cx<f64>, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn lorentzian_reference_values() {
        let m = MirrorModel::lorentzian(1.0_f64);
        assert!(close(m.reflectivity_real(0.0).unwrap(), cx(-1.0, 0.0), 1e-15));
        assert!(close(m.reflectivity_real(1.0).unwrap(), cx(-0.5, -0.5), 1e-15));
        assert!(close(m.transmissivity_real(0.0).unwrap(), cx(0.0, 0.0), 1e-15));
        assert!(close(m.transmissivity_real(1.0).unwrap(), cx(0.5, -0.5), 1e-15));
    }

    #[test]
    fn perfect_mirror_is_total_reflector() {
        let m = MirrorModel::<f64>::Perfect;
        for w in [0.0, 3.0, -7.0] {
            assert_eq!(m.reflectivity_real(w).unwrap(), cx(-1.0, 0.0));
            assert_eq!(m.transmissivity_real(w).unwrap(), cx(0.0, 0.0));
        }
    }

    #[test]
    fn imaginary_axis_reflectivity_is_real_negative() {
        let m = MirrorModel::lorentzian(2.0_f64);
        for y in [0.1, 1.0, 30.0] {
            let r = m.reflectivity(cx(0.0, y)).unwrap();
            assert!(r.im.abs() < 1e-15);
            assert!((r.re + 1.0 / (1.0 + y / 2.0)).abs() < 1e-15);
            assert!(r.re < 0.0 && r.re > -1.0);
        }
    }

    #[test]
    fn lower_half_plane_is_refused() {
        let m = MirrorModel::lorentzian(1.0_f64);
        assert!(matches!(m.reflectivity(cx(1.0, -0.1)), Err(Error::Domain(_))));
    }

    #[test]
    fn tabulated_errors() {
        let m = MirrorModel::Tabulated(ScatteringTable::sample(&MirrorModel::lorentzian(1.0), log_grid(0.1, 10.0, 50)).unwrap());
        assert!(matches!(m.reflectivity_real(20.0), Err(Error::OutOfRange { .. })));
        assert!(matches!(m.reflectivity(cx(1.0, 0.5)), Err(Error::UnsupportedContinuation)));
    }

    #[test]
    fn parse_text_table() {
        let text = "# omega re_r im_r re_s im_s\n0 -1 0 0 0\n1 -0.5 -0.5 0.5 -0.5 # knee\n\n2 -0.2 -0.4 0.8 -0.4\n";
        let t = ScatteringTable::<f64>::parse(text).unwrap();
        assert_eq!(t.frequencies(), &[0.0, 1.0, 2.0]);
        let m = MirrorModel::Tabulated(t);
        assert!(close(m.reflectivity_real(-1.0).unwrap(), cx(-0.5, 0.5), 1e-15));
        assert!(ScatteringTable::<f64>::parse("0 1 2 3\n").is_err());
        assert!(ScatteringTable::<f64>::parse("0 1 2 3 x\n").is_err());
    }

    #[test]
    fn validation_of_lorentzian() {
        let grid = log_grid(0.01_f64, 100.0, 1000);
        let rep = validate_model(&MirrorModel::lorentzian(1.0), &grid).unwrap();
        assert!(rep.unitarity_defect < 1e-12);
        assert!(rep.tail_decays_fast_enough());
        assert!(!rep.no_cutoff);
        assert!(rep.causality_defect < 1e-3, "{}", rep.causality_defect);
    }

    #[test]
    fn validation_flags_perfect_mirror() {
        let grid = log_grid(0.01_f64, 100.0, 200);
        let rep = validate_model(&MirrorModel::<f64>::Perfect, &grid).unwrap();
        assert_eq!(rep.transparency_tail, 1.0);
        assert!(rep.no_cutoff);
        assert!(!rep.tail_decays_fast_enough());
    }

    #[test]
    fn validation_of_tabulated_copy() {
        let mut omega = vec![0.0];
        omega.extend(log_grid(1e-3_f64, 1e3, 2000));
        let table = ScatteringTable::sample(&MirrorModel::lorentzian(1.0), omega).unwrap();
        let grid: Vec<f64> = table.frequencies().iter().copied().filter(|w| (0.01..=100.0).contains(w)).collect();
        let rep = validate_model(&MirrorModel::Tabulated(table), &grid).unwrap();
        assert!(rep.unitarity_defect < 1e-9, "{}", rep.unitarity_defect);
        assert!(rep.causality_defect < 1e-3, "{}", rep.causality_defect);
    }

    #[test]
    fn validation_rejects_bad_grid() {
        let m = MirrorModel::lorentzian(1.0_f64);
        assert!(validate_model(&m, &[]).is_err());
        assert!(validate_model(&m, &[1.0, 0.5]).is_err());
        assert!(validate_model(&m, &[0.0, 1.0]).is_err());
    }

    proptest! {
        #[test]
        fn lorentzian_unitarity_and_reality(w in -1e3f64..1e3, cutoff in 0.1f64..10.0) {
            let m = MirrorModel::lorentzian(cutoff);
            let (r, s) = (m.reflectivity_real(w).unwrap(), m.transmissivity_real(w).unwrap());
            prop_assert!((r.norm_sqr() + s.norm_sqr() - 1.0).abs() < 1e-14);
            prop_assert!(close(m.reflectivity_real(-w).unwrap(), r.conj(), 1e-15));
            prop_assert!(close(m.transmissivity_real(-w).unwrap(), s.conj(), 1e-15));
        }
    }
}
