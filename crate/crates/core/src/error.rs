use thiserror::Error;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("frequency {omega} outside tabulated range [{min}, {max}]")]
    OutOfRange { omega: f64, min: f64, max: f64 },
    #[error("tabulated model cannot be evaluated off the real frequency axis")]
    UnsupportedContinuation,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    Accuracy { estimate: f64, error_bound: f64 },
    #[error("divergent integral: {0}")]
    Divergent(String),
    #[error("impedance pole at omega = {omega}")]
    Pole { omega: f64 },
    #[error("impedance nearly vanishes at {re} + {im}i, admittance undefined")]
    NearSingular { re: f64, im: f64 },
    #[error("impedance nearly vanishes on the contour near {re} + {im}i; perturb the contour")]
    Contour { re: f64, im: f64 },
    #[error("root refinement did not converge after {iterations} iterations")]
    Convergence { iterations: usize },
    #[error("kernel regularization failed: {0}")]
    Regularization(String),
    #[error("configuration refused: {0}")]
    Configuration(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("sample count mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
