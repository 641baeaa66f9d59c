use thiserror::Error;

/// Errors raised anywhere in the solver pipeline.
///
/// Numeric payloads are stored as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlochError {
    #[error("pole: {0}")]
    Pole(String),
    #[error("series failed to converge after {terms} terms: {what}")]
    Convergence { what: String, terms: usize },
    #[error("divergent evaluation: {0}")]
    Divergent(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-finite result in {0}")]
    NonFinite(String),
    #[error("barrier solution not real: imaginary residue {residue:e} at z2={z2}")]
    Reality { residue: f64, z2: f64 },
    #[error("dispersion forms disagree by {gap:e} at E={energy}")]
    Inconsistency { energy: f64, gap: f64 },
    #[error("band scan failed: {0}")]
    Scan(String),
    #[error("band-edge limit did not converge at E={0}")]
    EdgeDegeneracy(f64),
    #[error("quadrature on [{a}, {b}] did not reach tolerance {tol:e}")]
    Quadrature { a: f64, b: f64, tol: f64 },
    #[error("integrator step size underflow at z={0}")]
    StepFailure(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = BlochError> = std::result::Result<T, E>;
