use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} is singular (det = {det:e})")]
    Singular { what: &'static str, det: f64 },

    #[error("frame matrix must have positive determinant, got {0:e}")]
    NonPositiveFrame(f64),

    #[error("{what} is not symmetric (max |m_ij - m_ji| = {asymmetry:e})")]
    NotSymmetric { what: &'static str, asymmetry: f64 },

    #[error("{what} is not positive definite")]
    NotPositiveDefinite { what: &'static str },

    #[error("momentum matrix needs det S > 0, got {0:e}")]
    NonPositiveMomentum(f64),

    #[error("structure constants are not antisymmetric in the lower pair (residual {0:e})")]
    NotAntisymmetric(f64),

    #[error("structure constants violate the Jacobi identity (residual {0:e})")]
    Jacobi(f64),

    #[error("unknown preset `{0}` (expected su2, abelian or heisenberg)")]
    UnknownPreset(String),

    #[error("connection is not torsion-free (residual {0:e})")]
    NotLeviCivita(f64),

    #[error("frame is not of constant curvature (G deviates from a multiple of I by {0:e})")]
    NotConstantCurvature(f64),

    #[error("curvature parameter mismatch: frame gives {frame}, state carries {state}")]
    CurvatureMismatch { frame: f64, state: f64 },

    #[error("3-form is degenerate (det B = {0:e})")]
    DegenerateForm(f64),

    #[error("non-finite value at t = {0}")]
    NonFinite(f64),

    #[error("{0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
