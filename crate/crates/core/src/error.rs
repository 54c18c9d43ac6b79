use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A hard geometric invariant is violated; `field` names the offending parameter.
    #[error("invalid geometry: {field} {reason}")]
    InvalidGeometry { field: &'static str, reason: String },

    #[error("unknown preset `{0}` (expected photon, electron or fdtd)")]
    UnknownPreset(String),

    #[error("invalid detector grid: {0}")]
    InvalidGrid(String),

    #[error("invalid quadrature settings: {0}")]
    InvalidQuadrature(String),

    #[error("invalid slit configuration: {0}")]
    InvalidSlits(String),

    #[error("invalid thick-slit model: {field} {reason}")]
    InvalidModel { field: &'static str, reason: String },

    #[error("argument outside domain: {0}")]
    Domain(String),

    /// Panel doubling stopped at `panels` without meeting the tolerance.
    #[error("quadrature did not converge: relative change {achieved:.3e} > {tolerance:.1e} after {panels} panels")]
    NonConvergence {
        achieved: f64,
        tolerance: f64,
        panels: usize,
    },

    #[error("points coincide; propagator is singular")]
    CoincidentPoints,

    #[error("invalid Riemann grid: {0}")]
    InvalidRiemannGrid(String),
}

impl Error {
    /// True for failures of a numerical procedure rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence { .. })
    }
}
