use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "Bessel table range {range} too small for argument {argument}: \
         tail mass {tail_mass:e} exceeds {tolerance:e}"
    )]
    BesselRange {
        range: usize,
        argument: f64,
        tail_mass: f64,
        tolerance: f64,
    },

    #[error("window [{k_min}, {k_max}]: {reason}")]
    Window {
        k_min: i64,
        k_max: i64,
        reason: String,
    },

    #[error("position leakage {leaked:e} outside [{x_min}, {x_max}] exceeds {budget:e}")]
    Leakage {
        x_min: i64,
        x_max: i64,
        leaked: f64,
        budget: f64,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("{what} exceeds budget: {detail}")]
    Budget { what: &'static str, detail: String },

    #[error("{0} outside the domain")]
    Domain(String),
}

impl Error {
    pub(crate) fn window(window: &crate::LatticeWindow, reason: impl Into<String>) -> Self {
        Error::Window {
            k_min: window.k_min(),
            k_max: window.k_max(),
            reason: reason.into(),
        }
    }
}
