//! Grids, signal sources, windows and the trapezoid quadrature engine.
//!
//! Signals carry a declared growth envelope `|f(t)| <= M e^{sigma |t|}` and
//! windows a decay envelope `|psi(t)| <= M e^{-k |t|}`. The quadrature engine
//! uses the pair to truncate the integration domain.

mod csvio;
mod grid;
mod quadrature;
mod source;
mod window;

pub use csvio::{read_signal_csv, read_signal_csv_from};
pub use grid::Grid;
pub use quadrature::{integrate, integration_range, IntegrationWeights, QuadratureSpec};
pub use source::{
    validate_envelope, Atom, ClosedForm, EnvelopeVerdict, Formula, GrowthEnvelope, SignalKind,
    SignalSource,
};
pub use window::{DecayEnvelope, Window, WindowKind, WindowShape};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid envelope: {0}")]
    InvalidEnvelope(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("t = {t} outside sampled span [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },
    #[error("atomic measures cannot be evaluated pointwise")]
    NotPointwise,
    #[error("atom locations must be strictly increasing")]
    UnsortedAtoms,
    #[error("declared envelope violated at t = {t}: |f| = {magnitude} > {bound}")]
    EnvelopeViolation { t: f64, magnitude: f64, bound: f64 },
    #[error("truncated integration domain has fewer than 2 nodes")]
    EmptyDomain,
    #[error("csv row {row}: {message}")]
    Csv { row: usize, message: String },
    #[error("io: {0}")]
    Io(String),
}
