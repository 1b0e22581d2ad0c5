//! Numerical differential geometry on homogeneous 3-spheres and warped
//! products of spheres: exterior algebra in a fixed coframe, Chern-Simons
//! transgression forms, closed-form Berger-sphere geometry, Ricci flow on
//! the diagonal metric family, and coordinate-chart warped-product geometry.
//!
//! Every closed form carries an independent numeric oracle (Koszul formula,
//! structure equation, curvature contraction, quadrature, finite differences);
//! the `verify` module runs the full cross-check suite.

pub mod berger;
pub mod chern_simons;
pub mod exterior;
pub mod jet;
pub mod report;
pub mod ricci_flow;
pub mod verify;
pub mod warped;

use thiserror::Error;

/// Library error type. Every rejected precondition maps to one variant.
#[derive(Debug, Error)]
pub enum CsError {
    #[error("degree overflow: {0} + {1} exceeds dimension 3")]
    DegreeOverflow(u8, u8),
    #[error("degree mismatch: expected a {expected}-form, got a {got}-form")]
    DegreeMismatch { expected: u8, got: u8 },
    #[error("a chart point is required to differentiate position-dependent coefficients")]
    MissingChartPoint,
    #[error("coefficient is position-dependent where a constant was required")]
    NonConstantCoefficient,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("chart point out of domain: {0}")]
    OutOfDomain(String),
    #[error("singular metric: g_{axis}{axis} = {value} at the evaluation point")]
    SingularMetric { axis: usize, value: f64 },
}

pub type Result<T> = std::result::Result<T, CsError>;
