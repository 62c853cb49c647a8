//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("structure invalid: ‖Q‖ ≥ 1 or matrix not invertible at {context}")]
    NonInvertible { context: String },
    #[error("structure is not centered: Q(0) ≠ 0 (|Q(0)| = {norm})")]
    NotCentered { norm: f64 },
    #[error("structure is not normalized: Q(0) ≠ 0 or Q_z(0) ≠ 0 ({detail})")]
    NotNormalized { detail: String },
    #[error("point outside the chart ball (|p| = {radius}, chart radius {chart})")]
    OutOfChart { radius: f64, chart: f64 },
    #[error("point outside the domain (r = {r})")]
    OutsideDomain { r: f64 },
    #[error("point outside the collar (r = {r}, collar depth {depth})")]
    OutsideCollar { r: f64, depth: f64 },
    #[error("iteration did not converge: {what} after {iterations} iterations (last step {last_step})")]
    NoConvergence {
        what: String,
        iterations: usize,
        last_step: f64,
    },
    #[error("least-squares fit ill-conditioned: {detail}")]
    IllConditioned { detail: String },
    #[error("Newton inversion diverged at {context}")]
    NewtonDiverged { context: String },
    #[error("singular Jacobian at {context}")]
    SingularJacobian { context: String },
    #[error("precondition failed: {detail}")]
    PreconditionFailed { detail: String },
    #[error("search exhausted without a certificate: {detail}")]
    SearchExhausted { detail: String },
    #[error("boundary degenerate: dr = 0 at sampled point (|dr| = {norm})")]
    DegenerateBoundary { norm: f64 },
    #[error("hypersurface frame ill-conditioned: {detail}")]
    FrameIllConditioned { detail: String },
    #[error("root finding along the normal failed: {detail}")]
    RootFindFailed { detail: String },
    #[error("level {level} is critical for ρ (|dρ| = {grad_norm})")]
    CriticalLevel { level: f64, grad_norm: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<V> = std::result::Result<V, Error>;
