use thiserror::Error;

/// Failures raised by the numerical kernels.
///
/// Axis touch and domain exit are reported outcomes of a trajectory run
/// rather than bugs, so they carry the time and location where they happened.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("trajectory touched the axis at t={t} (r={r})")]
    AxisTouch { t: f64, r: f64 },

    #[error("trajectory left the domain at t={t} (z={z})")]
    DomainExit { t: f64, z: f64 },

    #[error("flow is not unilateral: v_z={vz} at r={r}, z={z}, t={t}")]
    UnilateralViolation { r: f64, z: f64, t: f64, vz: f64 },

    #[error("stagnation point: zero speed at t={t}")]
    Stagnation { t: f64 },

    #[error("streamline map is not invertible at rbar0={rbar0}, z={z}: {reason}")]
    Invertibility { rbar0: f64, z: f64, reason: String },

    #[error("degenerate Frenet frame (kappa={kappa})")]
    DegenerateFrame { kappa: f64 },

    #[error("moving-frame chart is singular: 1 - kappa*rbar = {margin}")]
    ChartDomain { margin: f64 },

    #[error("no flux window: {0}")]
    NoWindow(String),

    #[error("integrator failure: {0}")]
    Integrator(String),
}

pub type Result<T> = std::result::Result<T, Error>;
