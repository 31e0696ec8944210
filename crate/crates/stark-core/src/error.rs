use thiserror::Error;

/// Errors shared across the simulation pipeline.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("rejected input: {0}")]
    RejectedInput(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("aliasing risk: |v| + eta = {requested:.3} exceeds Nyquist momentum {nyquist:.3}")]
    AliasingRisk { requested: f64, nyquist: f64 },

    #[error("boundary contamination: mass fraction {fraction:.3e} near the box edge exceeds {limit:.1e}")]
    BoundaryContamination { fraction: f64, limit: f64 },

    #[error("step size too large: unitarity drift {drift:.3e} per step")]
    StepSize { drift: f64 },

    #[error("quadrature tolerance not reached: requested {requested:.1e}, achieved {achieved:.1e}")]
    Tolerance { requested: f64, achieved: f64 },

    #[error("divergent line integral: {0}")]
    Divergence(String),

    #[error("integration horizon not certifiable: {0}")]
    Horizon(String),

    #[error("x-ray dataset unusable: {0}")]
    Dataset(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
