use thiserror::Error;

/// Failure modes of the phase-space engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("angle {theta} is within {eps} of a kernel singularity; use the delta-limit path")]
    DegenerateAngle { theta: f64, eps: f64 },

    #[error("angle pair ({theta1}, {theta2}) lies on an excluded line: |cos(theta1 - theta2)| = {cos_diff}")]
    ExcludedAngles { theta1: f64, theta2: f64, cos_diff: f64 },

    #[error("sampled function is not negligible near the window edge (tail {tail:e} > {tol:e})")]
    WindowTooSmall { tail: f64, tol: f64 },

    #[error("Fock truncation too small: tail population {tail:e} exceeds {tol:e}")]
    CutoffExceeded { tail: f64, tol: f64 },

    #[error("imaginary residue {residue:e} in a quantity that must be real")]
    ImaginaryResidue { residue: f64 },

    #[error("unitarity defect {defect:e} exceeds {tol:e} on the interior block")]
    UnitarityFailure { defect: f64, tol: f64 },

    #[error("arrows are not composable: target of the first differs from source of the second")]
    NotComposable,

    #[error("objects refer to different angle pairs")]
    AngleMismatch,

    #[error("result did not converge: change {change:e} exceeds {tol:e}")]
    ConvergenceFailure { change: f64, tol: f64 },

    #[error("negative variance {value:e}")]
    NegativeVariance { value: f64 },

    #[error("finite-difference stencil too coarse: Richardson change {change:e} exceeds {tol:e}")]
    StencilTooCoarse { change: f64, tol: f64 },

    #[error("work estimate {cost:e} exceeds the configured budget {budget:e}")]
    CostBudget { cost: f64, budget: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
