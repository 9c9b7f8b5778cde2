use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Engine(#[from] bifrac::Error),

    /// A shared intermediate failed earlier; carries its message.
    #[error("{0}")]
    Upstream(String),

    /// One or more invariants failed; the report has already been written.
    #[error("{0} invariant(s) failed")]
    Failed(usize),
}

impl CliError {
    /// 0 pass, 1 invariant failure, 2 invalid input, 3 non-convergence.
    pub fn exit_code(&self) -> i32 {
        use bifrac::Error as E;
        match self {
            CliError::Failed(_) => 1,
            CliError::Engine(e) => match e {
                E::ConvergenceFailure { .. } | E::StencilTooCoarse { .. } => 3,
                E::UnitarityFailure { .. } | E::ImaginaryResidue { .. } | E::NegativeVariance { .. } => 1,
                _ => 2,
            },
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
