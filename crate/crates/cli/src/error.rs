use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    /// A protocol ran but at least one check failed.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error("numerical failure: {0}")]
    Numerical(raman_cqed::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<raman_cqed::Error> for CliError {
    fn from(e: raman_cqed::Error) -> Self {
        use raman_cqed::Error as E;
        match e {
            E::EdgeLeakage { .. }
            | E::Leakage { .. }
            | E::NonUnitary(_)
            | E::NotNormalized { .. }
            | E::DimensionTooLarge { .. }
            | E::ZeroVector => CliError::Numerical(e),
            other => CliError::Usage(other.to_string()),
        }
    }
}
