use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical abort: {0}")]
    Numerical(String),
    #[error(transparent)]
    Core(#[from] quatlie::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for bad configuration, 3 for a numerical abort, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Core(quatlie::Error::NumericalAbort { .. }) => 3,
            // Parameter errors surfacing from the core come from the configuration.
            CliError::Core(
                quatlie::Error::InvalidParameter(_)
                | quatlie::Error::InvalidRadius(_)
                | quatlie::Error::InvalidDimension(_)
                | quatlie::Error::BadGrid(_)
                | quatlie::Error::ZeroBudget,
            ) => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}
