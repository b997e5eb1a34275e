use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("unknown scenario `{0}`; available: {list}", list = crate::SCENARIOS.join(", "))]
    UnknownScenario(String),
    #[error(transparent)]
    Core(#[from] uai_core::UaiError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

impl LabError {
    /// Process exit code: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) | LabError::UnknownScenario(_) => 2,
            _ => 1,
        }
    }
}
