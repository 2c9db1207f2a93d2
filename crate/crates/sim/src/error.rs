#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    /// The scenario or grid is unusable. `path` points at the offending
    /// field, e.g. `designs[2].verifiers[0].approver`.
    #[error("invalid config at `{path}`: {reason}")]
    InvalidConfig { path: String, reason: String },
    #[error(transparent)]
    Engine(#[from] pat_core::Error),
}

impl SimError {
    pub(crate) fn config(path: impl Into<String>, reason: impl ToString) -> Self {
        SimError::InvalidConfig { path: path.into(), reason: reason.to_string() }
    }
}

pub type SimResult<T> = Result<T, SimError>;
