use std::path::PathBuf;

use graph_instruct_core::allocate::AllocationError;
use graph_instruct_core::instruct::InstructError;
use graph_instruct_core::metrics::MetricError;
use graph_instruct_core::split::SplitError;
use graph_instruct_core::SelectionError;

use crate::llm::LlmError;
use crate::load::LoadError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Instruct(#[from] InstructError),
    #[error(transparent)]
    Allocation(#[from] AllocationError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error("{task} on `{dataset}` needs {needed} {what} but only {available} are available")]
    Insufficient {
        task: String,
        dataset: String,
        what: &'static str,
        needed: usize,
        available: usize,
    },
    #[error("{failed} of {total} descriptions failed")]
    PartialFailure { failed: usize, total: usize },
}

impl Error {
    /// Process exit code: 1 validation, 2 runtime, 3 transport.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) | Error::Validation(_) | Error::Load(_) | Error::Allocation(_) => 1,
            Error::Llm(e) if e.is_transport() => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }
}
