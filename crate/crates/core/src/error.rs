use thiserror::Error;

use crate::kernels::KernelError;
use crate::model::{FunctionId, LayerId};
use crate::paths::PathError;

/// Failure of a metric computation: the score is undefined for the input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("unknown function `{0}`")]
    UnknownFunction(FunctionId),
    #[error("no QoS-valid path")]
    EmptyValidSet,
    #[error("score undefined for n = {n} (needs at least 2)")]
    TooFewMembers { n: usize },
    #[error("layer stack has no layers")]
    EmptyStack,
    #[error("function universe has m = {m} functions (needs at least 2)")]
    TooFewFunctions { m: usize },
    #[error("layer `{0}` covers no function")]
    ZeroCoverage(LayerId),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Path(#[from] PathError),
}

impl MetricError {
    /// Stable, machine-readable reason code.
    pub fn code(&self) -> &'static str {
        match self {
            MetricError::UnknownFunction(_) => "unknown_function",
            MetricError::EmptyValidSet => "empty_valid_set",
            MetricError::TooFewMembers { .. } => "too_few_members",
            MetricError::EmptyStack => "empty_stack",
            MetricError::TooFewFunctions { .. } => "too_few_functions",
            MetricError::ZeroCoverage(_) => "zero_coverage",
            MetricError::Kernel(_) => "kernel",
            MetricError::Path(PathError::PathLimitExceeded { .. }) => "path_limit_exceeded",
            MetricError::Path(_) => "path",
        }
    }
}
