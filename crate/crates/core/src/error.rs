use alloc::string::String;

use thiserror::Error;

use crate::catalog::LabelId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate label id {0}")]
    DuplicateLabelId(LabelId),
    #[error("unknown label id {0}")]
    UnknownLabel(LabelId),
    #[error("sample {sample:?} references unknown label id {label}")]
    UnknownLabelInSample { sample: String, label: LabelId },
    #[error("duplicate sample id {0:?}")]
    DuplicateSample(String),
    #[error("sample sets differ: {0}")]
    SampleMismatch(String),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("hierarchy edges contain a cycle through label {0}")]
    HierarchyCycle(LabelId),
    #[error("self-edge on label {0}")]
    SelfEdge(LabelId),
    #[error("sample {0:?} has no scores for exclusion enforcement")]
    MissingScores(String),
    #[error("need at least {needed} {what}, got {got}")]
    TooFew {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
