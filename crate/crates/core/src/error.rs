use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid instance: {}", .0.join("; "))]
    InvalidInstance(Vec<String>),

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("invalid records: {0}")]
    InvalidRecords(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("degenerate group {group}: {what}")]
    DegenerateGroup { group: u32, what: &'static str },

    #[error("assignment is not calibrated within groups")]
    NotCalibrated,

    #[error("unequal base rates ({0} vs {1})")]
    UnequalBaseRates(String, String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("reduction infeasible: 2*gamma - 1 = {two_gamma_minus_one} < 0 (gamma = {gamma})")]
    ReductionInfeasible {
        gamma: String,
        two_gamma_minus_one: String,
    },
}
