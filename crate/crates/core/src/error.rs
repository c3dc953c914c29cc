use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate truncation: {0}")]
    DegenerateTruncation(String),
    #[error("truncation insufficient: {0}")]
    TruncationInsufficient(String),
    #[error("Mandel-Q undefined for zero energy")]
    ZeroEnergy,
    #[error("invalid probe specification: {0}")]
    InvalidSpec(String),
    #[error("infeasible energy: {0}")]
    InfeasibleEnergy(String),
    #[error("uninformative probe: QFI is zero")]
    UninformativeProbe,
    #[error("invalid mixed state: {0}")]
    InvalidMixedState(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("sensitivity is not unimodal in N: {0}")]
    NotUnimodal(String),
    #[error("post-selection failed: {0}")]
    PostSelectionFailed(String),
    #[error("oracle scale exceeded: {0}")]
    OracleScaleExceeded(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
