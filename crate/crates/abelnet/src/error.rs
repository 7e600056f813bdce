use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum NetError {
    #[error("unknown letter {0}")]
    UnknownLetter(usize),
    #[error("invalid network spec: {0}")]
    InvalidSpec(String),
    #[error("network is not locally irreducible: {0}")]
    NotLocallyIrreducible(String),
    #[error("network is not critical")]
    NotCritical,
    #[error("network is not strongly connected")]
    NotStronglyConnected,
    #[error("network is not an agent network")]
    NotAgentNetwork,
    #[error("state is not locally recurrent")]
    NotLocallyRecurrent,
    #[error("illegal input: {0}")]
    IllegalInput(String),
    #[error("witness vector rejected: {0}")]
    BadWitnessVector(String),
    #[error("update rule not applicable: {0}")]
    RuleNotApplicable(String),
    #[error("search box too small: maximizer touched the boundary at {0}")]
    BoxTooSmall(String),
    #[error("orbit cap exceeded after {0} updates")]
    OrbitCapExceeded(u64),
    #[error("spectral radius is not rational; exchange rate vector unavailable")]
    IrrationalSpectralRadius,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}
