use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid history at step {step}: {reason}")]
    InvalidHistory { step: usize, reason: String },

    #[error("unknown environment {0:?}")]
    UnknownEnvironment(String),

    #[error("unknown utility {0:?}")]
    UnknownUtility(String),

    #[error("unknown symbol {symbol:?} in {alphabet}")]
    UnknownSymbol { alphabet: String, symbol: String },

    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unbound name {0:?}")]
    UnboundName(String),

    #[error("name space mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("policy {policy:?} is undefined at history {history}")]
    PolicyUndefined { policy: String, history: String },

    #[error("history of length {len} is at or beyond horizon {horizon}")]
    HorizonExceeded { len: usize, horizon: usize },

    #[error("utility value {0} outside [0,1]")]
    UtilityRange(String),

    #[error("stream of length {len} too short: need {need}")]
    StreamTooShort { len: usize, need: usize },

    #[error("enumeration cap of {cap} exceeded")]
    CapExceeded { cap: usize },

    #[error("name space contains modification-dependent policies: {0}")]
    ModificationDependent(String),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
