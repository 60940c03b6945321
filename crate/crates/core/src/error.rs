use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("series centers or scales do not match")]
    CenterMismatch,
    #[error("scale ball contains zero")]
    SingularScale,
    #[error("division by a ball containing zero")]
    DivisionByZero,
    #[error("refuted: {0}")]
    Refuted(String),
    #[error("undecidable at this precision: {0}")]
    Undecidable(String),
    #[error("no sign change found: {0}")]
    NotFound(String),
    #[error("{what} = {value} exceeds the cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: u64,
        cap: u64,
    },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
