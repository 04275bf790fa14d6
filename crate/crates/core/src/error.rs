use crate::algebra::Scope;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("scope mismatch: cannot combine a {left} interface with a {right} interface")]
    ScopeMismatch { left: Scope, right: Scope },

    #[error("expected a {expected} interface, found a {found} interface")]
    WrongScope { expected: Scope, found: Scope },

    #[error("element {element} cannot appear in a {scope} interface")]
    ElementScope { element: String, scope: Scope },

    #[error("coefficient overflow")]
    Overflow,

    #[error("element {0} has a composite motive; expand motives first")]
    CompositeMotive(String),

    #[error("no value assigned to condition variable `{0}`")]
    MissingVariable(String),

    #[error("{count} condition variables exceed the limit of {limit}")]
    TooManyConditions { count: usize, limit: usize },

    #[error("invalid refinement: {0}")]
    InvalidRefinement(String),

    #[error("event log row {row}: {message}")]
    EventLog { row: usize, message: String },

    #[error("event {index} involves no architecture member ({source_entity} -> {destination})")]
    EventOutsideArchitecture {
        index: usize,
        source_entity: String,
        destination: String,
    },
}

impl Error {
    /// Arithmetic and capacity failures, as opposed to static errors.
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Overflow | Error::TooManyConditions { .. })
    }
}
