use thiserror::Error;

use crate::report::Report;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("value `{value}` is not in the domain of `{variable}`")]
    ValueOutOfDomain { variable: String, value: String },

    #[error("world state has {got} values but {expected} variables are declared")]
    WorldArity { expected: usize, got: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("no credence for `{variable}`{detail}")]
    MissingCredence { variable: String, detail: String },

    #[error("outcome model has no entry for option `{option}` in world {world}")]
    ModelIncomplete { option: String, world: String },

    #[error("no utility rule matches world {0}")]
    UtilityNotTotal(String),

    #[error("unknown option `{0}`")]
    UnknownOption(String),

    #[error("option set is empty")]
    EmptyOptionSet,

    #[error("true moral dilemma in world {world}: principles {} have disjoint permissible sets", principles.join(", "))]
    Dilemma { world: String, principles: Vec<String> },

    #[error("invalid scenario:\n{0}")]
    Invalid(Report),
}
