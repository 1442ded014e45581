use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}: undefined component `{name}`")]
    UndefinedComponent { line: usize, name: String },

    #[error("component `{0}` is defined more than once")]
    DuplicateComponent(String),

    #[error(
        "local function of `{component}` is not unate: `{variable}` occurs with both signs \
         (network is not locally monotone)"
    )]
    NonUnate { component: String, variable: String },

    #[error("influence graph is not locally monotone: edge {source_name} -> {target} has both signs")]
    NonMonotoneGraph { source_name: String, target: String },

    #[error("local function of `{component}` expands to more than {limit} DNF clauses")]
    DnfTooLarge { component: String, limit: usize },

    #[error("unknown component `{0}`")]
    UnknownName(String),

    #[error("invalid value for `{name}`: {message}")]
    InvalidValue { name: String, message: String },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("oracle scale exceeded: {0}")]
    OracleScale(String),

    #[error("a SAT engine is required for networks with more than {0} components")]
    EngineRequired(usize),

    #[error("engine failure: {0}")]
    Engine(String),

    #[error("time limit reached")]
    Timeout,

    #[error("refinement cap of {0} reached")]
    RefinementCap(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("QDIMACS error: {0}")]
    Qdimacs(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
