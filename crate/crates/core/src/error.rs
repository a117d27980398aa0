use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{0} colors requested; signatures support at most 32")]
    UnsupportedColors(usize),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("query has treewidth above 2: no block in residual query {residual}")]
    Treewidth { residual: String },

    #[error("more than {limit} decomposition trees")]
    TooManyTrees { limit: usize },

    #[error("cannot contract block: {0}")]
    Contract(String),

    #[error("empty plan list")]
    EmptyPlanList,

    #[error("table schema mismatch: {0}")]
    Schema(String),

    #[error("count overflow in {0}")]
    Overflow(&'static str),

    #[error("oracle budget of {budget} exhausted after {explored} partial mappings")]
    Budget { budget: u64, explored: u64 },

    #[error("invalid Chung-Lu spec: {0}")]
    InvalidSpec(String),

    #[error("{0} automorphism search is limited to 10 query nodes")]
    TooLargeForAutomorphisms(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::Treewidth { .. } | Error::TooManyTrees { .. } => 3,
            Error::Overflow(_) => 4,
            Error::Budget { .. } => 5,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
            Error::UnsupportedColors(_) => "unsupported_colors",
            Error::InvalidQuery(_) => "invalid_query",
            Error::Treewidth { .. } => "treewidth",
            Error::TooManyTrees { .. } => "too_many_trees",
            Error::Contract(_) => "contract",
            Error::EmptyPlanList => "empty_plan_list",
            Error::Schema(_) => "schema",
            Error::Overflow(_) => "overflow",
            Error::Budget { .. } => "budget",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::TooLargeForAutomorphisms(_) => "automorphism_limit",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}
