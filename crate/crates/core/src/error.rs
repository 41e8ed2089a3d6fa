use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix is not Hermitian (max |M - M*| = {0:e})")]
    NotHermitian(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unknown unit `{0}`")]
    UnknownUnit(String),
    #[error("arrows {0} and {1} are not composable")]
    NotComposable(String, String),
    #[error("arrow {0} is not in the groupoid")]
    NotAnArrow(String),
    #[error("fluctuation term {index} is not unitary (|UU* - I| = {defect:e})")]
    NotUnitary { index: usize, defect: f64 },
    #[error("pattern enumeration over {units} units exceeds the cap of {cap}")]
    CapExceeded { units: usize, cap: usize },
    #[error("at least one constraint is required")]
    EmptyConstraints,
    #[error("unknown constraint `{0}`")]
    UnknownConstraint(String),
    #[error("unit `{0}` carries a non-abelian block; distance needs one-dimensional endpoints")]
    NonabelianEndpoint(String),
    #[error("matrix does not follow a {0} support pattern")]
    NotAField(&'static str),
    #[error("{0} is not contained in {1}")]
    NotASubset(String, String),
    #[error("no Dirac operator available: {0}")]
    MissingDirac(String),
    #[error("spec field `{field}`: {message}")]
    Spec { field: String, message: String },
    #[error("spec syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn spec(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Spec {
            field: field.into(),
            message: message.into(),
        }
    }
}
