use std::fmt;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Where a failure happened inside the discretization.
#[derive(Debug, Clone, PartialEq)]
pub enum Location {
    Element(usize),
    Side(usize),
    Subcell { element: usize, i: usize, j: usize },
    Node { element: usize, i: usize, j: usize },
    Global,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Element(e) => write!(f, "element {e}"),
            Location::Side(s) => write!(f, "side {s}"),
            Location::Subcell { element, i, j } => write!(f, "element {element} subcell ({i},{j})"),
            Location::Node { element, i, j } => write!(f, "element {element} node ({i},{j})"),
            Location::Global => write!(f, "global"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-physical state {values:?} at {location}")]
    NonPhysicalState { values: Vec<f64>, location: Location },

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("invalid elements (non-positive Jacobian): {0:?}")]
    InvalidElements(Vec<usize>),

    #[error("mesh connectivity error: {0}")]
    Connectivity(String),

    #[error("exchange error: {0}")]
    Exchange(String),

    #[error("file format error: {0}")]
    Format(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("Riemann problem generates vacuum")]
    VacuumGenerated,

    #[error("Roe average failed: {0}")]
    RoeAverage(String),

    #[error("time step underflow: dt = {dt:e} limited by element {element}")]
    TimestepUnderflow { dt: f64, element: usize },

    #[error("stage {stage}: {source}")]
    Stage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn non_physical(values: &[f64]) -> Self {
        Error::NonPhysicalState { values: values.to_vec(), location: Location::Global }
    }

    /// Attach a location to a non-physical state error; other variants pass through.
    pub fn at(self, loc: Location) -> Self {
        match self {
            Error::NonPhysicalState { values, .. } => Error::NonPhysicalState { values, location: loc },
            other => other,
        }
    }
}
