use thiserror::Error;

/// Errors raised by the numerical modules and the experiment drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("kernel support 2*epsilon = {width} exceeds domain length {length}")]
    DomainTooSmall { width: f64, length: f64 },

    #[error("under-resolved kernel: epsilon {epsilon} < 4*dx {four_dx}")]
    UnderResolved { epsilon: f64, four_dx: f64 },

    #[error("atom at {location} lies within {margin} of the domain boundary [{a}, {b}]")]
    Placement {
        location: f64,
        margin: f64,
        a: f64,
        b: f64,
    },

    #[error("positivity violation: value {value} at node {index} (floor {floor})")]
    Positivity {
        index: usize,
        value: f64,
        floor: f64,
    },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(&'static str),

    #[error("consistency experiment requires a coefficient without singular atoms")]
    InadmissibleConsistencyInput,

    #[error("singular tridiagonal system at row {row}")]
    SingularSystem { row: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value at node {0}")]
    NonFinite(usize),

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
