use core::fmt;

/// Which end of the score range an ability estimate ran into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Boundary {
    /// No correct responses (or statistic at the lower end of its range).
    ZeroScore,
    /// All responses correct (or statistic at the upper end of its range).
    PerfectScore,
}

impl Boundary {
    pub fn code(self) -> &'static str {
        match self {
            Boundary::ZeroScore => "zero-score",
            Boundary::PerfectScore => "perfect-score",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    EmptyBank,
    InvalidItem { index: usize, reason: &'static str },
    InvalidModel(&'static str),
    InvalidGrid(&'static str),
    InvalidConfig(&'static str),
    InvalidSpec(&'static str),
    InvalidResponse { row: usize, col: usize },
    DimensionMismatch { expected: usize, found: usize },
    /// The requested operation is only defined for models without guessing.
    UnsupportedModel(&'static str),
    /// An ability estimate does not exist for this pattern.
    ScoreBoundary(Boundary),
    ZeroMass,
    NotSymmetric { row: usize, col: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyBank => write!(f, "item bank is empty"),
            Error::InvalidItem { index, reason } => write!(f, "item {index}: {reason}"),
            Error::InvalidModel(why) => write!(f, "invalid model: {why}"),
            Error::InvalidGrid(why) => write!(f, "invalid quadrature grid: {why}"),
            Error::InvalidConfig(why) => write!(f, "invalid configuration: {why}"),
            Error::InvalidSpec(why) => write!(f, "invalid simulation spec: {why}"),
            Error::InvalidResponse { row, col } => {
                write!(f, "response at row {row}, column {col} is not 0 or 1")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::UnsupportedModel(why) => write!(f, "unsupported model: {why}"),
            Error::ScoreBoundary(b) => write!(f, "no finite estimate ({})", b.code()),
            Error::ZeroMass => write!(f, "posterior mass is zero at every node"),
            Error::NotSymmetric { row, col } => {
                write!(f, "matrix is not symmetric at ({row}, {col})")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
