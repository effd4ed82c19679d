use thiserror::Error;

/// Largest number of variables any enumeration in this crate will touch.
pub const MAX_VARS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable index {0} assigned more than once")]
    DuplicateIndex(usize),
    #[error("variable index {index} out of range for {n} variables")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("variable spaces differ ({left} vs {right} variables)")]
    SpaceMismatch { left: usize, right: usize },
    #[error("{free} free variables exceeds the enumeration budget of {limit}")]
    TooManyFree { free: usize, limit: usize },
    #[error("{n} variables exceeds the supported maximum of {limit}")]
    TooManyVariables { n: usize, limit: usize },
    #[error("variable space must have at least one variable")]
    EmptySpace,
    #[error("variable names must be distinct and one per variable: {0}")]
    BadNames(String),
    #[error("malformed state {0:?}")]
    BadState(String),
    #[error("goal set is empty")]
    EmptyGoalSet,
    #[error("task declares no decision frames")]
    NoFrames,
    #[error("initial state {0} has no goal supersequence")]
    UnreachableInitial(String),
    #[error("sample size {m} must be below the goal count {goals}")]
    SampleTooLarge { m: usize, goals: usize },
    #[error("sample size must be at least 1")]
    EmptySample,
    #[error("state {0} is not a goal of the task")]
    NotAGoal(String),
    #[error("bad width: {0}")]
    BadWidth(String),
    #[error("bad period: {0}")]
    BadPeriod(String),
    #[error("bad cpu spec: {0}")]
    BadSpec(String),
    #[error("no exact sentence of width <= {width} exists ({violations} observed non-goals accepted)")]
    ExactnessInfeasible { width: usize, violations: usize },
    #[error("evaluation set is empty")]
    EmptyEvalSet,
    #[error("uniform abduction requires an rng stream")]
    MissingRng,
    #[error("extensional-first abduction requires an extensional solution")]
    NotExtensional,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("runs cannot be compared: {0}")]
    MismatchedRuns(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
