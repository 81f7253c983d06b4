use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("instance parse error: {0}")]
    Parse(String),
    #[error("instance too small: n = {0}, need at least {1}")]
    InstanceTooSmall(usize, usize),
    #[error("degree violation at vertex {0}: expected {1}, found {2}")]
    DegreeViolation(usize, usize, usize),
    #[error("no perfect matching exists")]
    Infeasible,
    #[error("square gadget not normalized: l1+l3 > l2+l4")]
    NotNormalized,
    #[error("diagonal bound violated on a bad square (cycle cover was not maximum)")]
    DiagonalBoundViolated,
    #[error("gadget contract violated for internal pair ({0}, {1})")]
    ContractViolated(usize, usize),
    #[error("gadget on cycle {0} has {1} externally matched copies, expected 2")]
    ExitCountViolation(usize, usize),
    #[error("built multigraph is not 4-regular at vertex {0}")]
    NotFourRegular(usize),
    #[error("transform precondition violated: {0}")]
    TransformPrecondition(String),
    #[error("input coloring invalid: {0}")]
    InvalidInputColoring(String),
    #[error("decycling matching deficient in phase {0}")]
    MatchingDeficient(usize),
    #[error("removal set exceeds 1/5 budget without safety-net events")]
    BudgetExceeded,
    #[error("color class is not a collection of paths: {0}")]
    NotPathCollection(String),
    #[error("instance too large for the exact oracle: n = {0} > cap {1}")]
    TooLarge(usize, usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
