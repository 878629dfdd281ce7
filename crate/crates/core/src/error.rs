use alloc::vec::Vec;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("interval division by an interval containing zero")]
    DivisionByZeroInterval,
    #[error("interval operation outside its domain: {0}")]
    DomainError(&'static str),
    #[error("degenerate sample triangle (|D| = {0:e})")]
    DegenerateSamples(f64),
    #[error("resource budget exceeded: {needed} cells > cap {cap}")]
    ResourceBudgetExceeded { needed: u64, cap: u64 },
    #[error("parameter outside the validated range: {0}")]
    OutOfValidatedRange(&'static str),
    #[error("invalid geometric case: {0}")]
    InvalidCase(&'static str),
    #[error("feasible region is empty")]
    EmptyFeasible,
    #[error("singular linear system (pivot {pivot:e} at column {column})")]
    SingularSystem { pivot: f64, column: usize },
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("operator of {rows}x{cols} exceeds the memory budget of {budget} entries")]
    BudgetExceeded { rows: usize, cols: usize, budget: usize },
    #[error("solver did not converge within {iterations} iterations")]
    NotConverged { iterations: usize, best: Vec<f64> },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
