use thiserror::Error;

/// Library-level failure conditions.
///
/// Validation failures and infeasible searches are ordinary outcomes of user
/// input; integration failures indicate the numerics could not be trusted and
/// the result was withheld.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical integration failed: {0}")]
    IntegrationFailure(String),

    /// The block error probability reached 1, so the expected delay diverges.
    /// Reported as a distinguished condition rather than a bare infinity.
    #[error("infinite delay: block error probability is 1")]
    InfiniteDelay,

    #[error("empty search grid")]
    EmptyGrid,

    /// Fixed-budget sweeps admit only grid points with an even n-share;
    /// rounding silently would misreport the budget.
    #[error("budget parity violated: total - v must be even (total={total}, v={v})")]
    BudgetParity { total: u64, v: u32 },

    #[error("simulation produced no data: {0}")]
    EmptySimulation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
