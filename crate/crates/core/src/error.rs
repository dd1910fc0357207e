use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate channel estimate for user {user}: zero norm")]
    DegenerateEstimate { user: usize },

    #[error("bisection bracket exhausted: {0}")]
    BracketFailure(String),

    #[error("{solver} did not converge after {iterations} iterations (last residual {residual:e})")]
    NonConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
        trace: Vec<f64>,
    },

    #[error("grid search over {points} points exceeds the budget of {budget}; use the greedy bound solver instead")]
    Capacity { points: u128, budget: u128 },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("realization {realization} (seed {seed}) failed: {source}")]
    Realization {
        realization: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
