use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state space too large: more than {cap} elements")]
    TooLarge { cap: usize },

    #[error("{what} out of range: {value} not in [{lo}, {hi}]")]
    OutOfRange { what: &'static str, value: f64, lo: f64, hi: f64 },

    #[error("no balanced bias found for rank {rank} on the schedule t in [0, {t_max}]")]
    NoBalancedBias { rank: usize, t_max: u64 },

    #[error("rejection budget exhausted after {draws} draws")]
    RejectionBudgetExhausted { draws: u64 },

    #[error("coalescence budget exhausted after {steps} coupled steps")]
    CoalescenceBudgetExhausted { steps: u64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn out_of_range(what: &'static str, value: impl Into<f64>, lo: impl Into<f64>, hi: impl Into<f64>) -> Self {
        Error::OutOfRange { what, value: value.into(), lo: lo.into(), hi: hi.into() }
    }
}
