use thiserror::Error;

/// Everything that can go wrong between trial input and rendered output.
///
/// Every variant maps to a stable machine-readable [`Error::code`] so that the
/// CLI and the HTTP service can report failures without string matching.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid counts for arm '{arm}': {successes} successes out of {n}")]
    InvalidCounts { arm: String, successes: u64, n: u64 },

    #[error("arm label must be non-empty")]
    EmptyLabel,

    #[error("control and treatment arms share the label '{0}'")]
    DuplicateArmLabels(String),

    #[error("rate {0} is outside the open interval (0, 1)")]
    BadRate(f64),

    #[error("invalid effect summary: {0}")]
    InvalidSummary(String),

    #[error(
        "arm '{arm}' has {successes} successes out of {n}; the maximum-likelihood fit diverges, \
         use the Bayesian path or supply an effect summary instead"
    )]
    DegenerateArm { arm: String, successes: u64, n: u64 },

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("invalid sampler configuration: {0}")]
    InvalidSamplerConfig(String),

    #[error("sampler did not converge: split R-hat {rhat:.4} for {parameter} exceeds {limit}")]
    NotConverged {
        parameter: String,
        rhat: f64,
        limit: f64,
    },

    #[error("curve source contains no draws")]
    EmptyDraws,

    #[error("threshold grid must be finite and strictly increasing")]
    BadGrid,

    #[error("interval lower bound {lo} must be below upper bound {hi}")]
    BadInterval { lo: f64, hi: f64 },

    #[error("at most 3 curves can be plotted together, got {0}")]
    TooManyCurves(usize),

    #[error("curve '{0}' has no points")]
    EmptyCurve(String),

    #[error("at most 3 trials can be analysed together, got {0}")]
    TooManyTrials(usize),

    #[error("request contains no trials")]
    NoTrials,

    #[error("trial '{trial}' cannot be analysed in mode '{mode}': {reason}")]
    ModeUnavailable {
        trial: String,
        mode: String,
        reason: String,
    },

    #[error("invalid request field '{field}': {message}")]
    InvalidRequest { field: String, message: String },
}

impl Error {
    /// Stable identifier used in CLI diagnostics and HTTP error bodies.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidCounts { .. } => "invalid_counts",
            Error::EmptyLabel => "empty_label",
            Error::DuplicateArmLabels(_) => "duplicate_arm_labels",
            Error::BadRate(_) => "bad_rate",
            Error::InvalidSummary(_) => "invalid_summary",
            Error::DegenerateArm { .. } => "degenerate_arm",
            Error::InvalidPrior(_) => "invalid_prior",
            Error::InvalidSamplerConfig(_) => "invalid_sampler_config",
            Error::NotConverged { .. } => "not_converged",
            Error::EmptyDraws => "empty_draws",
            Error::BadGrid => "bad_grid",
            Error::BadInterval { .. } => "bad_interval",
            Error::TooManyCurves(_) => "too_many_curves",
            Error::EmptyCurve(_) => "empty_curve",
            Error::TooManyTrials(_) => "too_many_trials",
            Error::NoTrials => "no_trials",
            Error::ModeUnavailable { .. } => "mode_unavailable",
            Error::InvalidRequest { .. } => "invalid_request",
        }
    }

    /// Whether the failure is a convergence problem rather than bad input.
    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::NotConverged { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
