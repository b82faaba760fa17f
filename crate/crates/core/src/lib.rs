//! Acceptability curves for two-arm trials with a binary outcome.
//!
//! An acceptability curve plots, for every candidate threshold `t`, the
//! probability that the true treatment-minus-control risk difference exceeds
//! `t`. Two sources are supported:
//!
//! * **Bayesian**: posterior draws of a two-parameter logistic model under
//!   weakly informative Normal priors, sampled with adaptive random-walk
//!   Metropolis ([`bayes`]). The curve is one minus the empirical CDF.
//! * **Frequentist**: the Wald normal approximation of the risk difference
//!   ([`freq`]). The curve is the one-sided p-value function.
//!
//! ```
//! use accept::{validate_trial, risk_difference, ArmCount, TrialSpec, CurveSource, acceptability_value};
//!
//! let trial = validate_trial(&TrialSpec::new(
//!     "EARNEST",
//!     ArmCount::new("NRTI", 426, 255),
//!     ArmCount::new("Rtvr", 433, 277),
//! ))?;
//! let effect = risk_difference(&trial)?;
//! let src = CurveSource::analytic(effect);
//! assert!((acceptability_value(&src, 0.0) - 0.893).abs() < 1e-3);
//! # Ok::<(), accept::Error>(())
//! ```
//!
//! The guide in `book/` walks through the method chapter by chapter; its
//! code listings are compiled and run as doctests of this crate.

pub mod analysis;
pub mod bayes;
pub mod curve;
mod error;
pub mod format;
pub mod freq;
pub mod json;
pub mod model;
pub mod normal;
pub mod report;
pub mod rng;
pub mod stats;

pub use analysis::{run_analyze, AnalysisBundle, AnalysisError, AnalysisRequest, Mode, TrialInput};
pub use bayes::{
    default_priors, draws_to_natural, log_posterior, sample_posterior, summarize_prior,
    NaturalDraws, PosteriorDraws, PriorSpec, PriorSummary, SamplerConfig,
};
pub use curve::{
    acceptability_curve, acceptability_value, percentile_markers, prob_between, threshold_table,
    AcceptabilityCurve, AcceptabilityTable, CurveSource, PercentileMarkers, SourceTag,
    DEFAULT_THRESHOLDS,
};
pub use error::{Error, Result};
pub use format::format_percent_2sf;
pub use freq::{confidence_curve_value, fit_two_arm, risk_difference, FreqFit};
pub use model::{
    summary_to_normal, validate_trial, ArmCount, EffectSummary, NormalEffect, TrialSpec,
    ValidatedTrial, Warning,
};
pub use report::{render_curve_svg, render_table, Layout, PlotSpec, TableFormat};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/inputs.md")]
    mod inputs {}
    #[doc = include_str!("../../../book/src/frequentist.md")]
    mod frequentist {}
    #[doc = include_str!("../../../book/src/bayesian.md")]
    mod bayesian {}
    #[doc = include_str!("../../../book/src/curves.md")]
    mod curves {}
    #[doc = include_str!("../../../book/src/reporting.md")]
    mod reporting {}
    #[doc = include_str!("../../../book/src/service.md")]
    mod service {}
    #[doc = include_str!("../../../book/src/reproducibility.md")]
    mod reproducibility {}
}
