//! Bayesian path: Normal priors on the logit scale, the binomial posterior of
//! the two-parameter logistic model, random-walk Metropolis sampling and
//! natural-scale summaries.
//!
//! The model is
//!
//! ```text
//! logit P(success | control)   = intercept
//! logit P(success | treatment) = intercept + effect
//! intercept ~ Normal(logit(assumed control rate), 2)
//! effect    ~ Normal(0, 8)
//! ```

mod natural;
mod prior_summary;
mod sampler;

pub use natural::{draws_to_natural, NaturalDraw, NaturalDraws};
pub use prior_summary::{summarize_prior, DistributionSummary, PriorSummary, MIN_PRIOR_DRAWS};
pub use sampler::{
    sample_posterior, Diagnostics, Draw, PosteriorDraws, RhatPolicy, SamplerConfig, DEFAULT_SEED,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_rate, ValidatedTrial};
use crate::normal::{self, ln_invlogit};

pub const DEFAULT_INTERCEPT_SD: f64 = 2.0;
pub const DEFAULT_EFFECT_MEAN: f64 = 0.0;
pub const DEFAULT_EFFECT_SD: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub intercept_mean_logit: f64,
    pub intercept_sd_logit: f64,
    pub effect_mean_logit: f64,
    pub effect_sd_logit: f64,
}

impl PriorSpec {
    pub fn new(
        intercept_mean_logit: f64,
        intercept_sd_logit: f64,
        effect_mean_logit: f64,
        effect_sd_logit: f64,
    ) -> Result<Self> {
        let p = PriorSpec {
            intercept_mean_logit,
            intercept_sd_logit,
            effect_mean_logit,
            effect_sd_logit,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let sds_ok = [self.intercept_sd_logit, self.effect_sd_logit]
            .iter()
            .all(|sd| sd.is_finite() && *sd > 0.0);
        let means_ok = self.intercept_mean_logit.is_finite() && self.effect_mean_logit.is_finite();
        if !sds_ok || !means_ok {
            return Err(Error::InvalidPrior(format!(
                "means must be finite and standard deviations positive: {self:?}"
            )));
        }
        Ok(())
    }

    /// Prior mean as a parameter vector.
    pub fn mean(&self) -> [f64; 2] {
        [self.intercept_mean_logit, self.effect_mean_logit]
    }
}

/// Weakly informative priors centred on an assumed control success rate.
pub fn default_priors(assumed_control_rate: f64) -> Result<PriorSpec> {
    let rate = check_rate(assumed_control_rate)?;
    PriorSpec::new(
        normal::logit(rate),
        DEFAULT_INTERCEPT_SD,
        DEFAULT_EFFECT_MEAN,
        DEFAULT_EFFECT_SD,
    )
}

/// Sum of the two Normal prior log-densities, normalising constants included.
pub fn log_prior(params: [f64; 2], priors: &PriorSpec) -> f64 {
    let [intercept, effect] = params;
    if !intercept.is_finite() || !effect.is_finite() {
        return f64::NEG_INFINITY;
    }
    normal::ln_pdf_scaled(intercept, priors.intercept_mean_logit, priors.intercept_sd_logit)
        + normal::ln_pdf_scaled(effect, priors.effect_mean_logit, priors.effect_sd_logit)
}

/// Log-likelihood of the individual 0/1 outcomes of both arms.
///
/// This is the Bernoulli likelihood of the participant-level data, so it omits
/// the constant `ln C(n, successes)` of the grouped binomial form.
pub fn log_likelihood(params: [f64; 2], trial: &ValidatedTrial) -> f64 {
    let [intercept, effect] = params;
    if !intercept.is_finite() || !effect.is_finite() {
        return f64::NEG_INFINITY;
    }
    let arm = |eta: f64, n: u64, s: u64| {
        s as f64 * ln_invlogit(eta) + (n - s) as f64 * ln_invlogit(-eta)
    };
    let c = trial.control();
    let t = trial.treatment();
    arm(intercept, c.n, c.successes) + arm(intercept + effect, t.n, t.successes)
}

pub fn log_posterior(params: [f64; 2], trial: &ValidatedTrial, priors: &PriorSpec) -> f64 {
    log_likelihood(params, trial) + log_prior(params, priors)
}
