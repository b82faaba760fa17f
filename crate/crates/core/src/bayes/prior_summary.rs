use serde::{Deserialize, Serialize};

use super::{NaturalDraw, PriorSpec};
use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::stats::{mean, quantile_sorted, sorted};

pub const MIN_PRIOR_DRAWS: usize = 10_000;

/// Location and spread of a natural-scale quantity, in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub median: f64,
    pub mean: f64,
    pub iqr: (f64, f64),
    pub central_95: (f64, f64),
}

impl DistributionSummary {
    pub fn from_sample(xs: &[f64]) -> Self {
        let s = sorted(xs);
        DistributionSummary {
            median: quantile_sorted(&s, 0.5),
            mean: mean(&s),
            iqr: (quantile_sorted(&s, 0.25), quantile_sorted(&s, 0.75)),
            central_95: (quantile_sorted(&s, 0.025), quantile_sorted(&s, 0.975)),
        }
    }
}

/// What the logit-scale priors imply on the natural scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSummary {
    /// Control success rate, percent.
    pub control_rate: DistributionSummary,
    /// Treatment minus control, percentage points.
    pub difference: DistributionSummary,
    pub n_draws: usize,
    pub seed: u64,
}

/// Monte Carlo summary of the prior pushed through the inverse logit.
pub fn summarize_prior(priors: &PriorSpec, n_draws: usize, seed: u64) -> Result<PriorSummary> {
    priors.validate()?;
    if n_draws < MIN_PRIOR_DRAWS {
        return Err(Error::InvalidRequest {
            field: "n_draws".into(),
            message: format!("at least {MIN_PRIOR_DRAWS} draws are required, got {n_draws}"),
        });
    }
    let mut rng = Stream::new(seed);
    let mut control = Vec::with_capacity(n_draws);
    let mut diff = Vec::with_capacity(n_draws);
    for _ in 0..n_draws {
        let intercept = rng.normal(priors.intercept_mean_logit, priors.intercept_sd_logit);
        let effect = rng.normal(priors.effect_mean_logit, priors.effect_sd_logit);
        let d = NaturalDraw::from_logit(intercept, effect);
        control.push(100.0 * d.control_rate);
        diff.push(d.diff_pp);
    }
    Ok(PriorSummary {
        control_rate: DistributionSummary::from_sample(&control),
        difference: DistributionSummary::from_sample(&diff),
        n_draws,
        seed,
    })
}
