//! Trial inputs and the two curve sources derived from published summaries.
//!
//! Differences are always treatment minus control, in percentage points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal::{self, Z_95};

/// One arm of a two-arm trial with a binary favourable outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmCount {
    pub label: String,
    pub n: u64,
    pub successes: u64,
}

impl ArmCount {
    pub fn new(label: impl Into<String>, n: u64, successes: u64) -> Self {
        ArmCount {
            label: label.into(),
            n,
            successes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.label.trim().is_empty() {
            return Err(Error::EmptyLabel);
        }
        if self.n == 0 || self.successes > self.n {
            return Err(Error::InvalidCounts {
                arm: self.label.clone(),
                successes: self.successes,
                n: self.n,
            });
        }
        Ok(())
    }

    /// Observed proportion `successes / n`.
    pub fn proportion(&self) -> f64 {
        self.successes as f64 / self.n as f64
    }

    /// True when every participant or none had the outcome.
    pub fn is_degenerate(&self) -> bool {
        self.successes == 0 || self.successes == self.n
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub name: String,
    pub control: ArmCount,
    pub treatment: ArmCount,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unacceptable_difference_pp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_difference_pp: Option<f64>,
    /// Control success rate assumed when centring the intercept prior.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assumed_control_rate: Option<f64>,
}

impl TrialSpec {
    pub fn new(name: impl Into<String>, control: ArmCount, treatment: ArmCount) -> Self {
        TrialSpec {
            name: name.into(),
            control,
            treatment,
            unacceptable_difference_pp: None,
            expected_difference_pp: None,
            assumed_control_rate: None,
        }
    }

    pub fn with_unacceptable(mut self, pp: f64) -> Self {
        self.unacceptable_difference_pp = Some(pp);
        self
    }

    pub fn with_expected(mut self, pp: f64) -> Self {
        self.expected_difference_pp = Some(pp);
        self
    }

    pub fn with_assumed_control_rate(mut self, rate: f64) -> Self {
        self.assumed_control_rate = Some(rate);
        self
    }

    /// Same trial with the arms exchanged; differences change sign.
    pub fn swapped(&self) -> Self {
        TrialSpec {
            name: self.name.clone(),
            control: self.treatment.clone(),
            treatment: self.control.clone(),
            unacceptable_difference_pp: self.unacceptable_difference_pp.map(|v| -v),
            expected_difference_pp: self.expected_difference_pp.map(|v| -v),
            assumed_control_rate: None,
        }
    }
}

/// A [`TrialSpec`] that passed [`validate_trial`], with observed rates attached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidatedTrial {
    spec: TrialSpec,
    control_rate: f64,
    treatment_rate: f64,
}

impl ValidatedTrial {
    pub fn spec(&self) -> &TrialSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn control(&self) -> &ArmCount {
        &self.spec.control
    }

    pub fn treatment(&self) -> &ArmCount {
        &self.spec.treatment
    }

    pub fn observed_control_rate(&self) -> f64 {
        self.control_rate
    }

    pub fn observed_treatment_rate(&self) -> f64 {
        self.treatment_rate
    }

    /// The assumed control rate, falling back to the observed one.
    pub fn control_rate_for_prior(&self) -> f64 {
        self.spec.assumed_control_rate.unwrap_or(self.control_rate)
    }
}

pub fn validate_trial(spec: &TrialSpec) -> Result<ValidatedTrial> {
    spec.control.validate()?;
    spec.treatment.validate()?;
    if spec.control.label == spec.treatment.label {
        return Err(Error::DuplicateArmLabels(spec.control.label.clone()));
    }
    if let Some(rate) = spec.assumed_control_rate {
        check_rate(rate)?;
    }
    for (field, value) in [
        ("unacceptable_difference_pp", spec.unacceptable_difference_pp),
        ("expected_difference_pp", spec.expected_difference_pp),
    ] {
        if value.is_some_and(|v| !v.is_finite()) {
            return Err(Error::InvalidRequest {
                field: field.into(),
                message: "must be finite".into(),
            });
        }
    }
    Ok(ValidatedTrial {
        control_rate: spec.control.proportion(),
        treatment_rate: spec.treatment.proportion(),
        spec: spec.clone(),
    })
}

pub(crate) fn check_rate(rate: f64) -> Result<f64> {
    if rate > 0.0 && rate < 1.0 {
        Ok(rate)
    } else {
        Err(Error::BadRate(rate))
    }
}

/// A published point estimate with its confidence or credible interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectSummary {
    pub estimate_pp: f64,
    pub ci_lower_pp: f64,
    pub ci_upper_pp: f64,
    #[serde(default = "default_ci_level")]
    pub ci_level: f64,
}

fn default_ci_level() -> f64 {
    0.95
}

impl EffectSummary {
    pub fn new(estimate_pp: f64, ci_lower_pp: f64, ci_upper_pp: f64, ci_level: f64) -> Self {
        EffectSummary {
            estimate_pp,
            ci_lower_pp,
            ci_upper_pp,
            ci_level,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.estimate_pp, self.ci_lower_pp, self.ci_upper_pp]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidSummary("bounds must be finite".into()));
        }
        if !(self.ci_lower_pp < self.estimate_pp && self.estimate_pp < self.ci_upper_pp) {
            return Err(Error::InvalidSummary(format!(
                "expected lower < estimate < upper, got {} < {} < {}",
                self.ci_lower_pp, self.estimate_pp, self.ci_upper_pp
            )));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::InvalidSummary(format!(
                "ci_level {} must be a fraction in (0, 1)",
                self.ci_level
            )));
        }
        Ok(())
    }
}

/// Normal approximation to the sampling distribution of the risk difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalEffect {
    pub mean_pp: f64,
    pub se_pp: f64,
}

impl NormalEffect {
    pub fn new(mean_pp: f64, se_pp: f64) -> Result<Self> {
        if !mean_pp.is_finite() || !se_pp.is_finite() || se_pp <= 0.0 {
            return Err(Error::InvalidSummary(format!(
                "normal effect needs finite mean and positive se, got ({mean_pp}, {se_pp})"
            )));
        }
        Ok(NormalEffect { mean_pp, se_pp })
    }

    /// Wald interval at the given two-sided level.
    pub fn interval(&self, level: f64) -> (f64, f64) {
        let z = two_sided_z(level);
        (self.mean_pp - z * self.se_pp, self.mean_pp + z * self.se_pp)
    }

    pub fn ci95(&self) -> (f64, f64) {
        self.interval(0.95)
    }

    pub fn negated(&self) -> Self {
        NormalEffect {
            mean_pp: -self.mean_pp,
            se_pp: self.se_pp,
        }
    }
}

/// Two-sided critical value; exactly [`Z_95`] at the 95% level.
pub fn two_sided_z(level: f64) -> f64 {
    if level == 0.95 {
        Z_95
    } else {
        normal::quantile(0.5 * (1.0 + level))
    }
}

/// Non-fatal diagnostic attached to an analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Warning {
    pub code: String,
    pub message: String,
}

/// Tolerated imbalance between the two half-widths of a summary interval.
pub const ASYMMETRY_TOLERANCE: f64 = 0.10;

/// Convert a summary into a [`NormalEffect`] assuming a symmetric Wald interval.
///
/// The standard error comes from the full interval width. An interval whose
/// half-widths differ by more than 10% of the mean half-width still converts,
/// with an `asymmetric_interval` warning.
pub fn summary_to_normal(s: &EffectSummary) -> Result<(NormalEffect, Option<Warning>)> {
    s.validate()?;
    let z = two_sided_z(s.ci_level);
    let half_width = 0.5 * (s.ci_upper_pp - s.ci_lower_pp);
    let effect = NormalEffect::new(s.estimate_pp, half_width / z)?;

    let upper_arm = s.ci_upper_pp - s.estimate_pp;
    let lower_arm = s.estimate_pp - s.ci_lower_pp;
    let warning = ((upper_arm - lower_arm).abs() > ASYMMETRY_TOLERANCE * half_width).then(|| {
        Warning {
            code: "asymmetric_interval".into(),
            message: format!(
                "interval ({}, {}) around {} is asymmetric; standard error taken from the half-width",
                s.ci_lower_pp, s.ci_upper_pp, s.estimate_pp
            ),
        }
    });
    Ok((effect, warning))
}
