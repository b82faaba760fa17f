//! Frequentist path: saturated two-arm logistic fit, Wald risk difference and
//! the confidence curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ArmCount, NormalEffect, ValidatedTrial};
use crate::normal;

/// Maximum-likelihood fit of `logit P(success) = intercept + effect · treated`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreqFit {
    pub intercept_logit: f64,
    pub effect_logit: f64,
    /// Inverse Fisher information, ordered (intercept, effect).
    pub cov: [[f64; 2]; 2],
}

fn require_interior(arm: &ArmCount) -> Result<f64> {
    if arm.is_degenerate() {
        return Err(Error::DegenerateArm {
            arm: arm.label.clone(),
            successes: arm.successes,
            n: arm.n,
        });
    }
    Ok(arm.proportion())
}

/// Variance of the arm's log-odds estimate, `1 / (n p (1 - p))`.
fn logit_variance(arm: &ArmCount, p: f64) -> f64 {
    1.0 / (arm.n as f64 * p * (1.0 - p))
}

/// Closed-form MLE of the saturated model.
///
/// The arms are independent, so `Var(intercept) = v_c`,
/// `Var(effect) = v_c + v_t` and `Cov(intercept, effect) = -v_c`.
pub fn fit_two_arm(trial: &ValidatedTrial) -> Result<FreqFit> {
    let pc = require_interior(trial.control())?;
    let pt = require_interior(trial.treatment())?;
    let vc = logit_variance(trial.control(), pc);
    let vt = logit_variance(trial.treatment(), pt);
    let intercept = normal::logit(pc);
    Ok(FreqFit {
        intercept_logit: intercept,
        effect_logit: normal::logit(pt) - intercept,
        cov: [[vc, -vc], [-vc, vc + vt]],
    })
}

/// Average marginal effect of arm on the natural scale, in percentage points.
///
/// For the saturated model the delta-method standard error reduces to the
/// two-proportion Wald formula.
pub fn risk_difference(trial: &ValidatedTrial) -> Result<NormalEffect> {
    let pc = require_interior(trial.control())?;
    let pt = require_interior(trial.treatment())?;
    let nc = trial.control().n as f64;
    let nt = trial.treatment().n as f64;
    let se = (pc * (1.0 - pc) / nc + pt * (1.0 - pt) / nt).sqrt();
    NormalEffect::new(100.0 * (pt - pc), 100.0 * se)
}

/// One-sided p-value curve: `Φ((mean - threshold) / se)`, the approximate
/// probability that the true difference exceeds `threshold_pp`.
pub fn confidence_curve_value(effect: &NormalEffect, threshold_pp: f64) -> f64 {
    normal::cdf((effect.mean_pp - threshold_pp) / effect.se_pp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_trial, TrialSpec};

    fn trial(cs: u64, cn: u64, ts: u64, tn: u64) -> ValidatedTrial {
        validate_trial(&TrialSpec::new(
            "t",
            ArmCount::new("C", cn, cs),
            ArmCount::new("T", tn, ts),
        ))
        .unwrap()
    }

    #[test]
    fn earnest_fit() {
        let fit = fit_two_arm(&trial(255, 426, 277, 433)).unwrap();
        assert!((fit.intercept_logit - 0.3996).abs() < 5e-5);
        assert!((fit.effect_logit - 0.17456).abs() < 5e-6);
        assert!((normal::invlogit(fit.intercept_logit) - 255.0 / 426.0).abs() < 1e-15);
        let [[a, b], [c, d]] = fit.cov;
        assert_eq!(b, c);
        assert!(a > 0.0 && a * d - b * c > 0.0);
    }

    #[test]
    fn equal_arms() {
        let fit = fit_two_arm(&trial(50, 100, 50, 100)).unwrap();
        assert_eq!(fit.intercept_logit, 0.0);
        assert_eq!(fit.effect_logit, 0.0);
        let rd = risk_difference(&trial(50, 100, 50, 100)).unwrap();
        assert_eq!(rd.mean_pp, 0.0);
        let (lo, hi) = rd.ci95();
        assert_eq!(lo, -hi);
    }

    #[test]
    fn degenerate_arms_rejected() {
        for t in [trial(0, 100, 50, 100), trial(50, 100, 100, 100)] {
            assert_eq!(fit_two_arm(&t).unwrap_err().code(), "degenerate_arm");
            assert_eq!(risk_difference(&t).unwrap_err().code(), "degenerate_arm");
        }
    }

    #[test]
    fn paper_risk_differences() {
        let round1 = |x: f64| (x * 10.0).round() / 10.0;
        let e = risk_difference(&trial(255, 426, 277, 433)).unwrap();
        let (lo, hi) = e.ci95();
        assert_eq!((round1(e.mean_pp), round1(lo), round1(hi)), (4.1, -2.4, 10.6));

        let s = risk_difference(&trial(219, 271, 223, 270)).unwrap();
        let (lo, hi) = s.ci95();
        assert_eq!((round1(s.mean_pp), round1(lo), round1(hi)), (1.8, -4.7, 8.3));
    }

    #[test]
    fn curve_values() {
        let e = risk_difference(&trial(255, 426, 277, 433)).unwrap();
        assert!((confidence_curve_value(&e, 0.0) - 0.893).abs() < 5e-4);
        assert_eq!(confidence_curve_value(&e, e.mean_pp), 0.5);

        let s = risk_difference(&trial(219, 271, 223, 270)).unwrap();
        assert!(confidence_curve_value(&s, -12.0) >= 0.9999);
    }
}
