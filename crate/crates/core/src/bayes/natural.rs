use serde::{Deserialize, Serialize};

use super::PosteriorDraws;
use crate::normal::invlogit;

/// One posterior draw on the natural (probability) scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaturalDraw {
    pub control_rate: f64,
    pub treatment_rate: f64,
    /// `100 · (treatment_rate − control_rate)`.
    pub diff_pp: f64,
}

impl NaturalDraw {
    pub fn from_logit(intercept_logit: f64, effect_logit: f64) -> Self {
        let control_rate = invlogit(intercept_logit);
        let treatment_rate = invlogit(intercept_logit + effect_logit);
        NaturalDraw {
            control_rate,
            treatment_rate,
            diff_pp: 100.0 * (treatment_rate - control_rate),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaturalDraws {
    pub draws: Vec<NaturalDraw>,
}

impl NaturalDraws {
    pub fn diffs_pp(&self) -> Vec<f64> {
        self.draws.iter().map(|d| d.diff_pp).collect()
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }
}

/// Map logit-scale draws to rates and risk differences, preserving order.
pub fn draws_to_natural(posterior: &PosteriorDraws) -> NaturalDraws {
    NaturalDraws {
        draws: posterior
            .draws
            .iter()
            .map(|d| NaturalDraw::from_logit(d.intercept_logit, d.effect_logit))
            .collect(),
    }
}
