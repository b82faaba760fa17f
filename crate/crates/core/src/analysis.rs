//! End-to-end analysis of up to three trials: request schema, orchestration
//! of both engines, and the result bundle shared by the CLI and the service.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bayes::{
    default_priors, draws_to_natural, sample_posterior, PriorSpec, RhatPolicy, SamplerConfig,
};
use crate::curve::{
    acceptability_curve, acceptability_value, percentile_markers, table_thresholds,
    threshold_table, AcceptabilityCurve, AcceptabilityTable, CurveSource, PercentileMarkers,
    SourceTag,
};
use crate::error::Error;
use crate::freq::{fit_two_arm, risk_difference, FreqFit};
use crate::model::{
    summary_to_normal, validate_trial, ArmCount, EffectSummary, NormalEffect, TrialSpec, Warning,
};
use crate::report::{render_curve_svg, Annotation, AnnotationKind, Layout, PlotCurve, PlotSpec};
use crate::stats::{mean, quantile_sorted};

pub const MAX_TRIALS: usize = 3;
pub const SOFTWARE: &str = "accept";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Bayes,
    Freq,
    #[default]
    Both,
}

impl Mode {
    pub fn includes(&self, tag: SourceTag) -> bool {
        matches!(
            (self, tag),
            (Mode::Both, _) | (Mode::Bayes, SourceTag::Bayes) | (Mode::Freq, SourceTag::Freq)
        )
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Bayes => "bayes",
            Mode::Freq => "freq",
            Mode::Both => "both",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmCounts {
    pub control: ArmCount,
    pub treatment: ArmCount,
}

/// One trial, given either as arm counts or as a published effect summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialInput {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<ArmCounts>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<EffectSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assumed_control_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unacceptable_difference_pp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_difference_pp: Option<f64>,
}

impl TrialInput {
    pub fn from_counts(spec: &TrialSpec) -> Self {
        TrialInput {
            name: spec.name.clone(),
            counts: Some(ArmCounts {
                control: spec.control.clone(),
                treatment: spec.treatment.clone(),
            }),
            summary: None,
            assumed_control_rate: spec.assumed_control_rate,
            unacceptable_difference_pp: spec.unacceptable_difference_pp,
            expected_difference_pp: spec.expected_difference_pp,
        }
    }

    pub fn from_summary(name: impl Into<String>, summary: EffectSummary) -> Self {
        TrialInput {
            name: name.into(),
            counts: None,
            summary: Some(summary),
            assumed_control_rate: None,
            unacceptable_difference_pp: None,
            expected_difference_pp: None,
        }
    }
}

/// Optional overrides of [`SamplerConfig`] fields.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chains: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warmup_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kept_iterations_per_chain: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thin: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_acceptance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhat_limit: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhat_policy: Option<RhatPolicy>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisRequest {
    pub trials: Vec<TrialInput>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerOverrides>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl AnalysisRequest {
    pub fn new(trials: Vec<TrialInput>, mode: Mode) -> Self {
        AnalysisRequest {
            trials,
            mode,
            thresholds: None,
            sampler: None,
            seed: None,
        }
    }

    /// Sampler configuration after applying overrides; `seed` wins over
    /// `sampler.seed`.
    pub fn sampler_config(&self) -> SamplerConfig {
        let mut cfg = SamplerConfig::default();
        if let Some(o) = &self.sampler {
            cfg.chains = o.chains.unwrap_or(cfg.chains);
            cfg.warmup_iterations = o.warmup_iterations.unwrap_or(cfg.warmup_iterations);
            cfg.kept_iterations_per_chain =
                o.kept_iterations_per_chain.unwrap_or(cfg.kept_iterations_per_chain);
            cfg.thin = o.thin.unwrap_or(cfg.thin);
            cfg.seed = o.seed.unwrap_or(cfg.seed);
            cfg.target_acceptance = o.target_acceptance.unwrap_or(cfg.target_acceptance);
            cfg.rhat_limit = o.rhat_limit.unwrap_or(cfg.rhat_limit);
            cfg.rhat_policy = o.rhat_policy.unwrap_or(cfg.rhat_policy);
        }
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        cfg
    }
}

/// An [`Error`] together with the request field it concerns.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisError {
    pub error: Error,
    pub field_path: Option<String>,
}

impl AnalysisError {
    fn at(error: Error, path: impl Into<String>) -> Self {
        AnalysisError {
            error,
            field_path: Some(path.into()),
        }
    }

    pub fn code(&self) -> &'static str {
        self.error.code()
    }
}

impl From<Error> for AnalysisError {
    fn from(error: Error) -> Self {
        AnalysisError {
            error,
            field_path: None,
        }
    }
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.field_path {
            Some(p) => write!(f, "{} (at {p})", self.error),
            None => write!(f, "{}", self.error),
        }
    }
}

impl std::error::Error for AnalysisError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectReport {
    pub mean_pp: f64,
    pub se_pp: f64,
    pub ci_lower_pp: f64,
    pub ci_upper_pp: f64,
}

impl From<NormalEffect> for EffectReport {
    fn from(e: NormalEffect) -> Self {
        let (lo, hi) = e.ci95();
        EffectReport {
            mean_pp: e.mean_pp,
            se_pp: e.se_pp,
            ci_lower_pp: lo,
            ci_upper_pp: hi,
        }
    }
}

/// Curve, markers, table and annotations from one source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub curve: AcceptabilityCurve,
    pub markers: PercentileMarkers,
    pub table: AcceptabilityTable,
    pub annotations: Vec<Annotation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreqResult {
    pub effect: EffectReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FreqFit>,
    #[serde(flatten)]
    pub report: CurveReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rhat_intercept: Option<f64>,
    pub rhat_effect: Option<f64>,
    pub acceptance_rates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorReport {
    pub mean_pp: f64,
    pub median_pp: f64,
    pub ci_lower_pp: f64,
    pub ci_upper_pp: f64,
    pub draws: usize,
    pub diagnostics: ConvergenceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesResult {
    pub priors: PriorSpec,
    pub posterior: PosteriorReport,
    #[serde(flatten)]
    pub report: CurveReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementRow {
    pub threshold_pp: f64,
    pub bayes: f64,
    pub freq: f64,
    pub abs_diff_pp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservedRates {
    pub control_rate: f64,
    pub treatment_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub name: String,
    pub input: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed: Option<ObservedRates>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freq: Option<FreqResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bayes: Option<BayesResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agreement: Option<Vec<AgreementRow>>,
    pub warnings: Vec<Warning>,
}

impl TrialResult {
    pub fn report(&self, tag: SourceTag) -> Option<&CurveReport> {
        match tag {
            SourceTag::Bayes => self.bayes.as_ref().map(|b| &b.report),
            SourceTag::Freq => self.freq.as_ref().map(|f| &f.report),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub software: String,
    pub version: String,
    pub seed: u64,
    pub sampler: SamplerConfig,
    pub request: AnalysisRequest,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Figures {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bayes: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freq: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisBundle {
    pub trials: Vec<TrialResult>,
    pub metadata: Metadata,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<Figures>,
}

impl AnalysisBundle {
    pub fn to_canonical_json(&self) -> String {
        crate::json::to_canonical_json(self).expect("bundle serializes")
    }

    /// Figure for one source across all trials that have it.
    pub fn figure_svg(&self, tag: SourceTag, layout: Layout) -> Result<Option<String>, Error> {
        let curves: Vec<PlotCurve> = self
            .trials
            .iter()
            .filter_map(|t| t.report(tag))
            .map(plot_curve)
            .collect();
        if curves.is_empty() {
            return Ok(None);
        }
        render_curve_svg(&PlotSpec::new(curves).with_layout(layout)).map(Some)
    }

    /// Attach faceted figures for every source present.
    pub fn with_figures(mut self) -> Result<Self, Error> {
        let figures = Figures {
            bayes: self.figure_svg(SourceTag::Bayes, Layout::Faceted)?,
            freq: self.figure_svg(SourceTag::Freq, Layout::Faceted)?,
        };
        self.svg = Some(figures);
        Ok(self)
    }
}

pub fn plot_curve(report: &CurveReport) -> PlotCurve {
    PlotCurve {
        curve: report.curve.clone(),
        markers: report.markers,
        annotations: report.annotations.clone(),
    }
}

enum PreparedInput {
    Counts(crate::model::ValidatedTrial),
    Summary(NormalEffect, Option<Warning>),
}

struct Prepared {
    input: TrialInput,
    kind: PreparedInput,
}

fn validate_request(req: &AnalysisRequest) -> Result<Vec<Prepared>, AnalysisError> {
    if req.trials.is_empty() {
        return Err(AnalysisError::at(Error::NoTrials, "trials"));
    }
    if req.trials.len() > MAX_TRIALS {
        return Err(AnalysisError::at(Error::TooManyTrials(req.trials.len()), "trials"));
    }
    if let Some(ts) = &req.thresholds {
        if let Some(i) = ts.iter().position(|t| !t.is_finite()) {
            return Err(AnalysisError::at(
                Error::InvalidRequest {
                    field: "thresholds".into(),
                    message: "thresholds must be finite".into(),
                },
                format!("thresholds[{i}]"),
            ));
        }
    }
    req.sampler_config()
        .validate()
        .map_err(|e| AnalysisError::at(e, "sampler"))?;

    let mut out = Vec::with_capacity(req.trials.len());
    for (i, t) in req.trials.iter().enumerate() {
        let path = format!("trials[{i}]");
        let invalid = |field: &str, message: &str| {
            AnalysisError::at(
                Error::InvalidRequest {
                    field: field.into(),
                    message: message.into(),
                },
                format!("{path}.{field}"),
            )
        };
        if t.name.trim().is_empty() {
            return Err(invalid("name", "trial name must be non-empty"));
        }
        if req.trials[..i].iter().any(|o| o.name == t.name) {
            return Err(invalid("name", "trial names must be unique"));
        }
        let kind = match (&t.counts, &t.summary) {
            (Some(c), None) => {
                let spec = TrialSpec {
                    name: t.name.clone(),
                    control: c.control.clone(),
                    treatment: c.treatment.clone(),
                    unacceptable_difference_pp: t.unacceptable_difference_pp,
                    expected_difference_pp: t.expected_difference_pp,
                    assumed_control_rate: t.assumed_control_rate,
                };
                let v = validate_trial(&spec).map_err(|e| {
                    let field = match &e {
                        Error::BadRate(_) => "assumed_control_rate",
                        _ => "counts",
                    };
                    AnalysisError::at(e, format!("{path}.{field}"))
                })?;
                PreparedInput::Counts(v)
            }
            (None, Some(s)) => {
                if req.mode == Mode::Bayes {
                    return Err(AnalysisError::at(
                        Error::ModeUnavailable {
                            trial: t.name.clone(),
                            mode: "bayes".into(),
                            reason: "a summary carries no likelihood; supply arm counts".into(),
                        },
                        format!("{path}.summary"),
                    ));
                }
                if t.assumed_control_rate.is_some() {
                    return Err(invalid(
                        "assumed_control_rate",
                        "only meaningful for trials given as counts",
                    ));
                }
                let (effect, warning) = summary_to_normal(s)
                    .map_err(|e| AnalysisError::at(e, format!("{path}.summary")))?;
                PreparedInput::Summary(effect, warning)
            }
            (Some(_), Some(_)) => {
                return Err(invalid("counts", "give either counts or summary, not both"))
            }
            (None, None) => return Err(invalid("counts", "one of counts or summary is required")),
        };
        for (field, v) in [
            ("unacceptable_difference_pp", t.unacceptable_difference_pp),
            ("expected_difference_pp", t.expected_difference_pp),
        ] {
            if v.is_some_and(|v| !v.is_finite()) {
                return Err(invalid(field, "must be finite"));
            }
        }
        out.push(Prepared {
            input: t.clone(),
            kind,
        });
    }
    Ok(out)
}

fn curve_report(src: &CurveSource, input: &TrialInput, thresholds: &[f64]) -> CurveReport {
    let curve = acceptability_curve(src, None)
        .expect("default grid is always valid")
        .named(input.name.clone());
    let annotations = [
        (AnnotationKind::Unacceptable, input.unacceptable_difference_pp),
        (AnnotationKind::Expected, input.expected_difference_pp),
    ]
    .into_iter()
    .filter_map(|(kind, t)| {
        t.map(|t| Annotation {
            kind,
            threshold_pp: t,
            value: acceptability_value(src, t),
        })
    })
    .collect();
    CurveReport {
        curve,
        markers: percentile_markers(src),
        table: threshold_table(src, thresholds),
        annotations,
    }
}

fn analyze_trial(
    p: &Prepared,
    mode: Mode,
    custom_thresholds: Option<&[f64]>,
    cfg: &SamplerConfig,
    index: usize,
) -> Result<TrialResult, AnalysisError> {
    let path = format!("trials[{index}]");
    let thresholds = table_thresholds(custom_thresholds, p.input.unacceptable_difference_pp);
    let mut warnings = Vec::new();
    let mut result = TrialResult {
        name: p.input.name.clone(),
        input: String::new(),
        observed: None,
        freq: None,
        bayes: None,
        agreement: None,
        warnings: Vec::new(),
    };

    match &p.kind {
        PreparedInput::Summary(effect, warning) => {
            result.input = "summary".into();
            warnings.extend(warning.clone());
            if mode == Mode::Both {
                warnings.push(Warning {
                    code: "bayes_unavailable".into(),
                    message: "summary input supports the frequentist curve only".into(),
                });
            }
            let src = CurveSource::analytic(*effect);
            result.freq = Some(FreqResult {
                effect: (*effect).into(),
                fit: None,
                report: curve_report(&src, &p.input, &thresholds),
            });
        }
        PreparedInput::Counts(trial) => {
            result.input = "counts".into();
            result.observed = Some(ObservedRates {
                control_rate: trial.observed_control_rate(),
                treatment_rate: trial.observed_treatment_rate(),
            });
            if mode.includes(SourceTag::Freq) {
                let at = |e| AnalysisError::at(e, format!("{path}.counts"));
                let effect = risk_difference(trial).map_err(at)?;
                let fit = fit_two_arm(trial).map_err(at)?;
                let src = CurveSource::analytic(effect);
                result.freq = Some(FreqResult {
                    effect: effect.into(),
                    fit: Some(fit),
                    report: curve_report(&src, &p.input, &thresholds),
                });
            }
            if mode.includes(SourceTag::Bayes) {
                let priors = default_priors(trial.control_rate_for_prior())
                    .map_err(|e| AnalysisError::at(e, format!("{path}.assumed_control_rate")))?;
                let posterior = sample_posterior(trial, &priors, cfg)
                    .map_err(|e| AnalysisError::at(e, format!("{path}")))?;
                warnings.extend(posterior.warnings.iter().cloned());
                let diffs = draws_to_natural(&posterior).diffs_pp();
                let src = CurveSource::empirical(&diffs)?;
                let sorted = match &src {
                    CurveSource::Empirical(e) => e.sorted_draws(),
                    CurveSource::Analytic(_) => unreachable!(),
                };
                let finite = |v: f64| v.is_finite().then_some(v);
                result.bayes = Some(BayesResult {
                    priors,
                    posterior: PosteriorReport {
                        mean_pp: mean(sorted),
                        median_pp: quantile_sorted(sorted, 0.5),
                        ci_lower_pp: quantile_sorted(sorted, 0.025),
                        ci_upper_pp: quantile_sorted(sorted, 0.975),
                        draws: sorted.len(),
                        diagnostics: ConvergenceReport {
                            rhat_intercept: finite(posterior.diagnostics.rhat_intercept),
                            rhat_effect: finite(posterior.diagnostics.rhat_effect),
                            acceptance_rates: posterior.diagnostics.acceptance_rates.clone(),
                        },
                    },
                    report: curve_report(&src, &p.input, &thresholds),
                });
            }
        }
    }

    if let (Some(b), Some(f)) = (&result.bayes, &result.freq) {
        result.agreement = Some(
            b.report
                .table
                .rows
                .iter()
                .zip(&f.report.table.rows)
                .map(|(br, fr)| AgreementRow {
                    threshold_pp: br.threshold_pp,
                    bayes: br.probability,
                    freq: fr.probability,
                    abs_diff_pp: 100.0 * (br.probability - fr.probability).abs(),
                })
                .collect(),
        );
    }
    result.warnings = warnings;
    Ok(result)
}

/// Run every requested analysis. Trials are processed concurrently and
/// merged in request order; the result depends only on the request.
pub fn run_analyze(req: &AnalysisRequest) -> Result<AnalysisBundle, AnalysisError> {
    let prepared = validate_request(req)?;
    let cfg = req.sampler_config();
    let thresholds = req.thresholds.as_deref();

    let results: Vec<Result<TrialResult, AnalysisError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = prepared
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let cfg = &cfg;
                scope.spawn(move || analyze_trial(p, req.mode, thresholds, cfg, i))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("analysis thread panicked"))
            .collect()
    });
    let trials = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    Ok(AnalysisBundle {
        trials,
        metadata: Metadata {
            software: SOFTWARE.into(),
            version: VERSION.into(),
            seed: cfg.seed,
            sampler: cfg,
            request: req.clone(),
        },
        svg: None,
    })
}
