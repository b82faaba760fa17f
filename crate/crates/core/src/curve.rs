//! Acceptability values, curves, percentile markers and threshold tables.
//!
//! A curve source is either a sample of posterior risk differences
//! (empirical, one minus the ECDF) or a normal approximation (analytic, the
//! confidence curve). Both answer the same question: the probability that
//! the true difference exceeds a threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::format_percent_2sf;
use crate::freq::confidence_curve_value;
use crate::model::NormalEffect;
use crate::normal;
use crate::stats::{quantile_sorted, sorted};

/// Thresholds reported by default, in percentage points.
pub const DEFAULT_THRESHOLDS: [f64; 7] = [-12.0, -10.0, -5.0, 0.0, 5.0, 10.0, 12.0];

/// Points on the default analytic grid.
pub const ANALYTIC_GRID_POINTS: usize = 401;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceTag {
    Bayes,
    Freq,
}

impl SourceTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            SourceTag::Bayes => "bayes",
            SourceTag::Freq => "freq",
        }
    }
}

/// Sorted sample of risk differences in percentage points.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSource {
    sorted: Vec<f64>,
}

impl EmpiricalSource {
    pub fn new(draws_pp: &[f64]) -> Result<Self> {
        if draws_pp.is_empty() {
            return Err(Error::EmptyDraws);
        }
        if draws_pp.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidRequest {
                field: "draws".into(),
                message: "draws must be finite".into(),
            });
        }
        Ok(EmpiricalSource {
            sorted: sorted(draws_pp),
        })
    }

    pub fn sorted_draws(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of draws strictly greater than `threshold_pp`.
    pub fn exceedance(&self, threshold_pp: f64) -> f64 {
        let at_or_below = self.sorted.partition_point(|&d| d <= threshold_pp);
        (self.sorted.len() - at_or_below) as f64 / self.sorted.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveSource {
    Empirical(EmpiricalSource),
    Analytic(NormalEffect),
}

impl CurveSource {
    pub fn empirical(draws_pp: &[f64]) -> Result<Self> {
        EmpiricalSource::new(draws_pp).map(CurveSource::Empirical)
    }

    pub fn analytic(effect: NormalEffect) -> Self {
        CurveSource::Analytic(effect)
    }

    pub fn tag(&self) -> SourceTag {
        match self {
            CurveSource::Empirical(_) => SourceTag::Bayes,
            CurveSource::Analytic(_) => SourceTag::Freq,
        }
    }

    /// Quantile of the difference distribution itself (not of the curve).
    pub fn difference_quantile(&self, p: f64) -> f64 {
        match self {
            CurveSource::Empirical(e) => quantile_sorted(&e.sorted, p),
            CurveSource::Analytic(n) => {
                let z = if p == 0.975 {
                    normal::Z_95
                } else if p == 0.025 {
                    -normal::Z_95
                } else {
                    normal::quantile(p)
                };
                n.mean_pp + z * n.se_pp
            }
        }
    }
}

/// Probability that the true difference exceeds `threshold_pp`.
pub fn acceptability_value(src: &CurveSource, threshold_pp: f64) -> f64 {
    match src {
        CurveSource::Empirical(e) => e.exceedance(threshold_pp),
        CurveSource::Analytic(n) => confidence_curve_value(n, threshold_pp),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub threshold_pp: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptabilityCurve {
    pub trial_name: String,
    pub source: SourceTag,
    pub points: Vec<CurvePoint>,
}

impl AcceptabilityCurve {
    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.trial_name = name.into();
        self
    }

    pub fn x_range(&self) -> Option<(f64, f64)> {
        Some((self.points.first()?.threshold_pp, self.points.last()?.threshold_pp))
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    let finite = grid.iter().all(|t| t.is_finite());
    let increasing = grid.windows(2).all(|w| w[0] < w[1]);
    if finite && increasing {
        Ok(())
    } else {
        Err(Error::BadGrid)
    }
}

/// Evaluate the curve on `grid`, or on the source's natural grid.
///
/// The default grid is 401 evenly spaced thresholds over `mean ± 4·se` for an
/// analytic source, and the distinct draw values for an empirical one (which
/// represents the step function exactly: the value at each draw is the level
/// just to its right).
pub fn acceptability_curve(src: &CurveSource, grid: Option<&[f64]>) -> Result<AcceptabilityCurve> {
    let thresholds: Vec<f64> = match grid {
        Some(g) => {
            check_grid(g)?;
            g.to_vec()
        }
        None => match src {
            CurveSource::Analytic(n) => {
                let lo = n.mean_pp - 4.0 * n.se_pp;
                let step = 8.0 * n.se_pp / (ANALYTIC_GRID_POINTS - 1) as f64;
                (0..ANALYTIC_GRID_POINTS)
                    .map(|i| lo + step * i as f64)
                    .collect()
            }
            CurveSource::Empirical(e) => {
                let mut v = e.sorted.clone();
                v.dedup();
                v
            }
        },
    };
    Ok(AcceptabilityCurve {
        trial_name: String::new(),
        source: src.tag(),
        points: thresholds
            .into_iter()
            .map(|t| CurvePoint {
                threshold_pp: t,
                value: acceptability_value(src, t),
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Marker {
    pub threshold_pp: f64,
    pub value: f64,
}

/// The 2.5th, 50th and 97.5th percentiles of the difference, placed on the
/// curve at acceptability values 0.975, 0.5 and 0.025 respectively.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercentileMarkers {
    pub lower: Marker,
    pub median: Marker,
    pub upper: Marker,
}

impl PercentileMarkers {
    pub fn as_array(&self) -> [Marker; 3] {
        [self.lower, self.median, self.upper]
    }
}

pub fn percentile_markers(src: &CurveSource) -> PercentileMarkers {
    let at = |p: f64, value: f64| Marker {
        threshold_pp: src.difference_quantile(p),
        value,
    };
    PercentileMarkers {
        lower: at(0.025, 0.975),
        median: at(0.5, 0.5),
        upper: at(0.975, 0.025),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub threshold_pp: f64,
    pub probability: f64,
    pub formatted: String,
}

impl TableRow {
    pub fn new(threshold_pp: f64, probability: f64) -> Self {
        TableRow {
            threshold_pp,
            probability,
            formatted: format_percent_2sf(probability),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AcceptabilityTable {
    pub rows: Vec<TableRow>,
}

/// One row per threshold, in the order given.
pub fn threshold_table(src: &CurveSource, thresholds: &[f64]) -> AcceptabilityTable {
    AcceptabilityTable {
        rows: thresholds
            .iter()
            .map(|&t| TableRow::new(t, acceptability_value(src, t)))
            .collect(),
    }
}

/// Thresholds for a trial's table: `custom` (or the defaults) with the
/// pre-specified unacceptable difference appended when missing.
pub fn table_thresholds(custom: Option<&[f64]>, unacceptable_pp: Option<f64>) -> Vec<f64> {
    let mut out = custom.map_or_else(|| DEFAULT_THRESHOLDS.to_vec(), <[f64]>::to_vec);
    if let Some(u) = unacceptable_pp {
        if !out.contains(&u) {
            out.push(u);
        }
    }
    out
}

/// Probability that the true difference lies in `(t_lo, t_hi]`.
pub fn prob_between(src: &CurveSource, t_lo: f64, t_hi: f64) -> Result<f64> {
    if !(t_lo < t_hi) {
        return Err(Error::BadInterval { lo: t_lo, hi: t_hi });
    }
    let p = acceptability_value(src, t_lo) - acceptability_value(src, t_hi);
    Ok(p.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn earnest() -> CurveSource {
        let pc: f64 = 255.0 / 426.0;
        let pt: f64 = 277.0 / 433.0;
        let se = (pc * (1.0 - pc) / 426.0 + pt * (1.0 - pt) / 433.0).sqrt();
        CurveSource::analytic(NormalEffect::new(100.0 * (pt - pc), 100.0 * se).unwrap())
    }

    #[test]
    fn empirical_values() {
        let src = CurveSource::empirical(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(acceptability_value(&src, 2.5), 0.5);
        assert_eq!(acceptability_value(&src, 2.0), 0.5);
        assert_eq!(acceptability_value(&src, 0.0), 1.0);
        assert_eq!(acceptability_value(&src, 4.0), 0.0);
        assert_eq!(prob_between(&src, 1.5, 3.5).unwrap(), 0.5);
        assert_eq!(CurveSource::empirical(&[]).unwrap_err(), Error::EmptyDraws);
    }

    #[test]
    fn ties_use_strict_inequality() {
        let src = CurveSource::empirical(&[1.0, 2.0, 2.0, 2.0, 3.0]).unwrap();
        assert_eq!(acceptability_value(&src, 2.0), 0.2);
        assert!((acceptability_value(&src, 1.999) - 0.8).abs() < 1e-15);
        let curve = acceptability_curve(&src, None).unwrap();
        assert_eq!(curve.points.len(), 3);
        assert_eq!(curve.points[1], CurvePoint { threshold_pp: 2.0, value: 0.2 });
    }

    #[test]
    fn analytic_values() {
        let src = earnest();
        let v = acceptability_value(&src, -5.0);
        assert!((v - 0.997).abs() < 5e-4);
        assert_eq!(format_percent_2sf(v), "100%");
        let between = prob_between(&src, 0.0, 5.0).unwrap();
        assert!((between - (0.8929254081439129 - 0.39440752648927235)).abs() < 1e-12);
        assert!(prob_between(&src, 1.0, 1.0 + 1e-9).unwrap() < 1e-9);
        assert_eq!(prob_between(&src, 5.0, 0.0).unwrap_err().code(), "bad_interval");
    }

    #[test]
    fn default_grids() {
        let curve = acceptability_curve(&earnest(), None).unwrap();
        assert_eq!(curve.points.len(), 401);
        assert!(curve.points[0].value >= 0.9999);
        assert!(curve.points[400].value <= 0.0001);
        assert_eq!(curve.source, SourceTag::Freq);

        let single = CurveSource::empirical(&[3.0]).unwrap();
        let curve = acceptability_curve(&single, None).unwrap();
        assert_eq!(curve.points, vec![CurvePoint { threshold_pp: 3.0, value: 0.0 }]);
        assert_eq!(acceptability_value(&single, 2.999), 1.0);
    }

    #[test]
    fn rejects_bad_grids() {
        let src = earnest();
        for g in [vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, f64::NAN]] {
            assert_eq!(acceptability_curve(&src, Some(&g)).unwrap_err(), Error::BadGrid);
        }
        assert!(acceptability_curve(&src, Some(&[])).unwrap().points.is_empty());
    }

    #[test]
    fn markers() {
        let src = earnest();
        let m = percentile_markers(&src);
        assert!((m.lower.threshold_pp + 2.38).abs() < 0.01);
        assert!((m.median.threshold_pp - 4.11).abs() < 0.01);
        assert!((m.upper.threshold_pp - 10.60).abs() < 0.01);
        assert_eq!((m.lower.value, m.median.value, m.upper.value), (0.975, 0.5, 0.025));

        let sym = CurveSource::empirical(&[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(percentile_markers(&sym).median.threshold_pp, 0.0);
    }

    #[test]
    fn tables() {
        let table = threshold_table(&earnest(), &DEFAULT_THRESHOLDS);
        let formatted: Vec<&str> = table.rows.iter().map(|r| r.formatted.as_str()).collect();
        assert_eq!(formatted, ["100%", "100%", "100%", "89%", "39%", "3.8%", "0.86%"]);
        assert!(threshold_table(&earnest(), &[]).rows.is_empty());

        assert_eq!(table_thresholds(None, Some(0.0)), DEFAULT_THRESHOLDS.to_vec());
        let with_margin = table_thresholds(Some(&[0.0, 5.0]), Some(-7.5));
        assert_eq!(with_margin, vec![0.0, 5.0, -7.5]);
    }
}
