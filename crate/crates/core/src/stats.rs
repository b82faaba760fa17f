//! Small sample-statistics helpers shared by the engines.

/// Sample quantile by linear interpolation between order statistics
/// (Hyndman–Fan type 7). `sorted` must be ascending and non-empty.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Split R-hat: every chain is cut into two halves (an odd trailing draw is
/// dropped) and the potential scale reduction is computed over the halves.
///
/// Returns NaN when the halves have fewer than two draws or zero
/// within-sequence variance.
pub fn split_rhat(chains: &[Vec<f64>]) -> f64 {
    let half = chains.iter().map(Vec::len).min().unwrap_or(0) / 2;
    if half < 2 {
        return f64::NAN;
    }
    let seqs: Vec<&[f64]> = chains
        .iter()
        .flat_map(|c| [&c[..half], &c[half..2 * half]])
        .collect();
    let n = half as f64;
    let means: Vec<f64> = seqs.iter().map(|s| mean(s)).collect();
    let within = seqs.iter().map(|s| variance(s)).sum::<f64>() / seqs.len() as f64;
    let between = n * variance(&means);
    if within <= 0.0 {
        return f64::NAN;
    }
    let pooled = (n - 1.0) / n * within + between / n;
    (pooled / within).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type7_quantiles() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&x, 0.0), 1.0);
        assert_eq!(quantile_sorted(&x, 1.0), 4.0);
        assert_eq!(quantile_sorted(&x, 0.5), 2.5);
        // R: quantile(1:4, 0.025) = 1.075
        assert!((quantile_sorted(&x, 0.025) - 1.075).abs() < 1e-12);
        assert_eq!(quantile_sorted(&[3.0], 0.9), 3.0);
    }

    #[test]
    fn rhat_detects_disagreeing_chains() {
        let a: Vec<f64> = (0..200).map(|i| ((i * 37) % 101) as f64 / 101.0).collect();
        let b: Vec<f64> = (0..200).map(|i| ((i * 53) % 97) as f64 / 97.0).collect();
        let good = split_rhat(&[a.clone(), b.clone()]);
        assert!(good < 1.05, "{good}");
        let shifted: Vec<f64> = b.iter().map(|x| x + 3.0).collect();
        assert!(split_rhat(&[a, shifted]) > 1.5);
        assert!(split_rhat(&[vec![1.0, 2.0, 3.0]]).is_nan());
    }
}
