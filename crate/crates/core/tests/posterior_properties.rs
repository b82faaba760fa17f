use accept::stats::{quantile_sorted, sorted};
use accept::*;
use proptest::prelude::*;

fn trial(cs: u64, cn: u64, ts: u64, tn: u64) -> ValidatedTrial {
    validate_trial(&TrialSpec::new(
        "t",
        ArmCount::new("C", cn, cs),
        ArmCount::new("T", tn, ts),
    ))
    .unwrap()
}

fn long_run(seed: u64) -> SamplerConfig {
    SamplerConfig {
        kept_iterations_per_chain: 4000,
        seed,
        ..Default::default()
    }
}

fn interval_width(t: &ValidatedTrial, cfg: &SamplerConfig) -> f64 {
    let priors = default_priors(t.control_rate_for_prior()).unwrap();
    let draws = sample_posterior(t, &priors, cfg).unwrap();
    let diffs = sorted(&draws_to_natural(&draws).diffs_pp());
    quantile_sorted(&diffs, 0.975) - quantile_sorted(&diffs, 0.025)
}

/// Trials of a few hundred participants per arm with success rates away
/// from the boundaries.
fn paper_sized() -> impl Strategy<Value = (u64, u64, u64, u64)> {
    (250u64..450, 250u64..450, 0.5..0.85f64, -0.08..0.08f64).prop_map(|(nc, nt, pc, d)| {
        let cs = (pc * nc as f64).round() as u64;
        let ts = ((pc + d) * nt as f64).round() as u64;
        (cs, nc, ts, nt)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn doubling_counts_shrinks_interval((cs, cn, ts, tn) in paper_sized(), seed in any::<u64>()) {
        let cfg = long_run(seed);
        let single = interval_width(&trial(cs, cn, ts, tn), &cfg);
        let double = interval_width(&trial(2 * cs, 2 * cn, 2 * ts, 2 * tn), &cfg);
        let ratio = double / single;
        prop_assert!((0.65..=0.75).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn weak_priors_agree_with_wald((cs, cn, ts, tn) in paper_sized(), seed in any::<u64>()) {
        let t = trial(cs, cn, ts, tn);
        let priors = default_priors(t.control_rate_for_prior()).unwrap();
        let draws = sample_posterior(&t, &priors, &long_run(seed)).unwrap();
        let bayes = CurveSource::empirical(&draws_to_natural(&draws).diffs_pp()).unwrap();
        let freq = risk_difference(&t).unwrap();
        for i in 0..=12 {
            let th = freq.mean_pp - 3.0 * freq.se_pp + 0.5 * freq.se_pp * i as f64;
            let gap = (acceptability_value(&bayes, th) - confidence_curve_value(&freq, th)).abs();
            prop_assert!(gap <= 0.02, "threshold {th}: gap {gap}");
        }
    }
}

#[test]
fn chains_are_independent_substreams() {
    let t = trial(255, 426, 277, 433);
    let priors = default_priors(0.75).unwrap();
    let four = sample_posterior(&t, &priors, &SamplerConfig::default()).unwrap();
    let two = SamplerConfig {
        chains: 2,
        ..Default::default()
    };
    let two = sample_posterior(&t, &priors, &two).unwrap();
    let first_two: Vec<_> = four.draws.iter().filter(|d| d.chain < 2).cloned().collect();
    assert_eq!(first_two, two.draws);
}

#[test]
fn pooled_summaries_ignore_chain_order() {
    let t = trial(219, 271, 223, 270);
    let priors = default_priors(0.8).unwrap();
    let out = sample_posterior(&t, &priors, &SamplerConfig::default()).unwrap();
    let summary = |draws: Vec<bayes::Draw>| {
        let post = PosteriorDraws { draws, ..out.clone() };
        let d = sorted(&draws_to_natural(&post).diffs_pp());
        [0.025, 0.5, 0.975].map(|p| quantile_sorted(&d, p))
    };
    let forward = summary(out.draws.clone());
    let mut permuted = Vec::new();
    for chain in [2, 0, 3, 1] {
        permuted.extend(out.chain(chain).cloned());
    }
    assert_eq!(summary(permuted), forward);
}

#[test]
fn identical_inputs_give_identical_draws() {
    let t = trial(219, 271, 223, 270);
    let priors = default_priors(0.8).unwrap();
    let a = sample_posterior(&t, &priors, &SamplerConfig::default()).unwrap();
    let b = sample_posterior(&t, &priors, &SamplerConfig::default()).unwrap();
    assert_eq!(a, b);
    let bits = |p: &PosteriorDraws| -> Vec<u64> {
        p.draws.iter().flat_map(|d| [d.intercept_logit.to_bits(), d.effect_logit.to_bits()]).collect()
    };
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn symmetric_trial_centres_on_zero() {
    let t = trial(50, 100, 50, 100);
    let priors = default_priors(0.5).unwrap();
    let out = sample_posterior(&t, &priors, &SamplerConfig::default()).unwrap();
    let diffs = draws_to_natural(&out).diffs_pp();
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    assert!(mean.abs() < 0.5, "mean {mean}");
}
