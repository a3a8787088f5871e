//! Named verification suites with pinned parameters and tolerances.
//!
//! Each suite checks one analytic claim at desk scale: exact small-instance
//! enumeration where possible, one-sided Monte Carlo bound tests elsewhere.
//! Tolerances are versioned here, next to the code they gate, and echoed in
//! every result line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::code::{kraft_sum, redundancy, KtCode, RedundancyMode};
use crate::detect::{brute_force_statistic, Detector, DetectorConfig, DetectorMode, PenaltyMode};
use crate::empirical::{beta_bound, check_deviation, fn_statistic, EmpiricalEstimate};
use crate::sim::{
    delay_slope, estimate_arl0, estimate_error_prob, estimate_worst_delay, optimality_experiment,
    write_trials_csv, ArlParams, DelayParams, ErrorProbParams, OptimalityParams, TestChoice,
};
use crate::{Alphabet, Categorical, Result};

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CriterionResult {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

fn fair() -> Categorical<f64> {
    Categorical::new(vec![0.5, 0.5]).unwrap()
}

fn skew() -> Categorical<f64> {
    Categorical::new(vec![0.9, 0.1]).unwrap()
}

/// Kraft exactness: the KT probability assignment sums to 1 over every
/// enumerable X^n (K in {2, 3}, K^n <= 2^16), within 1e-9.
pub fn verify_kraft() -> Result<Vec<CriterionResult>> {
    let mut out = Vec::new();
    for k in [2usize, 3] {
        let code = KtCode::new(Alphabet::new(k)?);
        let mut worst = 0.0f64;
        let mut n = 0usize;
        while (k as u128).pow(n as u32) <= 1 << 16 {
            let sum: f64 = kraft_sum(&code, n)?;
            worst = worst.max((sum - 1.0).abs());
            n += 1;
        }
        out.push(CriterionResult::new(
            format!("kraft-K{k}"),
            worst <= 1e-9,
            format!("max |sum - 1| = {worst:.3e} over n < {n} (tolerance 1e-9)"),
        ));
    }
    Ok(out)
}

/// Universality: exhaustive pointwise redundancy at K=2, n=12 stays within
/// the KT bound, and sampled per-symbol redundancy strictly decreases over
/// a geometric n schedule for each of 5 seeds.
pub fn verify_redundancy() -> Result<Vec<CriterionResult>> {
    let code = KtCode::new(Alphabet::new(2)?);
    let uniform = Categorical::<f64>::uniform(2)?;
    let cap = 0.5 * 12f64.log2() + 2.0;
    let max_red: f64 = redundancy(&code, &uniform, 12, RedundancyMode::Exhaustive)?;
    let mut out = vec![CriterionResult::new(
        "redundancy-exhaustive",
        max_red <= cap,
        format!("max redundancy {max_red:.4} bits <= {cap:.4} at K=2, n=12"),
    )];

    let mut all_decreasing = true;
    let mut detail = String::new();
    for seed in 0..5u64 {
        let mut prev = f64::INFINITY;
        let mut ok = true;
        for &n in &[64usize, 256, 1024, 4096] {
            let r: f64 = redundancy(
                &code,
                &uniform,
                n,
                RedundancyMode::Sampled { samples: 200, seed },
            )?;
            let per_symbol = r / n as f64;
            ok &= per_symbol < prev;
            prev = per_symbol;
        }
        all_decreasing &= ok;
        detail.push_str(if ok { "v" } else { "x" });
    }
    out.push(CriterionResult::new(
        "redundancy-sampled-decrease",
        all_decreasing,
        format!("per-symbol redundancy strictly decreasing over n in {{64,256,1024,4096}}, seeds [{detail}]"),
    ));
    Ok(out)
}

/// Online/oracle equivalence for all three detectors on random streams.
pub fn verify_oracle_equivalence() -> Result<Vec<CriterionResult>> {
    let mut rng = ChaCha12Rng::seed_from_u64(0x0BAC1E);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let k = *[2usize, 3, 4].get(rng.gen_range(0..3)).unwrap();
        let mk = |rng: &mut ChaCha12Rng| {
            let raw: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 0.05).collect();
            let sum: f64 = raw.iter().sum();
            Categorical::new(raw.iter().map(|x| x / sum).collect::<Vec<f64>>()).unwrap()
        };
        let reference = mk(&mut rng);
        let post = mk(&mut rng);
        let stream = reference.sample_iid_with(200, &mut rng);
        for mode in [DetectorMode::Page, DetectorMode::JbPage, DetectorMode::Empirical] {
            let mut cfg = DetectorConfig::universal(mode, reference.clone(), 0.15, 1e12);
            if mode == DetectorMode::Page {
                cfg.post = Some(post.clone());
            }
            let mut det = Detector::new(cfg.clone())?;
            for (i, &s) in stream.symbols.iter().enumerate() {
                let online = det.step(s)?;
                let oracle = brute_force_statistic(&stream.symbols[..=i], &cfg)?;
                worst = worst.max((online - oracle).abs());
            }
        }
    }
    Ok(vec![CriterionResult::new(
        "oracle-equivalence",
        worst <= 1e-9,
        format!("max |online - brute force| = {worst:.3e} over 100 streams x 3 modes (tolerance 1e-9)"),
    )])
}

/// Error-probability bounds for the known-reference test and the empirical
/// test, each with 3 binomial sigma of Monte Carlo slack.
pub fn verify_error_bound() -> Result<Vec<CriterionResult>> {
    let test2 = estimate_error_prob(&ErrorProbParams {
        mu0: fair(),
        test: TestChoice::jb_page(),
        lambda: 0.5,
        alpha: 0.01,
        horizon: 100_000,
        trials: 2_000,
        seed: 0xE44,
    })?;
    let test3 = estimate_error_prob(&ErrorProbParams {
        mu0: fair(),
        test: TestChoice::empirical(10_000, 0.02),
        lambda: 0.5,
        alpha: 0.01,
        horizon: 100_000,
        trials: 2_000,
        seed: 0xE45,
    })?;
    Ok(vec![
        CriterionResult::new(
            "error-bound-known-ref",
            test2.pass,
            format!(
                "false-stop fraction {:.5} <= bound {:.5} + 3 sigma ({:.5})",
                test2.fraction_stopped, test2.bound, test2.pass_threshold
            ),
        ),
        CriterionResult::new(
            "error-bound-empirical",
            test3.pass,
            format!(
                "false-stop fraction {:.5} <= bound {:.5} + 3 sigma ({:.5}), eps0 {:.2e} ({})",
                test3.fraction_stopped,
                test3.bound,
                test3.pass_threshold,
                test3.eps0_used,
                test3.eps0_provenance
            ),
        ),
    ])
}

/// ARL lower bounds: censored mean run length under pure `mu0` must exceed
/// the analytic bound for both universal tests.
pub fn verify_arl() -> Result<Vec<CriterionResult>> {
    let test2 = estimate_arl0(&ArlParams {
        mu0: fair(),
        test: TestChoice::jb_page(),
        lambda: 0.5,
        gamma: 8.0,
        penalty: PenaltyMode::WindowLength,
        max_starts: Some(64),
        horizon: 10_000,
        trials: 1_000,
        seed: 0xA51,
    })?;
    let test3 = estimate_arl0(&ArlParams {
        mu0: fair(),
        test: TestChoice::empirical(10_000, 0.02),
        lambda: 0.5,
        gamma: 8.0,
        penalty: PenaltyMode::WindowLength,
        max_starts: Some(64),
        horizon: 10_000,
        trials: 1_000,
        seed: 0xA52,
    })?;
    Ok(vec![
        CriterionResult::new(
            "arl-known-ref",
            test2.pass,
            format!(
                "censored mean {:.2} >= bound {:.4} (censored fraction {:.3})",
                test2.censored_mean, test2.bound, test2.summary.fraction_censored
            ),
        ),
        CriterionResult::new(
            "arl-empirical",
            test3.pass,
            format!(
                "censored mean {:.2} >= bound {:.4}, eps0 {:.2e} ({})",
                test3.censored_mean, test3.bound, test3.eps0_used, test3.eps0_provenance
            ),
        ),
    ])
}

/// Delay asymptotics: regression slope of mean delay against `log2 gamma`
/// for the empirical test (25% tolerance) and the Page cross-check (15%).
pub fn verify_slope() -> Result<Vec<CriterionResult>> {
    let gammas = [16.0, 64.0, 256.0, 1024.0];
    let empirical = delay_slope(
        &DelayParams {
            mu0: fair(),
            mu1: skew(),
            mode: DetectorMode::Empirical,
            test: TestChoice::empirical(100_000, 0.01),
            lambda: 0.2,
            threshold_bits: 0.0,
            change_point: 1,
            horizon: 0,
            trials: 500,
            seed: 0x51,
            max_starts: Some(256),
            redraw_warmup: false,
        },
        &gammas,
    )?;
    let page = delay_slope(
        &DelayParams {
            mu0: fair(),
            mu1: skew(),
            mode: DetectorMode::Page,
            test: TestChoice::jb_page(),
            lambda: 0.0,
            threshold_bits: 0.0,
            change_point: 1,
            horizon: 0,
            trials: 500,
            seed: 0x52,
            max_starts: None,
            redraw_warmup: false,
        },
        &gammas,
    )?;
    Ok(vec![
        CriterionResult::new(
            "slope-empirical",
            empirical.relative_error <= 0.25,
            format!(
                "slope {:.3} vs predicted {:.3} samples/bit ({:.1}% off, tolerance 25%)",
                empirical.slope,
                empirical.predicted_slope,
                100.0 * empirical.relative_error
            ),
        ),
        CriterionResult::new(
            "slope-page",
            page.relative_error <= 0.15,
            format!(
                "slope {:.3} vs predicted {:.3} samples/bit ({:.1}% off, tolerance 15%)",
                page.slope,
                page.predicted_slope,
                100.0 * page.relative_error
            ),
        ),
    ])
}

/// Termination under change: every trial with the change at the first
/// post-warm-up sample stops within 100x the predicted delay.
pub fn verify_termination() -> Result<Vec<CriterionResult>> {
    let probe = estimate_worst_delay(&DelayParams {
        mu0: fair(),
        mu1: skew(),
        mode: DetectorMode::Empirical,
        test: TestChoice::empirical(10_000, 0.02),
        lambda: 0.2,
        threshold_bits: 8.0,
        change_point: 1,
        horizon: 0,
        trials: 1,
        seed: 0x71,
        max_starts: Some(256),
        redraw_warmup: false,
    })?;
    let horizon = (100.0 * probe.predicted_delay).ceil() as usize;
    let rep = estimate_worst_delay(&DelayParams {
        mu0: fair(),
        mu1: skew(),
        mode: DetectorMode::Empirical,
        test: TestChoice::empirical(10_000, 0.02),
        lambda: 0.2,
        threshold_bits: 8.0,
        change_point: 1,
        horizon,
        trials: 1_000,
        seed: 0x72,
        max_starts: Some(256),
        redraw_warmup: false,
    })?;
    let all_stopped = rep.summary.fraction_censored == 0.0;
    Ok(vec![CriterionResult::new(
        "termination-under-change",
        all_stopped,
        format!(
            "{} of 1000 trials stopped within {horizon} samples (100x predicted delay {:.1})",
            (1000.0 * (1.0 - rep.summary.fraction_censored)) as u64,
            probe.predicted_delay
        ),
    )])
}

/// The f_n <= log2 beta bound on random instances where the deviation event
/// holds, plus the divergence-gap bound it implies.
pub fn verify_beta_bound_property() -> Result<Vec<CriterionResult>> {
    let mut rng = ChaCha12Rng::seed_from_u64(0x83);
    let mut checked = 0u32;
    let mut fn_ok = true;
    let mut gap_ok = true;
    while checked < 10_000 {
        let k = rng.gen_range(2..4);
        let mk = |rng: &mut ChaCha12Rng| {
            let raw: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 0.15).collect();
            let sum: f64 = raw.iter().sum();
            Categorical::new(raw.iter().map(|x| x / sum).collect::<Vec<f64>>()).unwrap()
        };
        let mu0 = mk(&mut rng);
        let mu1 = mk(&mut rng);
        let n0 = rng.gen_range(200..2_000);
        let prefix = mu0.sample_iid_with(n0, &mut rng);
        let est = EmpiricalEstimate::from_prefix(&prefix, mu0.alphabet())?;
        let delta: f64 = rng.gen_range(0.01..0.08);
        if delta >= mu0.min_positive_prob() {
            continue;
        }
        if !check_deviation(&est, &mu0, delta).holds || !est.full_support() {
            continue;
        }
        let log_beta = beta_bound(&mu0, delta)?.log2();
        let seq = mu0.sample_iid_with(rng.gen_range(1..80), &mut rng);
        let f = fn_statistic(&mu0, &est, &seq.symbols)?;
        fn_ok &= f <= log_beta + 1e-12;
        let mu_hat = est.mu_hat::<f64>(crate::Smoothing::None);
        let gap = mu1.kl_divergence(&mu_hat)? - mu1.kl_divergence(&mu0)?;
        gap_ok &= gap < log_beta + 1e-12;
        checked += 1;
    }
    Ok(vec![
        CriterionResult::new(
            "beta-fn-bound",
            fn_ok,
            "f_n <= log2 beta on 10000 random instances with the deviation event holding",
        ),
        CriterionResult::new(
            "beta-divergence-gap",
            gap_ok,
            "D(mu1||mu_hat) - D(mu1||mu0) < log2 beta on the same instances",
        ),
    ])
}

/// Optimality trend: the delay ratio lands in the finite-size band at
/// gamma = 2^12 and moves toward `1 + kappa` when gamma rises to 2^14.
pub fn verify_optimality() -> Result<Vec<CriterionResult>> {
    let base = OptimalityParams {
        mu0: fair(),
        mu1: skew(),
        kappa: 0.5,
        gamma: 4096.0,
        n0: 100_000,
        delta: 0.01,
        trials: 400,
        seed: 0x91,
    };
    let at_12 = optimality_experiment(&base)?;
    let at_14 = optimality_experiment(&OptimalityParams {
        gamma: 16_384.0,
        seed: 0x92,
        ..base
    })?;
    let in_band = at_12.ratio >= 1.2 && at_12.ratio <= 1.9;
    let toward_target =
        (at_14.ratio - at_12.target).abs() < (at_12.ratio - at_12.target).abs();
    Ok(vec![
        CriterionResult::new(
            "optimality-band",
            in_band,
            format!(
                "ratio {:.3} at gamma=2^12 (band [1.2, 1.9], target {:.1})",
                at_12.ratio, at_12.target
            ),
        ),
        CriterionResult::new(
            "optimality-trend",
            toward_target,
            format!(
                "ratio moves {:.3} -> {:.3} toward {:.1} as gamma 2^12 -> 2^14",
                at_12.ratio, at_14.ratio, at_12.target
            ),
        ),
    ])
}

/// Reproducibility: identical master seeds give byte-identical per-trial CSV.
pub fn verify_reproducibility() -> Result<Vec<CriterionResult>> {
    let params = ErrorProbParams {
        mu0: fair(),
        test: TestChoice::empirical(1_000, 0.05),
        lambda: 0.5,
        alpha: 0.05,
        horizon: 2_000,
        trials: 200,
        seed: 0xCAFE,
    };
    let csv = |_: u32| -> Result<Vec<u8>> {
        let rep = estimate_error_prob(&params)?;
        let mut buf = Vec::new();
        write_trials_csv(&mut buf, &rep.per_trial)?;
        Ok(buf)
    };
    let a = csv(0)?;
    let b = csv(1)?;
    Ok(vec![CriterionResult::new(
        "reproducibility",
        a == b,
        format!("two runs with the same seed produced identical {} byte CSVs", a.len()),
    )])
}

/// Runs a named suite. Names match the CLI `verify` subcommand.
pub fn run_suite(name: &str) -> Result<Vec<CriterionResult>> {
    match name {
        "kraft" => verify_kraft(),
        "redundancy" => verify_redundancy(),
        "error-bound" => verify_error_bound(),
        "arl" => verify_arl(),
        "slope" => verify_slope(),
        "optimality" => verify_optimality(),
        other => Err(crate::Error::Config(format!(
            "unknown suite {other:?}; expected kraft | redundancy | error-bound | arl | slope | optimality"
        ))),
    }
}
