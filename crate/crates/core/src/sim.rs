//! Stream generation with change points and Monte Carlo estimation of error
//! probability, average run length to false alarm, and detection delay.
//!
//! Trials are independent: trial `i` draws from the ChaCha stream `i` of the
//! master seed, so runs are reproducible regardless of how many worker
//! threads execute them. Aggregation is a deterministic reduction over the
//! trial index order.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::detect::{run_detector, DetectorConfig, DetectorMode, PenaltyMode};
use crate::empirical::{beta_bound, check_deviation, hoeffding_eps0, EmpiricalEstimate, Smoothing};
use crate::{aux_stop, Categorical, Error, Result, SymbolStream};

type Cat = Categorical<f64>;

/// RNG substream for one trial: master seed selects the key, the trial index
/// selects the ChaCha stream. Substreams are statistically independent.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Specification of one simulated stream.
///
/// `change_point` is measured in post-warm-up symbols (1-based): symbol
/// indices `< m` come from `mu0`, indices `>= m` from `mu1`. `None` means no
/// change ever occurs.
#[derive(Debug, Clone)]
pub struct StreamSpec {
    pub mu0: Cat,
    pub mu1: Cat,
    pub n0: usize,
    pub change_point: Option<usize>,
    pub horizon: usize,
    pub seed: u64,
}

/// Generates warm-up plus post-warm-up symbols, annotated with both.
pub fn gen_stream(spec: &StreamSpec) -> SymbolStream {
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let mut symbols = Vec::with_capacity(spec.n0 + spec.horizon);
    symbols.extend(spec.mu0.sample_iid_with(spec.n0, &mut rng).symbols);
    let pre = match spec.change_point {
        Some(m) => (m - 1).min(spec.horizon),
        None => spec.horizon,
    };
    symbols.extend(spec.mu0.sample_iid_with(pre, &mut rng).symbols);
    symbols.extend(
        spec.mu1
            .sample_iid_with(spec.horizon - pre, &mut rng)
            .symbols,
    );
    let mut stream = SymbolStream::new(symbols);
    stream.annotations.warmup_len = Some(spec.n0);
    stream.annotations.change_point = spec.change_point;
    stream
}

/// One simulated run; the Monte Carlo atom.
#[derive(Debug, Clone, Serialize)]
pub struct TrialResult {
    pub trial: u64,
    pub seed: u64,
    /// Change point, `None` when the stream never changes.
    pub m: Option<usize>,
    /// Stop time in post-warm-up samples; equals the horizon when censored.
    pub stop_time: usize,
    pub stopped: bool,
    /// `(stop_time - m + 1)+` when `m` is finite and the run stopped.
    pub delay: u64,
    pub false_alarm: bool,
    pub censored: bool,
}

/// Aggregate statistics over the trials of one experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub trials: usize,
    pub mean_delay: f64,
    pub var_delay: f64,
    /// Normal-approximation 95% half-width on the mean delay.
    pub delay_ci_half: f64,
    pub mean_stop_time: f64,
    pub fraction_stopped: f64,
    pub fraction_false_alarm: f64,
    pub false_alarm_ci_half: f64,
    pub fraction_censored: f64,
}

impl ExperimentSummary {
    pub fn from_trials(trials: &[TrialResult]) -> Self {
        let n = trials.len().max(1) as f64;
        let delays: Vec<f64> = trials.iter().map(|t| t.delay as f64).collect();
        let mean_delay = delays.iter().sum::<f64>() / n;
        let var_delay =
            delays.iter().map(|d| (d - mean_delay).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        let fa = trials.iter().filter(|t| t.false_alarm).count() as f64 / n;
        Self {
            trials: trials.len(),
            mean_delay,
            var_delay,
            delay_ci_half: 1.96 * (var_delay / n).sqrt(),
            mean_stop_time: trials.iter().map(|t| t.stop_time as f64).sum::<f64>() / n,
            fraction_stopped: trials.iter().filter(|t| t.stopped).count() as f64 / n,
            fraction_false_alarm: fa,
            false_alarm_ci_half: 1.96 * (fa * (1.0 - fa) / n).sqrt(),
            fraction_censored: trials.iter().filter(|t| t.censored).count() as f64 / n,
        }
    }
}

/// Writes the per-trial CSV (`trial,seed,m,stop_time,delay,false_alarm,censored`).
pub fn write_trials_csv<W: Write>(mut w: W, trials: &[TrialResult]) -> Result<()> {
    writeln!(w, "trial,seed,m,stop_time,delay,false_alarm,censored")?;
    for t in trials {
        let m = t.m.map_or_else(|| "inf".to_string(), |m| m.to_string());
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            t.trial, t.seed, m, t.stop_time, t.delay, t.false_alarm, t.censored
        )?;
    }
    Ok(())
}

fn collect_trials<F>(trials: usize, run: F) -> Vec<TrialResult>
where
    F: Fn(u64) -> TrialResult + Send + Sync,
{
    (0..trials as u64).into_par_iter().map(run).collect()
}

/// Which of the two universal tests an experiment exercises.
///
/// `JbPage` uses the true `mu0` as reference; `Empirical` re-estimates it
/// from a fresh warm-up prefix (or a shared one, for conditional delays).
#[derive(Debug, Clone)]
pub struct TestChoice {
    pub mode: DetectorMode,
    pub n0: usize,
    pub delta: f64,
    pub smoothing: Smoothing,
}

impl TestChoice {
    pub fn jb_page() -> Self {
        Self {
            mode: DetectorMode::JbPage,
            n0: 0,
            delta: 0.0,
            smoothing: Smoothing::None,
        }
    }

    pub fn empirical(n0: usize, delta: f64) -> Self {
        Self {
            mode: DetectorMode::Empirical,
            n0,
            delta,
            smoothing: Smoothing::None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ErrorProbParams {
    pub mu0: Cat,
    pub test: TestChoice,
    pub lambda: f64,
    pub alpha: f64,
    pub horizon: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorProbReport {
    pub summary: ExperimentSummary,
    pub fraction_stopped: f64,
    /// `alpha / (2^(lambda - log2 beta) - 1) (+ eps0)`; `log2 beta = 0` for
    /// the known-reference test.
    pub bound: f64,
    pub eps0_measured: Option<f64>,
    pub eps0_hoeffding: Option<f64>,
    pub eps0_used: f64,
    pub eps0_provenance: String,
    /// Bound plus three binomial sigma of Monte Carlo slack.
    pub pass_threshold: f64,
    pub pass: bool,
    #[serde(skip)]
    pub per_trial: Vec<TrialResult>,
}

/// Fraction of runs where the one-sided stopping time fires under pure
/// `mu0`, against the analytic error-probability bound.
pub fn estimate_error_prob(p: &ErrorProbParams) -> Result<ErrorProbReport> {
    if !(p.alpha > 0.0 && p.alpha < 1.0) {
        return Err(Error::InvalidAlpha(p.alpha));
    }
    let results: Vec<(TrialResult, bool)> = (0..p.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(p.seed, trial);
            let (reference, dev_failed) = match p.test.mode {
                DetectorMode::Empirical => {
                    let warmup = p.mu0.sample_iid_with(p.test.n0, &mut rng);
                    let est = EmpiricalEstimate::from_prefix(&warmup, p.mu0.alphabet())
                        .expect("n0 > 0");
                    let failed = !check_deviation(&est, &p.mu0, p.test.delta).holds;
                    (est.mu_hat::<f64>(p.test.smoothing), failed)
                }
                _ => (p.mu0.clone(), false),
            };
            let stream = p.mu0.sample_iid_with(p.horizon, &mut rng);
            let report = aux_stop(&stream.symbols, &reference, p.lambda, p.alpha, false)
                .expect("stream symbols lie in the support of mu0");
            let stopped = report.stopped;
            let stop_time = report.stop_time.unwrap_or(p.horizon);
            (
                TrialResult {
                    trial,
                    seed: p.seed,
                    m: None,
                    stop_time,
                    stopped,
                    delay: 0,
                    false_alarm: stopped,
                    censored: !stopped,
                },
                dev_failed,
            )
        })
        .collect();

    let trials: Vec<TrialResult> = results.iter().map(|(t, _)| t.clone()).collect();
    let summary = ExperimentSummary::from_trials(&trials);
    let fraction_stopped = summary.fraction_stopped;

    let (bound, eps0_measured, eps0_hoeffding, eps0_used, provenance) = match p.test.mode {
        DetectorMode::Empirical => {
            let measured =
                results.iter().filter(|(_, f)| *f).count() as f64 / p.trials as f64;
            let hoeffding = hoeffding_eps0(p.mu0.len(), p.test.n0 as u64, p.test.delta);
            let (eps0, prov) = if measured <= hoeffding {
                (measured, "monte-carlo")
            } else {
                (hoeffding, "hoeffding")
            };
            let log_beta = beta_bound(&p.mu0, p.test.delta)?.log2();
            let denom = 2f64.powf(p.lambda - log_beta) - 1.0;
            if denom <= 0.0 {
                return Err(Error::LambdaOutsideWindow {
                    lambda: p.lambda,
                    lo: log_beta,
                    hi: f64::INFINITY,
                });
            }
            (
                p.alpha / denom + eps0,
                Some(measured),
                Some(hoeffding),
                eps0,
                prov,
            )
        }
        _ => {
            let denom = 2f64.powf(p.lambda) - 1.0;
            if denom <= 0.0 {
                return Err(Error::LambdaOutsideWindow {
                    lambda: p.lambda,
                    lo: 0.0,
                    hi: f64::INFINITY,
                });
            }
            (p.alpha / denom, None, None, 0.0, "exact")
        }
    };

    let sigma = (bound.min(1.0) * (1.0 - bound.min(1.0)).max(0.0) / p.trials as f64).sqrt();
    let pass_threshold = bound + 3.0 * sigma;
    Ok(ErrorProbReport {
        summary,
        fraction_stopped,
        bound,
        eps0_measured,
        eps0_hoeffding,
        eps0_used,
        eps0_provenance: provenance.into(),
        pass_threshold,
        pass: fraction_stopped <= pass_threshold,
        per_trial: trials,
    })
}

#[derive(Debug, Clone)]
pub struct ArlParams {
    pub mu0: Cat,
    pub test: TestChoice,
    pub lambda: f64,
    pub gamma: f64,
    pub penalty: PenaltyMode,
    pub max_starts: Option<usize>,
    pub horizon: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArlReport {
    pub summary: ExperimentSummary,
    /// Censored mean stop time under pure `mu0`; a lower bound on the ARL.
    pub censored_mean: f64,
    pub bound: f64,
    pub eps0_used: f64,
    pub eps0_provenance: String,
    pub pass: bool,
    #[serde(skip)]
    pub per_trial: Vec<TrialResult>,
}

/// Censored mean run length of the full max-over-starts detector under pure
/// `mu0`, against the analytic ARL lower bound.
pub fn estimate_arl0(p: &ArlParams) -> Result<ArlReport> {
    if p.gamma <= 1.0 {
        return Err(Error::InvalidThreshold(p.gamma.log2()));
    }
    let threshold = p.gamma.log2();
    let results: Vec<(TrialResult, bool)> = (0..p.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(p.seed, trial);
            let (reference, dev_failed) = match p.test.mode {
                DetectorMode::Empirical => {
                    let warmup = p.mu0.sample_iid_with(p.test.n0, &mut rng);
                    let est = EmpiricalEstimate::from_prefix(&warmup, p.mu0.alphabet())
                        .expect("n0 > 0");
                    let failed = !check_deviation(&est, &p.mu0, p.test.delta).holds;
                    (est.mu_hat::<f64>(p.test.smoothing), failed)
                }
                _ => (p.mu0.clone(), false),
            };
            let mut config =
                DetectorConfig::universal(p.test.mode, reference, p.lambda, threshold);
            config.penalty = p.penalty;
            config.max_starts = p.max_starts;
            let stream = p.mu0.sample_iid_with(p.horizon, &mut rng);
            let report = run_detector(&stream.symbols, config, false)
                .expect("stream symbols lie in the support of mu0");
            let stopped = report.stopped;
            (
                TrialResult {
                    trial,
                    seed: p.seed,
                    m: None,
                    stop_time: report.stop_time.unwrap_or(p.horizon),
                    stopped,
                    delay: 0,
                    false_alarm: stopped,
                    censored: !stopped,
                },
                dev_failed,
            )
        })
        .collect();

    let trials: Vec<TrialResult> = results.iter().map(|(t, _)| t.clone()).collect();
    let summary = ExperimentSummary::from_trials(&trials);
    let censored_mean = summary.mean_stop_time;

    let (bound, eps0_used, provenance) = match p.test.mode {
        DetectorMode::Empirical => {
            let measured =
                results.iter().filter(|(_, f)| *f).count() as f64 / p.trials as f64;
            let hoeffding = hoeffding_eps0(p.mu0.len(), p.test.n0 as u64, p.test.delta);
            let (eps0, prov) = if measured <= hoeffding {
                (measured, "monte-carlo")
            } else {
                (hoeffding, "hoeffding")
            };
            let log_beta = beta_bound(&p.mu0, p.test.delta)?.log2();
            let denom = 2f64.powf(p.lambda - log_beta) - 1.0;
            if denom <= 0.0 {
                return Err(Error::LambdaOutsideWindow {
                    lambda: p.lambda,
                    lo: log_beta,
                    hi: f64::INFINITY,
                });
            }
            (
                p.gamma / (1.0 / denom + eps0 * p.gamma),
                eps0,
                prov.to_string(),
            )
        }
        _ => (p.gamma * (2f64.powf(p.lambda) - 1.0), 0.0, "exact".into()),
    };

    let fully_censored = summary.fraction_censored >= 1.0;
    Ok(ArlReport {
        summary,
        censored_mean,
        bound,
        eps0_used,
        eps0_provenance: provenance,
        // a fully censored run still lower-bounds the ARL by the horizon
        pass: censored_mean >= bound || fully_censored,
        per_trial: trials,
    })
}

#[derive(Debug, Clone)]
pub struct DelayParams {
    pub mu0: Cat,
    pub mu1: Cat,
    pub mode: DetectorMode,
    pub test: TestChoice,
    pub lambda: f64,
    /// Alarm threshold in bits (`log2 gamma`).
    pub threshold_bits: f64,
    pub change_point: usize,
    /// 0 selects an automatic horizon of 50x the predicted delay.
    pub horizon: usize,
    pub trials: usize,
    pub seed: u64,
    pub max_starts: Option<usize>,
    /// Redraw the warm-up prefix per trial instead of conditioning on one
    /// shared realization.
    pub redraw_warmup: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DelayReport {
    pub summary: ExperimentSummary,
    pub mean_delay: f64,
    pub predicted_delay: f64,
    /// Drift rate `D(mu1 || ref) - lambda` used for the prediction.
    pub drift: f64,
    pub horizon: usize,
    #[serde(skip)]
    pub per_trial: Vec<TrialResult>,
}

/// Builds the detector reference for a delay experiment: the true `mu0`
/// (Page / JB-Page) or an estimate from a warm-up prefix.
fn delay_reference(p: &DelayParams, rng: &mut ChaCha12Rng) -> Cat {
    match p.mode {
        DetectorMode::Empirical => {
            let warmup = p.mu0.sample_iid_with(p.test.n0, rng);
            EmpiricalEstimate::from_prefix(&warmup, p.mu0.alphabet())
                .expect("n0 > 0")
                .mu_hat(p.test.smoothing)
        }
        _ => p.mu0.clone(),
    }
}

/// Mean detection delay `(stop - m + 1)+` at a fixed change point.
///
/// For the empirical test the warm-up realization (hence `mu_hat`) is drawn
/// once from substream 0 and shared across trials, matching the conditional
/// expectation given the prefix; trials use substreams `1..`.
pub fn estimate_worst_delay(p: &DelayParams) -> Result<DelayReport> {
    let shared_reference = if p.redraw_warmup {
        None
    } else {
        Some(delay_reference(p, &mut trial_rng(p.seed, 0)))
    };
    let probe_ref = shared_reference.clone().unwrap_or_else(|| p.mu0.clone());
    let drift = match p.mode {
        DetectorMode::Page => p.mu1.kl_divergence(&probe_ref)?,
        _ => p.mu1.kl_divergence(&probe_ref)? - p.lambda,
    };
    if drift <= 0.0 {
        return Err(Error::EmptyWindow {
            lo: p.lambda,
            hi: p.mu1.kl_divergence(&probe_ref)?,
        });
    }
    let predicted_delay = p.threshold_bits / drift;
    let horizon = if p.horizon == 0 {
        (50.0 * predicted_delay).ceil() as usize + p.change_point + 100
    } else {
        p.horizon
    };

    let trials = collect_trials(p.trials, |trial| {
        let mut rng = trial_rng(p.seed, trial + 1);
        let reference = shared_reference
            .clone()
            .unwrap_or_else(|| delay_reference(p, &mut rng));
        let mut config = match p.mode {
            DetectorMode::Page => {
                DetectorConfig::page(reference, p.mu1.clone(), p.threshold_bits)
            }
            mode => DetectorConfig::universal(mode, reference, p.lambda, p.threshold_bits),
        };
        config.max_starts = p.max_starts;
        let mut det = crate::Detector::new(config).expect("threshold validated above");
        let m = p.change_point;
        let mut stop_time = horizon;
        let mut stopped = false;
        for i in 1..=horizon {
            let dist = if i < m { &p.mu0 } else { &p.mu1 };
            let s = dist.sample_one(&mut rng);
            det.step(s).expect("symbols lie in the reference support");
            if det.stopped() {
                stop_time = i;
                stopped = true;
                break;
            }
        }
        let delay = if stopped {
            (stop_time as i64 - m as i64 + 1).max(0) as u64
        } else {
            0
        };
        TrialResult {
            trial,
            seed: p.seed,
            m: Some(m),
            stop_time,
            stopped,
            delay,
            false_alarm: stopped && stop_time < m,
            censored: !stopped,
        }
    });
    let summary = ExperimentSummary::from_trials(&trials);
    Ok(DelayReport {
        mean_delay: summary.mean_delay,
        summary,
        predicted_delay,
        drift,
        horizon,
        per_trial: trials,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopePoint {
    pub gamma: f64,
    pub threshold_bits: f64,
    pub mean_delay: f64,
    pub delay_ci_half: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeReport {
    pub points: Vec<SlopePoint>,
    /// Least-squares slope of mean delay against `log2 gamma`, in samples
    /// per bit.
    pub slope: f64,
    pub intercept: f64,
    pub predicted_slope: f64,
    pub relative_error: f64,
    pub max_residual: f64,
}

/// Regresses mean delay on `log2 gamma` over a geometric gamma schedule and
/// compares the slope with `1 / (D(mu1 || ref) - lambda)`.
pub fn delay_slope(template: &DelayParams, gammas: &[f64]) -> Result<SlopeReport> {
    if gammas.len() < 2 {
        return Err(Error::Config("slope needs at least two gamma values".into()));
    }
    let mut points = Vec::with_capacity(gammas.len());
    let mut drift = 0.0;
    for (i, &gamma) in gammas.iter().enumerate() {
        let mut p = template.clone();
        p.threshold_bits = gamma.log2();
        p.seed = template.seed.wrapping_add(i as u64 * 1_000_003);
        let rep = estimate_worst_delay(&p)?;
        drift = rep.drift;
        points.push(SlopePoint {
            gamma,
            threshold_bits: gamma.log2(),
            mean_delay: rep.mean_delay,
            delay_ci_half: rep.summary.delay_ci_half,
        });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.threshold_bits).sum::<f64>() / n;
    let my = points.iter().map(|p| p.mean_delay).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.threshold_bits - mx).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .map(|p| (p.threshold_bits - mx) * (p.mean_delay - my))
        .sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let predicted_slope = 1.0 / drift;
    let max_residual = points
        .iter()
        .map(|p| (p.mean_delay - (slope * p.threshold_bits + intercept)).abs())
        .fold(0.0, f64::max);
    Ok(SlopeReport {
        points,
        slope,
        intercept,
        predicted_slope,
        relative_error: (slope - predicted_slope).abs() / predicted_slope,
        max_residual,
    })
}

#[derive(Debug, Clone)]
pub struct OptimalityParams {
    pub mu0: Cat,
    pub mu1: Cat,
    pub kappa: f64,
    pub gamma: f64,
    pub n0: usize,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimalityReport {
    pub kappa: f64,
    pub gamma: f64,
    pub n0: usize,
    pub lambda: f64,
    pub log_beta: f64,
    /// Inflated threshold `log2 eta` in bits.
    pub eta_bits: f64,
    pub mean_delay: f64,
    /// `mean_delay / (log2 gamma / D(mu1 || mu0))`; approaches `1 + kappa`
    /// as `gamma` and `n0` grow.
    pub ratio: f64,
    pub target: f64,
    pub fraction_censored: f64,
}

/// The optimality construction: pick `lambda` from `kappa`, inflate the
/// threshold to `eta`, and measure how far the delay sits above the
/// unconstrained optimum `log2 gamma / D(mu1 || mu0)`.
pub fn optimality_experiment(p: &OptimalityParams) -> Result<OptimalityReport> {
    let mut rng = trial_rng(p.seed, 0);
    let warmup = p.mu0.sample_iid_with(p.n0, &mut rng);
    let est = EmpiricalEstimate::from_prefix(&warmup, p.mu0.alphabet())?;
    let mu_hat: Cat = est.mu_hat(Smoothing::None);
    if !mu_hat.full_support() {
        return Err(Error::Config(
            "warm-up prefix must cover the whole alphabet".into(),
        ));
    }
    let d_hat = p.mu1.kl_divergence(&mu_hat)?;
    let d_true = p.mu1.kl_divergence(&p.mu0)?;
    let lambda = d_hat - d_true / (1.0 + p.kappa);
    let log_beta = beta_bound(&p.mu0, p.delta)?.log2();
    let lo = log_beta.max(p.mu0.kl_divergence(&mu_hat)?);
    if !(lambda > lo && lambda < d_hat) {
        return Err(Error::InfeasibleKappa {
            kappa: p.kappa,
            required: d_true / (1.0 + p.kappa) + lo,
            available: d_hat,
        });
    }
    // eps0 = 1/gamma schedule folded in: eta = gamma (1/(2^(lambda-log beta)-1) + 1)
    let eta = p.gamma * (1.0 / (2f64.powf(lambda - log_beta) - 1.0) + 1.0);
    let delay_params = DelayParams {
        mu0: p.mu0.clone(),
        mu1: p.mu1.clone(),
        mode: DetectorMode::Empirical,
        test: TestChoice::empirical(p.n0, p.delta),
        lambda,
        threshold_bits: eta.log2(),
        change_point: 1,
        horizon: 0,
        trials: p.trials,
        seed: p.seed,
        max_starts: Some(256),
        redraw_warmup: false,
    };
    let rep = estimate_worst_delay(&delay_params)?;
    let optimum = p.gamma.log2() / d_true;
    Ok(OptimalityReport {
        kappa: p.kappa,
        gamma: p.gamma,
        n0: p.n0,
        lambda,
        log_beta,
        eta_bits: eta.log2(),
        mean_delay: rep.mean_delay,
        ratio: rep.mean_delay / optimum,
        target: 1.0 + p.kappa,
        fraction_censored: rep.summary.fraction_censored,
    })
}
