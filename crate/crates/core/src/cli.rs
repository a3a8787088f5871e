//! Configuration parsing, experiment orchestration, and result emission.
//!
//! One JSON config format feeds every subcommand; flags override file
//! values. Every emitted artifact embeds the resolved config and the tool
//! version so runs can be audited after the fact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::code::{kraft_sum, redundancy, KtCode, RedundancyMode};
use crate::detect::{run_detector, validate_config, DetectorConfig, DetectorMode, PenaltyMode};
use crate::empirical::{EmpiricalEstimate, Smoothing};
use crate::sim::{
    delay_slope, estimate_arl0, estimate_error_prob, estimate_worst_delay, optimality_experiment,
    write_trials_csv, ArlParams, DelayParams, ErrorProbParams, OptimalityParams, TestChoice,
    TrialResult,
};
use crate::{Alphabet, Categorical, Error, Result, SymbolStream};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit codes: 0 success / no alarm, 1 error, 2 alarm.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_ALARM: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "seqcd", version = VERSION, about = "Sequential change detection with universal codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StreamFormat {
    /// Newline-delimited symbol indices.
    Text,
    /// One raw byte per symbol (K <= 256).
    Bytes,
}

#[derive(Debug, Args, Default, Clone)]
pub struct CommonOverrides {
    /// Master seed override.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trial-count override.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Horizon override (0 = automatic).
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Output path for the per-trial CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stream a symbol file through a detector and report the stop decision.
    Detect {
        /// JSON run config.
        #[arg(long)]
        config: PathBuf,
        /// Symbol stream file.
        stream: PathBuf,
        #[arg(long, value_enum, default_value_t = StreamFormat::Text)]
        format: StreamFormat,
        /// Dump `n,statistic` per step to this CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run a Monte Carlo experiment described by the config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: CommonOverrides,
    },
    /// Run a named verification suite and print PASS/FAIL per criterion.
    Verify {
        /// kraft | redundancy | error-bound | arl | slope | optimality
        suite: String,
    },
    /// Emit universal-code tables: `n, kraft_sum, max_redundancy_bits`.
    CodeStats {
        /// Alphabet size.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Largest sequence length (capped so K^n stays enumerable).
        #[arg(long, default_value_t = 12)]
        max_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ErrorProb,
    Arl,
    Delay,
    Slope,
    Optimality,
}

/// The one JSON config format shared by all subcommands.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Pre-change probabilities; required.
    pub mu0: Vec<f64>,
    /// Post-change probabilities; required for Page mode and for delay /
    /// slope / optimality experiments.
    pub mu1: Option<Vec<f64>>,
    pub mode: DetectorMode,
    /// Which experiment `simulate` runs.
    pub experiment: Option<Experiment>,
    /// Warm-up prefix length for the empirical test.
    pub n0: usize,
    /// Deviation tolerance for the beta bound.
    pub delta: f64,
    pub lambda: Option<f64>,
    /// Optimality-experiment parameter; replaces `lambda`.
    pub kappa: Option<f64>,
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    /// Geometric gamma schedule for the slope experiment.
    pub gamma_list: Option<Vec<f64>>,
    /// Change point in post-warm-up samples (1-based); absent = no change.
    pub change_point: Option<usize>,
    pub penalty: PenaltyMode,
    pub smoothing: Smoothing,
    pub max_starts: Option<usize>,
    pub slack: Option<f64>,
    /// 0 selects an experiment-appropriate automatic horizon.
    pub horizon: usize,
    pub trials: usize,
    pub seed: u64,
    /// Redraw the warm-up per trial instead of conditioning on one prefix.
    pub redraw_warmup: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mu0: Vec::new(),
            mu1: None,
            mode: DetectorMode::JbPage,
            experiment: None,
            n0: 0,
            delta: 0.05,
            lambda: None,
            kappa: None,
            gamma: None,
            alpha: None,
            gamma_list: None,
            change_point: None,
            penalty: PenaltyMode::WindowLength,
            smoothing: Smoothing::None,
            max_starts: None,
            slack: None,
            horizon: 0,
            trials: 1_000,
            seed: 0,
            redraw_warmup: false,
        }
    }
}

impl RunConfig {
    pub fn mu0(&self) -> Result<Categorical<f64>> {
        if self.mu0.is_empty() {
            return Err(Error::Config("mu0 is required".into()));
        }
        Categorical::new(self.mu0.clone())
    }

    pub fn mu1(&self) -> Result<Categorical<f64>> {
        match &self.mu1 {
            Some(p) => Categorical::new(p.clone()),
            None => Err(Error::Config("mu1 is required for this operation".into())),
        }
    }

    pub fn gamma(&self) -> Result<f64> {
        match self.gamma {
            Some(g) if g > 1.0 => Ok(g),
            Some(g) => Err(Error::InvalidThreshold(g.log2())),
            None => Err(Error::Config("gamma is required".into())),
        }
    }

    pub fn lambda(&self) -> Result<f64> {
        self.lambda
            .ok_or_else(|| Error::Config("lambda is required".into()))
    }

    fn test_choice(&self) -> TestChoice {
        TestChoice {
            mode: self.mode,
            n0: self.n0,
            delta: self.delta,
            smoothing: self.smoothing,
        }
    }
}

/// Parses and validates a config file, resolving defaults.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let config: RunConfig = serde_json::from_str(text)?;
    config.mu0()?; // field-level validation
    if let Some(mu1) = &config.mu1 {
        if mu1.len() != config.mu0.len() {
            return Err(Error::Config("mu0 and mu1 must share an alphabet".into()));
        }
        Categorical::<f64>::new(mu1.clone())?;
    }
    if config.mode == DetectorMode::Empirical && config.n0 == 0 && config.experiment.is_none() {
        return Err(Error::Config("empirical mode needs n0 > 0".into()));
    }
    Ok(config)
}

fn config_echo(config: &RunConfig) -> serde_json::Value {
    json!({ "tool_version": VERSION, "config": config })
}

fn read_stream(path: &Path, format: StreamFormat) -> Result<SymbolStream> {
    let file = File::open(path)?;
    match format {
        StreamFormat::Text => SymbolStream::read_text(BufReader::new(file)),
        StreamFormat::Bytes => SymbolStream::read_bytes(BufReader::new(file)),
    }
}

fn detector_config(config: &RunConfig, stream: &SymbolStream) -> Result<(DetectorConfig<f64>, usize)> {
    let mu0 = config.mu0()?;
    let threshold = config.gamma()?.log2();
    let (mut det_config, consumed) = match config.mode {
        DetectorMode::Page => (DetectorConfig::page(mu0, config.mu1()?, threshold), 0),
        DetectorMode::JbPage => (
            DetectorConfig::universal(config.mode, mu0, config.lambda()?, threshold),
            0,
        ),
        DetectorMode::Empirical => {
            if config.n0 == 0 || stream.len() < config.n0 {
                return Err(Error::Config(format!(
                    "empirical mode needs a warm-up prefix of n0 = {} symbols",
                    config.n0
                )));
            }
            let alphabet = Alphabet::new(config.mu0.len())?;
            let est = EmpiricalEstimate::from_symbols(&stream.symbols[..config.n0], alphabet)?;
            let reference = est.mu_hat(config.smoothing);
            (
                DetectorConfig::universal(config.mode, reference, config.lambda()?, threshold),
                config.n0,
            )
        }
    };
    det_config.penalty = config.penalty;
    det_config.max_starts = config.max_starts;
    det_config.slack = config.slack;
    Ok((det_config, consumed))
}

fn run_detect(
    config_path: &Path,
    stream_path: &Path,
    format: StreamFormat,
    trace: Option<&Path>,
    stdout: &mut impl Write,
) -> Result<i32> {
    let config = parse_config(config_path)?;
    let stream = read_stream(stream_path, format)?;
    stream.validate(Alphabet::new(config.mu0.len())?)?;
    let (det_config, consumed) = detector_config(&config, &stream)?;
    validate_config(
        &det_config,
        Some(&config.mu0()?),
        config.mu1().ok().as_ref(),
        None,
        Some(config.delta),
    )?;
    let report = run_detector(&stream.symbols[consumed..], det_config, trace.is_some())?;
    if let (Some(path), Some(values)) = (trace, &report.trace) {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "n,statistic")?;
        for (i, s) in values.iter().enumerate() {
            writeln!(w, "{},{}", i + 1, s)?;
        }
    }
    let out = json!({
        "tool_version": VERSION,
        "config": config,
        "stopped": report.stopped,
        "stop_time": report.stop_time,
        "statistic": report.statistic,
    });
    writeln!(stdout, "{}", serde_json::to_string_pretty(&out)?)?;
    Ok(if report.stopped { EXIT_ALARM } else { EXIT_OK })
}

fn write_csv_artifact(
    path: &Path,
    config: &RunConfig,
    trials: &[TrialResult],
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# seqcd {} config={}", VERSION, serde_json::to_string(config)?)?;
    write_trials_csv(&mut w, trials)?;
    Ok(())
}

fn run_simulate(
    config_path: &Path,
    overrides: &CommonOverrides,
    stdout: &mut impl Write,
) -> Result<i32> {
    let mut config = parse_config(config_path)?;
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(trials) = overrides.trials {
        config.trials = trials;
    }
    if let Some(horizon) = overrides.horizon {
        config.horizon = horizon;
    }
    let experiment = config
        .experiment
        .ok_or_else(|| Error::Config("simulate needs an `experiment` field".into()))?;

    let (summary_json, per_trial): (serde_json::Value, Vec<TrialResult>) = match experiment {
        Experiment::ErrorProb => {
            let alpha = config
                .alpha
                .ok_or_else(|| Error::Config("error-prob needs alpha".into()))?;
            let horizon = if config.horizon == 0 { 100_000 } else { config.horizon };
            let rep = estimate_error_prob(&ErrorProbParams {
                mu0: config.mu0()?,
                test: config.test_choice(),
                lambda: config.lambda()?,
                alpha,
                horizon,
                trials: config.trials,
                seed: config.seed,
            })?;
            (serde_json::to_value(&rep)?, rep.per_trial)
        }
        Experiment::Arl => {
            let gamma = config.gamma()?;
            let horizon = if config.horizon == 0 {
                (20.0 * gamma).ceil() as usize
            } else {
                config.horizon
            };
            let rep = estimate_arl0(&ArlParams {
                mu0: config.mu0()?,
                test: config.test_choice(),
                lambda: config.lambda()?,
                gamma,
                penalty: config.penalty,
                max_starts: config.max_starts.or(Some(256)),
                horizon,
                trials: config.trials,
                seed: config.seed,
            })?;
            (serde_json::to_value(&rep)?, rep.per_trial)
        }
        Experiment::Delay => {
            let rep = estimate_worst_delay(&delay_params(&config)?)?;
            (serde_json::to_value(&rep)?, rep.per_trial)
        }
        Experiment::Slope => {
            let gammas = config
                .gamma_list
                .clone()
                .ok_or_else(|| Error::Config("slope needs gamma_list".into()))?;
            let rep = delay_slope(&delay_params(&config)?, &gammas)?;
            (serde_json::to_value(&rep)?, Vec::new())
        }
        Experiment::Optimality => {
            let rep = optimality_experiment(&OptimalityParams {
                mu0: config.mu0()?,
                mu1: config.mu1()?,
                kappa: config
                    .kappa
                    .ok_or_else(|| Error::Config("optimality needs kappa".into()))?,
                gamma: config.gamma()?,
                n0: config.n0,
                delta: config.delta,
                trials: config.trials,
                seed: config.seed,
            })?;
            (serde_json::to_value(&rep)?, Vec::new())
        }
    };

    if let Some(out) = &overrides.out {
        write_csv_artifact(out, &config, &per_trial)?;
    }
    let mut echoed = config_echo(&config);
    echoed["result"] = summary_json;
    writeln!(stdout, "{}", serde_json::to_string_pretty(&echoed)?)?;
    Ok(EXIT_OK)
}

fn delay_params(config: &RunConfig) -> Result<DelayParams> {
    Ok(DelayParams {
        mu0: config.mu0()?,
        mu1: config.mu1()?,
        mode: config.mode,
        test: config.test_choice(),
        lambda: if config.mode == DetectorMode::Page {
            0.0
        } else {
            config.lambda()?
        },
        threshold_bits: config.gamma().map(f64::log2).unwrap_or(0.0),
        change_point: config.change_point.unwrap_or(1),
        horizon: config.horizon,
        trials: config.trials,
        seed: config.seed,
        max_starts: config.max_starts.or(Some(256)),
        redraw_warmup: config.redraw_warmup,
    })
}

fn run_verify(suite: &str, stdout: &mut impl Write) -> Result<i32> {
    let results = crate::verify::run_suite(suite)?;
    let mut all_pass = true;
    for r in &results {
        writeln!(stdout, "{r}")?;
        all_pass &= r.pass;
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_ERROR })
}

fn run_code_stats(k: usize, max_n: usize, out: Option<&Path>, stdout: &mut impl Write) -> Result<i32> {
    let code = KtCode::new(Alphabet::new(k)?);
    let uniform = Categorical::<f64>::uniform(k)?;
    let mut lines = String::from("n,kraft_sum,max_redundancy_bits\n");
    for n in 0..=max_n {
        let states = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        let (ks, red): (f64, f64) = if states <= 1 << 16 {
            (
                kraft_sum(&code, n)?,
                redundancy(&code, &uniform, n, RedundancyMode::Exhaustive)?,
            )
        } else {
            // beyond enumeration: Kraft holds by construction, sample the max
            (
                1.0,
                redundancy(
                    &code,
                    &uniform,
                    n,
                    RedundancyMode::Sampled { samples: 200, seed: 0 },
                )?,
            )
        };
        lines.push_str(&format!("{n},{ks},{red}\n"));
    }
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            writeln!(w, "# seqcd {VERSION} k={k}")?;
            w.write_all(lines.as_bytes())?;
        }
        None => stdout.write_all(lines.as_bytes())?,
    }
    Ok(EXIT_OK)
}

/// Executes a parsed command, writing human-readable output to `stdout`.
pub fn run(cli: Cli, stdout: &mut impl Write) -> i32 {
    let result = match &cli.command {
        Command::Detect {
            config,
            stream,
            format,
            trace,
        } => run_detect(config, stream, *format, trace.as_deref(), stdout),
        Command::Simulate { config, overrides } => run_simulate(config, overrides, stdout),
        Command::Verify { suite } => run_verify(suite, stdout),
        Command::CodeStats { k, max_n, out } => run_code_stats(*k, *max_n, out.as_deref(), stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let config =
            parse_config_str(r#"{"mu0": [0.5, 0.5], "mu1": [0.9, 0.1], "lambda": 0.2, "gamma": 8}"#)
                .unwrap();
        assert_eq!(config.trials, 1_000);
        assert_eq!(config.seed, 0);
        assert_eq!(config.mode, DetectorMode::JbPage);
        assert_eq!(config.penalty, PenaltyMode::WindowLength);
    }

    #[test]
    fn bad_probabilities_rejected() {
        let err = parse_config_str(r#"{"mu0": [0.5, 0.4]}"#).unwrap_err();
        assert!(matches!(err, Error::InvalidProbabilities(_)));
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(parse_config_str(r#"{"mu0": [0.5, 0.5], "bogus": 1}"#).is_err());
    }

    #[test]
    fn mismatched_alphabets_rejected() {
        assert!(parse_config_str(r#"{"mu0": [0.5, 0.5], "mu1": [0.2, 0.3, 0.5]}"#).is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = parse_config_str(r#"{"mu0": [0.5, 0.5], "lambda": 0.3}"#).unwrap();
        let text = serde_json::to_string(&config).unwrap();
        let back = parse_config_str(&text).unwrap();
        assert_eq!(back.lambda, Some(0.3));
    }
}
