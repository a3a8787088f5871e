//! The three sequential tests as online state machines, plus a brute-force
//! oracle that recomputes the max-over-starts statistic from scratch.
//!
//! Page mode tracks the classic CUSUM recursion
//! `W_n = max(0, W_{n-1} + log2(mu1(x)/mu0(x)))`. The universal modes keep one
//! Krichevsky-Trofimov state per retained candidate start `k` and score each
//! start as `-L(y_k^n) - log2 ref(y_k^n) - penalty`, where `ref` is the known
//! pre-change law (JB-Page) or its empirical estimate.

use crate::code::kt_length;
use crate::empirical::{lambda_window, EmpiricalEstimate};
use crate::{real, Categorical, Error, KtState, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorMode {
    /// Known pre- and post-change distributions.
    Page,
    /// Known pre-change distribution, universal code for the post-change side.
    JbPage,
    /// Empirically estimated pre-change distribution, universal code for the
    /// post-change side.
    Empirical,
}

/// How the per-start drift penalty scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyMode {
    /// `(n - k + 1) * lambda`: the penalty grows with the window length, which
    /// is what makes the statistic drift down before the change and up after
    /// it for every start. Default.
    #[default]
    WindowLength,
    /// `n * lambda` regardless of the start: the literal max-statistic form.
    /// Coincides with `WindowLength` for the fixed-start auxiliary tests.
    AbsoluteN,
}

#[derive(Debug, Clone)]
pub struct DetectorConfig<T: Real> {
    pub mode: DetectorMode,
    /// Pre-change reference: `mu0` or `mu_hat`.
    pub reference: Categorical<T>,
    /// Post-change distribution; required in Page mode only.
    pub post: Option<Categorical<T>>,
    /// Drift penalty in bits per symbol; unused in Page mode.
    pub lambda: T,
    /// Alarm threshold `log2 gamma` in bits; must be positive.
    pub threshold: T,
    pub penalty: PenaltyMode,
    /// Cap on retained candidate starts; `None` keeps all (exact).
    pub max_starts: Option<usize>,
    /// Pruning slack in bits; defaults to twice the threshold.
    pub slack: Option<T>,
}

impl<T: Real> DetectorConfig<T> {
    pub fn page(mu0: Categorical<T>, mu1: Categorical<T>, threshold: T) -> Self {
        Self {
            mode: DetectorMode::Page,
            reference: mu0,
            post: Some(mu1),
            lambda: T::zero(),
            threshold,
            penalty: PenaltyMode::default(),
            max_starts: None,
            slack: None,
        }
    }

    pub fn universal(
        mode: DetectorMode,
        reference: Categorical<T>,
        lambda: T,
        threshold: T,
    ) -> Self {
        Self {
            mode,
            reference,
            post: None,
            lambda,
            threshold,
            penalty: PenaltyMode::default(),
            max_starts: None,
            slack: None,
        }
    }

    fn check_basic(&self) -> Result<()> {
        if !(self.threshold > T::zero()) {
            return Err(Error::InvalidThreshold(
                self.threshold.to_f64().unwrap_or(f64::NAN),
            ));
        }
        if self.mode == DetectorMode::Page && self.post.is_none() {
            return Err(Error::Config("Page mode needs a post-change distribution".into()));
        }
        Ok(())
    }
}

/// Cross-field validation: checks the threshold and, when enough context is
/// supplied to compute the lambda window, that lambda lies strictly inside
/// it. Missing context produces warnings instead of errors.
pub fn validate_config<T: Real>(
    config: &DetectorConfig<T>,
    mu0: Option<&Categorical<T>>,
    mu1: Option<&Categorical<T>>,
    est: Option<&EmpiricalEstimate>,
    delta: Option<T>,
) -> Result<Vec<String>> {
    config.check_basic()?;
    let mut warnings = Vec::new();
    if config.mode == DetectorMode::Page {
        return Ok(warnings);
    }
    match (mu0, mu1) {
        (Some(mu0), Some(mu1)) => {
            // For the known-reference test the window is (0, D(mu1 || mu0));
            // for the empirical test it is sharpened by log beta and uses
            // mu_hat on the right.
            let (lo, hi) = match (config.mode, est, delta) {
                (DetectorMode::Empirical, Some(est), Some(delta)) => {
                    lambda_window(mu0, mu1, est, delta)?
                }
                (DetectorMode::Empirical, _, _) => {
                    warnings.push(
                        "empirical mode without estimate/delta: checking against the ideal window"
                            .into(),
                    );
                    (T::zero(), mu1.kl_divergence(mu0)?)
                }
                _ => (T::zero(), mu1.kl_divergence(mu0)?),
            };
            if !(config.lambda > lo && config.lambda < hi) {
                return Err(Error::LambdaOutsideWindow {
                    lambda: config.lambda.to_f64().unwrap_or(f64::NAN),
                    lo: lo.to_f64().unwrap_or(f64::NAN),
                    hi: hi.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        _ => warnings.push("lambda window not checked: mu0/mu1 unavailable".into()),
    }
    Ok(warnings)
}

#[derive(Debug, Clone)]
struct StartState<T: Real> {
    /// 1-based index of the first symbol this start covers.
    start: usize,
    kt: KtState<T>,
    /// `-sum log2 ref(y_i)` over the window, in bits.
    neg_ref_log: T,
    statistic: T,
}

/// One online detector instance over a single symbol stream.
#[derive(Debug, Clone)]
pub struct Detector<T: Real> {
    config: DetectorConfig<T>,
    n: usize,
    page_w: T,
    starts: Vec<StartState<T>>,
    statistic: T,
    stopped: bool,
    stop_time: Option<usize>,
}

impl<T: Real> Detector<T> {
    pub fn new(config: DetectorConfig<T>) -> Result<Self> {
        config.check_basic()?;
        Ok(Self {
            config,
            n: 0,
            page_w: T::zero(),
            starts: Vec::new(),
            statistic: T::neg_infinity(),
            stopped: false,
            stop_time: None,
        })
    }

    pub fn config(&self) -> &DetectorConfig<T> {
        &self.config
    }

    pub fn samples_seen(&self) -> usize {
        self.n
    }

    /// Current max statistic in bits (`-inf` before the first symbol in the
    /// universal modes, 0 in Page mode).
    pub fn statistic(&self) -> T {
        if self.config.mode == DetectorMode::Page {
            self.page_w
        } else {
            self.statistic
        }
    }

    pub fn stopped(&self) -> bool {
        self.stopped
    }

    pub fn stop_time(&self) -> Option<usize> {
        self.stop_time
    }

    pub fn active_starts(&self) -> usize {
        self.starts.len()
    }

    /// Feeds one symbol. Returns the updated statistic; a no-op once stopped.
    pub fn step(&mut self, symbol: usize) -> Result<T> {
        if self.stopped {
            return Ok(self.statistic());
        }
        if symbol >= self.config.reference.len() {
            return Err(Error::SymbolOutOfRange {
                symbol,
                alphabet: self.config.reference.len(),
            });
        }
        self.n += 1;
        match self.config.mode {
            DetectorMode::Page => self.page_step(symbol)?,
            DetectorMode::JbPage | DetectorMode::Empirical => self.universal_step(symbol)?,
        }
        if self.statistic() >= self.config.threshold {
            self.stopped = true;
            self.stop_time = Some(self.n);
        }
        Ok(self.statistic())
    }

    fn page_step(&mut self, symbol: usize) -> Result<()> {
        let mu0 = &self.config.reference;
        let mu1 = self.config.post.as_ref().expect("checked at construction");
        let p0 = mu0.prob(symbol);
        let p1 = mu1.prob(symbol);
        if p0 <= T::zero() {
            if p1 > T::zero() {
                // impossible under mu0, certain evidence of change
                self.page_w = T::infinity();
                return Ok(());
            }
            return Err(Error::SupportMismatch { symbol });
        }
        let llr = if p1 > T::zero() {
            (p1 / p0).log2()
        } else {
            T::neg_infinity()
        };
        self.page_w = (self.page_w + llr).max(T::zero());
        Ok(())
    }

    fn universal_step(&mut self, symbol: usize) -> Result<()> {
        let p_ref = self.config.reference.prob(symbol);
        if p_ref <= T::zero() {
            return Err(Error::ZeroReferenceProb { symbol });
        }
        let neg_log_ref = -p_ref.log2();
        // open a candidate start at k = n
        self.starts.push(StartState {
            start: self.n,
            kt: KtState::new(self.config.reference.len()),
            neg_ref_log: T::zero(),
            statistic: T::neg_infinity(),
        });
        let n = real::<T>(self.n as f64);
        let lambda = self.config.lambda;
        let mut best = T::neg_infinity();
        for st in &mut self.starts {
            st.kt.extend(symbol);
            st.neg_ref_log += neg_log_ref;
            let penalty = match self.config.penalty {
                PenaltyMode::WindowLength => {
                    lambda * real::<T>((self.n - st.start + 1) as f64)
                }
                PenaltyMode::AbsoluteN => lambda * n,
            };
            st.statistic = -st.kt.length_bits() + st.neg_ref_log - penalty;
            best = best.max(st.statistic);
        }
        self.statistic = best;
        self.prune(best);
        Ok(())
    }

    fn prune(&mut self, best: T) {
        let Some(cap) = self.config.max_starts else {
            return;
        };
        let slack = self
            .config
            .slack
            .unwrap_or(self.config.threshold + self.config.threshold);
        let cutoff = best - slack;
        let mut drop = 0;
        while self.starts.len() - drop > cap && self.starts[drop].statistic < cutoff {
            drop += 1;
        }
        if drop > 0 {
            self.starts.drain(..drop);
        }
    }
}

/// Recomputes the max-over-starts statistic from scratch over the prefix.
/// Ground truth for the online recursions; quadratic in the prefix length.
pub fn brute_force_statistic<T: Real>(
    prefix: &[usize],
    config: &DetectorConfig<T>,
) -> Result<T> {
    config.check_basic()?;
    let n = prefix.len();
    if n == 0 {
        return Ok(match config.mode {
            DetectorMode::Page => T::zero(),
            _ => T::neg_infinity(),
        });
    }
    let mut best = T::neg_infinity();
    for k in 1..=n {
        let window = &prefix[k - 1..];
        let term = match config.mode {
            DetectorMode::Page => {
                let mu0 = &config.reference;
                let mu1 = config.post.as_ref().unwrap();
                mu1.log_prob_sequence(window)? - mu0.log_prob_sequence(window)?
            }
            DetectorMode::JbPage | DetectorMode::Empirical => {
                let len: T = kt_length(config.reference.alphabet(), window);
                let scale = match config.penalty {
                    PenaltyMode::WindowLength => window.len(),
                    PenaltyMode::AbsoluteN => n,
                };
                -len - config.reference.log_prob_sequence(window)?
                    - config.lambda * real::<T>(scale as f64)
            }
        };
        best = best.max(term);
    }
    if config.mode == DetectorMode::Page {
        // the empty window contributes zero to the max
        best = best.max(T::zero());
    }
    Ok(best)
}

/// Outcome of running a stopping rule over a finite stream.
#[derive(Debug, Clone, PartialEq)]
pub struct StopReport<T: Real> {
    pub stopped: bool,
    /// 1-based sample index at which the rule fired.
    pub stop_time: Option<usize>,
    /// Statistic at the stop (or at stream end).
    pub statistic: T,
    /// Per-step statistic values, when requested.
    pub trace: Option<Vec<T>>,
}

/// One-sided auxiliary stopping time: single fixed start `k = 1`, threshold
/// `-log2 alpha`. Stops at the first `n` where
/// `-L(y_1^n) - log2 ref(y_1^n) - n lambda >= -log2 alpha`.
pub fn aux_stop<T: Real>(
    symbols: &[usize],
    reference: &Categorical<T>,
    lambda: T,
    alpha: T,
    want_trace: bool,
) -> Result<StopReport<T>> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::InvalidAlpha(alpha.to_f64().unwrap_or(f64::NAN)));
    }
    let threshold = -alpha.log2();
    let mut kt = KtState::<T>::new(reference.len());
    let mut neg_ref_log = T::zero();
    let mut statistic = T::neg_infinity();
    let mut trace = want_trace.then(Vec::new);
    for (i, &s) in symbols.iter().enumerate() {
        let p = reference.prob(s);
        if p <= T::zero() {
            return Err(Error::ZeroReferenceProb { symbol: s });
        }
        kt.extend(s);
        neg_ref_log += -p.log2();
        let n = real::<T>((i + 1) as f64);
        statistic = -kt.length_bits() + neg_ref_log - lambda * n;
        if let Some(t) = trace.as_mut() {
            t.push(statistic);
        }
        if statistic >= threshold {
            return Ok(StopReport {
                stopped: true,
                stop_time: Some(i + 1),
                statistic,
                trace,
            });
        }
    }
    Ok(StopReport {
        stopped: false,
        stop_time: None,
        statistic,
        trace,
    })
}

/// Runs a detector over a whole stream, with an optional statistic trace.
pub fn run_detector<T: Real>(
    symbols: &[usize],
    config: DetectorConfig<T>,
    want_trace: bool,
) -> Result<StopReport<T>> {
    let mut det = Detector::new(config)?;
    let mut trace = want_trace.then(Vec::new);
    for &s in symbols {
        let stat = det.step(s)?;
        if let Some(t) = trace.as_mut() {
            t.push(stat);
        }
        if det.stopped() {
            break;
        }
    }
    Ok(StopReport {
        stopped: det.stopped(),
        stop_time: det.stop_time(),
        statistic: det.statistic(),
        trace,
    })
}
