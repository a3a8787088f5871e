//! Empirical pre-change estimation from the warm-up prefix, the
//! delta-deviation event, and the beta bound machinery built on it.

use crate::{real, Alphabet, Categorical, Error, Real, Result, SymbolStream};

/// Whether zero counts are left as-is or smoothed before forming the
/// estimated distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothing {
    /// Plain frequencies `count / n0`. Matches the estimator the bounds are
    /// stated for; symbols unseen in the prefix get probability zero.
    #[default]
    None,
    /// Add half to every count. Operational escape hatch for streams that
    /// may contain symbols missing from the prefix.
    AddHalf,
}

/// Symbol counts over the warm-up prefix and the derived estimate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalEstimate {
    counts: Vec<u64>,
    n0: u64,
}

impl EmpiricalEstimate {
    /// Counts symbol occurrences over the prefix.
    pub fn from_prefix(prefix: &SymbolStream, alphabet: Alphabet) -> Result<Self> {
        Self::from_symbols(&prefix.symbols, alphabet)
    }

    pub fn from_symbols(symbols: &[usize], alphabet: Alphabet) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyPrefix);
        }
        let mut counts = vec![0u64; alphabet.size()];
        for &s in symbols {
            if !alphabet.contains(s) {
                return Err(Error::SymbolOutOfRange {
                    symbol: s,
                    alphabet: alphabet.size(),
                });
            }
            counts[s] += 1;
        }
        Ok(Self {
            counts,
            n0: symbols.len() as u64,
        })
    }

    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        Alphabet::new(counts.len())?;
        let n0: u64 = counts.iter().sum();
        if n0 == 0 {
            return Err(Error::EmptyPrefix);
        }
        Ok(Self { counts, n0 })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n0(&self) -> u64 {
        self.n0
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.counts.len()).expect("validated at construction")
    }

    /// Every symbol appeared at least once in the prefix.
    pub fn full_support(&self) -> bool {
        self.counts.iter().all(|&c| c > 0)
    }

    /// The estimated distribution `count(a) / n0`, optionally smoothed.
    pub fn mu_hat<T: Real>(&self, smoothing: Smoothing) -> Categorical<T> {
        let probs: Vec<T> = match smoothing {
            Smoothing::None => {
                let n: T = real(self.n0 as f64);
                self.counts.iter().map(|&c| real::<T>(c as f64) / n).collect()
            }
            Smoothing::AddHalf => {
                let k = self.counts.len() as f64;
                let n: T = real(self.n0 as f64 + k / 2.0);
                self.counts
                    .iter()
                    .map(|&c| real::<T>(c as f64 + 0.5) / n)
                    .collect()
            }
        };
        Categorical::new(probs).expect("counts always form a valid distribution")
    }
}

/// Outcome of checking the delta-deviation event: every symbol's empirical
/// frequency lies within `delta` of its true probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationEvent<T: Real> {
    pub delta: T,
    pub holds: bool,
    pub max_abs_deviation: T,
}

/// Checks `|mu_hat(a) - mu0(a)| < delta` for every symbol.
pub fn check_deviation<T: Real>(
    est: &EmpiricalEstimate,
    mu0: &Categorical<T>,
    delta: T,
) -> DeviationEvent<T> {
    let mu_hat = est.mu_hat::<T>(Smoothing::None);
    let max_abs_deviation = mu_hat
        .probs()
        .iter()
        .zip(mu0.probs())
        .map(|(h, p)| (*h - *p).abs())
        .fold(T::zero(), T::max);
    DeviationEvent {
        delta,
        holds: max_abs_deviation < delta,
        max_abs_deviation,
    }
}

/// The distortion factor `beta = p_min / (p_min - delta)` with `p_min` the
/// minimum probability over the support of `mu0`.
pub fn beta_bound<T: Real>(mu0: &Categorical<T>, delta: T) -> Result<T> {
    let p_min = mu0.min_positive_prob();
    if delta >= p_min {
        return Err(Error::DeltaTooLarge {
            delta: delta.to_f64().unwrap_or(f64::NAN),
            p_min: p_min.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(p_min / (p_min - delta))
}

/// Per-symbol average log-ratio `log2(mu0(x_1^n) / mu_hat(x_1^n)) / n`.
pub fn fn_statistic<T: Real>(
    mu0: &Categorical<T>,
    est: &EmpiricalEstimate,
    seq: &[usize],
) -> Result<T> {
    if seq.is_empty() {
        return Ok(T::zero());
    }
    let mu_hat = est.mu_hat::<T>(Smoothing::None);
    let lp0 = mu0.log_prob_sequence(seq)?;
    let lph = mu_hat.log_prob_sequence(seq)?;
    Ok((lp0 - lph) / real(seq.len() as f64))
}

/// The valid drift-penalty window for the empirical test:
/// `lo = max(log2 beta, D(mu0 || mu_hat))`, `hi = D(mu1 || mu_hat)`.
///
/// The caller must pick lambda strictly inside `(lo, hi)`.
pub fn lambda_window<T: Real>(
    mu0: &Categorical<T>,
    mu1: &Categorical<T>,
    est: &EmpiricalEstimate,
    delta: T,
) -> Result<(T, T)> {
    let mu_hat = est.mu_hat::<T>(Smoothing::None);
    let log_beta = beta_bound(mu0, delta)?.log2();
    let lo = log_beta.max(mu0.kl_divergence(&mu_hat)?);
    let hi = mu1.kl_divergence(&mu_hat)?;
    if lo >= hi {
        return Err(Error::EmptyWindow {
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok((lo, hi))
}

/// Hoeffding union bound on the probability that the deviation event fails:
/// `eps0 <= 2K exp(-2 n0 delta^2)`, capped at 1.
pub fn hoeffding_eps0(k: usize, n0: u64, delta: f64) -> f64 {
    (2.0 * k as f64 * (-2.0 * n0 as f64 * delta * delta).exp()).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn cat(probs: &[f64]) -> Categorical<f64> {
        Categorical::new(probs.to_vec()).unwrap()
    }

    fn alphabet(k: usize) -> Alphabet {
        Alphabet::new(k).unwrap()
    }

    #[test]
    fn counting_and_missing_symbols() {
        let est = EmpiricalEstimate::from_symbols(&[0, 0, 1], alphabet(2)).unwrap();
        assert_eq!(est.counts(), &[2, 1]);
        let mu = est.mu_hat::<f64>(Smoothing::None);
        assert_abs_diff_eq!(mu.prob(0), 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mu.prob(1), 1.0 / 3.0, epsilon = 1e-15);
        assert!(est.full_support());

        let est = EmpiricalEstimate::from_symbols(&[0, 0, 0], alphabet(2)).unwrap();
        assert!(!est.full_support());
        assert_abs_diff_eq!(est.mu_hat::<f64>(Smoothing::None).prob(0), 1.0);

        assert!(matches!(
            EmpiricalEstimate::from_symbols(&[], alphabet(2)),
            Err(Error::EmptyPrefix)
        ));
    }

    #[test]
    fn add_half_smoothing_covers_unseen_symbols() {
        let est = EmpiricalEstimate::from_symbols(&[0, 0, 0], alphabet(2)).unwrap();
        let mu = est.mu_hat::<f64>(Smoothing::AddHalf);
        assert!(mu.full_support());
        assert_abs_diff_eq!(mu.prob(0), 3.5 / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn estimate_concentrates() {
        let mu = cat(&[0.5, 0.5]);
        let prefix = mu.sample_iid(100_000, 17);
        let est = EmpiricalEstimate::from_prefix(&prefix, alphabet(2)).unwrap();
        let mu_hat = est.mu_hat::<f64>(Smoothing::None);
        assert!((mu_hat.prob(0) - 0.5).abs() < 0.01);
    }

    #[test]
    fn deviation_event_cases() {
        let mu0 = cat(&[0.5, 0.5]);
        let exact = EmpiricalEstimate::from_counts(vec![5, 5]).unwrap();
        assert!(check_deviation(&exact, &mu0, 1e-6).holds);

        let off = EmpiricalEstimate::from_counts(vec![6, 4]).unwrap();
        assert!(!check_deviation(&off, &mu0, 0.05).holds);

        let close = EmpiricalEstimate::from_counts(vec![52, 48]).unwrap();
        assert!(check_deviation(&close, &mu0, 0.05).holds);
    }

    #[test]
    fn beta_bound_cases() {
        let b = beta_bound(&cat(&[0.2, 0.8]), 0.05).unwrap();
        assert_abs_diff_eq!(b, 4.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.log2(), 0.41503749927884376, epsilon = 1e-12);

        assert_abs_diff_eq!(beta_bound(&cat(&[0.2, 0.8]), 0.0).unwrap(), 1.0);

        assert!(matches!(
            beta_bound(&cat(&[0.1, 0.9]), 0.1),
            Err(Error::DeltaTooLarge { .. })
        ));
    }

    #[test]
    fn fn_statistic_cases() {
        let mu0 = cat(&[0.5, 0.5]);
        let exact = EmpiricalEstimate::from_counts(vec![7, 7]).unwrap();
        assert_abs_diff_eq!(fn_statistic(&mu0, &exact, &[0, 1, 1, 0]).unwrap(), 0.0);

        // mu_hat = (0.25, 0.75), single symbol 0
        let skew = EmpiricalEstimate::from_counts(vec![1, 3]).unwrap();
        assert_abs_diff_eq!(
            fn_statistic(&mu0, &skew, &[0]).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn empirical_identity_mu0_equals_mu_hat_times_exp() {
        // mu0(x) = mu_hat(x) * 2^(n f_n), relative 1e-9
        let mu0 = cat(&[0.3, 0.7]);
        let prefix = mu0.sample_iid(500, 3);
        let est = EmpiricalEstimate::from_prefix(&prefix, alphabet(2)).unwrap();
        let seq = mu0.sample_iid(40, 4);
        let f = fn_statistic(&mu0, &est, &seq.symbols).unwrap();
        let lp0 = mu0.log_prob_sequence(&seq.symbols).unwrap();
        let lph = est
            .mu_hat::<f64>(Smoothing::None)
            .log_prob_sequence(&seq.symbols)
            .unwrap();
        let reconstructed = lph + seq.len() as f64 * f;
        assert!((reconstructed - lp0).abs() / lp0.abs() < 1e-9);
    }

    #[test]
    fn beta_bound_on_random_instances() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let mut checked = 0;
        while checked < 500 {
            let p: f64 = rng.gen_range(0.15..0.85);
            let mu0 = cat(&[p, 1.0 - p]);
            let n0 = rng.gen_range(200..2000);
            let prefix = mu0.sample_iid_with(n0, &mut rng);
            let est = EmpiricalEstimate::from_prefix(&prefix, alphabet(2)).unwrap();
            let delta: f64 = rng.gen_range(0.01..0.1);
            if delta >= mu0.min_positive_prob() {
                continue;
            }
            if !check_deviation(&est, &mu0, delta).holds || !est.full_support() {
                continue;
            }
            let seq = mu0.sample_iid_with(rng.gen_range(1..100), &mut rng);
            let f = fn_statistic(&mu0, &est, &seq.symbols).unwrap();
            let log_beta = beta_bound(&mu0, delta).unwrap().log2();
            assert!(f <= log_beta + 1e-12, "f = {f}, log beta = {log_beta}");
            checked += 1;
        }
    }

    #[test]
    fn divergence_gap_bounded_by_log_beta() {
        let mut rng = ChaCha12Rng::seed_from_u64(22);
        let mut checked = 0;
        while checked < 300 {
            let p: f64 = rng.gen_range(0.2..0.8);
            let mu0 = cat(&[p, 1.0 - p]);
            let q: f64 = rng.gen_range(0.05..0.95);
            let mu1 = cat(&[q, 1.0 - q]);
            let prefix = mu0.sample_iid_with(rng.gen_range(500..3000), &mut rng);
            let est = EmpiricalEstimate::from_prefix(&prefix, alphabet(2)).unwrap();
            let delta: f64 = rng.gen_range(0.02..0.1);
            if delta >= mu0.min_positive_prob() || !check_deviation(&est, &mu0, delta).holds {
                continue;
            }
            let mu_hat = est.mu_hat::<f64>(Smoothing::None);
            if !mu_hat.full_support() {
                continue;
            }
            let gap = mu1.kl_divergence(&mu_hat).unwrap() - mu1.kl_divergence(&mu0).unwrap();
            let log_beta = beta_bound(&mu0, delta).unwrap().log2();
            assert!(gap < log_beta + 1e-12, "gap = {gap}, log beta = {log_beta}");
            checked += 1;
        }
    }

    #[test]
    fn lambda_window_cases() {
        let mu0 = cat(&[0.5, 0.5]);
        let mu1 = cat(&[0.9, 0.1]);
        // exact estimate, delta -> 0
        let est = EmpiricalEstimate::from_counts(vec![500, 500]).unwrap();
        let (lo, hi) = lambda_window(&mu0, &mu1, &est, 1e-9).unwrap();
        assert!(lo < 1e-6);
        assert_abs_diff_eq!(hi, 0.5310044064107189, epsilon = 1e-9);

        // no change to detect
        assert!(matches!(
            lambda_window(&mu0, &mu0, &est, 1e-9),
            Err(Error::EmptyWindow { .. })
        ));

        // slightly off estimate; beta is taken over mu0's support
        let est = EmpiricalEstimate::from_counts(vec![52, 48]).unwrap();
        let (lo, hi) = lambda_window(&mu0, &mu1, &est, 0.05).unwrap();
        let log_beta = (0.5f64 / 0.45).log2();
        let d0 = mu0.kl_divergence(&est.mu_hat(Smoothing::None)).unwrap();
        assert_abs_diff_eq!(lo, log_beta.max(d0), epsilon = 1e-12);
        assert!(lo < hi);
    }

    #[test]
    fn deviation_failure_rate_decreases_with_n0() {
        let mu0 = cat(&[0.5, 0.5]);
        let delta = 0.05;
        let fail = |n0: usize, seed: u64| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut fails = 0;
            for _ in 0..400 {
                let prefix = mu0.sample_iid_with(n0, &mut rng);
                let est = EmpiricalEstimate::from_prefix(&prefix, alphabet(2)).unwrap();
                if !check_deviation(&est, &mu0, delta).holds {
                    fails += 1;
                }
            }
            fails
        };
        let small = fail(50, 1);
        let large = fail(800, 2);
        assert!(large < small, "eps0 did not shrink: {small} -> {large}");
    }

    #[test]
    fn hoeffding_bound_shape() {
        assert!(hoeffding_eps0(2, 10, 0.01) == 1.0);
        let loose = hoeffding_eps0(2, 10_000, 0.02);
        assert_abs_diff_eq!(loose, 0.0013418505116100474, epsilon = 1e-12);
        assert!(hoeffding_eps0(2, 100_000, 0.02) < loose);
    }
}
