//! Finite-alphabet categorical distributions, information measures, and
//! seeded i.i.d. sampling.

use std::io::{BufRead, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::{real, Error, Real, Result};

/// A dense finite alphabet; symbols are the indices `0..size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidAlphabet(size));
        }
        Ok(Self { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, symbol: usize) -> bool {
        symbol < self.size
    }
}

/// A probability vector over a finite alphabet.
///
/// Immutable after construction; houses both the pre-change and post-change
/// distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct Categorical<T: Real> {
    alphabet: Alphabet,
    probs: Vec<T>,
}

impl<T: Real> Categorical<T> {
    /// Builds a distribution from raw probabilities.
    ///
    /// Vectors summing to 1 within 1e-12 are accepted as-is; sums off by up
    /// to 1e-9 are renormalized; anything worse is rejected so that garbage
    /// configs fail loudly instead of being silently normalized.
    pub fn new(probs: Vec<T>) -> Result<Self> {
        let alphabet = Alphabet::new(probs.len())?;
        if probs.iter().any(|p| *p < T::zero() || !p.is_finite()) {
            return Err(Error::InvalidProbabilities(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        let sum: T = probs.iter().copied().sum();
        let err = (sum - T::one()).abs();
        let probs = if err <= real(1e-12) {
            probs
        } else if err <= real(1e-9) {
            probs.into_iter().map(|p| p / sum).collect()
        } else {
            return Err(Error::InvalidProbabilities(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        };
        Ok(Self { alphabet, probs })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        let p = T::one() / real(k as f64);
        Self::new(vec![p; k])
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn prob(&self, symbol: usize) -> T {
        self.probs[symbol]
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// Symbols with strictly positive probability.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > T::zero())
            .map(|(a, _)| a)
    }

    pub fn in_support(&self, symbol: usize) -> bool {
        symbol < self.probs.len() && self.probs[symbol] > T::zero()
    }

    pub fn full_support(&self) -> bool {
        self.probs.iter().all(|p| *p > T::zero())
    }

    /// Minimum probability over the support.
    pub fn min_positive_prob(&self) -> T {
        self.probs
            .iter()
            .copied()
            .filter(|p| *p > T::zero())
            .fold(T::infinity(), T::min)
    }

    /// Shannon entropy in bits; `0 log 0` is taken as 0.
    pub fn entropy(&self) -> T {
        -self
            .probs
            .iter()
            .filter(|p| **p > T::zero())
            .map(|p| *p * p.log2())
            .sum::<T>()
    }

    /// KL divergence `D(self || other)` in bits.
    ///
    /// Errors when some symbol has positive probability here but zero
    /// probability under `other` (the divergence is infinite).
    pub fn kl_divergence(&self, other: &Self) -> Result<T> {
        if self.len() != other.len() {
            return Err(Error::InvalidProbabilities(
                "KL divergence needs a common alphabet".into(),
            ));
        }
        let mut d = T::zero();
        for (a, p) in self.probs.iter().enumerate() {
            if *p > T::zero() {
                let q = other.probs[a];
                if q <= T::zero() {
                    return Err(Error::SupportMismatch { symbol: a });
                }
                d += *p * (*p / q).log2();
            }
        }
        // Gibbs guarantees non-negativity; clamp rounding noise.
        Ok(d.max(T::zero()))
    }

    /// Sum of `log2 p(x_i)` over the sequence, in bits (non-positive).
    pub fn log_prob_sequence(&self, symbols: &[usize]) -> Result<T> {
        let mut total = T::zero();
        for &s in symbols {
            if !self.alphabet.contains(s) {
                return Err(Error::SymbolOutOfRange {
                    symbol: s,
                    alphabet: self.len(),
                });
            }
            let p = self.probs[s];
            if p <= T::zero() {
                return Err(Error::SupportMismatch { symbol: s });
            }
            total += p.log2();
        }
        Ok(total)
    }

    /// Draws one symbol by inverse-CDF lookup.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen::<f64>();
        let mut acc = 0.0;
        for (a, p) in self.probs.iter().enumerate() {
            acc += p.to_f64().unwrap_or(0.0);
            if u < acc {
                return a;
            }
        }
        // u landed in the rounding slack past the last cumulative bin.
        self.probs.len() - 1
    }

    /// Draws `n` i.i.d. symbols with the caller's RNG.
    pub fn sample_iid_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> SymbolStream {
        let symbols = (0..n).map(|_| self.sample_one(rng)).collect();
        SymbolStream::new(symbols)
    }

    /// Draws `n` i.i.d. symbols from a fresh seeded generator.
    ///
    /// Identical `(dist, n, seed)` always yields the identical stream.
    pub fn sample_iid(&self, n: usize, seed: u64) -> SymbolStream {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        self.sample_iid_with(n, &mut rng)
    }
}

/// Optional stream annotations: where the warm-up prefix ends and where the
/// true change point sits (in post-warm-up symbols, 1-based).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StreamAnnotations {
    pub warmup_len: Option<usize>,
    pub change_point: Option<usize>,
}

/// A finite sequence of alphabet indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolStream {
    pub symbols: Vec<usize>,
    pub annotations: StreamAnnotations,
}

impl SymbolStream {
    pub fn new(symbols: Vec<usize>) -> Self {
        Self {
            symbols,
            annotations: StreamAnnotations::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn validate(&self, alphabet: Alphabet) -> Result<()> {
        for &s in &self.symbols {
            if !alphabet.contains(s) {
                return Err(Error::SymbolOutOfRange {
                    symbol: s,
                    alphabet: alphabet.size(),
                });
            }
        }
        Ok(())
    }

    /// Writes newline-delimited symbol indices.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        for s in &self.symbols {
            writeln!(w, "{s}")?;
        }
        Ok(())
    }

    /// Reads newline-delimited symbol indices; blank lines are skipped.
    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut symbols = Vec::new();
        for line in r.lines() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let s: usize = t
                .parse()
                .map_err(|e| Error::Config(format!("bad symbol {t:?}: {e}")))?;
            symbols.push(s);
        }
        Ok(Self::new(symbols))
    }

    /// Writes one raw byte per symbol; requires K <= 256.
    pub fn write_bytes<W: Write>(&self, mut w: W) -> Result<()> {
        let mut buf = Vec::with_capacity(self.symbols.len());
        for &s in &self.symbols {
            if s > 255 {
                return Err(Error::SymbolOutOfRange {
                    symbol: s,
                    alphabet: 256,
                });
            }
            buf.push(s as u8);
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_bytes<R: std::io::Read>(mut r: R) -> Result<Self> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        Ok(Self::new(buf.into_iter().map(usize::from).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cat(probs: &[f64]) -> Categorical<f64> {
        Categorical::new(probs.to_vec()).unwrap()
    }

    #[test]
    fn entropy_uniform_and_point_mass() {
        assert_abs_diff_eq!(Categorical::<f64>::uniform(4).unwrap().entropy(), 2.0);
        assert_abs_diff_eq!(cat(&[1.0, 0.0]).entropy(), 0.0);
        assert_abs_diff_eq!(
            cat(&[0.9, 0.1]).entropy(),
            0.4689955935892812,
            epsilon = 1e-12
        );
    }

    #[test]
    fn kl_examples() {
        let mu = cat(&[0.5, 0.5]);
        assert_abs_diff_eq!(mu.kl_divergence(&mu).unwrap(), 0.0);
        assert_abs_diff_eq!(
            mu.kl_divergence(&cat(&[0.25, 0.75])).unwrap(),
            0.20751874963942185,
            epsilon = 1e-12
        );
        assert!(matches!(
            cat(&[1.0, 0.0]).kl_divergence(&cat(&[0.0, 1.0])),
            Err(Error::SupportMismatch { symbol: 0 })
        ));
    }

    #[test]
    fn log_prob_examples() {
        let fair = cat(&[0.5, 0.5]);
        assert_abs_diff_eq!(fair.log_prob_sequence(&[]).unwrap(), 0.0);
        assert_abs_diff_eq!(fair.log_prob_sequence(&[0, 1, 0, 1, 1, 0, 0, 1]).unwrap(), -8.0);
        assert_abs_diff_eq!(
            cat(&[0.9, 0.1]).log_prob_sequence(&[0, 1]).unwrap(),
            -3.473931188332412,
            epsilon = 1e-12
        );
        assert!(cat(&[1.0, 0.0]).log_prob_sequence(&[1]).is_err());
    }

    #[test]
    fn log_prob_additive_under_concatenation() {
        let d = cat(&[0.2, 0.3, 0.5]);
        let a = [0, 1, 2, 2, 1];
        let b = [2, 0, 0, 1];
        let ab: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
        let la = d.log_prob_sequence(&a).unwrap();
        let lb = d.log_prob_sequence(&b).unwrap();
        assert_abs_diff_eq!(d.log_prob_sequence(&ab).unwrap(), la + lb, epsilon = 1e-12);
    }

    #[test]
    fn construction_tolerance() {
        assert!(Categorical::new(vec![0.5, 0.4]).is_err());
        assert!(Categorical::new(vec![0.5, 0.5 + 5e-10]).is_ok());
        assert!(Categorical::new(vec![-0.1, 1.1]).is_err());
        assert!(Categorical::<f64>::new(vec![1.0]).is_err());
    }

    #[test]
    fn sampling_determinism_and_degenerate_cases() {
        let d = cat(&[0.3, 0.7]);
        assert_eq!(d.sample_iid(0, 7).symbols, Vec::<usize>::new());
        assert_eq!(d.sample_iid(100, 42), d.sample_iid(100, 42));
        assert_ne!(d.sample_iid(100, 42), d.sample_iid(100, 43));
        let pm = cat(&[0.0, 1.0]);
        assert_eq!(pm.sample_iid(5, 0).symbols, vec![1, 1, 1, 1, 1]);
    }

    #[test]
    fn sampling_frequency_concentrates() {
        let d = cat(&[0.5, 0.5]);
        let s = d.sample_iid(1_000_000, 123);
        let zeros = s.symbols.iter().filter(|&&x| x == 0).count() as f64;
        let freq = zeros / 1e6;
        assert!((freq - 0.5).abs() < 0.002, "freq = {freq}");
    }

    #[test]
    fn entropy_bounds_on_random_dists() {
        use rand::Rng;
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        for _ in 0..200 {
            let k = rng.gen_range(2..6);
            let raw: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 1e-3).collect();
            let sum: f64 = raw.iter().sum();
            let d = Categorical::new(raw.iter().map(|x| x / sum).collect::<Vec<_>>());
            let d = match d {
                Ok(d) => d,
                Err(_) => continue,
            };
            let h = d.entropy();
            assert!(h >= -1e-12 && h <= (k as f64).log2() + 1e-12);
        }
    }

    #[test]
    fn kl_nonnegative_on_random_pairs() {
        use rand::Rng;
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        for _ in 0..200 {
            let k = rng.gen_range(2..6);
            let mk = |rng: &mut ChaCha12Rng| {
                let raw: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 1e-3).collect();
                let sum: f64 = raw.iter().sum();
                Categorical::new(raw.iter().map(|x| x / sum).collect::<Vec<_>>())
            };
            let (p, q) = match (mk(&mut rng), mk(&mut rng)) {
                (Ok(p), Ok(q)) => (p, q),
                _ => continue,
            };
            assert!(p.kl_divergence(&q).unwrap() >= 0.0);
        }
    }

    #[test]
    fn stream_text_and_byte_round_trip() {
        let s = SymbolStream::new(vec![0, 2, 1, 1, 0]);
        let mut txt = Vec::new();
        s.write_text(&mut txt).unwrap();
        assert_eq!(SymbolStream::read_text(&txt[..]).unwrap().symbols, s.symbols);
        let mut bin = Vec::new();
        s.write_bytes(&mut bin).unwrap();
        assert_eq!(SymbolStream::read_bytes(&bin[..]).unwrap().symbols, s.symbols);
    }

    #[test]
    fn generic_over_f32() {
        let d = Categorical::<f32>::uniform(4).unwrap();
        assert!((d.entropy() - 2.0_f32).abs() < 1e-6);
    }
}
