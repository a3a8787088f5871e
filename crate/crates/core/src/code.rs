//! Kraft-satisfying universal code-length functions for memoryless sources.
//!
//! Code lengths are ideal (real-valued) `-log2 Q` values rather than integer
//! codeword lengths, so the Kraft sum holds with equality. The default code
//! is the Krichevsky-Trofimov add-half mixture, which is strongly universal
//! for memoryless sources with pointwise redundancy `((K-1)/2) log2 n + O(1)`.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::{real, Alphabet, Categorical, Error, Real, Result};

/// A sequence code-length function `L(x_1^n)` in bits.
pub trait CodeLengthFn<T: Real> {
    fn alphabet(&self) -> Alphabet;

    /// Length in bits of the whole sequence.
    fn length(&self, symbols: &[usize]) -> T;
}

/// The Krichevsky-Trofimov sequential probability assignment.
#[derive(Debug, Clone, Copy)]
pub struct KtCode {
    alphabet: Alphabet,
}

impl KtCode {
    pub fn new(alphabet: Alphabet) -> Self {
        Self { alphabet }
    }

    /// Fresh incremental evaluation state (empty sequence, zero bits).
    pub fn begin<T: Real>(&self) -> KtState<T> {
        KtState::new(self.alphabet.size())
    }
}

impl<T: Real> CodeLengthFn<T> for KtCode {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn length(&self, symbols: &[usize]) -> T {
        let mut st = self.begin();
        for &s in symbols {
            st.extend(s);
        }
        st.length_bits()
    }
}

/// Incremental KT evaluator: symbol counts plus the accumulated length.
///
/// Extending by symbol `s` after `t` symbols with count `c(s)` adds
/// `log2((t + K/2) / (c(s) + 1/2))` bits.
#[derive(Debug, Clone)]
pub struct KtState<T: Real> {
    counts: Vec<u64>,
    total: u64,
    length_bits: T,
}

impl<T: Real> KtState<T> {
    pub fn new(k: usize) -> Self {
        Self {
            counts: vec![0; k],
            total: 0,
            length_bits: T::zero(),
        }
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn length_bits(&self) -> T {
        self.length_bits
    }

    fn step_increment(&self, symbol: usize) -> T {
        let k = self.counts.len() as f64;
        let num: T = real(self.total as f64 + k / 2.0);
        let den: T = real(self.counts[symbol] as f64 + 0.5);
        (num / den).log2()
    }

    /// Appends one symbol, returning the length increment in bits.
    pub fn extend(&mut self, symbol: usize) -> T {
        let inc = self.step_increment(symbol);
        self.counts[symbol] += 1;
        self.total += 1;
        self.length_bits += inc;
        inc
    }

    /// Undoes the most recent `extend(symbol)`. Used by depth-first
    /// enumeration so sibling prefixes share state.
    pub fn retract(&mut self, symbol: usize) {
        debug_assert!(self.counts[symbol] > 0);
        self.counts[symbol] -= 1;
        self.total -= 1;
        let inc = self.step_increment(symbol);
        self.length_bits -= inc;
    }
}

/// Convenience: KT length of a whole sequence in bits.
pub fn kt_length<T: Real>(alphabet: Alphabet, symbols: &[usize]) -> T {
    CodeLengthFn::<T>::length(&KtCode::new(alphabet), symbols)
}

fn enumeration_size(k: usize, n: usize) -> Result<u128> {
    let states = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if states > 1 << 24 {
        return Err(Error::TooLarge { states });
    }
    Ok(states)
}

/// Exact `sum over x_1^n of 2^-L(x_1^n)`, enumerating all K^n sequences.
pub fn kraft_sum<T: Real, C: CodeLengthFn<T>>(code: &C, n: usize) -> Result<T> {
    let k = code.alphabet().size();
    enumeration_size(k, n)?;
    let mut sum = T::zero();
    for_each_sequence(k, n, &mut |seq| {
        sum += (-code.length(seq)).exp2();
    });
    Ok(sum)
}

/// How `redundancy` explores the sequence space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RedundancyMode {
    /// Exact max over all K^n sequences.
    Exhaustive,
    /// Lower estimate: max over `samples` sequences drawn i.i.d. from `dist`.
    Sampled { samples: usize, seed: u64 },
}

/// Pointwise redundancy `max_x (L(x) + log2 mu(x))` in bits.
pub fn redundancy<T: Real, C: CodeLengthFn<T>>(
    code: &C,
    dist: &Categorical<T>,
    n: usize,
    mode: RedundancyMode,
) -> Result<T> {
    if n == 0 {
        return Ok(T::zero());
    }
    let k = code.alphabet().size();
    match mode {
        RedundancyMode::Exhaustive => {
            enumeration_size(k, n)?;
            let mut best = T::neg_infinity();
            for_each_sequence(k, n, &mut |seq| {
                if let Ok(lp) = dist.log_prob_sequence(seq) {
                    best = best.max(code.length(seq) + lp);
                }
            });
            Ok(best)
        }
        RedundancyMode::Sampled { samples, seed } => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut best = T::neg_infinity();
            for _ in 0..samples {
                let seq = dist.sample_iid_with(n, &mut rng);
                let lp = dist.log_prob_sequence(&seq.symbols)?;
                best = best.max(code.length(&seq.symbols) + lp);
            }
            Ok(best)
        }
    }
}

/// Visits every sequence in X^n in lexicographic order.
fn for_each_sequence(k: usize, n: usize, f: &mut impl FnMut(&[usize])) {
    let mut seq = vec![0usize; n];
    loop {
        f(&seq);
        // odometer increment
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            seq[i] += 1;
            if seq[i] < k {
                break;
            }
            seq[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn binary() -> KtCode {
        KtCode::new(Alphabet::new(2).unwrap())
    }

    #[test]
    fn kt_length_small_cases() {
        let c = binary();
        assert_abs_diff_eq!(kt_length::<f64>(c.alphabet, &[]), 0.0);
        assert_abs_diff_eq!(kt_length::<f64>(c.alphabet, &[0]), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            kt_length::<f64>(c.alphabet, &[0, 0]),
            1.415037499278844,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(kt_length::<f64>(c.alphabet, &[0, 1]), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn kt_extend_increments() {
        let mut st = binary().begin::<f64>();
        assert_abs_diff_eq!(st.extend(0), 1.0, epsilon = 1e-12);
        // second zero: log2((1 + 1) / 1.5)
        assert_abs_diff_eq!(st.extend(0), 0.41503749927884376, epsilon = 1e-12);
    }

    #[test]
    fn retract_inverts_extend() {
        let mut st = KtState::<f64>::new(3);
        for &s in &[0, 2, 1, 0, 0, 2] {
            st.extend(s);
        }
        let snapshot = st.length_bits();
        st.extend(1);
        st.retract(1);
        assert_abs_diff_eq!(st.length_bits(), snapshot, epsilon = 1e-12);
    }

    #[test]
    fn kraft_sum_is_one() {
        assert_abs_diff_eq!(kraft_sum::<f64, _>(&binary(), 0).unwrap(), 1.0);
        assert_abs_diff_eq!(kraft_sum::<f64, _>(&binary(), 2).unwrap(), 1.0, epsilon = 1e-12);
        let ternary = KtCode::new(Alphabet::new(3).unwrap());
        assert_abs_diff_eq!(
            kraft_sum::<f64, _>(&ternary, 4).unwrap(),
            1.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn kraft_sum_guard() {
        assert!(matches!(
            kraft_sum::<f64, _>(&binary(), 60),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn redundancy_exhaustive_within_kt_bound() {
        let dist = Categorical::<f64>::uniform(2).unwrap();
        let r = redundancy(&binary(), &dist, 12, RedundancyMode::Exhaustive).unwrap();
        assert!(r > 0.0);
        assert!(r <= 0.5 * 12f64.log2() + 2.0, "r = {r}");
    }

    #[test]
    fn redundancy_zero_length() {
        let dist = Categorical::<f64>::uniform(2).unwrap();
        let r = redundancy(&binary(), &dist, 0, RedundancyMode::Exhaustive).unwrap();
        assert_abs_diff_eq!(r, 0.0);
    }

    #[test]
    fn sampled_redundancy_per_symbol_decreases() {
        let dist = Categorical::new(vec![0.3, 0.7]).unwrap();
        let mut prev = f64::INFINITY;
        for &n in &[64usize, 256, 1024, 4096] {
            let mode = RedundancyMode::Sampled {
                samples: 100,
                seed: 7,
            };
            let r = redundancy(&binary(), &dist, n, mode).unwrap() / n as f64;
            assert!(r < prev, "per-symbol redundancy not decreasing at n={n}");
            prev = r;
        }
    }

    proptest! {
        #[test]
        fn incremental_matches_batch(seq in prop::collection::vec(0usize..3, 0..120)) {
            let code = KtCode::new(Alphabet::new(3).unwrap());
            let mut st = code.begin::<f64>();
            for &s in &seq {
                st.extend(s);
            }
            let batch: f64 = code.length(&seq);
            prop_assert!((st.length_bits() - batch).abs() < 1e-9);
        }

        #[test]
        fn kt_is_exchangeable(seq in prop::collection::vec(0usize..3, 1..60), swap in any::<prop::sample::Index>()) {
            let code = KtCode::new(Alphabet::new(3).unwrap());
            let mut permuted = seq.clone();
            let i = swap.index(seq.len());
            permuted.swap(0, i);
            let a: f64 = code.length(&seq);
            let b: f64 = code.length(&permuted);
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}
