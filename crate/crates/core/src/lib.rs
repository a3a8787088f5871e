//! Sequential change detection over finite alphabets.
//!
//! Three online tests are provided: the classic Page CUSUM recursion (both
//! distributions known), a universal-code CUSUM where the post-change
//! distribution is replaced by a Krichevsky-Trofimov code length, and a
//! further variant where the pre-change distribution is itself estimated
//! empirically from a warm-up prefix. A Monte Carlo harness measures error
//! probability, average run length to false alarm, and worst-case detection
//! delay against the corresponding analytic bounds.
//!
//! All logarithms, code lengths, divergences and thresholds are in bits
//! (base 2) throughout.

use std::fmt;
use std::iter::Sum;
use std::ops::{AddAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub mod alphabet;
pub mod cli;
pub mod code;
pub mod detect;
pub mod empirical;
mod error;
pub mod sim;
pub mod verify;

pub use alphabet::{Alphabet, Categorical, SymbolStream};
pub use code::{CodeLengthFn, KtCode, KtState};
pub use detect::{
    aux_stop, brute_force_statistic, run_detector, validate_config, Detector, DetectorConfig,
    DetectorMode, PenaltyMode, StopReport,
};
pub use empirical::{DeviationEvent, EmpiricalEstimate, Smoothing};
pub use error::Error;

/// Scalar type the core math is generic over.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + Sum<Self>
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + AddAssign
        + SubAssign
        + Sum<T>
        + fmt::Debug
        + fmt::Display
        + Send
        + Sync
        + 'static
{
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Default scalar used by the simulator and CLI.
pub type Scalar = f64;

pub type Categorical64 = Categorical<f64>;
pub type Categorical32 = Categorical<f32>;
pub type KtState64 = KtState<f64>;
pub type Detector64 = Detector<f64>;

/// Lossless-enough conversion from literal constants into the scalar type.
pub(crate) fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal must convert into the scalar type")
}
