//! Exchangeable pairs, exact laws and Stein-type error bounds for permutation
//! statistics of the form `X(π) = Σ_{i<j} M[π(i)][π(j)]` with `M` antisymmetric.
//!
//! The pair `(W, W′)` is built from one step of the move-random-to-end chain:
//! pick a position `I` uniformly, remove the entry there and append it at the
//! end of the one-line form. Descents and inversions (of `π⁻¹`) are the two
//! built-in members of the family.
//!
//! Module map:
//!
//! * [`perm`], [`matrix`], [`statistic`], [`moments`]: permutations, the
//!   matrix family and exact first/second moments.
//! * [`chain`]: the chain step, per-position increments and conditional moments.
//! * [`exchange`]: the coset bijection machinery that proves `(W, W′)` is
//!   exchangeable, plus a brute-force checker.
//! * [`exact_dist`]: Eulerian and Mahonian recurrences with big-integer counts.
//! * [`stein`]: ingredients and values of the two Stein-type bounds.
//! * [`analysis`]: normal CDF, Kolmogorov distance and rate tables.
//! * [`cli`]: the `steinperm` command line.

pub mod analysis;
pub mod chain;
pub mod cli;
pub mod enumerate;
mod error;
pub mod exact_dist;
pub mod exchange;
pub mod matrix;
pub mod moments;
pub mod perm;
pub mod rational;
pub mod rng;
pub mod stein;
pub mod verify;
pub mod statistic;
mod sum;

pub use error::{Error, Result};
pub use matrix::AntisymmetricMatrix;
pub use perm::Permutation;
pub use rational::Rational;
pub use statistic::{StatisticKind, StatisticSpec};

/// Size limits for exhaustive enumeration and the exact-distribution recurrences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest `n` for which `S_n` is enumerated.
    pub enumeration: usize,
    pub eulerian_cap: usize,
    pub mahonian_cap: usize,
}

pub const DEFAULT_ENUMERATION_LIMIT: usize = 10;
pub const DEFAULT_EULERIAN_CAP: usize = 200;
pub const DEFAULT_MAHONIAN_CAP: usize = 150;

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration: DEFAULT_ENUMERATION_LIMIT,
            eulerian_cap: DEFAULT_EULERIAN_CAP,
            mahonian_cap: DEFAULT_MAHONIAN_CAP,
        }
    }
}

impl Limits {
    pub(crate) fn check_enumeration(&self, n: usize) -> Result<()> {
        if n > self.enumeration {
            return Err(Error::LimitExceeded {
                n,
                limit: self.enumeration,
            });
        }
        Ok(())
    }
}
