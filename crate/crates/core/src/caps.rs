//! Resource caps for the exhaustive enumerations.
//!
//! Every factorial or exponential loop in the crate checks its size against
//! a [`Caps`] value before starting. Exceeding a cap is an
//! [`Error::Resource`](crate::Error::Resource), never a silent truncation.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Environment variable overriding [`Caps::max_perm_k`].
pub const ENV_MAX_PERM_K: &str = "SUPERPAT_MAX_PERM_K";
/// Environment variable overriding [`Caps::max_states`].
pub const ENV_MAX_STATES: &str = "SUPERPAT_MAX_STATES";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest k for which S_k is enumerated (k! loops).
    pub max_perm_k: usize,
    /// Largest number of words, injective words or DFA states visited by one
    /// exhaustive enumeration.
    pub max_states: u64,
    /// Largest alphabet for the F(k, n) oracle.
    pub f_oracle_max_k: usize,
    /// Longest word for the F(k, n) oracle.
    pub f_oracle_max_n: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_perm_k: 10,
            max_states: 10_000_000,
            f_oracle_max_k: 4,
            f_oracle_max_n: 12,
        }
    }
}

impl Caps {
    /// Defaults with `SUPERPAT_MAX_PERM_K` / `SUPERPAT_MAX_STATES` applied.
    pub fn from_env() -> Result<Self> {
        let mut caps = Caps::default();
        if let Ok(v) = std::env::var(ENV_MAX_PERM_K) {
            caps.max_perm_k = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{ENV_MAX_PERM_K}={v}")))?;
        }
        if let Ok(v) = std::env::var(ENV_MAX_STATES) {
            caps.max_states = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{ENV_MAX_STATES}={v}")))?;
        }
        Ok(caps)
    }

    pub fn check_perm_k(&self, k: usize) -> Result<()> {
        if k > self.max_perm_k {
            return Err(Error::Resource {
                what: "permutation length k",
                requested: k as u128,
                cap: self.max_perm_k as u128,
            });
        }
        Ok(())
    }

    pub fn check_states(&self, what: &'static str, requested: u128) -> Result<()> {
        if requested > self.max_states as u128 {
            return Err(Error::Resource {
                what,
                requested,
                cap: self.max_states as u128,
            });
        }
        Ok(())
    }
}

/// `base^exp`, saturating at `u128::MAX`.
pub(crate) fn saturating_pow(base: u128, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

/// Number of injective words of length `len` over `[k]`, i.e. k!/(k-len)!.
pub(crate) fn falling_factorial(k: usize, len: usize) -> u128 {
    if len > k {
        return 0;
    }
    (0..len).fold(1u128, |acc, i| acc.saturating_mul((k - i) as u128))
}
