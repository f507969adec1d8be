//! Closed-form bounds, constants and feasibility predicates, evaluated in
//! natural-log space so that `k!`, `C(r, k)` and `k^L` stay finite at large k.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::{ln_binomial, ln_factorial};

use crate::error::{Error, Result};

/// A non-negative real stored as its natural logarithm; zero is `-inf`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogValue(f64);

impl LogValue {
    pub const ZERO: LogValue = LogValue(f64::NEG_INFINITY);
    pub const ONE: LogValue = LogValue(0.0);

    pub fn from_ln(ln: f64) -> Self {
        LogValue(ln)
    }

    /// `ln(x)` for `x >= 0`.
    pub fn from_value(x: f64) -> Result<Self> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::InvalidArgument(format!("{x} is not a non-negative real")));
        }
        Ok(LogValue(x.ln()))
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// The represented value; overflows to `inf` for large logs.
    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn factorial(n: u64) -> Self {
        LogValue(ln_factorial(n))
    }

    pub fn binomial(n: u64, k: u64) -> Self {
        if k > n {
            LogValue::ZERO
        } else {
            LogValue(ln_binomial(n, k))
        }
    }

    pub fn powi(base: u64, exp: u64) -> Self {
        if base == 0 {
            return if exp == 0 { LogValue::ONE } else { LogValue::ZERO };
        }
        LogValue(exp as f64 * (base as f64).ln())
    }
}

impl std::ops::Mul for LogValue {
    type Output = LogValue;

    fn mul(self, rhs: LogValue) -> LogValue {
        if self.is_zero() || rhs.is_zero() {
            LogValue::ZERO
        } else {
            LogValue(self.0 + rhs.0)
        }
    }
}

impl std::ops::Div for LogValue {
    type Output = LogValue;

    fn div(self, rhs: LogValue) -> LogValue {
        assert!(!rhs.is_zero(), "division by zero in log space");
        if self.is_zero() {
            LogValue::ZERO
        } else {
            LogValue(self.0 - rhs.0)
        }
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({})", self.0)
    }
}

fn check_len(k: u64, len: u64) -> Result<()> {
    if len > k {
        return Err(Error::InvalidArgument(format!("L = {len} exceeds k = {k}")));
    }
    Ok(())
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidArgument(format!("{name} must be positive, got {x}")));
    }
    Ok(())
}

/// `k^L (k-L)! / k!`: the reciprocal of the probability that a uniform word
/// of length `L` over `[k]` is injective.
pub fn birthday_ratio(k: u64, len: u64) -> Result<LogValue> {
    check_len(k, len)?;
    Ok(LogValue::powi(k, len) * LogValue::factorial(k - len) / LogValue::factorial(k))
}

/// `exp((α²/2 + α³/4) k)`, the birthday-problem bound on
/// [`birthday_ratio`] at `L = αk`.
pub fn birthday_bound(k: u64, alpha: f64) -> Result<LogValue> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(LogValue((alpha * alpha / 2.0 + alpha.powi(3) / 4.0) * k as f64))
}

/// `k^L (k-L)!/k! · exp(-ε² L / 4)`, an upper bound on `P(L, ε)` for every
/// k-DFA.
pub fn for_l_bound(k: u64, len: u64, epsilon: f64) -> Result<LogValue> {
    check_positive("epsilon", epsilon)?;
    let ratio = birthday_ratio(k, len)?;
    Ok(ratio * LogValue(-epsilon * epsilon * len as f64 / 4.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremConstants {
    pub epsilon_star: f64,
    /// `2ε*/3`.
    pub epsilon: f64,
    /// `sqrt(ε²/2 + 1) - 1`.
    pub alpha: f64,
    /// `ε² α / 8`.
    pub c0: f64,
}

/// Constants of the exponential bound on cheap walks for a target `ε*`.
pub fn theorem_constants(epsilon_star: f64) -> Result<TheoremConstants> {
    if !(epsilon_star > 0.0 && epsilon_star < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "epsilon* must lie in (0, 1/2), got {epsilon_star}"
        )));
    }
    let epsilon = 2.0 * epsilon_star / 3.0;
    let e2 = epsilon * epsilon;
    // sqrt(1 + x) - 1 written as x / (sqrt(1 + x) + 1) to keep precision as x -> 0
    let alpha = (e2 / 2.0) / ((e2 / 2.0 + 1.0).sqrt() + 1.0);
    Ok(TheoremConstants {
        epsilon_star,
        epsilon,
        alpha,
        c0: e2 * alpha / 8.0,
    })
}

/// `exp(-32 ε² k / 3)`, the stated tail bound for `Σ X_j <= (1/4 - ε) k²`.
pub fn hoeffding_x_bound(k: u64, epsilon: f64) -> Result<LogValue> {
    check_positive("epsilon", epsilon)?;
    Ok(LogValue(-32.0 * epsilon * epsilon * k as f64 / 3.0))
}

/// True when `C(r, k) · F < k!`, which certifies that no word of `[r]^n` is a
/// k-superpattern whenever `F >= F(k, n)`.
pub fn infeasibility(k: u64, r: u64, log_f: LogValue) -> bool {
    (LogValue::binomial(r, k) * log_f).ln() < LogValue::factorial(k).ln()
}

/// `k! <= 2n F`: necessary for a length-`n` word over `[k]` to contain every
/// permutation of `[k]` as a bi-directional circular pattern.
pub fn gupta_check(k: u64, n: u64, log_f: LogValue) -> bool {
    if log_f.is_zero() || n == 0 {
        return false;
    }
    LogValue::factorial(k).ln() <= (LogValue::powi(2 * n, 1) * log_f).ln()
}

/// Base of the logarithm in [`loworder_predicate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
            LogBase::Ten => x.log10(),
        }
    }
}

/// The hypothesis `ε⁴ > (33 + 132 log k) / k` of the lower-order-term bound.
pub fn loworder_predicate(k: u64, epsilon: f64, base: LogBase) -> Result<bool> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::InvalidArgument(format!("epsilon must be non-negative, got {epsilon}")));
    }
    let kf = k as f64;
    Ok(epsilon.powi(4) > (33.0 + 132.0 * base.log(kf)) / kf)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConConstants {
    /// `½ (ε*/M)²`.
    pub c_con1: f64,
    /// Exclusive supremum of admissible constants for the T-shortfall bound;
    /// equal to `c_con1`.
    pub c_con2_sup: f64,
}

pub fn con_constants(epsilon_star: f64, m: usize) -> Result<ConConstants> {
    check_positive("epsilon*", epsilon_star)?;
    if m < 2 {
        return Err(Error::InvalidArgument(format!("M must be at least 2, got {m}")));
    }
    let c = 0.5 * (epsilon_star / m as f64).powi(2);
    Ok(ConConstants {
        c_con1: c,
        c_con2_sup: c,
    })
}
