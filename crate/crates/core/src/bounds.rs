//! Memory bounds for additive sliding-window counting and summing.
//!
//! Everything except the final `log2` is evaluated in exact rationals.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::numeric::{check_epsilon, Rational};

fn as_f64(q: Rational) -> f64 {
    q.to_f64().expect("finite rational")
}

fn floor_u64(q: Rational) -> u64 {
    q.floor().to_integer() as u64
}

/// `floor(W / floor(2Wε + 1))`: the number of independent all-ones/all-zeros
/// blocks an additive counter must tell apart. Holds for every `ε`.
pub fn block_language_bound(window: u64, epsilon: Rational) -> u64 {
    let block = floor_u64(epsilon * 2 * window as i128 + 1);
    window / block.max(1)
}

/// Lower bound in bits for `W·ε`-additive counting:
/// `max(floor(1/(2ε + 1/W)), floor(log2 W))`. Requires `ε <= 1/4`.
pub fn count_lower_bound(window: u64, epsilon: Rational) -> Result<u64> {
    if window < 2 {
        return Err(Error::InvalidWindow(window));
    }
    check_epsilon(epsilon, Rational::new(1, 4))
        .map_err(|_| Error::Precondition("counting lower bound needs 0 < epsilon <= 1/4"))?;
    let blocks = floor_u64((epsilon * 2 + Rational::new(1, window as i128)).recip());
    let log_w = 63 - window.leading_zeros() as u64;
    Ok(blocks.max(log_w))
}

/// Lower bound in bits for `R·W·ε`-additive summing.
///
/// For `ε <= 1/(2W)` this is `W · log2 floor(1/(4Wε) + 1)`; above that the
/// counting bound applies with ones replaced by `R` (with `ε` capped at 1/4).
pub fn sum_lower_bound(window: u64, _range: u64, epsilon: Rational) -> Result<f64> {
    if window < 2 {
        return Err(Error::InvalidWindow(window));
    }
    if epsilon <= Rational::from_integer(0) {
        return Err(Error::InvalidEpsilon(epsilon.to_string()));
    }
    let w = window as i128;
    if epsilon <= Rational::new(1, 2 * w) {
        let letters = floor_u64((epsilon * 4 * w).recip() + 1);
        Ok(window as f64 * (letters as f64).log2())
    } else {
        let capped = epsilon.min(Rational::new(1, 4));
        Ok(count_lower_bound(window, capped)? as f64)
    }
}

/// `1/(2ε) + 2·log2 W + 6`, the explicit bit count of the counting sketch.
pub fn count_upper_theory(window: u64, epsilon: Rational) -> f64 {
    as_f64((epsilon * 2).recip()) + 2.0 * (window as f64).log2() + 6.0
}

/// `1/(2ε) + 2·log2 W`, the leading term shared by the counting sketch and the
/// block summing sketch (whose state does not grow with `R`).
pub fn additive_state_bits(window: u64, epsilon: Rational) -> f64 {
    as_f64((epsilon * 2).recip()) + 2.0 * (window as f64).log2()
}

/// `W · log2(1/(2Wε) + 1)`, the size of the per-element summing layout.
/// Requires `ε <= 1/(2W)`.
pub fn succinct_bound(window: u64, epsilon: Rational) -> Result<f64> {
    let w = window as i128;
    if window == 0 || epsilon <= Rational::from_integer(0) {
        return Err(Error::Precondition(
            "succinct bound needs W >= 1 and epsilon > 0",
        ));
    }
    if epsilon > Rational::new(1, 2 * w) {
        return Err(Error::Precondition(
            "succinct bound only applies for epsilon <= 1/(2W)",
        ));
    }
    let inner = (epsilon * 2 * w).recip() + 1;
    Ok(window as f64 * as_f64(inner).log2())
}

/// Actual sketch state next to the theoretical upper and lower bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryReport {
    pub actual_state_bits: u64,
    /// Bits the exact common denominator adds on top of `actual_state_bits`.
    pub denominator_overhead_bits: u64,
    pub theoretical_upper_bits: f64,
    pub lower_bound_bits: f64,
    /// `actual_state_bits / lower_bound_bits`; `None` when the bound is 0.
    pub ratio: Option<f64>,
}

impl MemoryReport {
    pub fn new(actual: u64, overhead: u64, upper: f64, lower: f64) -> Self {
        Self {
            actual_state_bits: actual,
            denominator_overhead_bits: overhead,
            theoretical_upper_bits: upper,
            lower_bound_bits: lower,
            ratio: (lower > 0.0).then(|| actual as f64 / lower),
        }
    }
}
