//! Scaled-integer fixed point shared by the summing sketches.
//!
//! Remainders are stored as integers over a common denominator
//! `D = k · 2^rho`, where `rho` is the number of fractional bits used to
//! round each scaled input and `k` is the number of blocks. With that
//! denominator both a rounded input `n / 2^rho` and a block size `W / k`
//! are integers, so every state transition is exact.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational used for estimates, errors and parameters.
pub type Rational = Ratio<i128>;

/// Largest denominator we accept; keeps every query numerator well inside `i128`.
const MAX_DENOMINATOR: u64 = 1 << 52;

/// Common denominator `k · 2^rho`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scale {
    rho: u32,
    blocks: u64,
    denominator: u64,
}

impl Scale {
    pub fn new(rho: u32, blocks: u64) -> Result<Self> {
        if blocks == 0 {
            return Err(Error::Precondition("scale needs at least one block"));
        }
        let denominator = 1u64
            .checked_shl(rho)
            .filter(|_| rho < 63)
            .and_then(|p| p.checked_mul(blocks))
            .filter(|&d| d <= MAX_DENOMINATOR)
            .ok_or(Error::Overflow)?;
        Ok(Self {
            rho,
            blocks,
            denominator,
        })
    }

    /// Number of fractional bits.
    pub fn rho(&self) -> u32 {
        self.rho
    }

    pub fn blocks(&self) -> u64 {
        self.blocks
    }

    /// `k · 2^rho`.
    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    /// `2^rho`.
    pub fn unit(&self) -> u64 {
        1 << self.rho
    }
}

/// A non-negative value `raw / D` in window-fraction units.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScaledValue(u64);

impl ScaledValue {
    pub const ZERO: ScaledValue = ScaledValue(0);

    pub fn from_raw(raw: u64) -> Self {
        Self(raw)
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn to_rational(self, scale: Scale) -> Rational {
        Rational::new(self.0 as i128, scale.denominator() as i128)
    }
}

/// Rounds `x / r` to the nearest multiple of `2^-rho`, ties upward.
///
/// Returns the numerator over `2^rho`.
pub fn round_frac(x: u64, r: u64, rho: u32) -> Result<u64> {
    if r == 0 {
        return Err(Error::InvalidRange(r));
    }
    if x > r {
        return Err(Error::OutOfRange { value: x, max: r });
    }
    if rho >= 64 {
        return Err(Error::Overflow);
    }
    // floor((x·2^rho + r/2) / r) == floor((2·x·2^rho + r) / 2r)
    let num = ((x as u128) << (rho + 1)) + r as u128;
    Ok((num / (2 * r as u128)) as u64)
}

/// Lifts a numerator over `2^rho` into the common denominator of `scale`.
pub fn to_scaled(n: u64, scale: Scale) -> Result<ScaledValue> {
    n.checked_mul(scale.blocks())
        .map(ScaledValue)
        .ok_or(Error::Overflow)
}

/// Bits needed to store a field that takes `values` distinct values.
pub fn width_for(values: u64) -> u32 {
    if values <= 1 {
        0
    } else {
        64 - (values - 1).leading_zeros()
    }
}

/// Smallest integer `r` with `2^r >= q`, for `q > 0`.
pub fn ceil_log2(q: Rational) -> i32 {
    assert!(q.is_positive(), "ceil_log2 of a non-positive value");
    let (a, b) = (*q.numer() as u128, *q.denom() as u128);
    if a <= b {
        // largest t >= 0 with a·2^t <= b, then r = -t
        let mut t = 0;
        while (a << (t + 1)) <= b {
            t += 1;
        }
        -t
    } else {
        let mut r = 0;
        while (b << r) < a {
            r += 1;
        }
        r
    }
}

/// Ceiling of a non-negative rational.
pub fn ceil_rational(q: Rational) -> i128 {
    q.ceil().to_integer()
}

/// `ceil(log2 n)` for an integer `n >= 1`.
pub fn ceil_log2_int(n: u64) -> u32 {
    width_for(n)
}

/// Smallest divisor of `n` that is at least `min`, if one exists (`min <= n`).
pub fn smallest_divisor_at_least(n: u64, min: u64) -> Option<u64> {
    if n == 0 || min > n {
        return None;
    }
    let min = min.max(1);
    let mut best = n;
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let pair = n / d;
            if d >= min && d < best {
                best = d;
            }
            if pair >= min && pair < best {
                best = pair;
            }
        }
        d += 1;
    }
    Some(best)
}

/// Checks `0 < eps <= max`.
pub fn check_epsilon(eps: Rational, max: Rational) -> Result<()> {
    if eps <= Rational::zero() || eps > max {
        return Err(Error::InvalidEpsilon(format!("{eps} not in (0, {max}]")));
    }
    Ok(())
}

/// Parses `p/q`, an integer, or a base-10 decimal into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::InvalidEpsilon(text.to_string());
    if let Some((p, q)) = text.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| bad())?;
        let q: i128 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (int_part, frac_part) = text.split_once('.').unwrap_or((text, ""));
    let digits_ok = |s: &str| s.bytes().all(|c| c.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty())
        || !digits_ok(int_part)
        || !digits_ok(frac_part)
    {
        return Err(bad());
    }
    if frac_part.len() > 30 {
        return Err(bad());
    }
    let scale = 10i128.pow(frac_part.len() as u32);
    let int: i128 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().map_err(|_| bad())?
    };
    let frac: i128 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().map_err(|_| bad())?
    };
    let numer = int
        .checked_mul(scale)
        .and_then(|v| v.checked_add(frac))
        .ok_or_else(bad)?;
    Ok(Rational::new(numer, scale))
}

/// Renders a rational as a decimal with `digits` significant digits.
pub fn format_decimal(q: Rational, digits: usize) -> String {
    if q.is_integer() {
        return q.to_integer().to_string();
    }
    let value = *q.numer() as f64 / *q.denom() as f64;
    let magnitude = if value == 0.0 {
        0
    } else {
        value.abs().log10().floor() as i32
    };
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    format!("{value:.decimals$}")
}

/// `gcd(a, b)` on `u64`.
pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}
