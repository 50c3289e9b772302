//! Exact rational thresholds.
//!
//! Support and confidence thresholds are compared by cross-multiplication so
//! that `0.2 * 9` and `2/4 >= 0.5` are decided without floating point.

use core::cmp::Ordering;
use core::fmt;

use crate::{Error, Result};

/// A non-negative rational `num / den` kept in lowest terms.
#[derive(Debug, Clone, Copy)]
pub struct Fraction {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Fraction {
    /// Zero.
    pub const ZERO: Fraction = Fraction { num: 0, den: 1 };
    /// One.
    pub const ONE: Fraction = Fraction { num: 1, den: 1 };

    /// Builds `num / den`; `None` when `den == 0`.
    pub fn new(num: u64, den: u64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let g = gcd(num, den).max(1);
        Some(Fraction {
            num: num / g,
            den: den / g,
        })
    }

    /// Parses a plain decimal such as `0.2`, `.05` or `1`.
    pub fn parse_decimal(s: &str) -> Result<Self> {
        let s = s.trim();
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(Error::InvalidFraction);
        }
        if !int_part
            .bytes()
            .chain(frac_part.bytes())
            .all(|b| b.is_ascii_digit())
            || frac_part.len() > 18
        {
            return Err(Error::InvalidFraction);
        }
        let den = 10u64.pow(frac_part.len() as u32);
        let int_val: u64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| Error::InvalidFraction)?
        };
        let frac_val: u64 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().map_err(|_| Error::InvalidFraction)?
        };
        let num = int_val
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac_val))
            .ok_or(Error::InvalidFraction)?;
        Fraction::new(num, den).ok_or(Error::InvalidFraction)
    }

    /// Numerator in lowest terms.
    pub fn numer(&self) -> u64 {
        self.num
    }

    /// Denominator in lowest terms.
    pub fn denom(&self) -> u64 {
        self.den
    }

    /// Lossy conversion for display and plotting.
    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Renders with exactly `places` decimals, rounding half up.
    pub fn display_fixed(&self, places: u32) -> FixedDisplay {
        FixedDisplay {
            value: *self,
            places,
        }
    }
}

impl PartialEq for Fraction {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Fraction {}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Fixed-point rendering of a [`Fraction`].
#[derive(Debug, Clone, Copy)]
pub struct FixedDisplay {
    value: Fraction,
    places: u32,
}

impl fmt::Display for FixedDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scale = 10u128.pow(self.places);
        let num = self.value.num as u128;
        let den = self.value.den as u128;
        let scaled = (num * scale * 2 + den) / (den * 2);
        let int = scaled / scale;
        if self.places == 0 {
            return write!(f, "{int}");
        }
        let frac = scaled % scale;
        write!(f, "{int}.{frac:0width$}", width = self.places as usize)
    }
}

/// Minimum support count for a fraction of `n` transactions:
/// `max(1, ceil(fraction * n))`.
pub fn min_count(fraction: Fraction, n: usize) -> Result<u32> {
    if fraction.num == 0 || fraction > Fraction::ONE {
        return Err(Error::SupportFractionOutOfRange);
    }
    let prod = fraction.num as u128 * n as u128;
    let den = fraction.den as u128;
    let ceil = prod.div_ceil(den);
    Ok(ceil.clamp(1, u32::MAX as u128) as u32)
}

/// Which support threshold the user supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportThreshold {
    /// Fraction of transactions, in `(0, 1]`.
    Fraction(Fraction),
    /// Absolute transaction count, at least 1.
    Count(u32),
}

/// Support and confidence thresholds for a mining run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Thresholds {
    support: SupportThreshold,
    min_confidence: Fraction,
}

impl Thresholds {
    /// Validates both thresholds.
    pub fn new(support: SupportThreshold, min_confidence: Fraction) -> Result<Self> {
        match support {
            SupportThreshold::Fraction(f) if f.num == 0 || f > Fraction::ONE => {
                return Err(Error::SupportFractionOutOfRange)
            }
            SupportThreshold::Count(0) => return Err(Error::ZeroSupportCount),
            _ => {}
        }
        if min_confidence > Fraction::ONE {
            return Err(Error::ConfidenceOutOfRange);
        }
        Ok(Thresholds {
            support,
            min_confidence,
        })
    }

    /// The support threshold as given.
    pub fn support(&self) -> SupportThreshold {
        self.support
    }

    /// The confidence threshold.
    pub fn min_confidence(&self) -> Fraction {
        self.min_confidence
    }

    /// Support count for a dataset of `n` transactions.
    pub fn min_support_count(&self, n: usize) -> u32 {
        match self.support {
            SupportThreshold::Count(c) => c,
            // validated in `new`
            SupportThreshold::Fraction(f) => min_count(f, n).unwrap_or(1),
        }
    }
}
