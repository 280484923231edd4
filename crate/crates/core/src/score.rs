//! Exact rational scores.
//!
//! Word error rates are ratios of small integers, and averages of those stay
//! rational. Keeping them exact means ties rank the same way on every
//! platform, which the pruning strategies depend on.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A non-negative exact rational score (training WER, character length, ...).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Score(BigRational);

impl Score {
    pub fn zero() -> Self {
        Score(BigRational::zero())
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Score(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_integer(value: u64) -> Self {
        Score(BigRational::from_integer(BigInt::from(value)))
    }

    /// The decimal a human would read for `value` (its shortest round-trip
    /// representation), as an exact rational. `0.1` becomes exactly `1/10`.
    pub fn from_f64_decimal(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidConfig(format!("non-finite score {value}")));
        }
        format!("{value}").parse()
    }

    /// Exact binary value of `value`. Used where scores come from simulation
    /// rather than from text.
    pub fn from_f64_exact(value: f64) -> Option<Self> {
        BigRational::from_float(value).map(Score)
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }

    pub fn from_big(ratio: BigRational) -> Self {
        Score(ratio)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_negative(&self) -> bool {
        self.0 < BigRational::zero()
    }

    /// `numer/denom` in lowest terms, e.g. `3/7`.
    pub fn exact_string(&self) -> String {
        format!("{}/{}", self.0.numer(), self.0.denom())
    }

    pub fn parse_exact(text: &str) -> Result<Self> {
        let (n, d) = text
            .split_once('/')
            .ok_or_else(|| Error::InvalidConfig(format!("expected `n/d`, got `{text}`")))?;
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad numerator in `{text}`")))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad denominator in `{text}`")))?;
        if d.is_zero() {
            return Err(Error::InvalidConfig(format!(
                "zero denominator in `{text}`"
            )));
        }
        Ok(Score(BigRational::new(n, d)))
    }

    /// Arithmetic mean of a non-empty slice.
    pub fn mean<'a>(values: impl IntoIterator<Item = &'a Score>) -> Option<Score> {
        let mut sum = BigRational::zero();
        let mut count: i64 = 0;
        for v in values {
            sum += &v.0;
            count += 1;
        }
        (count > 0).then(|| Score(sum / BigRational::from_integer(BigInt::from(count))))
    }
}

impl FromStr for Score {
    type Err = Error;

    /// Parses a plain decimal (`0.25`, `3`, `1.5e-2`) or an exact `n/d` form.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.contains('/') {
            return Score::parse_exact(text);
        }
        let bad = || Error::InvalidConfig(format!("not a decimal number: `{text}`"));
        let (mantissa, exponent) = match text.find(['e', 'E']) {
            Some(pos) => (
                &text[..pos],
                text[pos + 1..].parse::<i32>().map_err(|_| bad())?,
            ),
            None => (text, 0),
        };
        let (negative, mantissa) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part
            .chars()
            .chain(frac_part.chars())
            .all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let mut numer: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| bad())?
        };
        if negative {
            numer = -numer;
        }
        let scale = exponent - frac_part.len() as i32;
        let ten = BigInt::from(10);
        let ratio = if scale >= 0 {
            BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
        };
        Ok(Score(ratio))
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl Serialize for Score {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.to_f64())
    }
}

impl<'de> Deserialize<'de> for Score {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = f64::deserialize(deserializer)?;
        Score::from_f64_decimal(value).map_err(serde::de::Error::custom)
    }
}
