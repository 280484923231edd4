use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Fraction of the dataset to remove, an exact rational in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PruningFraction(Ratio<u64>);

impl PruningFraction {
    pub const ZERO: PruningFraction = PruningFraction(Ratio::new_raw(0, 1));

    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidConfig(
                "pruning fraction has zero denominator".into(),
            ));
        }
        let r = Ratio::new(numer, denom);
        if r >= Ratio::from_integer(1) {
            return Err(Error::InvalidConfig(format!(
                "pruning fraction must be in [0, 1), got {numer}/{denom}"
            )));
        }
        Ok(PruningFraction(r))
    }

    /// Interprets `value` by its shortest decimal representation, so `0.7`
    /// is exactly `7/10`.
    pub fn from_f64(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidConfig(format!("pruning fraction {value}")));
        }
        format!("{value}").parse()
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    pub fn is_zero(&self) -> bool {
        self.numer() == 0
    }

    /// `1 - p` as `(numer, denom)`.
    pub fn retain_ratio(&self) -> (u64, u64) {
        (self.denom() - self.numer(), self.denom())
    }

    /// `1 - p` as a pruning fraction of its own; `None` when `p` is zero
    /// (the complement would be one, which is not a valid fraction).
    pub fn complement(&self) -> Option<PruningFraction> {
        let (n, d) = self.retain_ratio();
        PruningFraction::new(n, d).ok()
    }

    /// Number of examples kept out of `total`: `(1 - p) * total` rounded half
    /// up, and never less than one for a non-empty dataset.
    pub fn retain_size(&self, total: usize) -> usize {
        if total == 0 {
            return 0;
        }
        let (n, d) = self.retain_ratio();
        let scaled = n as u128 * total as u128;
        let rounded = (2 * scaled + d as u128) / (2 * d as u128);
        (rounded as usize).max(1)
    }

    /// `floor((1 - p) * size)`.
    pub fn retain_floor(&self, size: usize) -> usize {
        let (n, d) = self.retain_ratio();
        (n as u128 * size as u128 / d as u128) as usize
    }
}

impl FromStr for PruningFraction {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad =
            || Error::InvalidConfig(format!("pruning fraction `{text}` is not a decimal or n/d"));
        let text = text.trim();
        if let Some((n, d)) = text.split_once('/') {
            return PruningFraction::new(
                n.trim().parse().map_err(|_| bad())?,
                d.trim().parse().map_err(|_| bad())?,
            );
        }
        let (int_part, frac_part) = text.split_once('.').unwrap_or((text, ""));
        if frac_part.len() > 18
            || (int_part.is_empty() && frac_part.is_empty())
            || !int_part
                .chars()
                .chain(frac_part.chars())
                .all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let denom = 10u64.pow(frac_part.len() as u32);
        let int: u64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        let frac: u64 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().map_err(|_| bad())?
        };
        let numer = int
            .checked_mul(denom)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        PruningFraction::new(numer, denom)
    }
}

impl fmt::Display for PruningFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl Serialize for PruningFraction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.to_f64())
    }
}

impl<'de> Deserialize<'de> for PruningFraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        PruningFraction::from_f64(f64::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
