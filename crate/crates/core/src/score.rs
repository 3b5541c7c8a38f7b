use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Exact similarity value in `[0, 1]`, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Score(Ratio<u64>);

impl Score {
    pub const ZERO: Score = Score(Ratio::new_raw(0, 1));
    pub const ONE: Score = Score(Ratio::new_raw(1, 1));

    /// `None` if `den` is zero or the value exceeds one.
    pub fn new(num: u64, den: u64) -> Option<Score> {
        if den == 0 || num > den {
            return None;
        }
        Some(Score(Ratio::new(num, den)))
    }

    pub fn from_bool(b: bool) -> Score {
        if b {
            Score::ONE
        } else {
            Score::ZERO
        }
    }

    /// `sum / count`, clamped to one. A zero count yields zero.
    pub fn mean_clamped(sum: Ratio<u64>, count: usize) -> Score {
        if count == 0 {
            return Score::ZERO;
        }
        let avg = sum / Ratio::from_integer(count as u64);
        Score(avg.min(Ratio::from_integer(1)))
    }

    pub fn num(self) -> u64 {
        *self.0.numer()
    }

    pub fn den(self) -> u64 {
        *self.0.denom()
    }

    pub fn ratio(self) -> Ratio<u64> {
        self.0
    }

    /// Exact equality with one; the only way a pair is judged synonymous.
    pub fn is_one(self) -> bool {
        self.num() == self.den()
    }

    pub fn is_zero(self) -> bool {
        self.num() == 0
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den() == 1 {
            write!(f, "{}", self.num())
        } else {
            write!(f, "{}/{}", self.num(), self.den())
        }
    }
}

impl FromStr for Score {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::InvalidScore(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?),
            None => (s.trim().parse().map_err(|_| bad())?, 1),
        };
        Score::new(num, den).ok_or_else(bad)
    }
}

impl Serialize for Score {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Score {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
