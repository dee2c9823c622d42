//! Exact half-integer quantum numbers.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::Error;

/// A half-integer quantum number (S, j, m, ℓ) stored as twice its value, so
/// that 1/2, 1, 3/2, … are all exact.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInteger {
    twice: i64,
}

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger { twice: 0 };
    pub const HALF: HalfInteger = HalfInteger { twice: 1 };
    pub const ONE: HalfInteger = HalfInteger { twice: 2 };

    pub fn from_twice(twice: i64) -> Self {
        HalfInteger { twice }
    }

    pub fn from_int(n: i64) -> Self {
        HalfInteger { twice: 2 * n }
    }

    /// Parses "1/2", "3/2", "0.5", "1.5", "2" and friends.
    pub fn parse(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let n: i64 = num
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad half-integer `{s}`")))?;
            let d: i64 = den
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad half-integer `{s}`")))?;
            if d != 2 {
                return Err(Error::Parse(format!(
                    "bad half-integer `{s}`: denominator must be 2"
                )));
            }
            return Ok(HalfInteger { twice: n });
        }
        if let Ok(n) = s.parse::<i64>() {
            return Ok(HalfInteger { twice: 2 * n });
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad half-integer `{s}`")))?;
        let twice = (2.0 * v).round();
        if !(2.0 * v - twice).abs().le(&1e-9) {
            return Err(Error::Parse(format!(
                "`{s}` is not a half-integer (twice the value must be an integer)"
            )));
        }
        Ok(HalfInteger {
            twice: twice as i64,
        })
    }

    pub fn twice(self) -> i64 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// Same parity means `self - other` is an integer, i.e. both can label
    /// states of the same spin ladder.
    pub fn same_parity(self, other: HalfInteger) -> bool {
        (self.twice - other.twice) % 2 == 0
    }

    pub fn abs(self) -> HalfInteger {
        HalfInteger {
            twice: self.twice.abs(),
        }
    }

    /// j(j+1), exact in f64 for any realistic quantum number.
    pub fn casimir(self) -> f64 {
        let t = self.twice as f64;
        t * (t + 2.0) / 4.0
    }

    /// Multiplicity 2j+1 of the ladder with this magnitude.
    pub fn multiplicity(self) -> i64 {
        self.twice + 1
    }

    /// Checked spin magnitude: requires 2S ≥ 1.
    pub fn as_spin_magnitude(self) -> Result<Self, Error> {
        if self.twice < 1 {
            return Err(Error::InvalidParameter {
                name: "S",
                reason: format!("2S must be a positive integer, got 2S = {}", self.twice),
            });
        }
        Ok(self)
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl fmt::Debug for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(HalfInteger::parse("1/2").unwrap().twice(), 1);
        assert_eq!(HalfInteger::parse("0.5").unwrap().twice(), 1);
        assert_eq!(HalfInteger::parse("2").unwrap().twice(), 4);
        assert_eq!(HalfInteger::parse("1.5").unwrap().twice(), 3);
        assert!(HalfInteger::parse("0.4").is_err());
        assert!(HalfInteger::parse("x").is_err());
    }

    #[test]
    fn casimir_values() {
        assert_eq!(HalfInteger::HALF.casimir(), 0.75);
        assert_eq!(HalfInteger::ONE.casimir(), 2.0);
        assert_eq!(HalfInteger::from_twice(3).casimir(), 3.75);
    }

    #[test]
    fn display() {
        assert_eq!(HalfInteger::from_twice(3).to_string(), "3/2");
        assert_eq!(HalfInteger::from_int(2).to_string(), "2");
    }

    #[test]
    fn spin_magnitude_guard() {
        assert!(HalfInteger::ZERO.as_spin_magnitude().is_err());
        assert!(HalfInteger::HALF.as_spin_magnitude().is_ok());
    }
}
