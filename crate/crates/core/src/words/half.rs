use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A nonnegative or negative half-integer stored as twice its value, so that
/// lengths of `1/2` never round.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub fn from_doubled(d: i64) -> Self {
        HalfInt(d)
    }

    pub fn from_int(n: i64) -> Self {
        HalfInt(2 * n)
    }

    pub fn doubled(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Largest integer not exceeding the value.
    pub fn floor(self) -> i64 {
        self.0.div_euclid(2)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl fmt::Debug for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a half-integer: {0:?}")]
pub struct ParseHalfIntError(String);

/// Accepts `3`, `1.5` and `3/2`.
impl FromStr for HalfInt {
    type Err = ParseHalfIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseHalfIntError(s.to_string());
        let t = s.trim();
        if let Some(num) = t.strip_suffix("/2") {
            return num.trim().parse::<i64>().map(HalfInt).map_err(|_| err());
        }
        if let Ok(n) = t.parse::<i64>() {
            return Ok(HalfInt::from_int(n));
        }
        let v: f64 = t.parse().map_err(|_| err())?;
        let d = v * 2.0;
        if !d.is_finite() || d.fract() != 0.0 {
            return Err(err());
        }
        Ok(HalfInt(d as i64))
    }
}

// JSON carries the plain number; half-integers are exact in binary floating point.
impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_integer() {
            s.serialize_i64(self.0 / 2)
        } else {
            s.serialize_f64(self.to_f64())
        }
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        let doubled = v * 2.0;
        if doubled.fract() != 0.0 {
            return Err(serde::de::Error::custom(format!("{} is not a half-integer", v)));
        }
        Ok(HalfInt(doubled as i64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_exact() {
        let h = HalfInt::HALF + HalfInt::HALF;
        assert_eq!(h, HalfInt::ONE);
        assert_eq!(format!("{}", HalfInt::from_doubled(3)), "3/2");
        assert_eq!(HalfInt::from_doubled(-3).floor(), -2);
        let j = serde_json::to_string(&HalfInt::from_doubled(5)).unwrap();
        assert_eq!(j, "2.5");
        let back: HalfInt = serde_json::from_str(&j).unwrap();
        assert_eq!(back, HalfInt::from_doubled(5));
        assert!(serde_json::from_str::<HalfInt>("0.25").is_err());
        assert_eq!("3/2".parse::<HalfInt>(), Ok(HalfInt::from_doubled(3)));
        assert_eq!("1.5".parse::<HalfInt>(), Ok(HalfInt::from_doubled(3)));
        assert_eq!(" 4 ".parse::<HalfInt>(), Ok(HalfInt::from_int(4)));
        assert!("0.3".parse::<HalfInt>().is_err());
        assert!("x".parse::<HalfInt>().is_err());
    }
}
