use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::PolygonError;
use crate::exactnum::{rat, Rational};

/// The angle `(a/b) * pi` with `gcd(a, b) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AnglePi {
    pub a: u64,
    pub b: u64,
}

impl AnglePi {
    /// Reduces `a/b`; panics on a zero numerator or denominator.
    pub fn new(a: u64, b: u64) -> Self {
        assert!(a > 0 && b > 0, "angle must be positive");
        let g = a.gcd(&b);
        AnglePi { a: a / g, b: b / g }
    }

    pub fn value(&self) -> Rational {
        rat(self.a as i64, self.b as i64)
    }

    /// Numerator over the common denominator `d` (which `b` must divide).
    pub fn numer_over(&self, d: u64) -> u64 {
        self.a * (d / self.b)
    }
}

impl Ord for AnglePi {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.a as u128 * o.b as u128).cmp(&(o.a as u128 * self.b as u128))
    }
}

impl PartialOrd for AnglePi {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for AnglePi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b == 1 {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}/{}", self.a, self.b)
        }
    }
}

impl FromStr for AnglePi {
    type Err = PolygonError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PolygonError::InvalidAngle(s.to_string());
        let t = s.trim();
        let (a, b) = match t.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (t, "1"),
        };
        let a: u64 = a.parse().map_err(|_| bad())?;
        let b: u64 = b.parse().map_err(|_| bad())?;
        if a == 0 || b == 0 {
            return Err(bad());
        }
        Ok(AnglePi::new(a, b))
    }
}

/// Parses a comma-separated list such as `1/8,3/8,1/2`.
pub fn parse_angles(s: &str) -> Result<Vec<AnglePi>, PolygonError> {
    s.split(',').map(str::parse).collect()
}

impl Serialize for AnglePi {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AnglePi {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_orders() {
        assert_eq!(AnglePi::new(4, 10), AnglePi::new(2, 5));
        assert!(AnglePi::new(1, 3) < AnglePi::new(1, 2));
        assert_eq!("2/6".parse::<AnglePi>().unwrap().to_string(), "1/3");
        assert!("0/3".parse::<AnglePi>().is_err());
        assert!("x".parse::<AnglePi>().is_err());
    }
}
