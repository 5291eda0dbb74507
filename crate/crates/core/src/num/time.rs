//! Exact positive rational time.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

/// A positive rational number `num / den` kept in lowest terms.
///
/// All grid arithmetic goes through this type; floating-point time only
/// appears when a value is fed to `powf`/`exp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Time {
    num: u64,
    den: u64,
}

impl Time {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidTime { num, den });
        }
        let g = num.gcd(&den);
        Ok(Time { num: num / g, den: den / g })
    }

    /// Integer time `k`.
    pub fn int(k: u64) -> Result<Self> {
        Time::new(k, 1)
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `k * self`.
    pub fn scale(self, k: u64) -> Result<Self> {
        let g = k.gcd(&self.den);
        let num = (k / g)
            .checked_mul(self.num)
            .ok_or(Error::InvalidTime { num: k, den: self.den })?;
        Time::new(num, self.den / g)
    }

    /// `self - other`, or `None` when the difference is not positive.
    pub fn checked_sub(self, other: Time) -> Option<Time> {
        let l = self.den.lcm(&other.den);
        let a = self.num * (l / self.den);
        let b = other.num * (l / other.den);
        if a > b {
            Time::new(a - b, l).ok()
        } else {
            None
        }
    }

    /// Grid index of this time on the lattice `step * Z`, if it lies on it.
    pub fn index_on(self, step: Time) -> Option<u64> {
        // self / step = (num * step.den) / (den * step.num)
        let n = self.num as u128 * step.den as u128;
        let d = self.den as u128 * step.num as u128;
        if n.is_multiple_of(d) {
            u64::try_from(n / d).ok()
        } else {
            None
        }
    }
}

impl Add for Time {
    type Output = Time;

    fn add(self, rhs: Time) -> Time {
        let l = self.den.lcm(&rhs.den);
        let num = self.num * (l / self.den) + rhs.num * (l / rhs.den);
        Time::new(num, l).expect("sum of positive times is positive")
    }
}

impl PartialOrd for Time {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Time {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Deserialize)]
struct RawTime {
    num: u64,
    den: u64,
}

impl<'de> Deserialize<'de> for Time {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawTime::deserialize(d)?;
        Time::new(raw.num, raw.den).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lowest_terms() {
        let t = Time::new(6, 4).unwrap();
        assert_eq!((t.num(), t.den()), (3, 2));
        assert!(Time::new(0, 3).is_err());
        assert!(Time::new(3, 0).is_err());
    }

    #[test]
    fn addition_and_difference() {
        let a = Time::new(1, 6).unwrap();
        let b = Time::new(1, 3).unwrap();
        assert_eq!(a + b, Time::new(1, 2).unwrap());
        assert_eq!(b.checked_sub(a), Some(a));
        assert_eq!(a.checked_sub(b), None);
        assert_eq!(a.checked_sub(a), None);
    }

    #[test]
    fn grid_index() {
        let step = Time::new(1, 6).unwrap();
        assert_eq!(Time::new(1, 2).unwrap().index_on(step), Some(3));
        assert_eq!(Time::new(1, 4).unwrap().index_on(step), None);
        let coarse = Time::new(2, 1).unwrap();
        assert_eq!(Time::int(6).unwrap().index_on(coarse), Some(3));
    }

    #[test]
    fn json_shape() {
        let t = Time::new(2, 6).unwrap();
        assert_eq!(serde_json::to_string(&t).unwrap(), r#"{"num":1,"den":3}"#);
        let back: Time = serde_json::from_str(r#"{"num":4,"den":8}"#).unwrap();
        assert_eq!(back, Time::new(1, 2).unwrap());
        assert!(serde_json::from_str::<Time>(r#"{"num":0,"den":8}"#).is_err());
    }

    proptest! {
        #[test]
        fn addition_is_exact_and_associative(
            a in (1u64..500, 1u64..500),
            b in (1u64..500, 1u64..500),
            c in (1u64..500, 1u64..500),
        ) {
            let (a, b, c) = (
                Time::new(a.0, a.1).unwrap(),
                Time::new(b.0, b.1).unwrap(),
                Time::new(c.0, c.1).unwrap(),
            );
            prop_assert_eq!((a + b) + c, a + (b + c));
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!((a + b).checked_sub(b), Some(a));
        }
    }
}
