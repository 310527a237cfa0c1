use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational scalar used for every measure.
pub type Rational = Ratio<i64>;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Renders a rational as `p/q`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or an integer `p`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::input(format!("malformed rational `{s}` (expected p/q)"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// `#num / #den` with the 1-on-empty-denominator convention.
pub fn ratio_or_one(num: usize, den: usize) -> Rational {
    if den == 0 {
        one()
    } else {
        Rational::new(num as i64, den as i64)
    }
}

/// The grid `{k/m : 0 ≤ k ≤ m}`.
pub fn grid(m: i64) -> Vec<Rational> {
    (0..=m).map(|k| Rational::new(k, m)).collect()
}

/// Serde adaptor storing a [`Rational`] as a `"p/q"` string.
pub mod as_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// An exact rational constrained to `[0, 1]`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitRational(Rational);

impl UnitRational {
    pub fn new(r: Rational) -> Result<UnitRational> {
        if r < zero() || r > one() {
            return Err(Error::input(format!("{} lies outside [0,1]", format_rational(&r))));
        }
        Ok(UnitRational(r))
    }

    pub fn of(n: i64, d: i64) -> UnitRational {
        UnitRational::new(Rational::new(n, d)).expect("literal in [0,1]")
    }

    pub fn zero() -> UnitRational {
        UnitRational(zero())
    }

    pub fn one() -> UnitRational {
        UnitRational(one())
    }

    pub fn get(self) -> Rational {
        self.0
    }
}

impl fmt::Debug for UnitRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl fmt::Display for UnitRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl FromStr for UnitRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<UnitRational> {
        UnitRational::new(parse_rational(s)?)
    }
}

impl Serialize for UnitRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for UnitRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<UnitRational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_rational("2/6").unwrap(), rat(1, 3));
        assert_eq!(parse_rational("1").unwrap(), one());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&one()), "1/1");
    }

    #[test]
    fn unit_bounds_enforced() {
        assert!(UnitRational::new(rat(3, 2)).is_err());
        assert!(UnitRational::new(rat(-1, 2)).is_err());
        assert_eq!("1/2".parse::<UnitRational>().unwrap().get(), rat(1, 2));
    }
}
