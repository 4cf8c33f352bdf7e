//! Lebesgue / summation exponents with an exact rational form where one is known.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::error::Error;

pub type Rational = Ratio<i64>;

/// An exponent in `[1, ∞]` (or any real for smoothness parameters).
///
/// Exponents parsed from `"a/b"` or integers keep their rational value so that they
/// re-serialise identically and exponent identities can be checked exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Rational(Rational),
    Real(f64),
    Infinity,
}

impl Exponent {
    pub fn rational(numer: i64, denom: i64) -> Self {
        Exponent::Rational(Ratio::new(numer, denom))
    }

    pub fn int(v: i64) -> Self {
        Exponent::Rational(Ratio::from_integer(v))
    }

    pub fn value(&self) -> f64 {
        match *self {
            Exponent::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
            Exponent::Real(v) => v,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match *self {
            Exponent::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// `1/s`, which is `0` for `s = ∞`.
    pub fn reciprocal(&self) -> f64 {
        match self {
            Exponent::Infinity => 0.0,
            e => 1.0 / e.value(),
        }
    }

    /// Reject exponents below 1 (Lebesgue norms).
    pub fn check_lebesgue(&self) -> Result<(), Error> {
        let v = self.value();
        if v.is_nan() || v < 1.0 {
            return Err(Error::InvalidExponent(v));
        }
        Ok(())
    }
}

impl From<f64> for Exponent {
    fn from(v: f64) -> Self {
        if v.is_infinite() && v > 0.0 {
            Exponent::Infinity
        } else if v.fract() == 0.0 && v.abs() < 1e15 {
            Exponent::int(v as i64)
        } else {
            Exponent::Real(v)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Rational(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Exponent::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Exponent::Real(v) => write!(f, "{v:?}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || Error::InvalidArgument(format!("cannot parse exponent {s:?}"));
        match t {
            "inf" | "Inf" | "infinity" | "∞" => return Ok(Exponent::Infinity),
            _ => {}
        }
        if let Some((a, b)) = t.split_once('/') {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            return Ok(Exponent::Rational(Ratio::new(a, b)));
        }
        if let Ok(i) = t.parse::<i64>() {
            return Ok(Exponent::int(i));
        }
        let v: f64 = t.parse().map_err(|_| bad())?;
        if v.is_nan() {
            return Err(bad());
        }
        Ok(Exponent::from(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_thirds_round_trip() {
        let e: Exponent = "10/3".parse().unwrap();
        assert_eq!(e.value(), 10.0 / 3.0);
        assert_eq!(e.to_string(), "10/3");
        assert_eq!(e.as_rational(), Some(Ratio::new(10, 3)));
    }

    #[test]
    fn integers_and_infinity() {
        assert_eq!("2".parse::<Exponent>().unwrap().to_string(), "2");
        assert_eq!("4/2".parse::<Exponent>().unwrap().to_string(), "2");
        assert!("inf".parse::<Exponent>().unwrap().is_infinite());
        assert_eq!(Exponent::Infinity.reciprocal(), 0.0);
        let e: Exponent = "2.5".parse().unwrap();
        assert_eq!(e.to_string().parse::<Exponent>().unwrap(), e);
    }

    #[test]
    fn rejects_garbage() {
        assert!("x".parse::<Exponent>().is_err());
        assert!("1/0".parse::<Exponent>().is_err());
        assert!(Exponent::Real(0.5).check_lebesgue().is_err());
    }
}
