use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// A Lebesgue exponent in `[1, ∞]`, kept exact where possible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Rational),
    Infinity,
}

impl Exponent {
    pub fn new(r: Rational) -> Result<Self> {
        if r < Rational::one() {
            return Err(Error::InvalidExponent(format!("{r} < 1")));
        }
        Ok(Exponent::Finite(r))
    }

    pub fn integer(n: i64) -> Result<Self> {
        Self::new(Rational::from_integer(n))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Exponent::Finite(r) => r.to_f64().unwrap_or(f64::NAN),
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Exponent::Finite(_))
    }

    /// Hölder conjugate `p' = p/(p-1)`.
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(Rational::one()),
            Exponent::Finite(r) if r == Rational::one() => Exponent::Infinity,
            Exponent::Finite(r) => Exponent::Finite(r / (r - Rational::one())),
        }
    }
}

impl From<Rational> for Exponent {
    fn from(r: Rational) -> Self {
        Exponent::Finite(r)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Infinity => f.write_str("inf"),
            Exponent::Finite(r) => write!(f, "{r}"),
        }
    }
}

/// Accepts `inf`, integers, fractions (`4/3`) and terminating decimals
/// (`1.6` is read as exactly `8/5`).
impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
            return Ok(Exponent::Infinity);
        }
        Exponent::new(parse_rational(s)?)
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10i64.pow(frac.len() as u32);
        let num: i64 = frac.parse().map_err(|_| bad())?;
        let mag = Rational::new(int.abs() * den + num, den);
        return Ok(if neg { -mag } else { mag });
    }
    s.parse::<i64>().map(Rational::from_integer).map_err(|_| bad())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses() {
        assert_eq!("4/3".parse::<Exponent>().unwrap(), Exponent::Finite(Rational::new(4, 3)));
        assert_eq!("1.6".parse::<Exponent>().unwrap(), Exponent::Finite(Rational::new(8, 5)));
        assert_eq!("2".parse::<Exponent>().unwrap(), Exponent::Finite(Rational::from_integer(2)));
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert!("0.5".parse::<Exponent>().is_err());
        assert!("x".parse::<Exponent>().is_err());
        assert!("1/0".parse::<Exponent>().is_err());
    }

    #[test]
    fn conjugates() {
        let p = Exponent::Finite(Rational::new(3, 2));
        assert_eq!(p.conjugate(), Exponent::Finite(Rational::from_integer(3)));
        assert_eq!(p.conjugate().conjugate(), p);
        assert_eq!(Exponent::integer(1).unwrap().conjugate(), Exponent::Infinity);
    }
}
