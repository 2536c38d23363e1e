//! Exact rational helpers shared by every module.
//!
//! Rationals travel through files as `"p/q"` strings (or bare integers).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den`; panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_usize(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn parse(s: &str) -> Result<Rational> {
    let t = s.trim();
    let value = match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad rational {s:?}")))?;
            let q: BigInt = q
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad rational {s:?}")))?;
            if q.is_zero() {
                return Err(Error::invalid(format!("zero denominator in {s:?}")));
            }
            Rational::new(p, q)
        }
        None => Rational::from_integer(t.parse().map_err(|_| Error::invalid(format!("bad rational {s:?}")))?),
    };
    Ok(value)
}

/// Canonical text form: `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn pow(base: &Rational, exp: usize) -> Rational {
    let mut out = Rational::one();
    for _ in 0..exp {
        out *= base;
    }
    out
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact integer value, if `r` is integral and fits.
pub fn to_usize(r: &Rational) -> Option<usize> {
    if r.is_integer() && !r.is_negative() {
        r.numer().to_usize()
    } else {
        None
    }
}

pub fn min(a: &Rational, b: &Rational) -> Rational {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max(a: &Rational, b: &Rational) -> Rational {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Whether `a <= sqrt(b)` for `b >= 0`, decided without floating point.
pub fn le_sqrt(a: &Rational, b: &Rational) -> bool {
    if a.is_negative() || a.is_zero() {
        return true;
    }
    a * a <= *b
}

/// Common-denominator integer view of a list of rationals.
///
/// `values[i] == numerators[i] / scale` exactly; fails with
/// [`Error::Overflow`] when a numerator does not fit in `i128`.
#[derive(Debug, Clone)]
pub struct Scaled {
    pub numerators: Vec<i128>,
    pub scale: BigInt,
}

impl Scaled {
    pub fn new<'a>(values: impl IntoIterator<Item = &'a Rational> + Clone) -> Result<Self> {
        let mut scale = BigInt::one();
        for v in values.clone() {
            scale = scale.lcm(v.denom());
        }
        let mut numerators = Vec::new();
        for v in values {
            let n = v.numer() * (&scale / v.denom());
            numerators.push(n.to_i128().ok_or(Error::Overflow)?);
        }
        Ok(Scaled { numerators, scale })
    }

    pub fn unscale(&self, n: i128) -> Rational {
        Rational::new(BigInt::from(n), self.scale.clone())
    }
}

/// Serde adapter storing a [`Rational`] as its canonical string.
pub mod serde_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let raw = RawRational::deserialize(d)?;
        raw.into_rational().map_err(serde::de::Error::custom)
    }

    /// Accepts `"p/q"`, `"p"` or a bare JSON/TOML integer.
    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum RawRational {
        Text(String),
        Int(i64),
    }

    impl RawRational {
        pub(crate) fn into_rational(self) -> Result<Rational> {
            match self {
                RawRational::Text(s) => parse(&s),
                RawRational::Int(i) => Ok(int(i)),
            }
        }
    }
}

/// Serde adapter for `Vec<Rational>` as a list of strings.
pub mod serde_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let raw = Vec::<serde_str::RawRational>::deserialize(d)?;
        raw.into_iter()
            .map(|r| r.into_rational().map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("6/4").unwrap(), ratio(3, 2));
        assert_eq!(format(&ratio(3, 2)), "3/2");
        assert_eq!(format(&int(-7)), "-7");
        assert_eq!(parse(" 5 ").unwrap(), int(5));
        assert!(parse("1/0").is_err());
        assert!(parse("0.5").is_err());
    }

    #[test]
    fn sqrt_comparison() {
        assert!(le_sqrt(&int(3), &int(9)));
        assert!(!le_sqrt(&int(3), &int(8)));
        assert!(le_sqrt(&int(-1), &int(0)));
    }

    #[test]
    fn scaled_roundtrip() {
        let vals = [ratio(1, 2), ratio(1, 3), int(2)];
        let s = Scaled::new(vals.iter()).unwrap();
        assert_eq!(s.scale, BigInt::from(6));
        for (v, n) in vals.iter().zip(&s.numerators) {
            assert_eq!(&s.unscale(*n), v);
        }
    }
}
