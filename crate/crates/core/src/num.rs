//! Exact number helpers: parsing, formatting and serde adapters that carry
//! arbitrary-precision values as decimal strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};

/// Parse a decimal integer, tolerating surrounding whitespace and a leading `+`.
pub fn parse_int(s: &str) -> Option<BigInt> {
    let t = s.trim();
    let t = t.strip_prefix('+').unwrap_or(t);
    if t.is_empty() {
        return None;
    }
    t.parse().ok()
}

/// Parse `p`, `p/q` or a finite decimal such as `841.5` into an exact rational.
pub fn parse_rat(s: &str) -> Option<BigRational> {
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = parse_int(p)?;
        let q = parse_int(q)?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = whole.trim_start().starts_with('-');
        let whole = if whole.is_empty() || whole == "-" || whole == "+" {
            BigInt::zero()
        } else {
            parse_int(whole)?
        };
        let scale = num_traits::pow(BigInt::from(10u8), frac.len());
        let frac: BigInt = frac.parse().ok()?;
        let magnitude = whole.abs() * &scale + frac;
        let numer = if negative { -magnitude } else { magnitude };
        return Some(BigRational::new(numer, scale));
    }
    parse_int(t).map(BigRational::from_integer)
}

/// Render a rational as `p` when integral, else `p/q` in lowest terms.
pub fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_rat(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}

pub fn to_rat_vec(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(to_rat).collect()
}

pub fn is_integral(v: &[BigRational]) -> bool {
    v.iter().all(|r| r.denom().is_one())
}

/// `[v]^+`
pub fn positive_part(v: &BigRational) -> BigRational {
    if v.is_positive() {
        v.clone()
    } else {
        BigRational::zero()
    }
}

pub fn dot(a: &[BigInt], x: &[BigInt]) -> BigInt {
    a.iter().zip(x).map(|(p, q)| p * q).sum()
}

pub fn dot_rat(a: &[BigRational], x: &[BigRational]) -> BigRational {
    a.iter()
        .zip(x)
        .fold(BigRational::zero(), |acc, (p, q)| acc + p * q)
}

/// Mixed product of an integer row with a rational point.
pub fn dot_int_rat(a: &[BigInt], x: &[BigRational]) -> BigRational {
    a.iter()
        .zip(x)
        .fold(BigRational::zero(), |acc, (p, q)| acc + q * p)
}

pub fn fmt_int_vec(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

pub fn fmt_rat_vec(v: &[BigRational]) -> String {
    let parts: Vec<String> = v.iter().map(fmt_rat).collect();
    format!("({})", parts.join(", "))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumRepr {
    Str(String),
    Signed(i64),
    Unsigned(u64),
}

impl NumRepr {
    fn into_int<E: serde::de::Error>(self) -> Result<BigInt, E> {
        match self {
            NumRepr::Str(s) => {
                parse_int(&s).ok_or_else(|| E::custom(format!("invalid integer {s:?}")))
            }
            NumRepr::Signed(v) => Ok(BigInt::from(v)),
            NumRepr::Unsigned(v) => Ok(BigInt::from(v)),
        }
    }

    fn into_rat<E: serde::de::Error>(self) -> Result<BigRational, E> {
        match self {
            NumRepr::Str(s) => {
                parse_rat(&s).ok_or_else(|| E::custom(format!("invalid rational {s:?}")))
            }
            NumRepr::Signed(v) => Ok(BigRational::from_integer(v.into())),
            NumRepr::Unsigned(v) => Ok(BigRational::from_integer(v.into())),
        }
    }
}

/// Serde adapter: one integer as a decimal string.
pub mod int_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        NumRepr::deserialize(d)?.into_int()
    }
}

/// Serde adapter: integer vectors as arrays of decimal strings.
pub mod int_vec_str {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<NumRepr>::deserialize(d)?
            .into_iter()
            .map(NumRepr::into_int)
            .collect()
    }
}

/// Serde adapter: one rational as `p` or `p/q`.
pub mod rat_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        NumRepr::deserialize(d)?.into_rat()
    }
}

pub mod rat_vec_str {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&fmt_rat(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<NumRepr>::deserialize(d)?
            .into_iter()
            .map(NumRepr::into_rat)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rat("7/2"), Some(BigRational::new(7.into(), 2.into())));
        assert_eq!(
            parse_rat("841.5"),
            Some(BigRational::new(1683.into(), 2.into()))
        );
        assert_eq!(
            parse_rat("-0.25"),
            Some(BigRational::new((-1).into(), 4.into()))
        );
        assert_eq!(parse_rat("12"), Some(BigRational::from_integer(12.into())));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(parse_rat("1."), None);
        assert_eq!(parse_int(" +42 "), Some(BigInt::from(42)));
        assert_eq!(parse_int(""), None);
    }

    #[test]
    fn formats_rationals() {
        assert_eq!(fmt_rat(&BigRational::new(14.into(), 4.into())), "7/2");
        assert_eq!(fmt_rat(&BigRational::from_integer((-3).into())), "-3");
    }
}
