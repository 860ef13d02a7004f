//! Exact rationals and their `"p/q"` string form.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i128, den: i128) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p"` or `"p/q"` (optional leading sign on `p`, `q > 0`).
pub fn parse(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational literal: {s:?}"));
    let (num, den) = match t.split_once('/') {
        Some((p, q)) => (p, Some(q)),
        None => (t, None),
    };
    let digits_ok = |x: &str, allow_sign: bool| {
        let body = if allow_sign {
            x.strip_prefix(['-', '+']).unwrap_or(x)
        } else {
            x
        };
        !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
    };
    if !digits_ok(num, true) {
        return Err(bad());
    }
    let p = BigInt::from_str(num).map_err(|_| bad())?;
    let q = match den {
        Some(q) => {
            if !digits_ok(q, false) {
                return Err(bad());
            }
            BigInt::from_str(q).map_err(|_| bad())?
        }
        None => BigInt::from(1),
    };
    if q.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(p, q))
}

/// Canonical string: `"p"` for integers, `"p/q"` otherwise.
pub fn format(r: &Rational) -> String {
    r.to_string()
}

/// Nearest `f64` (correctly rounded by `num-rational`).
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter writing a [`Rational`] as its canonical string.
pub mod serde_str {
    use super::Rational;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(D::Error::custom)
    }
}

pub mod serde_str_opt {
    use super::Rational;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&super::format(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| super::parse(&s).map_err(D::Error::custom))
            .transpose()
    }
}

pub mod serde_str_vec {
    use super::Rational;
    use serde::{de::Error as _, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&super::format(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| super::parse(s).map_err(D::Error::custom))
            .collect()
    }
}
