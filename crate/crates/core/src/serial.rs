//! JSON encodings shared by the on-disk formats.
//!
//! Integers are written as decimal strings; rationals as `"p/q"` (or `"p"`).
//! Readers accept plain JSON numbers as well.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::matrix::{Int, IntMatrix, Rat, RatMatrix};

#[derive(Deserialize)]
#[serde(untagged)]
enum NumOrStr {
    Num(i64),
    Str(String),
}

pub fn parse_int(s: &str) -> Option<Int> {
    BigInt::from_str(s.trim()).ok()
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(parse_int(p)?, q))
        }
        None => Some(BigRational::from_integer(parse_int(s)?)),
    }
}

pub fn format_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub mod int_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Int, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Int, D::Error> {
        match NumOrStr::deserialize(d)? {
            NumOrStr::Num(n) => Ok(BigInt::from(n)),
            NumOrStr::Str(s) => parse_int(&s).ok_or_else(|| D::Error::custom(format!("bad integer {s:?}"))),
        }
    }
}

pub mod int_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Int], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Int>, D::Error> {
        let raw: Vec<NumOrStr> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|x| match x {
                NumOrStr::Num(n) => Ok(BigInt::from(n)),
                NumOrStr::Str(s) => parse_int(&s).ok_or_else(|| D::Error::custom(format!("bad integer {s:?}"))),
            })
            .collect()
    }
}

/// A list of integer vectors, possibly empty or of varying length.
pub mod int_vecs {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<Int>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = v.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Int>>, D::Error> {
        let raw: Vec<Vec<NumOrStr>> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| match x {
                        NumOrStr::Num(n) => Ok(BigInt::from(n)),
                        NumOrStr::Str(s) => parse_int(&s).ok_or_else(|| D::Error::custom(format!("bad integer {s:?}"))),
                    })
                    .collect()
            })
            .collect()
    }
}

pub mod int_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &IntMatrix, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<IntMatrix, D::Error> {
        let raw: Vec<Vec<NumOrStr>> = Vec::deserialize(d)?;
        let cols = raw.first().map_or(0, |r| r.len());
        let mut rows = Vec::with_capacity(raw.len());
        for r in raw {
            if r.len() != cols {
                return Err(D::Error::custom("ragged matrix"));
            }
            let row: Result<Vec<Int>, D::Error> = r
                .into_iter()
                .map(|x| match x {
                    NumOrStr::Num(n) => Ok(BigInt::from(n)),
                    NumOrStr::Str(s) => parse_int(&s).ok_or_else(|| D::Error::custom(format!("bad integer {s:?}"))),
                })
                .collect();
            rows.push(row?);
        }
        Ok(IntMatrix::from_rows_with_cols(rows, cols))
    }
}

pub mod rat_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(format_rat).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let raw: Vec<NumOrStr> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|x| match x {
                NumOrStr::Num(n) => Ok(BigRational::from_integer(BigInt::from(n))),
                NumOrStr::Str(s) => parse_rat(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))),
            })
            .collect()
    }
}

pub mod rat_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &RatMatrix, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m.to_rows().iter().map(|r| r.iter().map(format_rat).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RatMatrix, D::Error> {
        let raw: Vec<Vec<String>> = Vec::deserialize(d)?;
        let cols = raw.first().map_or(0, |r| r.len());
        let mut rows = Vec::with_capacity(raw.len());
        for r in raw {
            if r.len() != cols {
                return Err(D::Error::custom("ragged matrix"));
            }
            let row: Option<Vec<Rat>> = r.iter().map(|s| parse_rat(s)).collect();
            rows.push(row.ok_or_else(|| D::Error::custom("bad rational entry"))?);
        }
        Ok(RatMatrix::from_rows(rows, cols))
    }
}

pub mod rat_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        match NumOrStr::deserialize(d)? {
            NumOrStr::Num(n) => Ok(BigRational::from_integer(BigInt::from(n))),
            NumOrStr::Str(s) => parse_rat(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))),
        }
    }
}
