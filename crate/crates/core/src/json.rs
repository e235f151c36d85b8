//! Serde adapters that write big integers as plain JSON numbers.
//!
//! Values that do not fit in an `i64` are written as decimal strings; both
//! forms are accepted on input.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::IntegerMatrix;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Repr {
    Small(i64),
    Text(String),
}

fn to_repr(v: &BigInt) -> Repr {
    match v.to_i64() {
        Some(x) => Repr::Small(x),
        None => Repr::Text(v.to_string()),
    }
}

fn from_repr(r: Repr) -> Result<BigInt, String> {
    match r {
        Repr::Small(x) => Ok(BigInt::from(x)),
        Repr::Text(s) => s.trim().parse().map_err(|_| format!("not an integer: {s:?}")),
    }
}

pub fn to_value(v: &BigInt) -> serde_json::Value {
    serde_json::to_value(to_repr(v)).expect("integer serializes")
}

pub fn vec_to_value(v: &[BigInt]) -> serde_json::Value {
    serde_json::Value::Array(v.iter().map(to_value).collect())
}

pub fn matrix_to_value(m: &IntegerMatrix) -> serde_json::Value {
    serde_json::Value::Array(m.to_rows().iter().map(|r| vec_to_value(r)).collect())
}

pub mod big_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(to_repr).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Repr>::deserialize(d)?
            .into_iter()
            .map(|r| from_repr(r).map_err(D::Error::custom))
            .collect()
    }
}

pub mod big_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &IntegerMatrix, s: S) -> Result<S::Ok, S::Error> {
        m.to_rows()
            .iter()
            .map(|r| r.iter().map(to_repr).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<IntegerMatrix, D::Error> {
        let rows = Vec::<Vec<Repr>>::deserialize(d)?
            .into_iter()
            .map(|r| r.into_iter().map(from_repr).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        IntegerMatrix::from_rows(rows).ok_or_else(|| D::Error::custom("ragged matrix"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Wrap(#[serde(with = "big_vec")] Vec<BigInt>);

    #[test]
    fn large_values_round_trip_as_strings() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let w = Wrap(vec![BigInt::from(-3), big.clone()]);
        let text = serde_json::to_string(&w).unwrap();
        assert_eq!(text, "[-3,\"123456789012345678901234567890\"]");
        assert_eq!(serde_json::from_str::<Wrap>(&text).unwrap(), w);
    }
}
