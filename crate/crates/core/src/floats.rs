//! Serde helpers that keep non-finite floats representable in JSON
//! (`"inf"`, `"-inf"`, `"nan"`).

use serde::de::{self, Deserializer, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::Deserialize;

struct Wrapped(f64);

impl serde::Serialize for Wrapped {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() {
            s.serialize_f64(v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Wrapped {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Wrapped;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
            }
            fn visit_f64<E>(self, v: f64) -> Result<Wrapped, E> {
                Ok(Wrapped(v))
            }
            fn visit_i64<E>(self, v: i64) -> Result<Wrapped, E> {
                Ok(Wrapped(v as f64))
            }
            fn visit_u64<E>(self, v: u64) -> Result<Wrapped, E> {
                Ok(Wrapped(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Wrapped, E> {
                match v {
                    "inf" => Ok(Wrapped(f64::INFINITY)),
                    "-inf" => Ok(Wrapped(f64::NEG_INFINITY)),
                    "nan" => Ok(Wrapped(f64::NAN)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

pub mod scalar {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&Wrapped(*v), s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Wrapped::deserialize(d).map(|w| w.0)
    }
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&Wrapped(*x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Wrapped>::deserialize(d).map(|v| v.into_iter().map(|w| w.0).collect())
    }
}
