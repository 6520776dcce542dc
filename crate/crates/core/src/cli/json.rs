//! JSON forms. Rationals are strings (`"3"`, `"-1/2"`); an element is
//! `{"dim": d, "terms": [{"exp": [..], "coeff": ".."}]}` with terms in
//! descending order.

use std::str::FromStr;

use num_rational::BigRational;
use serde::de::Error as _;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::series::{Element, Exponent, Series, Term};

fn parse_rational<E: serde::de::Error>(s: &str) -> Result<BigRational, E> {
    BigRational::from_str(s.trim()).map_err(|_| E::custom(format!("invalid rational {s:?}")))
}

pub mod rational_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        parse_rational(&String::deserialize(d)?)
    }
}

pub mod bigint_string {
    use num_bigint::BigInt;

    use super::*;

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(n)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        BigInt::from_str(s.trim()).map_err(|_| D::Error::custom(format!("invalid integer {s:?}")))
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.dim()))?;
        for c in self.components() {
            seq.serialize_element(&c.to_string())?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        if raw.is_empty() {
            return Err(D::Error::custom("exponent needs at least one component"));
        }
        Ok(Exponent::new(raw.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>()?))
    }
}

#[derive(Deserialize)]
struct TermJson {
    exp: Exponent,
    #[serde(with = "rational_string")]
    coeff: BigRational,
}

#[derive(Serialize)]
struct ElementOut<'a> {
    dim: usize,
    terms: Vec<TermRef<'a>>,
}

#[derive(Serialize)]
struct TermRef<'a> {
    exp: &'a Exponent,
    #[serde(serialize_with = "rational_ref::serialize")]
    coeff: &'a BigRational,
}

mod rational_ref {
    use super::*;

    pub fn serialize<S: Serializer>(r: &&BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(*r)
    }
}

#[derive(Deserialize)]
struct ElementIn {
    dim: Option<usize>,
    terms: Vec<TermJson>,
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ElementOut {
            dim: self.dim(),
            terms: self.terms().iter().map(|t| TermRef { exp: &t.exponent, coeff: &t.coeff }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = ElementIn::deserialize(d)?;
        let dim = raw.dim.or_else(|| raw.terms.first().map(|t| t.exp.dim())).unwrap_or(1);
        if !(1..=2).contains(&dim) {
            return Err(D::Error::custom(format!("dim must be 1 or 2, got {dim}")));
        }
        if raw.terms.iter().any(|t| t.exp.dim() != dim) {
            return Err(D::Error::custom(format!("every exponent must have {dim} components")));
        }
        let terms = raw.terms.into_iter().map(|t| Term { exponent: t.exp, coeff: t.coeff }).collect();
        Element::try_new(Series::from_terms(dim, terms)).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_element;

    #[test]
    fn element_round_trip() {
        let e = parse_element("t^(1,-1) - 1/2*t^(0,3) + 4", 2).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(
            s,
            r#"{"dim":2,"terms":[{"exp":["1","-1"],"coeff":"1"},{"exp":["0","3"],"coeff":"-1/2"},{"exp":["0","0"],"coeff":"4"}]}"#
        );
        assert_eq!(serde_json::from_str::<Element>(&s).unwrap(), e);
    }

    #[test]
    fn rejects_invalid_elements() {
        assert!(serde_json::from_str::<Element>(r#"{"terms":[{"exp":["1"],"coeff":"-1"}]}"#).is_err());
        assert!(serde_json::from_str::<Element>(r#"{"terms":[{"exp":["1"],"coeff":"x"}]}"#).is_err());
        assert!(serde_json::from_str::<Element>(r#"{"dim":2,"terms":[{"exp":["1"],"coeff":"1"}]}"#).is_err());
        assert_eq!(serde_json::from_str::<Element>(r#"{"terms":[]}"#).unwrap(), Element::zero(1));
    }
}
