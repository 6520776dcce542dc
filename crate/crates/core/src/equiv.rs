//! Decision procedures for the equivalence relations E0..E4 on the
//! nonstandard elements, with witness synthesis.
//!
//! Each relation is defined by a quantified inequality (`exists n`,
//! `exists c` with a `for all n` side condition). Over this model every one of
//! them collapses to a comparison of leading exponents:
//!
//! | level | closed form |
//! |-------|-------------|
//! | 0 | positive-exponent parts identical |
//! | 1 | `a = b`, or `deg(a - b) < deg a` |
//! | 2 | `deg a = deg b` |
//! | 3 | d=2: first degree components equal and positive, or degrees equal; d=1: as level 2 |
//! | 4 | degrees in the same Archimedean class of `Q^d` |
//!
//! Every positive verdict carries a witness that is re-checked against the
//! literal definition by [`crate::oracle::check_witness`] before it is returned.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::automorph::{self, AutoError, Descriptor};
use crate::oracle;
use crate::series::{Element, Exponent, ModelConfig, ModelError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct EquivLevel(u8);

impl EquivLevel {
    pub const ALL: [EquivLevel; 5] = [EquivLevel(0), EquivLevel(1), EquivLevel(2), EquivLevel(3), EquivLevel(4)];

    pub fn new(level: u8) -> Result<Self, EquivError> {
        if level <= 4 {
            Ok(EquivLevel(level))
        } else {
            Err(EquivError::UnsupportedLevel(level))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Levels whose witness is a standard bound `n` (the others take a companion element).
    pub fn takes_bound(self) -> bool {
        matches!(self.0, 0 | 2 | 4)
    }

    pub fn next(self) -> Option<EquivLevel> {
        (self.0 < 4).then(|| EquivLevel(self.0 + 1))
    }
}

impl fmt::Display for EquivLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Witness {
    #[serde(rename = "n")]
    BoundN(u64),
    #[serde(rename = "c")]
    Companion(Element),
}

/// Which closed-form test settled the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    PositivePartsEqual,
    PositivePartsDiffer,
    Identical,
    DifferenceBelowDegree,
    DifferenceAtDegree,
    DegreesEqual,
    DegreesDiffer,
    FirstComponentsEqual,
    FirstComponentsDiffer,
    SameArchimedeanClass,
    DifferentArchimedeanClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reason {
    pub rule: Rule,
    pub deg_a: Exponent,
    pub deg_b: Exponent,
    /// Degree of `|a - b|`, when it entered the test.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deg_diff: Option<Exponent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub level: EquivLevel,
    pub equivalent: bool,
    pub witness: Option<Witness>,
    pub reason: Reason,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("equivalence levels are only decided on nonstandard elements")]
    StandardInput,
    #[error("the elements are not {0}-equivalent")]
    NotEquivalent(EquivLevel),
    #[error("level {0} is not decidable here (supported: 0..=4)")]
    UnsupportedLevel(u8),
    #[error("level {0} has no witness of the requested kind")]
    WrongWitnessKind(EquivLevel),
    #[error("synthesized witness failed definitional validation at {0}")]
    WitnessUnverified(EquivLevel),
    #[error("neither E2 nor E3 holds; no automorphism route is available")]
    CannotProve,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Automorphism(#[from] Box<AutoError>),
}

impl From<AutoError> for EquivError {
    fn from(e: AutoError) -> Self {
        EquivError::Automorphism(Box::new(e))
    }
}

fn deg(x: &Element) -> &Exponent {
    x.deg().expect("nonstandard elements have a degree")
}

fn reason(rule: Rule, a: &Element, b: &Element, deg_diff: Option<Exponent>) -> Reason {
    Reason { rule, deg_a: deg(a).clone(), deg_b: deg(b).clone(), deg_diff }
}

fn require_nonstandard(a: &Element, b: &Element) -> Result<(), EquivError> {
    if a.is_standard() || b.is_standard() {
        return Err(EquivError::StandardInput);
    }
    Ok(())
}

/// Decides `a E^level b` by closed form and attaches a validated witness to
/// positive verdicts.
pub fn decide(level: EquivLevel, a: &Element, b: &Element, cfg: &ModelConfig) -> Result<Verdict, EquivError> {
    require_nonstandard(a, b)?;
    let (equivalent, why) = closed_form(level, a, b);
    let witness = if equivalent { Some(synthesize(level, a, b, cfg)?) } else { None };
    Ok(Verdict { level, equivalent, witness, reason: why })
}

/// Just the boolean, without witness synthesis.
pub fn holds(level: EquivLevel, a: &Element, b: &Element) -> Result<bool, EquivError> {
    require_nonstandard(a, b)?;
    Ok(closed_form(level, a, b).0)
}

fn closed_form(level: EquivLevel, a: &Element, b: &Element) -> (bool, Reason) {
    let (da, db) = (deg(a), deg(b));
    match level.0 {
        0 => {
            let eq = a.positive_part() == b.positive_part();
            let rule = if eq { Rule::PositivePartsEqual } else { Rule::PositivePartsDiffer };
            (eq, reason(rule, a, b, None))
        }
        1 => {
            if a == b {
                return (true, reason(Rule::Identical, a, b, None));
            }
            let dd = a.abs_diff(b).deg().cloned().expect("a != b");
            let eq = dd < *da;
            let rule = if eq { Rule::DifferenceBelowDegree } else { Rule::DifferenceAtDegree };
            (eq, reason(rule, a, b, Some(dd)))
        }
        2 => {
            let eq = da == db;
            let rule = if eq { Rule::DegreesEqual } else { Rule::DegreesDiffer };
            (eq, reason(rule, a, b, None))
        }
        3 => {
            if da == db {
                return (true, reason(Rule::DegreesEqual, a, b, None));
            }
            let eq = a.dim() >= 2 && {
                let (xa, xb) = (&da.components()[0], &db.components()[0]);
                xa == xb && xa.is_positive()
            };
            let rule = if eq { Rule::FirstComponentsEqual } else { Rule::FirstComponentsDiffer };
            (eq, reason(rule, a, b, None))
        }
        4 => {
            let eq = da.rank() == db.rank();
            let rule = if eq { Rule::SameArchimedeanClass } else { Rule::DifferentArchimedeanClass };
            (eq, reason(rule, a, b, None))
        }
        _ => unreachable!("EquivLevel is validated on construction"),
    }
}

fn synthesize(level: EquivLevel, a: &Element, b: &Element, cfg: &ModelConfig) -> Result<Witness, EquivError> {
    let mut w = match level.0 {
        0 | 2 | 4 => Witness::BoundN(least_bound(level, a, b, cfg)?),
        1 => Witness::Companion(e1_companion(a, b)),
        3 => e3_companion(a, b, cfg)?,
        _ => unreachable!(),
    };
    // Escalate by one step at a time if the formula lands on a boundary.
    for _ in 0..cfg.search_n_max {
        if oracle::check_witness(level, a, b, &w) {
            return Ok(w);
        }
        w = escalate(&w);
    }
    Err(EquivError::WitnessUnverified(level))
}

fn escalate(w: &Witness) -> Witness {
    match w {
        Witness::BoundN(n) => Witness::BoundN(n + 1),
        Witness::Companion(c) => {
            let bumped = if c.is_standard() {
                c.add(&Element::one(c.dim()))
            } else {
                let e = deg(c);
                let mut comps = e.components().to_vec();
                *comps.last_mut().unwrap() += BigRational::from_integer(1.into());
                Element::power_of_t(Exponent::new(comps)).unwrap_or_else(|_| c.clone())
            };
            Witness::Companion(bumped)
        }
    }
}

/// `t^m + 1` where `m` is the midpoint of `deg |a - b|` (or 0) and `deg a`.
fn e1_companion(a: &Element, b: &Element) -> Element {
    let dim = a.dim();
    let low = a.abs_diff(b).deg().cloned().unwrap_or_else(|| Exponent::zero(dim));
    let low = if low.is_negative() { Exponent::zero(dim) } else { low };
    let mid = low.midpoint(deg(a));
    Element::power_of_t(mid).expect("midpoint of nonnegative exponents is nonnegative").add(&Element::one(dim))
}

/// Equal degrees: the standard companion `n` from E2. Otherwise (d = 2, equal
/// first components) `t^(0, |y_a - y_b| + 1)`.
fn e3_companion(a: &Element, b: &Element, cfg: &ModelConfig) -> Result<Witness, EquivError> {
    let (da, db) = (deg(a), deg(b));
    if da == db {
        let n = least_bound(EquivLevel(2), a, b, cfg)?;
        return Ok(Witness::Companion(Element::from_u64(a.dim(), n)));
    }
    let gap = da.sub(db);
    let gap = if gap.is_negative() { gap.neg() } else { gap };
    let mut comps = gap.components().to_vec();
    *comps.last_mut().unwrap() += BigRational::from_integer(1.into());
    Ok(Witness::Companion(Element::power_of_t(Exponent::new(comps))?))
}

/// The least standard `n` witnessing a positive verdict at a bound level (0, 2, 4).
pub fn minimal_bound_n(level: EquivLevel, a: &Element, b: &Element, cfg: &ModelConfig) -> Result<u64, EquivError> {
    if !level.takes_bound() {
        return Err(EquivError::WrongWitnessKind(level));
    }
    if !holds(level, a, b)? {
        return Err(EquivError::NotEquivalent(level));
    }
    least_bound(level, a, b, cfg)
}

fn least_bound(level: EquivLevel, a: &Element, b: &Element, cfg: &ModelConfig) -> Result<u64, EquivError> {
    match level.0 {
        // a < b + n and b < a + n  <=>  |a - b| < n
        0 => {
            let gap: BigInt = (a.constant_term() - b.constant_term()).abs();
            Ok(to_u64(gap)? + 1)
        }
        // a < n*b  <=>  n > floor(a / b)
        2 => {
            let qa = a.floor_quotient(b, cfg.div_budget)?;
            let qb = b.floor_quotient(a, cfg.div_budget)?;
            let q = qa.max(qb);
            let q = q.standard_value().ok_or(EquivError::NotEquivalent(level))?;
            Ok(to_u64(q)? + 1)
        }
        4 => Ok(least_power_exceeding(a, b).max(least_power_exceeding(b, a))),
        _ => Err(EquivError::WrongWitnessKind(level)),
    }
}

/// Least `n >= 1` with `a < b^n`, for `a`, `b` with degrees in one Archimedean class.
fn least_power_exceeding(a: &Element, b: &Element) -> u64 {
    let (da, db) = (deg(a), deg(b));
    let r = db.rank().expect("nonstandard");
    let ratio = &da.components()[r] / &db.components()[r];
    let mut n = ratio.floor().to_integer().to_u64().unwrap_or(1).max(1);
    loop {
        match db.scale_int(n).cmp(da) {
            std::cmp::Ordering::Greater => return n,
            std::cmp::Ordering::Equal if *a < b.pow(n) => return n,
            _ => n += 1,
        }
    }
}

fn to_u64(n: BigInt) -> Result<u64, EquivError> {
    n.to_u64().ok_or_else(|| EquivError::Model(ModelError::InvariantViolation(format!("bound {n} exceeds u64"))))
}

/// A witness element `c` for levels 1 and 3.
pub fn companion_witness(
    level: EquivLevel,
    a: &Element,
    b: &Element,
    cfg: &ModelConfig,
) -> Result<Element, EquivError> {
    if level.takes_bound() {
        return Err(EquivError::WrongWitnessKind(level));
    }
    match decide(level, a, b, cfg)?.witness {
        Some(Witness::Companion(c)) => Ok(c),
        Some(Witness::BoundN(_)) => Err(EquivError::WrongWitnessKind(level)),
        None => Err(EquivError::NotEquivalent(level)),
    }
}

/// Sound, incomplete prover for orbit equivalence: returns an order-automorphism
/// mapping `a` to `b` when E2 or E3 holds.
pub fn prove_e5(a: &Element, b: &Element, cfg: &ModelConfig) -> Result<Descriptor, EquivError> {
    require_nonstandard(a, b)?;
    if holds(EquivLevel(2), a, b)? {
        return Ok(automorph::build_from_e2(a, b, cfg)?);
    }
    if holds(EquivLevel(3), a, b)? {
        return Ok(automorph::build_from_e3(a, b, cfg)?);
    }
    Err(EquivError::CannotProve)
}
