//! Constructive order-automorphisms of the model.
//!
//! A [`Descriptor`] is a finite description of a bijection `M -> M` that can
//! be evaluated (and inverted) at any element. The two nontrivial forms follow
//! the class-wise constructions for E2 and E3 pairs:
//!
//! * [`Descriptor::E2Affine`]: identity on E0-classes up to that of `c`; above
//!   it, a representative `r` goes to `n*(r - a) + b` and the rest of its
//!   class follows by translation. `c = a - floor((b - a) / (n - 1))`, so only
//!   division by a standard integer is needed; the affine map sends `c` to
//!   `c + m` with `m` the remainder, which lies in `c`'s own class.
//! * [`Descriptor::E3Shift`]: with `x E y` iff `|x - y| < c^n` for some `n`,
//!   identity on the class of 0; a representative `r` of any other class goes
//!   to `c*r` and the class follows by translation, `f(y) = f(r) + (y - r)`
//!   on both sides of `r`.
//!
//! Representative sets are never materialized: a class is named by a
//! canonical truncation of any of its members (its class key), and a short
//! list of anchors overrides the truncation so that they represent their own
//! classes.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equiv::{self, EquivError, EquivLevel};
use crate::series::{Element, Exponent, ModelConfig, ModelError, Series};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Descriptor {
    Identity,
    E2Affine {
        a: Element,
        b: Element,
        n: u64,
        c: Element,
        /// Remainder of `(b - a)` divided by `n - 1`; the affine part maps `c` to `c + m`.
        m: u64,
    },
    E3Shift {
        a1: Element,
        a2: Element,
        c: Element,
    },
    E0ClassShift {
        anchor: Element,
        #[serde(with = "crate::cli::json::bigint_string")]
        offset: BigInt,
    },
    /// `g(x) = below(x)` for `x < a`, `b + (x - a)` otherwise.
    Extension {
        below: Box<Descriptor>,
        a: Element,
        b: Element,
    },
    /// Applied right to left.
    Compose {
        parts: Vec<Descriptor>,
    },
    Inverse {
        inner: Box<Descriptor>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutoError {
    #[error("the elements are not E2-equivalent")]
    NotE2Equivalent,
    #[error("the elements are not E3-equivalent")]
    NotE3Equivalent,
    #[error("validation failed ({check}) at probes {x} / {y}")]
    ValidationFailure { check: String, x: String, y: String },
    #[error("probes must be strictly increasing")]
    InvalidProbes,
    #[error("descriptor cannot be evaluated: {0}")]
    Evaluation(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Equiv(Box<EquivError>),
}

impl From<EquivError> for AutoError {
    fn from(e: EquivError) -> Self {
        AutoError::Equiv(Box::new(e))
    }
}

/// The convex equivalence whose classes a descriptor permutes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassRelation {
    /// `x E0 y`: `|x - y|` is standard.
    FiniteDistance,
    /// `|x - y| < c^n` for some `n`, where `c` has the given degree.
    BelowPowersOf(Exponent),
}

/// Canonical-truncation representatives with finitely many anchor overrides.
#[derive(Clone, Debug)]
pub struct RepresentativePolicy {
    relation: ClassRelation,
    overrides: Vec<(Element, Element)>,
}

impl RepresentativePolicy {
    pub fn new(relation: ClassRelation, anchors: &[&Element]) -> Self {
        let mut policy = RepresentativePolicy { relation, overrides: Vec::new() };
        for &x in anchors {
            let key = policy.class_key(x);
            if !key.is_zero() && !policy.overrides.iter().any(|(k, _)| *k == key) {
                policy.overrides.push((key, x.clone()));
            }
        }
        policy
    }

    /// Names the class of `x`: for E0 the positive part; for the power
    /// relation the terms whose exponents are not dominated by `deg c`.
    /// The zero key names the lowest class (the one containing 0).
    pub fn class_key(&self, x: &Element) -> Element {
        match &self.relation {
            ClassRelation::FiniteDistance => x.positive_part(),
            ClassRelation::BelowPowersOf(dc) => {
                let cut = dc.rank().unwrap_or(0);
                let kept = x.series().filter(|e| e.rank().is_some_and(|r| r < cut));
                Element::try_new(kept).expect("upper truncation of an element is an element")
            }
        }
    }

    pub fn rep(&self, x: &Element) -> Element {
        self.rep_for_key(self.class_key(x))
    }

    /// The representative of the class named by `key`.
    pub fn rep_for_key(&self, key: Element) -> Element {
        self.overrides.iter().find(|(k, _)| *k == key).map(|(_, r)| r.clone()).unwrap_or(key)
    }

    pub fn same_class(&self, x: &Element, y: &Element) -> bool {
        self.class_key(x) == self.class_key(y)
    }
}

fn eval_err(what: impl Into<String>) -> AutoError {
    AutoError::Evaluation(what.into())
}

fn to_element(s: Series, what: &str) -> Result<Element, AutoError> {
    Element::try_new(s).map_err(|e| eval_err(format!("{what}: {e}")))
}

/// `n*(r - a) + b`.
fn affine(r: &Element, a: &Element, b: &Element, n: &BigInt) -> Result<Element, AutoError> {
    to_element(r.diff(a).scale_int(n).add(b.series()), "affine image")
}

/// `x - r` as a standard integer.
fn standard_offset(x: &Element, r: &Element) -> Result<BigInt, AutoError> {
    let d = x.diff(r);
    if !d.is_constant() {
        return Err(eval_err("offset from representative is not standard"));
    }
    Ok(d.constant_coeff().to_integer())
}

fn shift(x: &Element, k: &BigInt) -> Result<Element, AutoError> {
    x.add_int(k).map_err(|e| eval_err(format!("class translation: {e}")))
}

/// A descriptor with its class policies and constants precomputed, for
/// repeated evaluation.
pub struct Prepared<'d> {
    node: Node<'d>,
}

enum Node<'d> {
    Identity,
    E2 {
        a: &'d Element,
        b: &'d Element,
        n: u64,
        n_big: BigInt,
        c: &'d Element,
        c_plus_m: Element,
        policy: RepresentativePolicy,
    },
    E3 {
        c: &'d Element,
        c_exp_neg: Exponent,
        c_coeff_inv: BigRational,
        policy: RepresentativePolicy,
    },
    Shift {
        anchor: &'d Element,
        offset: &'d BigInt,
    },
    Extension {
        below: Box<Node<'d>>,
        a: &'d Element,
        b: &'d Element,
    },
    Compose(Vec<Node<'d>>),
    Inverse(Box<Node<'d>>),
}

impl<'d> Prepared<'d> {
    pub fn new(d: &'d Descriptor) -> Result<Self, AutoError> {
        Ok(Prepared { node: Node::new(d)? })
    }

    pub fn apply(&self, x: &Element) -> Result<Element, AutoError> {
        self.node.apply(x)
    }

    pub fn apply_inverse(&self, y: &Element) -> Result<Element, AutoError> {
        self.node.apply_inverse(y)
    }
}

impl<'d> Node<'d> {
    fn new(d: &'d Descriptor) -> Result<Self, AutoError> {
        Ok(match d {
            Descriptor::Identity => Node::Identity,
            Descriptor::E2Affine { a, b, n, c, m } => {
                if *n < 1 {
                    return Err(eval_err("affine factor must be >= 1"));
                }
                Node::E2 {
                    a,
                    b,
                    n: *n,
                    n_big: BigInt::from(*n),
                    c,
                    c_plus_m: c.add(&Element::from_u64(c.dim(), *m)),
                    policy: RepresentativePolicy::new(ClassRelation::FiniteDistance, &[a, c]),
                }
            }
            Descriptor::E3Shift { a1, a2, c } => {
                let dc =
                    c.deg().filter(|e| e.is_positive()).ok_or_else(|| eval_err("E3 companion must be nonstandard"))?;
                let [lead] = c.terms() else {
                    return Err(eval_err("E3 companion must be a monomial"));
                };
                Node::E3 {
                    c,
                    c_exp_neg: lead.exponent.neg(),
                    c_coeff_inv: BigRational::from_integer(1.into()) / &lead.coeff,
                    policy: RepresentativePolicy::new(ClassRelation::BelowPowersOf(dc.clone()), &[a1, a2]),
                }
            }
            Descriptor::E0ClassShift { anchor, offset } => Node::Shift { anchor, offset },
            Descriptor::Extension { below, a, b } => Node::Extension { below: Box::new(Node::new(below)?), a, b },
            Descriptor::Compose { parts } => Node::Compose(parts.iter().map(Node::new).collect::<Result<_, _>>()?),
            Descriptor::Inverse { inner } => Node::Inverse(Box::new(Node::new(inner)?)),
        })
    }

    fn apply(&self, x: &Element) -> Result<Element, AutoError> {
        match self {
            Node::Identity => Ok(x.clone()),
            Node::E2 { a, b, n_big, c, policy, .. } => {
                if x.cmp_positive_parts(c).is_le() {
                    return Ok(x.clone());
                }
                let r = policy.rep(x);
                let k = standard_offset(x, &r)?;
                shift(&affine(&r, a, b, n_big)?, &k)
            }
            Node::E3 { c, policy, .. } => {
                let key = policy.class_key(x);
                if key.is_zero() {
                    return Ok(x.clone());
                }
                let r = policy.rep_for_key(key);
                to_element(c.mul(&r).series().add(&x.diff(&r)), "E3 image")
            }
            Node::Shift { anchor, offset } => {
                if !anchor.is_standard() && x.cmp_positive_parts(anchor).is_eq() {
                    shift(x, offset)
                } else {
                    Ok(x.clone())
                }
            }
            Node::Extension { below, a, b } => {
                if x < a {
                    below.apply(x)
                } else {
                    to_element(b.series().add(&x.diff(a)), "extension image")
                }
            }
            Node::Compose(parts) => parts.iter().rev().try_fold(x.clone(), |acc, p| p.apply(&acc)),
            Node::Inverse(inner) => inner.apply_inverse(x),
        }
    }

    fn apply_inverse(&self, y: &Element) -> Result<Element, AutoError> {
        match self {
            Node::Identity => Ok(y.clone()),
            Node::E2 { a, b, n, n_big, c, c_plus_m, policy } => {
                if y.cmp_positive_parts(c).is_le() {
                    return Ok(y.clone());
                }
                // some preimage-class member: c + floor((y - c - m) / n)
                let z = y.sub(c_plus_m).map_err(|_| eval_err("point below the affine region"))?;
                let (q, _) = z.divmod_scalar(*n);
                let r = policy.rep(&c.add(&q));
                let k = standard_offset(y, &affine(&r, a, b, n_big)?)?;
                shift(&r, &k)
            }
            Node::E3 { c, c_exp_neg, c_coeff_inv, policy } => {
                let key = policy.class_key(y);
                if key.is_zero() {
                    return Ok(y.clone());
                }
                let unscaled = to_element(key.series().mul_term(c_exp_neg, c_coeff_inv), "E3 preimage class")?;
                let r = policy.rep(&unscaled);
                to_element(r.series().add(&y.diff(&c.mul(&r))), "E3 preimage")
            }
            Node::Shift { anchor, offset } => {
                if !anchor.is_standard() && y.cmp_positive_parts(anchor).is_eq() {
                    shift(y, &-*offset)
                } else {
                    Ok(y.clone())
                }
            }
            Node::Extension { below, a, b } => {
                if y < b {
                    below.apply_inverse(y)
                } else {
                    to_element(a.series().add(&y.diff(b)), "extension preimage")
                }
            }
            Node::Compose(parts) => parts.iter().try_fold(y.clone(), |acc, p| p.apply_inverse(&acc)),
            Node::Inverse(inner) => inner.apply(y),
        }
    }
}

/// Evaluates the described map at `x`.
pub fn apply(d: &Descriptor, x: &Element) -> Result<Element, AutoError> {
    Prepared::new(d)?.apply(x)
}

/// Evaluates the inverse of the described map at `y`.
pub fn apply_inverse(d: &Descriptor, y: &Element) -> Result<Element, AutoError> {
    Prepared::new(d)?.apply_inverse(y)
}

pub fn invert(d: &Descriptor) -> Descriptor {
    match d {
        Descriptor::Identity => Descriptor::Identity,
        Descriptor::E0ClassShift { anchor, offset } => {
            Descriptor::E0ClassShift { anchor: anchor.clone(), offset: -offset }
        }
        Descriptor::Inverse { inner } => (**inner).clone(),
        Descriptor::Compose { parts } => Descriptor::Compose { parts: parts.iter().rev().map(invert).collect() },
        other => Descriptor::Inverse { inner: Box::new(other.clone()) },
    }
}

/// `outer ∘ inner`: `inner` is applied first.
pub fn compose(outer: &Descriptor, inner: &Descriptor) -> Descriptor {
    let mut parts = Vec::new();
    for d in [outer, inner] {
        match d {
            Descriptor::Identity => {}
            Descriptor::Compose { parts: ps } => parts.extend(ps.iter().cloned()),
            other => parts.push(other.clone()),
        }
    }
    match parts.len() {
        0 => Descriptor::Identity,
        1 => parts.pop().unwrap(),
        _ => Descriptor::Compose { parts },
    }
}

/// Glues an isomorphism of the initial segments below `a` and `b` to the
/// translation `x -> b + (x - a)` above.
pub fn extend_initial_segment(below: Descriptor, a: &Element, b: &Element) -> Descriptor {
    Descriptor::Extension { below: Box::new(below), a: a.clone(), b: b.clone() }
}

/// An automorphism sending `a` to `b` for an E2-equivalent pair.
pub fn build_from_e2(a: &Element, b: &Element, cfg: &ModelConfig) -> Result<Descriptor, AutoError> {
    if !equiv::holds(EquivLevel::new(2)?, a, b)? {
        return Err(AutoError::NotE2Equivalent);
    }
    match a.cmp(b) {
        Ordering::Equal => return Ok(Descriptor::Identity),
        Ordering::Greater => return Ok(invert(&build_from_e2(b, a, cfg)?)),
        Ordering::Less => {}
    }
    if a.positive_part() == b.positive_part() {
        let offset = b.constant_term() - a.constant_term();
        return Ok(Descriptor::E0ClassShift { anchor: a.clone(), offset });
    }
    // least n with b < n*a; a < b gives n >= 2 and (n-1)*a <= b
    let q = b.floor_quotient(a, cfg.div_budget)?;
    let n = q.standard_value().and_then(|v| u64::try_from(v).ok()).ok_or(AutoError::NotE2Equivalent)? + 1;
    let lower = a.scale(n - 1);
    if lower == *b {
        // exact multiple: go to b - 1, then slide one step inside that E0-class
        let b1 = b.add_int(&BigInt::from(-1))?;
        let f = build_from_e2(a, &b1, cfg)?;
        let slide = Descriptor::E0ClassShift { anchor: b1, offset: BigInt::from(1) };
        return Ok(compose(&slide, &f));
    }
    let (q2, m) = b.sub(a)?.divmod_scalar(n - 1);
    let c = a.sub(&q2)?;
    Ok(Descriptor::E2Affine { a: a.clone(), b: b.clone(), n, c, m })
}

/// An automorphism sending `a1` to `a2` for an E3-equivalent pair.
pub fn build_from_e3(a1: &Element, a2: &Element, cfg: &ModelConfig) -> Result<Descriptor, AutoError> {
    if !equiv::holds(EquivLevel::new(3)?, a1, a2)? {
        return Err(AutoError::NotE3Equivalent);
    }
    if equiv::holds(EquivLevel::new(2)?, a1, a2)? {
        return build_from_e2(a1, a2, cfg);
    }
    if a1 > a2 {
        return Ok(invert(&build_from_e3(a2, a1, cfg)?));
    }
    // E3 but not E2 (so d = 2): the degrees differ by an exponent infinitesimal
    // against both. c = t^gap makes c*a1 E2-equivalent to a2.
    let gap = a2.deg().unwrap().sub(a1.deg().unwrap());
    let c = Element::power_of_t(gap)?;
    let target = c.mul(a1);
    let shift = Descriptor::E3Shift { a1: a1.clone(), a2: target.clone(), c };
    let fix = build_from_e2(&target, a2, cfg)?;
    Ok(compose(&fix, &shift))
}

/// Anchor pairs `(x, f(x))` a leaf descriptor promises.
fn leaf_anchors(d: &Descriptor) -> Vec<(Element, Element)> {
    match d {
        Descriptor::E2Affine { a, b, c, .. } => vec![(a.clone(), b.clone()), (c.clone(), c.clone())],
        Descriptor::E3Shift { a1, a2, c } => {
            let zero = Element::zero(a1.dim());
            vec![(a1.clone(), a2.clone()), (zero.clone(), zero), (c.clone(), c.clone())]
        }
        Descriptor::E0ClassShift { anchor, offset } => match anchor.add_int(offset) {
            Ok(img) => vec![(anchor.clone(), img)],
            Err(_) => vec![(anchor.clone(), Element::zero(anchor.dim()))],
        },
        Descriptor::Extension { a, b, .. } => vec![(a.clone(), b.clone())],
        _ => Vec::new(),
    }
}

fn collect_anchor_checks<'d>(d: &'d Descriptor, out: &mut Vec<(&'d Descriptor, Element, Element)>) {
    for (x, y) in leaf_anchors(d) {
        out.push((d, x, y));
    }
    match d {
        Descriptor::Compose { parts } => parts.iter().for_each(|p| collect_anchor_checks(p, out)),
        Descriptor::Inverse { inner } => collect_anchor_checks(inner, out),
        Descriptor::Extension { below, .. } => collect_anchor_checks(below, out),
        _ => {}
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub probes: usize,
    pub pairs: usize,
    pub anchors: usize,
}

/// Same E0-class: equal positive parts (for standard elements, the class of 0).
fn e0_related(x: &Element, y: &Element) -> bool {
    x.cmp_positive_parts(y).is_eq()
}

fn failure(check: &str, x: &Element, y: &Element) -> AutoError {
    AutoError::ValidationFailure {
        check: check.into(),
        x: crate::cli::format_element(x),
        y: crate::cli::format_element(y),
    }
}

/// Checks the descriptor on a strictly increasing probe list: strict
/// monotonicity of images, inverse round trips in both directions, the
/// anchors promised by every component, and transport of E0 on
/// consecutive probe pairs.
pub fn validate(d: &Descriptor, probes: &[Element]) -> Result<ValidationReport, AutoError> {
    if probes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AutoError::InvalidProbes);
    }
    let f = Prepared::new(d).map_err(|e| AutoError::ValidationFailure {
        check: "evaluation".into(),
        x: e.to_string(),
        y: String::new(),
    })?;
    let mut images = Vec::with_capacity(probes.len());
    for x in probes {
        images.push(f.apply(x).map_err(|_| failure("evaluation", x, x))?);
    }
    for (i, w) in images.windows(2).enumerate() {
        if w[0] >= w[1] {
            return Err(failure("monotonicity", &probes[i], &probes[i + 1]));
        }
        if e0_related(&probes[i], &probes[i + 1]) != e0_related(&w[0], &w[1]) {
            return Err(failure("e0_transport", &probes[i], &probes[i + 1]));
        }
    }
    for (x, fx) in probes.iter().zip(&images) {
        match f.apply_inverse(fx) {
            Ok(back) if back == *x => {}
            _ => return Err(failure("inverse_roundtrip", x, fx)),
        }
        let pre = f.apply_inverse(x).map_err(|_| failure("surjectivity", x, x))?;
        match f.apply(&pre) {
            Ok(img) if img == *x => {}
            _ => return Err(failure("surjectivity", x, &pre)),
        }
    }
    let mut checks = Vec::new();
    collect_anchor_checks(d, &mut checks);
    for (leaf, x, y) in &checks {
        match apply(leaf, x) {
            Ok(img) if img == *y => {}
            _ => return Err(failure("anchor", x, y)),
        }
    }
    Ok(ValidationReport { probes: probes.len(), pairs: probes.len().saturating_sub(1), anchors: checks.len() })
}

/// `f(a + b) - (f(a) + f(b))` when it is a standard integer, `None` when it is
/// nonstandard.
pub fn almost_add_defect(d: &Descriptor, a: &Element, b: &Element) -> Result<Option<BigInt>, AutoError> {
    let lhs = apply(d, &a.add(b))?;
    let rhs = apply(d, a)?.add(&apply(d, b)?);
    let diff = lhs.diff(&rhs);
    if diff.is_constant() {
        Ok(Some(diff.constant_coeff().to_integer()))
    } else {
        Ok(None)
    }
}
