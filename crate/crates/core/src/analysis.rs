//! Cofinal and coinitial sequences of equivalence classes, and the embedding
//! of the E3-classes of one E4-class into the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equiv::{self, EquivError, EquivLevel, Witness};
use crate::series::{Element, ModelConfig, ModelError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassSequence {
    pub direction: Direction,
    pub level: EquivLevel,
    pub terms: Vec<Element>,
}

impl ClassSequence {
    /// Strictly increasing for `Up`, strictly decreasing for `Down`.
    pub fn is_monotone(&self) -> bool {
        self.terms.windows(2).all(|w| match self.direction {
            Direction::Up => w[0] < w[1],
            Direction::Down => w[0] > w[1],
        })
    }

    /// Index of the first term strictly beyond `b` in the sequence direction.
    pub fn first_passing(&self, b: &Element) -> Option<usize> {
        self.terms.iter().position(|x| passes(self.direction, x, b))
    }
}

fn passes(direction: Direction, x: &Element, b: &Element) -> bool {
    match direction {
        Direction::Up => x > b,
        Direction::Down => x < b,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("class sequences and embeddings need a nonstandard anchor")]
    StandardInput,
    #[error("the element is not in the anchor's E4-class")]
    NotE4Equivalent,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
}

fn require_nonstandard(a: &Element) -> Result<(), AnalysisError> {
    if a.is_standard() {
        Err(AnalysisError::StandardInput)
    } else {
        Ok(())
    }
}

fn level(l: u8) -> EquivLevel {
    EquivLevel::new(l).expect("levels 0..=4 are valid")
}

/// `a + n` (up) or `a - n` (down) for `n < k`.
pub fn e0_seq(a: &Element, k: usize, direction: Direction) -> Result<ClassSequence, AnalysisError> {
    require_nonstandard(a)?;
    let terms = (0..k as u64)
        .map(|n| {
            let n = BigInt::from(n);
            match direction {
                Direction::Up => a.add_int(&n),
                Direction::Down => a.add_int(&-n),
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(ClassSequence { direction, level: level(0), terms })
}

/// `n * a` (up) or `ceil(a / n)` (down) for `n = 1..=k`.
pub fn e2_seq(a: &Element, k: usize, direction: Direction) -> Result<ClassSequence, AnalysisError> {
    require_nonstandard(a)?;
    let terms = (1..=k as u64)
        .map(|n| match direction {
            Direction::Up => a.scale(n),
            Direction::Down => a.ceil_div_scalar(n),
        })
        .collect();
    Ok(ClassSequence { direction, level: level(2), terms })
}

/// Index at which the level-0 or level-2 sequence of `a`, in `direction`, is
/// guaranteed to have passed the class-mate `b`, read off the bound witness
/// of `a E b`. A sequence needs `index + 1` terms to reach it.
pub fn passing_index(
    seq_level: EquivLevel,
    direction: Direction,
    a: &Element,
    b: &Element,
    cfg: &ModelConfig,
) -> Result<usize, AnalysisError> {
    let verdict = equiv::decide(seq_level, a, b, cfg)?;
    let n = match verdict.witness {
        Some(Witness::BoundN(n)) => n as usize,
        Some(Witness::Companion(_)) => return Err(EquivError::WrongWitnessKind(seq_level).into()),
        None => return Err(EquivError::NotEquivalent(seq_level).into()),
    };
    Ok(match (seq_level.get(), direction) {
        // |a - b| < n: a + n > b and a - n < b
        (0, _) => n,
        // b < n*a is the term n*a, at index n - 1
        (2, Direction::Up) => n - 1,
        // a < n*b gives ceil(a / (n + 1)) < b
        (2, Direction::Down) => n,
        _ => return Err(EquivError::UnsupportedLevel(seq_level.get()).into()),
    })
}

/// The largest multiple `b` of `a` with `floor(b/a)^(2^n) <= a`, i.e.
/// `a * root_floor(a, 2^n)`: it sits just above the E3-class of `a`.
pub fn root_up_term(a: &Element, n: u32, budget: usize) -> Result<Element, AnalysisError> {
    require_nonstandard(a)?;
    Ok(a.mul(&a.root_floor(1u64 << n, budget)?))
}

/// The least `b` with `floor(a/b)^(2^n) <= a`, i.e. `floor(a / (m + 1)) + 1`
/// with `m = root_floor(a, 2^n)`: it sits just below the E3-class of `a`.
pub fn root_down_term(a: &Element, n: u32, budget: usize) -> Result<Element, AnalysisError> {
    require_nonstandard(a)?;
    let m = a.root_floor(1u64 << n, budget)?;
    let q = a.floor_quotient(&m.add(&Element::one(a.dim())), budget)?;
    Ok(q.add(&Element::one(a.dim())))
}

/// Defining predicate of the upper sequence: `a | b` and `(b/a)^(2^n) <= a`.
pub fn root_up_predicate(a: &Element, b: &Element, n: u32, budget: usize) -> Result<bool, AnalysisError> {
    let (q, r) = b.divmod(a, budget)?;
    Ok(r.is_zero() && q.pow(1u64 << n) <= *a)
}

/// Defining predicate of the lower sequence: `floor(a/b)^(2^n) <= a`.
pub fn root_down_predicate(a: &Element, b: &Element, n: u32, budget: usize) -> Result<bool, AnalysisError> {
    if b.is_zero() {
        return Ok(false);
    }
    Ok(a.floor_quotient(b, budget)?.pow(1u64 << n) <= *a)
}

/// Terms for `n = 1..=k`. Up: decreasing toward the E3-class of `a` from
/// above. Down: increasing toward it from below.
pub fn root_bound_seq(
    a: &Element,
    k: u32,
    direction: Direction,
    budget: usize,
) -> Result<ClassSequence, AnalysisError> {
    let terms = (1..=k)
        .map(|n| match direction {
            Direction::Up => root_up_term(a, n, budget),
            Direction::Down => root_down_term(a, n, budget),
        })
        .collect::<Result<_, _>>()?;
    // up terms decrease and down terms increase as n grows
    let direction = match direction {
        Direction::Up => Direction::Down,
        Direction::Down => Direction::Up,
    };
    Ok(ClassSequence { direction, level: level(3), terms })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Embedding {
    #[serde(with = "crate::cli::json::rational_string")]
    pub value: BigRational,
    /// The E4-class has degree first component 0; the value is the second
    /// degree component instead.
    pub degenerate: bool,
}

/// Position of the E3-class of `b` inside the E4-class of `anchor`: the raw
/// first degree component (d = 2), or the degree itself (d = 1).
pub fn real_embed(anchor: &Element, b: &Element) -> Result<Embedding, AnalysisError> {
    require_nonstandard(anchor)?;
    require_nonstandard(b)?;
    if !equiv::holds(level(4), anchor, b)? {
        return Err(AnalysisError::NotE4Equivalent);
    }
    let comps = b.deg().expect("nonstandard").components();
    if comps[0].is_zero() && comps.len() > 1 {
        Ok(Embedding { value: comps[1].clone(), degenerate: true })
    } else {
        Ok(Embedding { value: comps[0].clone(), degenerate: false })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_element;

    fn p(s: &str, d: usize) -> Element {
        parse_element(s, d).unwrap()
    }

    #[test]
    fn e0_sequences() {
        let up = e0_seq(&p("t", 1), 3, Direction::Up).unwrap();
        assert_eq!(up.terms, vec![p("t", 1), p("t + 1", 1), p("t + 2", 1)]);
        let down = e0_seq(&p("t", 1), 2, Direction::Down).unwrap();
        assert_eq!(down.terms, vec![p("t", 1), p("t - 1", 1)]);
        assert!(up.is_monotone() && down.is_monotone());
        let cfg = ModelConfig::new(1).unwrap();
        let b = p("t + 17", 1);
        let idx = passing_index(level(0), Direction::Up, &p("t", 1), &b, &cfg).unwrap();
        assert_eq!(idx, 18);
        let seq = e0_seq(&p("t", 1), 19, Direction::Up).unwrap();
        assert_eq!(seq.first_passing(&b), Some(18));
    }

    #[test]
    fn e2_sequences() {
        let a = p("t^2", 1);
        let up = e2_seq(&a, 3, Direction::Up).unwrap();
        assert_eq!(up.terms, vec![a.clone(), p("2*t^2", 1), p("3*t^2", 1)]);
        let down = e2_seq(&a, 3, Direction::Down).unwrap();
        assert_eq!(down.terms, vec![a.clone(), p("1/2*t^2", 1), p("1/3*t^2", 1)]);
        let b = p("1/4*t^2", 1);
        let seq = e2_seq(&a, 8, Direction::Down).unwrap();
        assert_eq!(seq.first_passing(&b), Some(4)); // the term at n = 5
        let cfg = ModelConfig::new(1).unwrap();
        let idx = passing_index(level(2), Direction::Down, &a, &b, &cfg).unwrap();
        assert!(idx >= 4 && passes(Direction::Down, &seq.terms[idx], &b));
    }

    #[test]
    fn root_bound_terms() {
        let a = p("t^2", 1);
        let up = root_up_term(&a, 1, 64).unwrap();
        assert_eq!(up, p("t^3", 1));
        assert!(root_up_predicate(&a, &up, 1, 64).unwrap());
        assert!(!root_up_predicate(&a, &up.add(&a), 1, 64).unwrap());
        assert!(!root_up_predicate(&a, &up.add(&Element::one(1)), 1, 64).unwrap());
        let down = root_down_term(&a, 1, 64).unwrap();
        assert_eq!(down, p("t", 1));
        assert!(root_down_predicate(&a, &down, 1, 64).unwrap());
        assert!(!root_down_predicate(&a, &p("t - 1", 1), 1, 64).unwrap());
        assert!(matches!(
            root_up_term(&p("2*t^2", 1), 1, 64),
            Err(AnalysisError::Model(ModelError::CoefficientNotRepresentable { .. }))
        ));
        let seq = root_bound_seq(&p("t^4 + t", 1), 2, Direction::Up, 64).unwrap();
        assert!(seq.is_monotone());
    }

    #[test]
    fn embedding() {
        let a = p("t^(1,0)", 2);
        let e = real_embed(&a, &p("t^(2,3)", 2)).unwrap();
        assert_eq!(e.value, BigRational::from_integer(2.into()));
        assert!(!e.degenerate);
        assert_eq!(real_embed(&a, &a).unwrap().value, BigRational::from_integer(1.into()));
        let prod = p("t^(2,3)", 2).mul(&p("t^(3,1)", 2));
        assert_eq!(real_embed(&a, &prod).unwrap().value, BigRational::from_integer(5.into()));
        assert_eq!(real_embed(&a, &p("t^(0,1)", 2)), Err(AnalysisError::NotE4Equivalent));
        let d = real_embed(&p("t^(0,1)", 2), &p("t^(0,7/2)", 2)).unwrap();
        assert!(d.degenerate);
    }
}
