//! Definitional semantics for E0..E4, independent of the closed forms in
//! [`crate::equiv`].
//!
//! Existential quantifiers are witnessed explicitly; finite inequalities are
//! evaluated with exact arithmetic. The universal side conditions
//! (`n*c < a` for all standard `n`, `c^n < a` for all `n`) are discharged
//! through Archimedean ranks of exponents, which is exact in this model:
//! `n*c < a` for every `n` iff `c` is standard or `deg c < deg a`, and
//! `c^n < a` for every `n` iff `c` is standard or `deg c` is infinitesimal
//! against `deg a`.

use std::collections::BTreeSet;

use crate::equiv::{EquivLevel, Witness};
use crate::series::{Element, Exponent};

#[derive(Clone, Debug)]
pub struct SearchBounds {
    pub n_max: u64,
    pub companion_pool: Vec<Element>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Witness),
    /// Nothing within bounds. This is not a refutation.
    Exhausted,
}

impl SearchOutcome {
    pub fn found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }
}

impl SearchBounds {
    /// Bounds whose companion pool is generated from the degree lattice of
    /// `a` and `b`: term exponents, their pairwise midpoints and gaps, gaps
    /// nudged by one unit in the last coordinate, plus standard constants.
    pub fn from_lattice(a: &Element, b: &Element, n_max: u64) -> Self {
        assert!(n_max >= 2, "search bounds need n_max >= 2");
        let dim = a.dim();
        let mut exps: BTreeSet<Exponent> = BTreeSet::new();
        let base: Vec<Exponent> = a
            .terms()
            .iter()
            .chain(b.terms())
            .map(|t| t.exponent.clone())
            .chain(std::iter::once(Exponent::zero(dim)))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let nudge = Exponent::unit(dim, dim - 1);
        for (i, x) in base.iter().enumerate() {
            exps.insert(x.clone());
            for y in &base[i + 1..] {
                exps.insert(x.midpoint(y));
                let gap = if x > y { x.sub(y) } else { y.sub(x) };
                exps.insert(gap.add(&nudge));
                exps.insert(gap);
            }
        }
        let mut pool: BTreeSet<Element> = BTreeSet::new();
        for k in 1..=n_max.min(64) {
            pool.insert(Element::from_u64(dim, k));
        }
        for e in exps.into_iter().filter(Exponent::is_positive) {
            let m = Element::power_of_t(e).expect("positive exponent");
            pool.insert(m.add(&Element::one(dim)));
            pool.insert(m);
        }
        SearchBounds { n_max, companion_pool: pool.into_iter().collect() }
    }
}

/// `n * c < x` for every standard `n`.
pub fn all_multiples_below(c: &Element, x: &Element) -> bool {
    match (c.deg(), x.deg()) {
        (None, _) => true,
        (Some(_), _) if c.is_standard() => !x.is_standard(),
        (Some(dc), Some(dx)) => dc < dx,
        (Some(_), None) => false,
    }
}

/// `c^n < x` for every standard `n` (including `c^0 = 1`).
pub fn all_powers_below(c: &Element, x: &Element) -> bool {
    if x.is_standard() {
        return false;
    }
    if c.is_standard() {
        return true;
    }
    let (dc, dx) = (c.deg().unwrap(), x.deg().unwrap());
    dc.infinitesimal_against(dx)
}

/// Checks a witness against the literal definition of the level.
pub fn check_witness(level: EquivLevel, a: &Element, b: &Element, w: &Witness) -> bool {
    if a.is_standard() || b.is_standard() {
        return false;
    }
    match (level.get(), w) {
        (0, Witness::BoundN(n)) => {
            let k = Element::from_u64(a.dim(), *n);
            *n >= 1 && *a < b.add(&k) && *b < a.add(&k)
        }
        (2, Witness::BoundN(n)) => *n >= 1 && *a < b.scale(*n) && *b < a.scale(*n),
        (4, Witness::BoundN(n)) => *n >= 1 && *a < b.pow(*n) && *b < a.pow(*n),
        (1, Witness::Companion(c)) => {
            all_multiples_below(c, a) && all_multiples_below(c, b) && *a < b.add(c) && *b < a.add(c)
        }
        (3, Witness::Companion(c)) => {
            all_powers_below(c, a) && all_powers_below(c, b) && *a < b.mul(c) && *b < a.mul(c)
        }
        _ => false,
    }
}

/// Brute-force witness search within `bounds`.
pub fn search(level: EquivLevel, a: &Element, b: &Element, bounds: &SearchBounds) -> SearchOutcome {
    if a.is_standard() || b.is_standard() {
        return SearchOutcome::Exhausted;
    }
    if level.takes_bound() {
        // level 4 powers are built incrementally
        if level.get() == 4 {
            let (mut pa, mut pb) = (a.clone(), b.clone());
            for n in 1..=bounds.n_max {
                if *a < pb && *b < pa {
                    return SearchOutcome::Found(Witness::BoundN(n));
                }
                pa = pa.mul(a);
                pb = pb.mul(b);
            }
            return SearchOutcome::Exhausted;
        }
        return (1..=bounds.n_max)
            .map(Witness::BoundN)
            .find(|w| check_witness(level, a, b, w))
            .map_or(SearchOutcome::Exhausted, SearchOutcome::Found);
    }
    bounds
        .companion_pool
        .iter()
        .map(|c| Witness::Companion(c.clone()))
        .find(|w| check_witness(level, a, b, w))
        .map_or(SearchOutcome::Exhausted, SearchOutcome::Found)
}

/// Certifies a negative verdict from the definition: shows that no standard
/// `n` (levels 0, 2, 4) or admissible `c` (levels 1, 3) can satisfy the
/// inequalities, by an Archimedean argument on degrees.
pub fn check_refutation(level: EquivLevel, a: &Element, b: &Element) -> bool {
    if a.is_standard() || b.is_standard() {
        return false;
    }
    let (da, db) = (a.deg().unwrap(), b.deg().unwrap());
    let diff = a.abs_diff(b);
    match level.get() {
        // |a - b| < n fails for all n iff |a - b| is nonstandard
        0 => !diff.is_standard(),
        // admissible c have deg c < min(deg a, deg b); all are below |a - b| iff
        // deg |a - b| >= min(deg a, deg b)
        1 => diff.deg().is_some_and(|dd| dd >= da.min(db)),
        // the element of larger degree exceeds every standard multiple of the other
        2 => da != db,
        // admissible c have degree infinitesimal against both; such c can
        // bridge the degree gap only when the gap is itself infinitesimal
        3 => {
            if da == db {
                return false;
            }
            let gap = if da > db { da.sub(db) } else { db.sub(da) };
            let finest = da.rank().max(db.rank());
            gap.rank() <= finest
        }
        // a < b^n fails for all n iff deg a is infinitely larger than deg b
        4 => da.rank() != db.rank(),
        _ => false,
    }
}
