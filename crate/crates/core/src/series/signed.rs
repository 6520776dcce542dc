use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Exponent;

trait SignOrd {
    fn sign_ord(&self) -> Ordering;
}

/// Sign of the difference of two canonical (descending) term lists.
pub(crate) fn cmp_terms(a: &[Term], b: &[Term]) -> Ordering {
    let (mut a, mut b) = (a.iter().peekable(), b.iter().peekable());
    loop {
        match (a.peek(), b.peek()) {
            (None, None) => return Ordering::Equal,
            (Some(x), None) => return x.coeff.sign_ord(),
            (None, Some(y)) => return y.coeff.sign_ord().reverse(),
            (Some(x), Some(y)) => match x.exponent.cmp(&y.exponent) {
                Ordering::Greater => return x.coeff.sign_ord(),
                Ordering::Less => return y.coeff.sign_ord().reverse(),
                Ordering::Equal => {
                    let c = x.coeff.cmp(&y.coeff);
                    if c != Ordering::Equal {
                        return c;
                    }
                    a.next();
                    b.next();
                }
            },
        }
    }
}

impl SignOrd for BigRational {
    fn sign_ord(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

/// One term `coeff * t^exponent`; the coefficient is never zero inside a [`Series`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub exponent: Exponent,
    pub coeff: BigRational,
}

/// A finite generalized power series with arbitrary signs and exponents.
///
/// Terms are kept strictly descending by exponent with zero coefficients
/// dropped, so structural equality is equality of series. This is the
/// working type behind [`super::Element`]; intermediate results such as
/// differences and division remainders live here.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Series {
    dim: usize,
    terms: Vec<Term>,
}

impl Series {
    pub fn zero(dim: usize) -> Self {
        Series { dim, terms: Vec::new() }
    }

    pub fn constant(dim: usize, c: BigRational) -> Self {
        Self::monomial(Exponent::zero(dim), c)
    }

    pub fn from_int(dim: usize, n: impl Into<BigInt>) -> Self {
        Self::constant(dim, BigRational::from_integer(n.into()))
    }

    pub fn monomial(exponent: Exponent, coeff: BigRational) -> Self {
        let dim = exponent.dim();
        if coeff.is_zero() {
            return Series::zero(dim);
        }
        Series { dim, terms: vec![Term { exponent, coeff }] }
    }

    /// Canonicalizes an arbitrary list of terms: sorts, merges equal exponents,
    /// drops zeros.
    pub fn from_terms(dim: usize, mut raw: Vec<Term>) -> Self {
        for t in &raw {
            assert_eq!(t.exponent.dim(), dim, "term dimension mismatch");
        }
        raw.sort_by(|a, b| b.exponent.cmp(&a.exponent));
        let mut terms: Vec<Term> = Vec::with_capacity(raw.len());
        for t in raw {
            match terms.last_mut() {
                Some(last) if last.exponent == t.exponent => last.coeff += t.coeff,
                _ => terms.push(t),
            }
        }
        terms.retain(|t| !t.coeff.is_zero());
        Series { dim, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Term> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn deg(&self) -> Option<&Exponent> {
        self.terms.first().map(|t| &t.exponent)
    }

    /// Sign of the series in the ordered field: sign of the leading coefficient.
    pub fn sign(&self) -> Ordering {
        match self.terms.first() {
            None => Ordering::Equal,
            Some(t) if t.coeff.is_positive() => Ordering::Greater,
            Some(_) => Ordering::Less,
        }
    }

    /// Sign of `self - other` without forming the difference.
    pub fn cmp_value(&self, other: &Series) -> Ordering {
        cmp_terms(&self.terms, &other.terms)
    }

    pub fn coeff_at(&self, e: &Exponent) -> Option<&BigRational> {
        self.terms.binary_search_by(|t| e.cmp(&t.exponent)).ok().map(|i| &self.terms[i].coeff)
    }

    pub fn constant_coeff(&self) -> BigRational {
        self.coeff_at(&Exponent::zero(self.dim)).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Whether every exponent is zero (the series is a constant, possibly 0).
    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.exponent.is_zero())
    }

    /// Keeps only the terms whose exponent satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(&Exponent) -> bool) -> Series {
        Series { dim: self.dim, terms: self.terms.iter().filter(|t| keep(&t.exponent)).cloned().collect() }
    }

    pub fn neg(&self) -> Series {
        Series {
            dim: self.dim,
            terms: self.terms.iter().map(|t| Term { exponent: t.exponent.clone(), coeff: -&t.coeff }).collect(),
        }
    }

    pub fn add(&self, other: &Series) -> Series {
        self.merge(other, |c| c.clone())
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.merge(other, |c| -c)
    }

    fn merge(&self, other: &Series, map_other: impl Fn(&BigRational) -> BigRational) -> Series {
        assert_eq!(self.dim, other.dim, "series dimension mismatch");
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (x, y) = (&self.terms[i], &other.terms[j]);
            match x.exponent.cmp(&y.exponent) {
                Ordering::Greater => {
                    out.push(x.clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(Term { exponent: y.exponent.clone(), coeff: map_other(&y.coeff) });
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &x.coeff + map_other(&y.coeff);
                    if !c.is_zero() {
                        out.push(Term { exponent: x.exponent.clone(), coeff: c });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(other.terms[j..].iter().map(|y| Term { exponent: y.exponent.clone(), coeff: map_other(&y.coeff) }));
        Series { dim: self.dim, terms: out }
    }

    pub fn mul(&self, other: &Series) -> Series {
        assert_eq!(self.dim, other.dim, "series dimension mismatch");
        if self.is_zero() || other.is_zero() {
            return Series::zero(self.dim);
        }
        if other.terms.len() == 1 {
            return self.mul_term(&other.terms[0].exponent, &other.terms[0].coeff);
        }
        if self.terms.len() == 1 {
            return other.mul_term(&self.terms[0].exponent, &self.terms[0].coeff);
        }
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for x in &self.terms {
            for y in &other.terms {
                raw.push(Term { exponent: x.exponent.add(&y.exponent), coeff: &x.coeff * &y.coeff });
            }
        }
        Series::from_terms(self.dim, raw)
    }

    /// Multiplies by the single term `coeff * t^exponent`.
    pub fn mul_term(&self, exponent: &Exponent, coeff: &BigRational) -> Series {
        if coeff.is_zero() {
            return Series::zero(self.dim);
        }
        let shift = !exponent.is_zero();
        Series {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    exponent: if shift { t.exponent.add(exponent) } else { t.exponent.clone() },
                    coeff: &t.coeff * coeff,
                })
                .collect(),
        }
    }

    pub fn scale(&self, factor: &BigRational) -> Series {
        if factor.is_zero() {
            return Series::zero(self.dim);
        }
        self.map_coeffs(|c| c * factor)
    }

    pub fn scale_int(&self, factor: &BigInt) -> Series {
        if factor.is_zero() {
            return Series::zero(self.dim);
        }
        self.map_coeffs(|c| c * factor)
    }

    fn map_coeffs(&self, f: impl Fn(&BigRational) -> BigRational) -> Series {
        let terms = self.terms.iter().map(|t| Term { exponent: t.exponent.clone(), coeff: f(&t.coeff) }).collect();
        Series { dim: self.dim, terms }
    }

    pub fn pow(&self, mut n: u64) -> Series {
        let mut result = Series::from_int(self.dim, 1);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].exponent.is_zero() && self.terms[0].coeff.is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn t(e: i64, c: i64) -> Series {
        Series::monomial(Exponent::from_ints(&[e]), r(c))
    }

    #[test]
    fn canonical_form_merges_and_drops() {
        let s = Series::from_terms(
            1,
            vec![
                Term { exponent: Exponent::from_ints(&[1]), coeff: r(2) },
                Term { exponent: Exponent::from_ints(&[3]), coeff: r(1) },
                Term { exponent: Exponent::from_ints(&[1]), coeff: r(-2) },
            ],
        );
        assert_eq!(s, t(3, 1));
    }

    #[test]
    fn difference_of_squares() {
        let a = t(1, 1).add(&t(0, 1));
        let b = t(1, 1).sub(&t(0, 1));
        assert_eq!(a.mul(&b), t(2, 1).sub(&t(0, 1)));
    }

    #[test]
    fn sign_follows_leading_term() {
        assert_eq!(t(1, -1).add(&t(0, 100)).sign(), Ordering::Less);
        assert_eq!(Series::zero(1).sign(), Ordering::Equal);
    }

    #[test]
    fn cmp_value_matches_difference_sign() {
        let a = t(2, 1).add(&t(1, -3)).add(&t(0, 4));
        let b = t(2, 1).add(&t(1, -3)).add(&t(0, 5));
        let c = t(2, 1).add(&t(1, 2));
        for (x, y) in [(&a, &b), (&b, &c), (&a, &c), (&c, &a), (&a, &a)] {
            assert_eq!(x.cmp_value(y), x.sub(y).sign());
        }
        assert_eq!(Series::zero(1).cmp_value(&t(1, -1)), Ordering::Greater);
    }

    #[test]
    fn pow_by_squaring() {
        let s = t(1, 1).add(&t(0, 1));
        assert_eq!(s.pow(3), s.mul(&s).mul(&s));
        assert!(s.pow(0).is_one());
    }
}
