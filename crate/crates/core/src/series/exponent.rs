use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A point of the degree lattice `Q^d`, ordered lexicographically.
/// Components are shared, so clones are cheap.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponent(Arc<[BigRational]>);

impl Exponent {
    pub fn new(components: Vec<BigRational>) -> Self {
        assert!(!components.is_empty(), "exponent needs at least one component");
        Exponent(components.into())
    }

    pub fn zero(dim: usize) -> Self {
        Exponent(vec![BigRational::zero(); dim].into())
    }

    /// The `i`-th unit vector.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![BigRational::zero(); dim];
        v[i] = BigRational::one();
        Exponent(v.into())
    }

    pub fn from_ints(components: &[i64]) -> Self {
        Exponent(components.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect())
    }

    /// Builds from `(numerator, denominator)` pairs.
    pub fn from_fracs(components: &[(i64, i64)]) -> Self {
        Exponent(components.iter().map(|&(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q))).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    /// Sign in the lexicographic order.
    pub fn sign(&self) -> Ordering {
        for c in self.0.iter() {
            if c.is_positive() {
                return Ordering::Greater;
            }
            if c.is_negative() {
                return Ordering::Less;
            }
        }
        Ordering::Equal
    }

    /// Index of the first nonzero component; `None` for the zero vector.
    ///
    /// Two nonzero exponents of the same sign lie in the same Archimedean
    /// class exactly when their ranks agree, and a smaller rank is a larger
    /// class.
    pub fn rank(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        debug_assert_eq!(self.dim(), other.dim());
        Exponent(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Exponent) -> Exponent {
        debug_assert_eq!(self.dim(), other.dim());
        Exponent(self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, factor: &BigRational) -> Exponent {
        Exponent(self.0.iter().map(|c| c * factor).collect())
    }

    pub fn scale_int(&self, factor: u64) -> Exponent {
        self.scale(&BigRational::from_integer(BigInt::from(factor)))
    }

    pub fn neg(&self) -> Exponent {
        Exponent(self.0.iter().map(|c| -c).collect())
    }

    /// Componentwise midpoint; strictly between `self` and `other` when they differ.
    pub fn midpoint(&self, other: &Exponent) -> Exponent {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        self.add(other).scale(&half)
    }

    /// `n * self < other` for every standard `n >= 1` (both assumed positive).
    pub fn infinitesimal_against(&self, other: &Exponent) -> bool {
        match (self.rank(), other.rank()) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(r), Some(s)) => r > s,
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.dim(), other.dim(), "exponent dimension mismatch");
        self.0.cmp(&other.0)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lex_order() {
        assert!(Exponent::from_ints(&[1, 0]) > Exponent::from_ints(&[0, 9]));
        assert!(Exponent::from_ints(&[1, -5]) > Exponent::zero(2));
        assert!(Exponent::from_ints(&[0, -1]).is_negative());
    }

    #[test]
    fn archimedean_rank() {
        let small = Exponent::from_ints(&[0, 7]);
        let big = Exponent::from_ints(&[1, -3]);
        assert!(small.infinitesimal_against(&big));
        assert!(!big.infinitesimal_against(&small));
        assert!(!Exponent::from_ints(&[2]).infinitesimal_against(&Exponent::from_ints(&[1])));
        assert!(Exponent::zero(2).infinitesimal_against(&small));
    }

    #[test]
    fn midpoint_is_between() {
        let a = Exponent::from_ints(&[0, 1]);
        let b = Exponent::from_ints(&[2, 0]);
        let m = a.midpoint(&b);
        assert!(a < m && m < b);
        assert_eq!(m, Exponent::from_fracs(&[(1, 1), (1, 2)]));
    }
}
