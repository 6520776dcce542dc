//! Seeded element sampler. Besides independent draws it produces pairs
//! related at a chosen level, so that property checks with an equivalence
//! premise are not vacuous.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::series::{Element, Exponent, ModelError, Series, Term};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleProfile {
    pub dim: usize,
    /// Maximum number of positive-exponent terms.
    pub max_terms: usize,
    pub denom_bound: u64,
    pub coeff_bound: u64,
    /// Bound on exponent components (before division by the denominator).
    pub exp_bound: u64,
    /// Chance, in percent, that [`Sampler::element`] is nonstandard.
    pub nonstandard_percent: u8,
    pub seed: u64,
}

impl SampleProfile {
    pub fn new(dim: usize, seed: u64) -> Self {
        SampleProfile { dim, max_terms: 3, denom_bound: 3, coeff_bound: 9, exp_bound: 3, nonstandard_percent: 90, seed }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |what: &str| Err(ModelError::InvalidConfig(format!("sample profile: {what}")));
        if !(1..=2).contains(&self.dim) {
            return bad("dim must be 1 or 2");
        }
        if self.max_terms < 1 || self.denom_bound < 1 || self.coeff_bound < 1 || self.exp_bound < 1 {
            return bad("all bounds must be >= 1");
        }
        if self.nonstandard_percent > 100 {
            return bad("nonstandard_percent must be <= 100");
        }
        Ok(())
    }
}

pub struct Sampler {
    profile: SampleProfile,
    rng: ChaCha8Rng,
}

/// One element drawn from a fresh sampler for `profile`.
pub fn sample(profile: &SampleProfile) -> Result<Element, ModelError> {
    Ok(Sampler::new(profile.clone())?.element())
}

impl Sampler {
    pub fn new(profile: SampleProfile) -> Result<Self, ModelError> {
        Self::with_stream(profile, 0)
    }

    /// An independent stream under the same seed, for per-case determinism.
    pub fn with_stream(profile: SampleProfile, stream: u64) -> Result<Self, ModelError> {
        profile.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
        rng.set_stream(stream);
        Ok(Sampler { profile, rng })
    }

    pub fn profile(&self) -> &SampleProfile {
        &self.profile
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn dim(&self) -> usize {
        self.profile.dim
    }

    pub fn chance(&mut self, percent: u32) -> bool {
        self.rng.gen_range(0..100) < percent
    }

    fn fraction(&mut self, num_bound: i64) -> BigRational {
        let den = self.rng.gen_range(1..=self.profile.denom_bound as i64);
        let num = self.rng.gen_range(-num_bound * den..=num_bound * den);
        BigRational::new(num.into(), den.into())
    }

    fn positive_fraction(&mut self, num_bound: i64) -> BigRational {
        let den = self.rng.gen_range(1..=self.profile.denom_bound as i64);
        let num = self.rng.gen_range(1..=num_bound * den);
        BigRational::new(num.into(), den.into())
    }

    pub fn coefficient(&mut self) -> BigRational {
        let c = self.positive_fraction(self.profile.coeff_bound as i64);
        if self.rng.gen_bool(0.5) {
            -c
        } else {
            c
        }
    }

    pub fn positive_coefficient(&mut self) -> BigRational {
        if self.chance(30) {
            return BigRational::from_integer(1.into());
        }
        self.positive_fraction(self.profile.coeff_bound as i64)
    }

    /// A positive exponent.
    pub fn exponent(&mut self) -> Exponent {
        let eb = self.profile.exp_bound as i64;
        if self.profile.dim == 1 {
            return Exponent::new(vec![self.positive_fraction(eb)]);
        }
        if self.chance(25) {
            return Exponent::new(vec![BigRational::from_integer(0.into()), self.positive_fraction(eb)]);
        }
        Exponent::new(vec![self.positive_fraction(eb), self.fraction(eb)])
    }

    /// A positive exponent strictly below the positive exponent `e`.
    pub fn exponent_below(&mut self, e: &Exponent) -> Exponent {
        let den = self.rng.gen_range(2..=self.profile.denom_bound as i64 + 1);
        let num = self.rng.gen_range(1..den);
        let scaled = e.scale(&BigRational::new(num.into(), den.into()));
        if self.profile.dim == 2 && scaled.components()[0] > BigRational::from_integer(0.into()) && self.chance(50) {
            let eb = self.profile.exp_bound as i64;
            return Exponent::new(vec![scaled.components()[0].clone(), self.fraction(eb)]);
        }
        scaled
    }

    pub fn standard(&mut self) -> Element {
        Element::from_u64(self.profile.dim, self.rng.gen_range(0..=self.profile.coeff_bound * 3))
    }

    pub fn element(&mut self) -> Element {
        if self.chance(self.profile.nonstandard_percent as u32) {
            self.nonstandard()
        } else {
            self.standard()
        }
    }

    pub fn nonstandard(&mut self) -> Element {
        let e = self.exponent();
        let c = self.positive_coefficient();
        self.element_with_leading(e, c)
    }

    /// `c * t^e` plus random lower-order terms and an integer constant.
    pub fn element_with_leading(&mut self, e: Exponent, c: BigRational) -> Element {
        let dim = self.profile.dim;
        let mut terms = vec![Term { exponent: e.clone(), coeff: c }];
        let extra = self.rng.gen_range(0..self.profile.max_terms);
        for _ in 0..extra {
            let exponent = self.exponent_below(&e);
            let coeff = self.coefficient();
            terms.push(Term { exponent, coeff });
        }
        let k = self.profile.coeff_bound as i64;
        let constant = self.rng.gen_range(-k..=k);
        terms.push(Term { exponent: Exponent::zero(dim), coeff: BigRational::from_integer(constant.into()) });
        Element::try_new(Series::from_terms(dim, terms)).expect("leading term dominates and is positive")
    }

    /// An element that is `level`-equivalent to the nonstandard `a` (for
    /// levels 3 and 4 in `d = 1`, and level 3 when `deg a` has first
    /// component 0, the draw falls back to level 2).
    pub fn related(&mut self, a: &Element, level: u8) -> Element {
        let dim = self.profile.dim;
        let deg = a.deg().expect("related() needs a nonstandard element").clone();
        match level {
            0 => {
                let k: i64 = self.rng.gen_range(-20..=20);
                a.add_int(&BigInt::from(k)).unwrap_or_else(|_| a.add_int(&BigInt::from(k.abs())).unwrap())
            }
            1 => {
                let e = self.exponent_below(&deg);
                let c = self.coefficient();
                let s = a.series().add(&Series::monomial(e, c));
                let b = Element::try_new(s).expect("lower-order perturbation keeps the invariants");
                if self.chance(50) {
                    self.related(&b, 0)
                } else {
                    b
                }
            }
            2 => {
                let c = self.positive_coefficient();
                self.element_with_leading(deg, c)
            }
            3 if dim == 2 && deg.components()[0] > BigRational::from_integer(0.into()) => {
                let mut shifted = self.fraction(self.profile.exp_bound as i64);
                if shifted == BigRational::from_integer(0.into()) {
                    shifted = BigRational::from_integer(1.into());
                }
                let e = Exponent::new(vec![deg.components()[0].clone(), &deg.components()[1] + shifted]);
                let c = self.positive_coefficient();
                self.element_with_leading(e, c)
            }
            3 => self.related(a, 2),
            _ => {
                let r = self.positive_fraction(3);
                let e = if dim == 2 && deg.components()[0] > BigRational::from_integer(0.into()) {
                    let eb = self.profile.exp_bound as i64;
                    Exponent::new(vec![&deg.components()[0] * r, self.fraction(eb)])
                } else {
                    deg.scale(&r)
                };
                let c = self.positive_coefficient();
                self.element_with_leading(e, c)
            }
        }
    }

    /// A nonstandard pair: related at a random level 0..=4, or independent.
    pub fn pair(&mut self) -> (Element, Element) {
        let a = self.nonstandard();
        let pick = self.rng.gen_range(0..6u8);
        let b = if pick == 5 { self.nonstandard() } else { self.related(&a, pick) };
        if self.chance(50) {
            (b, a)
        } else {
            (a, b)
        }
    }
}
