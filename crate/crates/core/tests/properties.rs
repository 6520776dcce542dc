use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use nsarith::automorph;
use nsarith::cli::{format_element, parse_element, SampleProfile, Sampler};
use nsarith::equiv::{self, EquivLevel};
use nsarith::oracle;
use nsarith::series::{Element, Exponent, ModelConfig, ModelError, Series, Term};

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn exponent(dim: usize) -> BoxedStrategy<Exponent> {
    if dim == 1 {
        (1i64..=12, 1i64..=3).prop_map(|(n, d)| Exponent::new(vec![rat(n, d)])).boxed()
    } else {
        (0i64..=6, -6i64..=6, 1i64..=3)
            .prop_filter("positive exponent", |(x, y, _)| *x > 0 || *y > 0)
            .prop_map(|(x, y, d)| Exponent::new(vec![rat(x, d), rat(y, d)]))
            .boxed()
    }
}

/// Up to three positive terms with nonzero rational coefficients plus an
/// integer constant, sign-normalized so the leading coefficient is positive.
fn element(dim: usize) -> BoxedStrategy<Element> {
    let term = (exponent(dim), -9i64..=9, 1i64..=4)
        .prop_filter("nonzero coefficient", |(_, n, _)| *n != 0)
        .prop_map(|(e, n, d)| Term { exponent: e, coeff: rat(n, d) });
    (prop::collection::vec(term, 0..=3), -9i64..=9)
        .prop_map(move |(terms, k)| {
            let mut s = Series::from_terms(dim, terms);
            if s.sign() == Ordering::Less {
                s = s.neg();
            }
            let k = if s.is_zero() { k.abs() } else { k };
            Element::try_new(s.add(&Series::from_int(dim, k))).expect("normalized element")
        })
        .boxed()
}

fn nonstandard(dim: usize) -> BoxedStrategy<Element> {
    element(dim).prop_filter("nonstandard", |e| !e.is_standard()).boxed()
}

fn any_dim() -> impl Strategy<Value = usize> {
    prop_oneof![Just(1usize), Just(2usize)]
}

fn triple() -> impl Strategy<Value = (Element, Element, Element)> {
    any_dim().prop_flat_map(|d| (element(d), element(d), element(d)))
}

fn level() -> impl Strategy<Value = EquivLevel> {
    (0u8..=4).prop_map(|l| EquivLevel::new(l).unwrap())
}

/// A nonstandard anchor and a mate related to it at `level`, drawn by the
/// library sampler from a proptest-chosen seed.
fn related_pair(dim: usize, level: u8) -> impl Strategy<Value = (Element, Element)> {
    any::<u64>().prop_map(move |seed| {
        let mut s = Sampler::new(SampleProfile::new(dim, seed)).unwrap();
        let a = s.nonstandard();
        let b = s.related(&a, level);
        (a, b)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn semiring_laws((a, b, c) in triple()) {
        let dim = a.dim();
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.add(&Element::zero(dim)), a.clone());
        prop_assert_eq!(a.mul(&Element::one(dim)), a.clone());
        prop_assert!(a.mul(&Element::zero(dim)).is_zero());
    }

    #[test]
    fn order_is_compatible_with_operations((a, b, c) in triple()) {
        let dim = a.dim();
        prop_assert_eq!(a.cmp(&b), a.add(&c).cmp(&b.add(&c)));
        if !c.is_zero() {
            prop_assert_eq!(a.cmp(&b), a.mul(&c).cmp(&b.mul(&c)));
        }
        // discreteness: nothing lies strictly between a and a + 1
        let next = a.add(&Element::one(dim));
        prop_assert!(b <= a || next <= b);
    }

    #[test]
    fn subtraction_inverts_addition((a, b, _c) in triple()) {
        prop_assert_eq!(a.add(&b).sub(&b).unwrap(), a.clone());
        match a.sub(&b) {
            Ok(d) => prop_assert_eq!(d.add(&b), a.clone()),
            Err(e) => {
                prop_assert_eq!(e, ModelError::Underflow);
                prop_assert!(a < b);
            }
        }
    }

    #[test]
    fn scalar_division(a in any_dim().prop_flat_map(element), n in 1u64..=12) {
        let (q, r) = a.divmod_scalar(n);
        prop_assert!(r < n);
        prop_assert_eq!(q.scale(n).add(&Element::from_u64(a.dim(), r)), a.clone());
        let c = a.ceil_div_scalar(n);
        prop_assert!(c.scale(n) >= a);
        prop_assert!(c.is_zero() || c.sub(&Element::one(a.dim())).unwrap().scale(n) < a);
    }

    #[test]
    fn euclidean_division((a, b, _c) in triple()) {
        prop_assume!(!b.is_zero());
        match a.divmod(&b, 64) {
            Ok((q, r)) => {
                prop_assert!(r < b);
                prop_assert_eq!(q.mul(&b).add(&r), a.clone());
            }
            Err(e) => {
                let partial = matches!(e, ModelError::NonTerminatingQuotient { .. });
                prop_assert!(partial, "unexpected error {}", e);
            }
        }
    }

    #[test]
    fn root_floor_brackets(a in any_dim().prop_flat_map(element), k in 1u64..=4) {
        match a.root_floor(k, 64) {
            Ok(m) => {
                prop_assert!(m.pow(k) <= a);
                prop_assert!(a < m.add(&Element::one(a.dim())).pow(k));
            }
            Err(e) => {
                let partial = matches!(
                    e,
                    ModelError::CoefficientNotRepresentable { .. } | ModelError::NonTerminatingQuotient { .. }
                );
                prop_assert!(partial, "unexpected error {}", e);
            }
        }
    }

    #[test]
    fn levels_are_equivalence_relations(lv in level(), (a, b, c) in any_dim().prop_flat_map(|d| (nonstandard(d), nonstandard(d), nonstandard(d)))) {
        prop_assert!(equiv::holds(lv, &a, &a).unwrap());
        let ab = equiv::holds(lv, &a, &b).unwrap();
        prop_assert_eq!(ab, equiv::holds(lv, &b, &a).unwrap());
        if ab && equiv::holds(lv, &b, &c).unwrap() {
            prop_assert!(equiv::holds(lv, &a, &c).unwrap());
        }
        if let Some(next) = lv.next() {
            prop_assert!(!ab || equiv::holds(next, &a, &b).unwrap());
        }
    }

    #[test]
    fn verdicts_are_certified(lv in level(), l in 0u8..=4, dim in any_dim(), seed in any::<u64>()) {
        let mut s = Sampler::new(SampleProfile::new(dim, seed)).unwrap();
        let a = s.nonstandard();
        let b = s.related(&a, l);
        let cfg = ModelConfig::new(dim).unwrap();
        let v = equiv::decide(lv, &a, &b, &cfg).unwrap();
        if v.equivalent {
            prop_assert!(oracle::check_witness(lv, &a, &b, v.witness.as_ref().unwrap()));
        } else {
            prop_assert!(oracle::check_refutation(lv, &a, &b));
        }
    }

    #[test]
    fn automorphism_from_e2_maps_anchor((a, b) in any_dim().prop_flat_map(|d| related_pair(d, 2))) {
        let cfg = ModelConfig::new(a.dim()).unwrap();
        let d = automorph::build_from_e2(&a, &b, &cfg).unwrap();
        prop_assert_eq!(automorph::apply(&d, &a).unwrap(), b.clone());
        prop_assert_eq!(automorph::apply_inverse(&d, &b).unwrap(), a.clone());
    }

    #[test]
    fn automorphism_from_e3_maps_anchor((a, b) in related_pair(2, 3)) {
        let cfg = ModelConfig::new(2).unwrap();
        let d = automorph::build_from_e3(&a, &b, &cfg).unwrap();
        prop_assert_eq!(automorph::apply(&d, &a).unwrap(), b.clone());
        let x = a.add(&b);
        let y = automorph::apply(&d, &x).unwrap();
        prop_assert_eq!(automorph::apply_inverse(&d, &y).unwrap(), x);
    }

    #[test]
    fn text_round_trip(a in any_dim().prop_flat_map(element)) {
        let text = format_element(&a);
        prop_assert_eq!(parse_element(&text, a.dim()).unwrap(), a.clone());
    }

    #[test]
    fn json_round_trip(a in any_dim().prop_flat_map(element)) {
        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Element>(&json).unwrap(), a);
    }

    #[test]
    fn integer_shift_round_trip(a in any_dim().prop_flat_map(nonstandard), k in -50i64..=50) {
        let shifted = a.add_int(&BigInt::from(k)).unwrap();
        prop_assert_eq!(shifted.add_int(&BigInt::from(-k)).unwrap(), a.clone());
        prop_assert!(equiv::holds(EquivLevel::new(0).unwrap(), &a, &shifted).unwrap());
    }
}
