//! Property suites over seeded samples. Every case draws from its own
//! sampler stream, so reports are reproducible case by case and the JSON
//! output is byte-identical for a fixed seed.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use super::sample::{SampleProfile, Sampler};
use super::text::{format_element, parse_element};
use crate::analysis::{self, AnalysisError, Direction};
use crate::automorph::{self, Descriptor};
use crate::equiv::{self, EquivLevel, Witness};
use crate::oracle::{self, SearchBounds};
use crate::series::{Element, Exponent, ModelConfig, ModelError};

pub const SUITE_NAMES: &[&str] = &[
    "algebra",
    "refinement",
    "convexity",
    "agreement",
    "separation",
    "automorph",
    "sequences",
    "roots",
    "embed",
    "roundtrip",
];

const MAX_LISTED: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteParams {
    pub samples: usize,
    pub seed: u64,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub dim: usize,
    pub seed: u64,
    pub cases: usize,
    pub checks: u64,
    pub violation_count: u64,
    /// The first few violations, in case order.
    pub violations: Vec<String>,
    pub stats: BTreeMap<String, u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub exhibits: Vec<Exhibit>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    pub fn stat(&self, key: &str) -> u64 {
        self.stats.get(key).copied().unwrap_or(0)
    }
}

/// A pair separating two consecutive levels, with both directions checked
/// against the definitions.
#[derive(Clone, Debug, Serialize)]
pub struct Exhibit {
    pub finer: EquivLevel,
    pub coarser: EquivLevel,
    pub a: String,
    pub b: String,
    pub witness: Witness,
    pub finer_refuted: bool,
    pub coarser_witnessed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuiteError {
    #[error("unknown suite {0:?}; available: all, {list}", list = SUITE_NAMES.join(", "))]
    UnknownSuite(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

struct Recorder {
    report: SuiteReport,
}

impl Recorder {
    fn new(name: &str, p: &SuiteParams) -> Self {
        Recorder {
            report: SuiteReport {
                suite: name.into(),
                dim: p.dim,
                seed: p.seed,
                cases: 0,
                checks: 0,
                violation_count: 0,
                violations: Vec::new(),
                stats: BTreeMap::new(),
                exhibits: Vec::new(),
            },
        }
    }

    fn check(&mut self, ok: bool, case: usize, what: impl FnOnce() -> String) {
        self.report.checks += 1;
        if !ok {
            self.report.violation_count += 1;
            if self.report.violations.len() < MAX_LISTED {
                self.report.violations.push(format!("case {case}: {}", what()));
            }
        }
    }

    fn count(&mut self, key: &str) {
        *self.report.stats.entry(key.to_string()).or_default() += 1;
    }

    fn finish(mut self, cases: usize) -> SuiteReport {
        self.report.cases = cases;
        self.report
    }
}

fn lv(l: u8) -> EquivLevel {
    EquivLevel::new(l).expect("valid level")
}

fn cfg(p: &SuiteParams) -> ModelConfig {
    ModelConfig::new(p.dim).expect("suite dims are 1 or 2").with_seed(p.seed)
}

/// Sampler for one case: the suite tag selects the high half of the stream id.
fn case_sampler(p: &SuiteParams, tag: u64, case: usize) -> Sampler {
    let profile = SampleProfile::new(p.dim, p.seed);
    Sampler::with_stream(profile, (tag << 32) | case as u64).expect("default profile is valid")
}

fn tag_of(name: &str) -> u64 {
    SUITE_NAMES.iter().position(|n| *n == name).map_or(99, |i| i as u64 + 1)
}

fn f(e: &Element) -> String {
    format_element(e)
}

pub fn run_suite(name: &str, p: &SuiteParams) -> Result<Vec<SuiteReport>, SuiteError> {
    ModelConfig::new(p.dim)?;
    if name == "all" {
        return Ok(SUITE_NAMES
            .iter()
            .map(|n| run_one(n, p))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .flatten()
            .collect());
    }
    run_one(name, p)
}

fn run_one(name: &str, p: &SuiteParams) -> Result<Vec<SuiteReport>, SuiteError> {
    let report = match name {
        "algebra" => algebra(p),
        "refinement" => refinement(p),
        "convexity" => convexity(p),
        "agreement" => agreement(p),
        "separation" => separation(p),
        "automorph" => automorph_suite(p),
        "sequences" => sequences(p),
        "roots" => roots(p),
        "embed" => embed(p),
        "roundtrip" => roundtrip(p),
        other => return Err(SuiteError::UnknownSuite(other.into())),
    };
    Ok(vec![report])
}

/// Semiring laws, translation and multiplication laws of the order,
/// discreteness, and the division and root contracts.
pub fn algebra(p: &SuiteParams) -> SuiteReport {
    let mut r = Recorder::new("algebra", p);
    let cfg = cfg(p);
    let dim = p.dim;
    let (zero, one) = (Element::zero(dim), Element::one(dim));
    for case in 0..p.samples {
        let mut s = case_sampler(p, tag_of("algebra"), case);
        let (x, y, z) = (s.element(), s.element(), s.element());
        let show = || format!("x = {}, y = {}, z = {}", f(&x), f(&y), f(&z));
        r.check(x.add(&y) == y.add(&x), case, || format!("a+b commutes; {}", show()));
        r.check(x.add(&y).add(&z) == x.add(&y.add(&z)), case, || format!("+ associates; {}", show()));
        r.check(x.mul(&y) == y.mul(&x), case, || format!("* commutes; {}", show()));
        r.check(x.mul(&y).mul(&z) == x.mul(&y.mul(&z)), case, || format!("* associates; {}", show()));
        r.check(x.mul(&y.add(&z)) == x.mul(&y).add(&x.mul(&z)), case, || format!("distributes; {}", show()));
        r.check(x.add(&zero) == x && x.mul(&one) == x && x.mul(&zero) == zero, case, || {
            format!("identities; {}", show())
        });
        r.check(x.add(&y).sub(&y).as_ref() == Ok(&x), case, || format!("(x+y)-y = x; {}", show()));

        // order: total, translation invariant, multiplication by positives, discrete
        let lt = x < y;
        r.check(lt == (y > x) && (x == y) == (x.cmp(&y).is_eq()), case, || format!("order consistency; {}", show()));
        if lt {
            r.check(x.add(&z) < y.add(&z), case, || format!("x<y => x+z<y+z; {}", show()));
            if !z.is_zero() {
                r.check(x.mul(&z) < y.mul(&z), case, || format!("x<y, z>0 => xz<yz; {}", show()));
            }
            r.check(x.add(&one) <= y, case, || format!("no element strictly between x and x+1; {}", show()));
            r.check(y.sub(&x).is_ok() && x.sub(&y) == Err(ModelError::Underflow), case, || {
                format!("subtraction domain; {}", show())
            });
            r.count("ordered_pairs");
        }
        r.check(x <= x.add(&y), case, || format!("x <= x+y; {}", show()));

        let n = 1 + (case as u64 % 9);
        let (q, rem) = x.divmod_scalar(n);
        r.check(q.scale(n).add(&Element::from_u64(dim, rem)) == x && rem < n, case, || {
            format!("divmod_scalar by {n}; {}", show())
        });
        let c = x.ceil_div_scalar(n);
        let below = c.sub(&one).map(|c1| c1.scale(n) < x).unwrap_or(true);
        r.check(c.scale(n) >= x && below, case, || format!("ceil_div_scalar by {n}; {}", show()));

        if !y.is_zero() {
            match x.divmod(&y, cfg.div_budget) {
                Ok((q, rem)) => {
                    r.check(q.mul(&y).add(&rem) == x && rem < y, case, || format!("divmod contract; {}", show()));
                    r.count("divmod_ok");
                }
                Err(ModelError::NonTerminatingQuotient { .. }) if dim == 2 => r.count("divmod_nonterminating"),
                Err(e) => r.check(false, case, || format!("divmod failed: {e}; {}", show())),
            }
        }
        let k = 2 + (case as u64 % 2);
        match x.root_floor(k, cfg.div_budget) {
            Ok(m) => {
                let ok = m.pow(k) <= x && x < m.add(&one).pow(k);
                r.check(ok, case, || format!("root_floor({k}) bracket; {}", show()));
                r.count("root_ok");
            }
            Err(ModelError::CoefficientNotRepresentable { .. }) => r.count("root_not_representable"),
            Err(ModelError::NonTerminatingQuotient { .. }) if dim == 2 => r.count("root_nonterminating"),
            Err(e) => r.check(false, case, || format!("root_floor failed: {e}; {}", show())),
        }
    }
    r.finish(p.samples)
}

/// `E^l` implies `E^(l+1)` for l = 0..=3.
pub fn refinement(p: &SuiteParams) -> SuiteReport {
    let mut r = Recorder::new("refinement", p);
    for case in 0..p.samples {
        let mut s = case_sampler(p, tag_of("refinement"), case);
        let (a, b) = s.pair();
        let v: Vec<bool> = EquivLevel::ALL.iter().map(|&l| equiv::holds(l, &a, &b).unwrap()).collect();
        for l in 0..4 {
            if v[l] {
                r.count(&format!("positive_E{l}"));
            }
            r.check(!v[l] || v[l + 1], case, || format!("E{l} without E{}: {} / {}", l + 1, f(&a), f(&b)));
        }
        if v[4] {
            r.count("positive_E4");
        }
    }
    r.finish(p.samples)
}

/// An element strictly between `x` and `z`, when one exists.
fn between(s: &mut Sampler, x: &Element, z: &Element) -> Option<Element> {
    use rand::Rng;
    let dim = x.dim();
    let mut candidates = vec![x.add(z).divmod_scalar(2).0];
    let q: u64 = s.rng().gen_range(2..=9);
    let w: u64 = s.rng().gen_range(1..q);
    candidates.push(x.scale(w).add(&z.scale(q - w)).divmod_scalar(q).0);
    candidates.push(x.add(&Element::one(dim)));
    if let Ok(z1) = z.sub(&Element::one(dim)) {
        candidates.push(z1);
    }
    candidates.into_iter().find(|y| x < y && y < z)
}

/// Convexity of every level, and closure under `+` (levels 0..=4) and `*`
/// (levels 2..=4).
pub fn convexity(p: &SuiteParams) -> SuiteReport {
    let mut r = Recorder::new("convexity", p);
    for case in 0..p.samples {
        let mut s = case_sampler(p, tag_of("convexity"), case);
        for l in 0..=4u8 {
            let level = lv(l);
            let a = s.nonstandard();
            let b = if s.chance(80) { s.related(&a, l) } else { s.nonstandard() };
            let (x, z) = if a <= b { (a, b) } else { (b, a) };
            if let Some(y) = between(&mut s, &x, &z) {
                r.count("triples");
                if equiv::holds(level, &x, &z).unwrap() {
                    r.count(&format!("convex_premise_E{l}"));
                    let ok = equiv::holds(level, &x, &y).unwrap() && equiv::holds(level, &y, &z).unwrap();
                    r.check(ok, case, || format!("E{l} not convex: {} < {} < {}", f(&x), f(&y), f(&z)));
                }
            }

            let a = s.nonstandard();
            let b = s.related(&a, l);
            let c = s.nonstandard();
            let d = s.related(&c, l);
            r.count("quadruples");
            if equiv::holds(level, &a, &b).unwrap() && equiv::holds(level, &c, &d).unwrap() {
                r.count(&format!("closure_premise_E{l}"));
                let sum = equiv::holds(level, &a.add(&c), &b.add(&d)).unwrap();
                r.check(sum, case, || format!("E{l} not closed under +: {} {} {} {}", f(&a), f(&b), f(&c), f(&d)));
                if l >= 2 {
                    let prod = equiv::holds(level, &a.mul(&c), &b.mul(&d)).unwrap();
                    r.check(prod, case, || format!("E{l} not closed under *: {} {} {} {}", f(&a), f(&b), f(&c), f(&d)));
                }
            }
        }
    }
    r.finish(p.samples)
}

/// Closed-form verdicts against the definitions: witnesses pass the literal
/// check, negative verdicts carry a refutation, bound witnesses are minimal,
/// and bounded search never contradicts a verdict.
pub fn agreement(p: &SuiteParams) -> SuiteReport {
    let mut r = Recorder::new("agreement", p);
    let cfg = cfg(p);
    for case in 0..p.samples {
        let mut s = case_sampler(p, tag_of("agreement"), case);
        let (a, b) = s.pair();
        let show = || format!("{} / {}", f(&a), f(&b));
        let bounds = SearchBounds::from_lattice(&a, &b, 32);
        for level in EquivLevel::ALL {
            let l = level.get();
            let v = match equiv::decide(level, &a, &b, &cfg) {
                Ok(v) => v,
                Err(e) => {
                    r.check(false, case, || format!("decide E{l} failed: {e}; {}", show()));
                    continue;
                }
            };
            if v.equivalent {
                r.count("positive_verdicts");
                let w = v.witness.as_ref();
                let ok = w.is_some_and(|w| oracle::check_witness(level, &a, &b, w));
                r.check(ok, case, || format!("E{l} witness fails the definition; {}", show()));
                if level.takes_bound() {
                    let n = equiv::minimal_bound_n(level, &a, &b, &cfg).unwrap();
                    let passes = oracle::check_witness(level, &a, &b, &Witness::BoundN(n));
                    let below = n > 1 && oracle::check_witness(level, &a, &b, &Witness::BoundN(n - 1));
                    r.check(passes && !below, case, || format!("E{l} bound {n} not minimal; {}", show()));
                    r.count("minimal_bounds");
                }
            } else {
                r.count("negative_verdicts");
                r.check(oracle::check_refutation(level, &a, &b), case, || format!("E{l} refutation fails; {}", show()));
            }
            // the search is sound, and complete within its bound for n-levels
            let found = oracle::search(level, &a, &b, &bounds);
            if let oracle::SearchOutcome::Found(w) = &found {
                r.count("search_found");
                r.check(v.equivalent && oracle::check_witness(level, &a, &b, w), case, || {
                    format!("search found an E{l} witness against the verdict; {}", show())
                });
            } else if v.equivalent && matches!(l, 0 | 2) {
                let n = equiv::minimal_bound_n(level, &a, &b, &cfg).unwrap();
                r.check(n > bounds.n_max, case, || format!("search missed E{l} witness {n}; {}", show()));
            }
        }
    }
    r.finish(p.samples)
}

fn exhibit(r: &mut Recorder, cfg: &ModelConfig, finer: u8, a: &Element, b: &Element) {
    let (fl, cl) = (lv(finer), lv(finer + 1));
    let v = equiv::decide(cl, a, b, cfg).ok();
    let witness = v.as_ref().and_then(|v| v.witness.clone());
    let coarser_witnessed = witness.as_ref().is_some_and(|w| oracle::check_witness(cl, a, b, w));
    let finer_refuted = oracle::check_refutation(fl, a, b) && !equiv::holds(fl, a, b).unwrap_or(true);
    r.check(coarser_witnessed && finer_refuted, 0, || {
        format!("E{finer} vs E{} not separated by {} / {}", finer + 1, f(a), f(b))
    });
    if let Some(witness) = witness {
        r.report.exhibits.push(Exhibit {
            finer: fl,
            coarser: cl,
            a: f(a),
            b: f(b),
            witness,
            finer_refuted,
            coarser_witnessed,
        });
    }
}

/// Concrete pairs showing each inclusion E^l in E^(l+1) is strict: the
/// coarser relation is witnessed and the finer one refuted, both from the
/// definitions. Levels 2/3 and 3/4 separate only in `d = 2`. Sampled
/// separating pairs are counted as well.
pub fn separation(p: &SuiteParams) -> SuiteReport {
    let mut r = Recorder::new("separation", p);
    let cfg = cfg(p);
    let fixed: &[(u8, &str, &str)] = if p.dim == 1 {
        &[(0, "t^2 + t", "t^2"), (1, "t^2", "2*t^2"), (3, "t", "t^2")]
    } else {
        &[
            (0, "t^(2,0) + t^(1,0)", "t^(2,0)"),
            (1, "t^(2,0)", "2*t^(2,0)"),
            (2, "t^(1,0)", "t^(1,1)"),
            (3, "t^(1,0)", "t^(2,0)"),
        ]
    };
    for (finer, a, b) in fixed {
        let (a, b) = (parse_element(a, p.dim).unwrap(), parse_element(b, p.dim).unwrap());
        exhibit(&mut r, &cfg, *finer, &a, &b);
    }
    for case in 0..p.samples {
        let mut s = case_sampler(p, tag_of("separation"), case);
        let (a, b) = s.pair();
        let v: Vec<bool> = EquivLevel::ALL.iter().map(|&l| equiv::holds(l, &a, &b).unwrap()).collect();
        for l in 0..4u8 {
            if !v[l as usize] && v[l as usize + 1] {
                r.count(&format!("sampled_separations_E{l}_E{}", l + 1));
                let w = equiv::decide(lv(l + 1), &a, &b, &cfg).unwrap().witness.unwrap();
                let ok = oracle::check_witness(lv(l + 1), &a, &b, &w) && oracle::check_refutation(lv(l), &a, &b);
                r.check(ok, case, || format!("sampled E{l}/E{} separation unverified: {} / {}", l + 1, f(&a), f(&b)));
            }
        }
    }
    r.finish(p.samples)
}

/// Increasing probes around the descriptor's anchors, padded with samples.
pub fn probes_for(s: &mut Sampler, anchors: &[Element], count: usize) -> Vec<Element> {
    let dim = s.dim();
    let mut set = std::collections::BTreeSet::new();
    for k in 0..6 {
        set.insert(Element::from_u64(dim, k));
    }
    for x in anchors {
        for k in 0..4i64 {
            for sign in [1, -1] {
                if let Ok(y) = x.add_int(&BigInt::from(sign * k)) {
                    set.insert(y);
                }
            }
        }
        if x.is_standard() {
            continue;
        }
        set.insert(x.scale(2));
        set.insert(x.divmod_scalar(2).0);
        for l in 0..=4u8 {
            set.insert(s.related(x, l));
        }
    }
    let mut guard = 0;
    while set.len() < count && guard < 20 * count {
        guard += 1;
        let y = if !anchors.is_empty() && s.chance(60) {
            use rand::Rng;
            let i = s.rng().gen_range(0..anchors.len());
            if anchors[i].is_standard() {
                s.element()
            } else {
                let l = s.rng().gen_range(0..=4u8);
                s.related(&anchors[i], l)
            }
        } else {
            s.element()
        };
        set.insert(y);
    }
    set.into_iter().take(count).collect()
}

fn descriptor_anchors(d: &Descriptor, out: &mut Vec<Element>) {
    match d {
        Descriptor::Identity => {}
        Descriptor::E2Affine { a, b, c, .. } => out.extend([a.clone(), b.clone(), c.clone()]),
        Descriptor::E3Shift { a1, a2, c } => out.extend([a1.clone(), a2.clone(), c.clone()]),
        Descriptor::E0ClassShift { anchor, .. } => out.push(anchor.clone()),
        Descriptor::Extension { below, a, b } => {
            out.extend([a.clone(), b.clone()]);
            descriptor_anchors(below, out);
        }
        Descriptor::Compose { parts } => parts.iter().for_each(|p| descriptor_anchors(p, out)),
        Descriptor::Inverse { inner } => descriptor_anchors(inner, out),
    }
}

/// Probes per descriptor: 1001 probes make 1000 consecutive pairs.
pub const AUTOMORPH_PROBES: usize = 1001;

/// Builds automorphisms for E2 pairs (and E3 pairs in `d = 2`), checks that
/// they map `a` to `b`, and validates each on its own probe set. A few
/// deliberately corrupted descriptors must be rejected.
pub fn automorph_suite(p: &SuiteParams) -> SuiteReport {
    automorph_with_probes(p, AUTOMORPH_PROBES)
}

pub fn automorph_with_probes(p: &SuiteParams, probe_count: usize) -> SuiteReport {
    let mut r = Recorder::new("automorph", p);
    let cfg = cfg(p);
    let families: &[u8] = if p.dim == 2 { &[2, 3] } else { &[2] };
    for case in 0..p.samples {
        for &fam in families {
            let mut s = case_sampler(p, tag_of("automorph") * 10 + fam as u64, case);
            let mut a = s.nonstandard();
            if fam == 3 {
                while a.deg().unwrap().components()[0] == BigRational::from_integer(0.into()) {
                    a = s.nonstandard();
                }
            }
            let b = s.related(&a, fam);
            let label = format!("E{fam}");
            let built =
                if fam == 2 { automorph::build_from_e2(&a, &b, &cfg) } else { automorph::build_from_e3(&a, &b, &cfg) };
            let d = match built {
                Ok(d) => d,
                Err(e) => {
                    r.check(false, case, || format!("{label} build failed: {e}; {} -> {}", f(&a), f(&b)));
                    continue;
                }
            };
            r.count(&format!("{label}_built"));
            if fam == 3 && !equiv::holds(lv(2), &a, &b).unwrap() {
                r.count("E3_strict_pairs");
            }
            let image = automorph::apply(&d, &a);
            r.check(image.as_ref() == Ok(&b), case, || format!("{label} f(a) != b; {} -> {}", f(&a), f(&b)));
            let mut anchors = vec![a.clone(), b.clone()];
            descriptor_anchors(&d, &mut anchors);
            let probes = probes_for(&mut s, &anchors, probe_count);
            match automorph::validate(&d, &probes) {
                Ok(rep) => {
                    r.count(&format!("{label}_validated"));
                    *r.report.stats.entry("probe_pairs".into()).or_default() += rep.pairs as u64;
                }
                Err(e) => r.check(false, case, || format!("{label} validation failed: {e}; {} -> {}", f(&a), f(&b))),
            }
            if case < 5 {
                if let Some(bad) = corrupt(&d) {
                    let caught = automorph::apply(&bad, &a).ok() != Some(b.clone())
                        || automorph::validate(&bad, &probes).is_err();
                    r.check(caught, case, || format!("corrupted {label} descriptor passed validation"));
                    r.count("negative_controls");
                }
            }
        }
    }
    r.finish(p.samples)
}

/// A small perturbation of the first nontrivial leaf.
fn corrupt(d: &Descriptor) -> Option<Descriptor> {
    match d {
        Descriptor::E2Affine { a, b, n, c, m } => {
            Some(Descriptor::E2Affine { a: a.clone(), b: b.clone(), n: n + 1, c: c.clone(), m: *m })
        }
        Descriptor::E3Shift { a1, a2, c } => {
            Some(Descriptor::E3Shift { a1: a1.clone(), a2: a2.add(&Element::one(a1.dim())), c: c.clone() })
        }
        Descriptor::E0ClassShift { anchor, offset } => {
            Some(Descriptor::E0ClassShift { anchor: anchor.clone(), offset: offset + 1 })
        }
        Descriptor::Compose { parts } => {
            let i = parts.iter().position(|p| corrupt(p).is_some())?;
            let mut parts = parts.clone();
            parts[i] = corrupt(&parts[i])?;
            Some(Descriptor::Compose { parts })
        }
        Descriptor::Inverse { inner } => Some(Descriptor::Inverse { inner: Box::new(corrupt(inner)?) }),
        _ => None,
    }
}

/// Class-mates drawn per anchor and level in [`sequences`].
pub const SEQUENCE_MATES: usize = 100;

/// Monotonicity, class membership and cofinality of the level-0 and
/// level-2 sequences: each sequence must pass every one of
/// [`SEQUENCE_MATES`] sampled class-mates by the index derived from the
/// witness.
pub fn sequences(p: &SuiteParams) -> SuiteReport {
    let mut r = Recorder::new("sequences", p);
    let cfg = cfg(p);
    for case in 0..p.samples {
        let mut s = case_sampler(p, tag_of("sequences"), case);
        let a = s.nonstandard();
        for l in [0u8, 2] {
            let level = lv(l);
            let mates: Vec<Element> = (0..SEQUENCE_MATES).map(|_| s.related(&a, l)).collect();
            for dir in [Direction::Up, Direction::Down] {
                let mut indices = Vec::with_capacity(mates.len());
                for b in &mates {
                    match analysis::passing_index(level, dir, &a, b, &cfg) {
                        Ok(i) => indices.push(Some(i)),
                        Err(e) => {
                            r.check(false, case, || format!("E{l} passing index failed: {e}"));
                            indices.push(None);
                        }
                    }
                }
                let len = indices.iter().flatten().max().map_or(1, |m| m + 1);
                let seq = if l == 0 { analysis::e0_seq(&a, len, dir) } else { analysis::e2_seq(&a, len, dir) };
                let seq = seq.expect("anchor is nonstandard");
                r.check(seq.is_monotone(), case, || format!("E{l} {dir:?} sequence not monotone for {}", f(&a)));
                let members = seq.terms.iter().all(|x| equiv::holds(level, &a, x).unwrap_or(false));
                r.check(members, case, || format!("E{l} {dir:?} sequence leaves the class of {}", f(&a)));
                for (b, idx) in mates.iter().zip(indices) {
                    let Some(idx) = idx else { continue };
                    let first = seq.first_passing(b);
                    r.check(first.is_some_and(|i| i <= idx), case, || {
                        format!("E{l} {dir:?} sequence of {} does not pass {} by index {idx}", f(&a), f(b))
                    });
                    r.count(&format!("mates_E{l}_{dir:?}").to_lowercase());
                }
            }
        }
    }
    r.finish(p.samples)
}

const ROOT_BOUND_TERMS: u32 = 3;

fn root_bound_side_ok(a: &Element, x: &Element, above: bool) -> bool {
    let outside = !equiv::holds(lv(3), a, x).unwrap_or(true);
    outside && if above { x > a } else { x < a }
}

/// Upper and lower root-based sequences around the E3-class: each term
/// satisfies its defining predicate, its neighbours do not, and the term lies
/// outside the class on the correct side. Partiality is counted.
pub fn roots(p: &SuiteParams) -> SuiteReport {
    let mut r = Recorder::new("roots", p);
    let budget = cfg(p).div_budget;
    for case in 0..p.samples {
        let mut s = case_sampler(p, tag_of("roots"), case);
        let mut a = s.nonstandard();
        if case % 2 == 0 {
            // a leading coefficient with rational roots of every needed order
            let e = a.deg().unwrap().clone();
            a = s.element_with_leading(e, BigRational::from_integer(1.into()));
        }
        let one = Element::one(p.dim);
        for dir in [Direction::Up, Direction::Down] {
            let seq = match analysis::root_bound_seq(&a, ROOT_BOUND_TERMS, dir, budget) {
                Ok(seq) => seq,
                Err(AnalysisError::Model(ModelError::CoefficientNotRepresentable { .. })) => {
                    r.count("not_representable");
                    continue;
                }
                Err(AnalysisError::Model(ModelError::NonTerminatingQuotient { .. })) => {
                    r.count("nonterminating");
                    continue;
                }
                Err(e) => {
                    r.check(false, case, || format!("root bound failed on {}: {e}", f(&a)));
                    continue;
                }
            };
            r.count(&format!("sequences_{dir:?}").to_lowercase());
            r.check(seq.is_monotone(), case, || format!("root bound {dir:?} not monotone for {}", f(&a)));
            for (i, x) in seq.terms.iter().enumerate() {
                let n = i as u32 + 1;
                let verdict = match dir {
                    Direction::Up => (|| -> Result<bool, AnalysisError> {
                        Ok(analysis::root_up_predicate(&a, x, n, budget)?
                            && !analysis::root_up_predicate(&a, &x.add(&one), n, budget)?
                            && !analysis::root_up_predicate(&a, &x.add(&a), n, budget)?)
                    })(),
                    Direction::Down => (|| -> Result<bool, AnalysisError> {
                        let below = x.sub(&one)?;
                        Ok(analysis::root_down_predicate(&a, x, n, budget)?
                            && !analysis::root_down_predicate(&a, &below, n, budget)?)
                    })(),
                };
                match verdict {
                    Ok(ok) => r.check(ok, case, || {
                        format!("root bound {dir:?} term {n} of {} is not extremal: {}", f(&a), f(x))
                    }),
                    Err(e) => r.check(false, case, || format!("root bound predicate failed: {e}")),
                }
                r.check(root_bound_side_ok(&a, x, dir == Direction::Up), case, || {
                    format!("root bound {dir:?} term {n} of {} not outside the E3-class: {}", f(&a), f(x))
                });
                r.count("terms");
            }
        }
    }
    r.finish(p.samples)
}

/// Pairs inside one E4-class (`d = 2`, first degree component positive):
/// the embedding is constant on E3-classes, strictly monotone across them,
/// and additive over products.
pub fn embed(p: &SuiteParams) -> SuiteReport {
    let mut r = Recorder::new("embed", p);
    let mut s0 = case_sampler(p, tag_of("embed"), usize::MAX >> 32);
    let anchor = if p.dim == 2 { parse_element("t^(1,0)", 2).unwrap() } else { s0.nonstandard() };
    let x0 = anchor.deg().unwrap().components()[0].clone();
    for case in 0..p.samples {
        let mut s = case_sampler(p, tag_of("embed"), case);
        let draw = |s: &mut Sampler| {
            use rand::Rng;
            let k: i64 = s.rng().gen_range(1..=4);
            let first = &x0 * BigRational::new(k.into(), 2.into());
            let e = if p.dim == 2 {
                let y = BigRational::from_integer(s.rng().gen_range(-3i64..=3).into());
                Exponent::new(vec![first, y])
            } else {
                Exponent::new(vec![first])
            };
            let c = s.positive_coefficient();
            s.element_with_leading(e, c)
        };
        let (b1, b2) = (draw(&mut s), draw(&mut s));
        let (e1, e2) = match (analysis::real_embed(&anchor, &b1), analysis::real_embed(&anchor, &b2)) {
            (Ok(e1), Ok(e2)) => (e1.value, e2.value),
            (Err(e), _) | (_, Err(e)) => {
                r.check(false, case, || format!("embed failed: {e}"));
                continue;
            }
        };
        let same = equiv::holds(lv(3), &b1, &b2).unwrap();
        if same {
            r.count("same_class_pairs");
        }
        r.check(same == (e1 == e2), case, || format!("E3 and embedding disagree: {} / {}", f(&b1), f(&b2)));
        if !same {
            r.check((b1 < b2) == (e1 < e2), case, || {
                format!("embedding not order preserving: {} / {}", f(&b1), f(&b2))
            });
        }
        match analysis::real_embed(&anchor, &b1.mul(&b2)) {
            Ok(ep) => {
                r.check(ep.value == &e1 + &e2, case, || format!("embedding not additive: {} / {}", f(&b1), f(&b2)))
            }
            Err(e) => r.check(false, case, || format!("embed of product failed: {e}")),
        }
    }
    r.finish(p.samples)
}

/// Text and JSON round trips of sampled elements.
pub fn roundtrip(p: &SuiteParams) -> SuiteReport {
    let mut r = Recorder::new("roundtrip", p);
    for case in 0..p.samples {
        let mut s = case_sampler(p, tag_of("roundtrip"), case);
        let x = s.element();
        let text = f(&x);
        r.check(parse_element(&text, p.dim).as_ref() == Ok(&x), case, || format!("text round trip of {text}"));
        let js = serde_json::to_string(&x).unwrap();
        r.check(serde_json::from_str::<Element>(&js).ok().as_ref() == Some(&x), case, || {
            format!("json round trip of {text}")
        });
    }
    r.finish(p.samples)
}
