//! Acceptance gate: one PASS/FAIL line per criterion. Runs sequentially in a
//! plain `main` so the timing limits measure a single thread.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nsarith::cli::suite::{self, SuiteParams, SuiteReport, SEQUENCE_MATES};
use nsarith::cli::{run, EXIT_OK};

const SEED: u64 = 20240917;

struct Gate {
    failed: usize,
}

impl Gate {
    fn record(&mut self, id: u32, name: &str, ok: bool, detail: String) {
        println!("[{}] criterion {id:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed += 1;
        }
    }
}

fn params(samples: usize, dim: usize) -> SuiteParams {
    SuiteParams { samples, seed: SEED, dim }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn clean(r: &SuiteReport) -> bool {
    if !r.passed() {
        for v in &r.violations {
            println!("    {} d={}: {v}", r.suite, r.dim);
        }
    }
    r.passed()
}

fn violations(reports: &[SuiteReport]) -> u64 {
    reports.iter().map(|r| r.violation_count).sum()
}

fn algebra(g: &mut Gate) {
    let (reports, t) = timed(|| [1, 2].map(|d| suite::algebra(&params(1000, d))));
    let ok = reports.iter().all(clean) && reports.iter().all(|r| r.cases == 1000) && t < Duration::from_secs(10);
    let nonterm = reports[1].stat("divmod_nonterminating");
    g.record(
        1,
        "algebra and order laws",
        ok,
        format!("1000 samples x 2 dims, {} checks, {} violations, {nonterm} non-terminating divisions counted, {:.2}s (< 10s)",
            reports.iter().map(|r| r.checks).sum::<u64>(), violations(&reports), t.as_secs_f64()),
    );
}

fn refinement(g: &mut Gate) {
    let reports = [1, 2].map(|d| suite::refinement(&params(1000, d)));
    let populated = reports.iter().all(|r| (0..=4).all(|l| r.stat(&format!("positive_E{l}")) > 0));
    let ok = reports.iter().all(clean) && populated;
    let counts: Vec<String> = reports
        .iter()
        .map(|r| (0..=4).map(|l| r.stat(&format!("positive_E{l}")).to_string()).collect::<Vec<_>>().join("/"))
        .collect();
    g.record(
        2,
        "refinement chain",
        ok,
        format!(
            "1000 pairs x 2 dims, positives E0..E4 d1 {} d2 {}, {} violations",
            counts[0],
            counts[1],
            violations(&reports)
        ),
    );
}

fn convexity(g: &mut Gate) {
    let reports = [1, 2].map(|d| suite::convexity(&params(500, d)));
    let premises = |r: &SuiteReport, key: &str| (0..=4).map(|l| r.stat(&format!("{key}_E{l}"))).collect::<Vec<_>>();
    let populated = reports.iter().all(|r| {
        premises(r, "convex_premise").iter().all(|&n| n > 0) && premises(r, "closure_premise").iter().all(|&n| n > 0)
    });
    let ok = reports.iter().all(clean) && populated;
    g.record(
        3,
        "convexity and closure",
        ok,
        format!(
            "500 cases x 5 levels x 2 dims, convex premises d2 {:?}, closure premises d2 {:?}, {} violations",
            premises(&reports[1], "convex_premise"),
            premises(&reports[1], "closure_premise"),
            violations(&reports)
        ),
    );
}

fn agreement(g: &mut Gate) {
    let reports = [1, 2].map(|d| suite::agreement(&params(500, d)));
    let positives: u64 = reports.iter().map(|r| r.stat("positive_verdicts")).sum();
    let bounds: u64 = reports.iter().map(|r| r.stat("minimal_bounds")).sum();
    let ok = reports.iter().all(clean) && positives > 0 && bounds > 0;
    g.record(
        4,
        "decider and oracle agreement",
        ok,
        format!(
            "500 pairs x 2 dims, {positives} witnesses checked, {bounds} minimal bounds checked, {} violations",
            violations(&reports)
        ),
    );
}

fn separation(g: &mut Gate) {
    let reports = [1, 2].map(|d| suite::separation(&params(200, d)));
    let required: [(usize, u8, &str, &str); 5] = [
        (1, 0, "t^2 + t", "t^2"),
        (1, 1, "t^2", "2*t^2"),
        (2, 1, "t^(2,0)", "2*t^(2,0)"),
        (2, 2, "t^(1,0)", "t^(1,1)"),
        (2, 3, "t^(1,0)", "t^(2,0)"),
    ];
    let mut missing = Vec::new();
    for (dim, finer, a, b) in required {
        let found = reports[dim - 1]
            .exhibits
            .iter()
            .any(|e| e.finer.get() == finer && e.a == a && e.b == b && e.finer_refuted && e.coarser_witnessed);
        if !found {
            missing.push(format!("E{finer}/E{} ({a}, {b})", finer + 1));
        }
    }
    let levels_d2: Vec<u8> = reports[1].exhibits.iter().map(|e| e.finer.get()).collect();
    let ok = reports.iter().all(clean) && missing.is_empty() && levels_d2 == [0, 1, 2, 3];
    g.record(
        5,
        "strict separation exhibits",
        ok,
        format!(
            "{} exhibits verified both ways, d2 covers E0/E1..E3/E4: {}, missing {missing:?}",
            reports.iter().map(|r| r.exhibits.len()).sum::<usize>(),
            levels_d2 == [0, 1, 2, 3]
        ),
    );
}

fn automorph(g: &mut Gate) {
    let (r, t) = timed(|| suite::automorph_suite(&params(200, 2)));
    let ok = clean(&r)
        && r.stat("E2_built") == 200
        && r.stat("E3_built") == 200
        && r.stat("E2_validated") == 200
        && r.stat("E3_validated") == 200
        && r.stat("probe_pairs") == 400 * 1000
        && r.stat("negative_controls") > 0
        && t < Duration::from_secs(30);
    g.record(
        6,
        "constructive automorphisms",
        ok,
        format!(
            "d2 built E2 {} E3 {} ({} strictly E3), validated {}+{} on {} probe pairs, {} corrupted controls rejected, {} violations, {:.2}s (< 30s)",
            r.stat("E2_built"),
            r.stat("E3_built"),
            r.stat("E3_strict_pairs"),
            r.stat("E2_validated"),
            r.stat("E3_validated"),
            r.stat("probe_pairs"),
            r.stat("negative_controls"),
            r.violation_count,
            t.as_secs_f64()
        ),
    );
}

fn sequences(g: &mut Gate) {
    let anchors = 30;
    let reports = [1, 2].map(|d| suite::sequences(&params(anchors, d)));
    let keys = ["mates_e0_up", "mates_e0_down", "mates_e2_up", "mates_e2_down"];
    let full = reports.iter().all(|r| keys.iter().all(|k| r.stat(k) == (anchors * SEQUENCE_MATES) as u64));
    let ok = reports.iter().all(clean) && full;
    g.record(
        7,
        "class sequences",
        ok,
        format!(
            "{anchors} anchors x 2 dims, {SEQUENCE_MATES} class-mates each per level and direction, all mates passed: {full}, {} violations",
            violations(&reports)
        ),
    );
}

fn roots(g: &mut Gate) {
    let reports = [1, 2].map(|d| suite::roots(&params(200, d)));
    let sum = |k: &str| reports.iter().map(|r| r.stat(k)).sum::<u64>();
    let ok = reports.iter().all(clean) && sum("terms") > 0 && sum("sequences_up") > 0 && sum("sequences_down") > 0;
    g.record(
        8,
        "root-based sequences",
        ok,
        format!(
            "{} terms checked against predicate and neighbours, partial: {} not representable, {} non-terminating, {} violations",
            sum("terms"),
            sum("not_representable"),
            sum("nonterminating"),
            violations(&reports)
        ),
    );
}

fn embed(g: &mut Gate) {
    let r = suite::embed(&params(300, 2));
    let same = r.stat("same_class_pairs");
    let ok = clean(&r) && r.cases == 300 && same > 0 && same < 300;
    g.record(
        9,
        "real embedding",
        ok,
        format!("300 pairs in one E4-class, {same} in a common E3-class, {} violations", r.violation_count),
    );
}

fn full_suite(dim: usize) -> (i32, String) {
    let args = ["--dim", &dim.to_string(), "suite", "--seed", &SEED.to_string()];
    let out = run(args.iter().map(std::ffi::OsString::from));
    (out.code, out.stdout)
}

fn determinism(g: &mut Gate) {
    let (first, t1) = timed(|| [1, 2].map(full_suite));
    let (second, t2) = timed(|| [1, 2].map(full_suite));
    let passed = first.iter().all(|(code, _)| *code == EXIT_OK);
    let identical = first == second;
    let limit = Duration::from_secs(60);
    let ok = passed && identical && t1 < limit && t2 < limit;
    g.record(
        10,
        "deterministic full suite",
        ok,
        format!(
            "all suites x 2 dims passed: {passed}, JSON byte-identical across runs: {identical} ({} bytes), {:.2}s and {:.2}s (< 60s)",
            first.iter().map(|(_, s)| s.len()).sum::<usize>(),
            t1.as_secs_f64(),
            t2.as_secs_f64()
        ),
    );
}

fn main() -> ExitCode {
    let mut g = Gate { failed: 0 };
    algebra(&mut g);
    refinement(&mut g);
    convexity(&mut g);
    agreement(&mut g);
    separation(&mut g);
    automorph(&mut g);
    sequences(&mut g);
    roots(&mut g);
    embed(&mut g);
    determinism(&mut g);
    println!("acceptance: {} of 10 criteria passed", 10 - g.failed);
    if g.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
