//! Command-line surface. Every command prints one JSON document on stdout.
//!
//! Exit codes: 0 success, 1 negative verdict or violation, 2 usage or parse
//! error, 3 partiality of the model (non-terminating quotient, root with no
//! rational coefficient).

use std::fmt::Display;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use super::suite::{run_suite, SuiteParams};
use super::text::{format_element, infer_dim, parse_element, TextError};
use crate::analysis::{self, AnalysisError, Direction};
use crate::automorph::{self, AutoError, Descriptor};
use crate::equiv::{self, EquivError, EquivLevel};
use crate::series::{Element, ModelConfig, ModelError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "nsarith",
    version,
    about = "Exact arithmetic, equivalence levels and automorphisms of a nonstandard model"
)]
pub struct Cli {
    /// Exponent dimension (1 or 2). Inferred from the arguments when omitted.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Indent the JSON output.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Term budget for quotient and root expansions in dimension 2.
    #[arg(long, global = true, default_value_t = 64)]
    pub budget: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and normalize an element.
    Eval { expr: String },
    /// Compare two elements.
    Cmp { a: String, b: String },
    /// Arithmetic on elements.
    Arith {
        #[command(subcommand)]
        op: ArithOp,
    },
    /// Decide an equivalence level, with a witness for positive verdicts.
    Equiv {
        #[arg(long)]
        level: u8,
        a: String,
        b: String,
    },
    /// Build an automorphism sending one element to another.
    Auto {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Apply a descriptor (JSON file, `-` for stdin) to an element.
    Apply {
        #[arg(long)]
        desc: String,
        x: String,
        #[arg(long)]
        inverse: bool,
    },
    /// Class sequences.
    Seq {
        kind: SeqKind,
        a: String,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long, value_enum, default_value = "up")]
        direction: Direction,
    },
    /// Position of the E3-class of `b` within the E4-class of the anchor.
    Embed {
        #[arg(long)]
        anchor: String,
        b: String,
    },
    /// Run a property suite.
    Suite {
        #[arg(long, default_value = "all")]
        name: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum ArithOp {
    Add { a: String, b: String },
    Mul { a: String, b: String },
    Sub { a: String, b: String },
    Divmod { a: String, b: String },
    Pow { a: String, n: u64 },
    Root { a: String, k: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeqKind {
    E0,
    E2,
    Roots,
}

/// Exit code and standard output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(code: i32, kind: &'static str, message: impl Display) -> Self {
        Failure { code, kind, message: message.to_string() }
    }
}

impl From<TextError> for Failure {
    fn from(e: TextError) -> Self {
        match e {
            TextError::Parse(p) => Failure::new(EXIT_USAGE, "parse_error", p),
            TextError::Model(m) => Failure::new(EXIT_USAGE, "invalid_element", m),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::NonTerminatingQuotient { .. } => Failure::new(EXIT_PARTIAL, "non_terminating_quotient", e),
            ModelError::CoefficientNotRepresentable { .. } => {
                Failure::new(EXIT_PARTIAL, "coefficient_not_representable", e)
            }
            ModelError::Underflow => Failure::new(EXIT_NEGATIVE, "underflow", e),
            ModelError::DivisionByZero => Failure::new(EXIT_USAGE, "division_by_zero", e),
            ModelError::InvariantViolation(_) => Failure::new(EXIT_USAGE, "invalid_element", e),
            ModelError::DimensionMismatch { .. } => Failure::new(EXIT_USAGE, "dimension_mismatch", e),
            ModelError::InvalidConfig(_) => Failure::new(EXIT_USAGE, "invalid_config", e),
        }
    }
}

impl From<EquivError> for Failure {
    fn from(e: EquivError) -> Self {
        match e {
            EquivError::Model(m) => m.into(),
            EquivError::Automorphism(a) => (*a).into(),
            EquivError::StandardInput => Failure::new(EXIT_USAGE, "standard_input", e),
            EquivError::UnsupportedLevel(_) => Failure::new(EXIT_USAGE, "unsupported_level", e),
            EquivError::NotEquivalent(_) | EquivError::CannotProve => Failure::new(EXIT_NEGATIVE, "not_equivalent", e),
            _ => Failure::new(EXIT_NEGATIVE, "witness_error", e),
        }
    }
}

impl From<AutoError> for Failure {
    fn from(e: AutoError) -> Self {
        match e {
            AutoError::Model(m) => m.into(),
            AutoError::Equiv(q) => (*q).into(),
            AutoError::NotE2Equivalent | AutoError::NotE3Equivalent => Failure::new(EXIT_NEGATIVE, "not_equivalent", e),
            AutoError::ValidationFailure { .. } => Failure::new(EXIT_NEGATIVE, "validation_failure", e),
            AutoError::InvalidProbes | AutoError::Evaluation(_) => Failure::new(EXIT_USAGE, "invalid_descriptor", e),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Model(m) => m.into(),
            AnalysisError::Equiv(q) => q.into(),
            AnalysisError::StandardInput => Failure::new(EXIT_USAGE, "standard_input", e),
            AnalysisError::NotE4Equivalent => Failure::new(EXIT_NEGATIVE, "not_e4_equivalent", e),
        }
    }
}

fn render(value: &impl Serialize, pretty: bool) -> String {
    let mut s = if pretty { serde_json::to_string_pretty(value) } else { serde_json::to_string(value) }
        .expect("JSON values serialize");
    s.push('\n');
    s
}

fn element_json(e: &Element) -> Value {
    json!({ "text": format_element(e), "element": e })
}

/// Runs one invocation; `args` excludes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(std::iter::once("nsarith".into()).chain(args.iter().cloned())) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return Outcome { code, stdout: String::new(), stderr: e.render().to_string() };
        }
    };
    let dim = cli.dim.unwrap_or_else(|| {
        let text: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
        text.iter().map(|a| infer_dim(a)).max().unwrap_or(1)
    });
    let pretty = cli.pretty;
    match execute(&cli, dim) {
        Ok((code, value)) => Outcome { code, stdout: render(&value, pretty), stderr: String::new() },
        Err(f) => Outcome {
            code: f.code,
            stdout: render(&json!({ "error": f.kind, "message": f.message }), pretty),
            stderr: format!("error: {}\n", f.message),
        },
    }
}

fn execute(cli: &Cli, dim: usize) -> Result<(i32, Value), Failure> {
    let cfg = ModelConfig::new(dim)?.with_div_budget(cli.budget);
    let el = |s: &str| parse_element(s, dim).map_err(Failure::from);
    let ok = |v: Value| Ok((EXIT_OK, v));
    match &cli.command {
        Command::Eval { expr } => {
            let e = el(expr)?;
            ok(json!({ "text": format_element(&e), "element": e, "standard": e.is_standard() }))
        }
        Command::Cmp { a, b } => {
            let order = match el(a)?.cmp(&el(b)?) {
                std::cmp::Ordering::Less => "less",
                std::cmp::Ordering::Equal => "equal",
                std::cmp::Ordering::Greater => "greater",
            };
            ok(json!({ "order": order }))
        }
        Command::Arith { op } => arith(op, &el, &cfg),
        Command::Equiv { level, a, b } => {
            let level = EquivLevel::new(*level)?;
            let v = equiv::decide(level, &el(a)?, &el(b)?, &cfg)?;
            let code = if v.equivalent { EXIT_OK } else { EXIT_NEGATIVE };
            Ok((code, serde_json::to_value(&v).expect("verdict serializes")))
        }
        Command::Auto { from, to } => {
            let (a, b) = (el(from)?, el(to)?);
            match equiv::prove_e5(&a, &b, &cfg) {
                Ok(d) => {
                    let route = if equiv::holds(EquivLevel::new(2)?, &a, &b)? { "E2" } else { "E3" };
                    ok(json!({ "route": route, "descriptor": d }))
                }
                Err(EquivError::CannotProve) => Ok((
                    EXIT_NEGATIVE,
                    json!({ "error": "not_equivalent", "reason": "not E3-equivalent", "message": EquivError::CannotProve.to_string() }),
                )),
                Err(e) => Err(e.into()),
            }
        }
        Command::Apply { desc, x, inverse } => {
            let raw =
                if desc == "-" { std::io::read_to_string(std::io::stdin()) } else { std::fs::read_to_string(desc) }
                    .map_err(|e| Failure::new(EXIT_USAGE, "io_error", format!("{desc}: {e}")))?;
            let value: Value =
                serde_json::from_str(&raw).map_err(|e| Failure::new(EXIT_USAGE, "invalid_descriptor", e))?;
            // accept both a bare descriptor and the output of `auto`
            let value = value.get("descriptor").cloned().unwrap_or(value);
            let d: Descriptor =
                serde_json::from_value(value).map_err(|e| Failure::new(EXIT_USAGE, "invalid_descriptor", e))?;
            let x = el(x)?;
            let y = if *inverse { automorph::apply_inverse(&d, &x)? } else { automorph::apply(&d, &x)? };
            ok(element_json(&y))
        }
        Command::Seq { kind, a, count, direction } => {
            let a = el(a)?;
            let seq = match kind {
                SeqKind::E0 => analysis::e0_seq(&a, *count, *direction)?,
                SeqKind::E2 => analysis::e2_seq(&a, *count, *direction)?,
                SeqKind::Roots => analysis::root_bound_seq(&a, *count as u32, *direction, cfg.div_budget)?,
            };
            let text: Vec<String> = seq.terms.iter().map(format_element).collect();
            ok(json!({ "sequence": seq, "text": text }))
        }
        Command::Embed { anchor, b } => {
            let e = analysis::real_embed(&el(anchor)?, &el(b)?)?;
            ok(serde_json::to_value(&e).expect("embedding serializes"))
        }
        Command::Suite { name, samples, seed } => {
            let params = SuiteParams { samples: *samples, seed: *seed, dim };
            let reports = run_suite(name, &params).map_err(|e| Failure::new(EXIT_USAGE, "invalid_suite", e))?;
            let code = if reports.iter().all(|r| r.passed()) { EXIT_OK } else { EXIT_NEGATIVE };
            Ok((code, json!({ "passed": code == EXIT_OK, "reports": reports })))
        }
    }
}

fn arith(
    op: &ArithOp,
    el: &dyn Fn(&str) -> Result<Element, Failure>,
    cfg: &ModelConfig,
) -> Result<(i32, Value), Failure> {
    let result = match op {
        ArithOp::Add { a, b } => el(a)?.add(&el(b)?),
        ArithOp::Mul { a, b } => el(a)?.mul(&el(b)?),
        ArithOp::Sub { a, b } => el(a)?.sub(&el(b)?)?,
        ArithOp::Divmod { a, b } => {
            let (q, r) = el(a)?.divmod(&el(b)?, cfg.div_budget)?;
            return Ok((EXIT_OK, json!({ "quotient": element_json(&q), "remainder": element_json(&r) })));
        }
        ArithOp::Pow { a, n } => el(a)?.pow(*n),
        ArithOp::Root { a, k } => {
            if *k == 0 {
                return Err(Failure::new(EXIT_USAGE, "invalid_argument", "root order must be >= 1"));
            }
            el(a)?.root_floor(*k, cfg.div_budget)?
        }
    };
    Ok((EXIT_OK, element_json(&result)))
}
