use std::ffi::OsString;

use serde_json::Value;

use nsarith::cli::{run, Outcome, EXIT_NEGATIVE, EXIT_OK, EXIT_PARTIAL, EXIT_USAGE};

fn cli(args: &[&str]) -> Outcome {
    run(args.iter().map(OsString::from))
}

fn json(out: &Outcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", out.stdout))
}

#[test]
fn equiv_reports_minimal_bound() {
    let out = cli(&["equiv", "--level", "2", "t", "3*t+5"]);
    assert_eq!(out.code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["equivalent"], true);
    assert_eq!(v["witness"]["n"], 4);

    let v = json(&cli(&["equiv", "--level", "0", "t^2+3", "t^2"]));
    assert_eq!(v["witness"]["n"], 4);
}

#[test]
fn equiv_companion_and_negative_verdicts() {
    let out = cli(&["equiv", "--level", "3", "t^(1,0)", "t^(1,5)"]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(json(&out)["witness"]["c"]["terms"][0]["exp"], serde_json::json!(["0", "6"]));

    let out = cli(&["equiv", "--level", "2", "t", "t^2"]);
    assert_eq!(out.code, EXIT_NEGATIVE);
    assert_eq!(json(&out)["equivalent"], false);
}

#[test]
fn auto_builds_or_refuses() {
    let out = cli(&["auto", "--from", "t", "--to", "2*t+1"]);
    assert_eq!(out.code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["route"], "E2");
    assert_eq!(v["descriptor"]["kind"], "e2_affine");

    let out = cli(&["auto", "--from", "t^(1,0)", "--to", "t^(1,1)"]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(json(&out)["route"], "E3");

    let out = cli(&["auto", "--from", "t", "--to", "t^2"]);
    assert_eq!(out.code, EXIT_NEGATIVE);
    assert_eq!(json(&out)["reason"], "not E3-equivalent");
}

#[test]
fn apply_reads_auto_output() {
    let auto = cli(&["auto", "--from", "t^(1,0)", "--to", "t^(1,1) + 3"]);
    assert_eq!(auto.code, EXIT_OK);
    let path = std::env::temp_dir().join(format!("nsarith-desc-{}.json", std::process::id()));
    std::fs::write(&path, &auto.stdout).unwrap();
    let p = path.to_str().unwrap();
    let fwd = cli(&["apply", "--desc", p, "t^(1,0)"]);
    let back = cli(&["apply", "--desc", p, "--inverse", "t^(1,1) + 3"]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(fwd.code, EXIT_OK);
    assert_eq!(json(&fwd)["text"], "t^(1,1) + 3");
    assert_eq!(json(&back)["text"], "t^(1,0)");
}

#[test]
fn arithmetic_commands() {
    assert_eq!(json(&cli(&["arith", "add", "t^2 + t", "t + 1"]))["text"], "t^2 + 2*t + 1");
    assert_eq!(json(&cli(&["arith", "mul", "t^(1,0)", "t^(0,1)"]))["text"], "t^(1,1)");
    assert_eq!(json(&cli(&["arith", "pow", "t+1", "2"]))["text"], "t^2 + 2*t + 1");
    assert_eq!(json(&cli(&["arith", "root", "t^2 + 2*t", "2"]))["text"], "t");
    let v = json(&cli(&["arith", "divmod", "t^2", "t^(3/2)"]));
    assert_eq!(v["quotient"]["text"], "t^(1/2)");
    assert_eq!(v["remainder"]["text"], "0");
    assert_eq!(json(&cli(&["cmp", "t^(1,0)", "t^(0,9)"]))["order"], "greater");
    assert_eq!(json(&cli(&["cmp", "t+1", "t+2"]))["order"], "less");
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["arith", "sub", "t", "t^2"]).code, EXIT_NEGATIVE);
    assert_eq!(cli(&["eval", "t^^2"]).code, EXIT_USAGE);
    assert_eq!(cli(&["eval", "t + 1/2"]).code, EXIT_USAGE);
    assert_eq!(cli(&["frobnicate"]).code, EXIT_USAGE);
    let out = cli(&["arith", "root", "2*t^2", "2"]);
    assert_eq!(out.code, EXIT_PARTIAL);
    assert_eq!(json(&out)["error"], "coefficient_not_representable");
    let out = cli(&["--budget", "1", "arith", "divmod", "t^(2,0)", "t^(1,0) - t^(0,5)"]);
    assert_eq!(out.code, EXIT_PARTIAL);
    assert_eq!(json(&out)["error"], "non_terminating_quotient");
}

#[test]
fn sequences_and_embedding() {
    let v = json(&cli(&["seq", "e0", "t", "--count", "3", "--direction", "up"]));
    assert_eq!(v["text"], serde_json::json!(["t", "t + 1", "t + 2"]));
    let v = json(&cli(&["seq", "e2", "t^2", "--count", "3", "--direction", "down"]));
    assert_eq!(v["text"][1], "1/2*t^2");
    assert_eq!(json(&cli(&["seq", "roots", "t^2", "--count", "1", "--direction", "down"]))["text"][0], "t");
    assert_eq!(cli(&["seq", "roots", "2*t^2", "--count", "1"]).code, EXIT_PARTIAL);

    let v = json(&cli(&["embed", "--anchor", "t^(1,0)", "t^(2,3)"]));
    assert_eq!(v["value"], "2");
    assert_eq!(v["degenerate"], false);
    assert_eq!(cli(&["embed", "--anchor", "t^(0,1)", "t^(1,0)"]).code, EXIT_NEGATIVE);
}

#[test]
fn suite_command_is_deterministic() {
    let args = ["suite", "--name", "refinement", "--samples", "200", "--seed", "7", "--dim", "2"];
    let first = cli(&args);
    assert_eq!(first.code, EXIT_OK);
    assert_eq!(json(&first)["passed"], true);
    assert_eq!(first.stdout, cli(&args).stdout);
    assert_eq!(cli(&["suite", "--name", "nope"]).code, EXIT_USAGE);
}
