//! Black-box tests of the command-line binary: contract examples, exit codes,
//! output formats, the published JSON schema, and seeding behavior.

use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    run_with_env(args, &[])
}

fn run_with_env(args: &[&str], env: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_orthodice"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary launches");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("stdout is utf-8"),
        String::from_utf8(out.stderr).expect("stderr is utf-8"),
    )
}

// ---------------------------------------------------------------------------
// A minimal JSON Schema checker covering exactly the keywords the shipped
// schema uses: type, const, required, properties, additionalProperties.
// ---------------------------------------------------------------------------

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

fn validate(schema: &Value, v: &Value, path: &str, errs: &mut Vec<String>) {
    if let Some(t) = schema.get("type") {
        let allowed: Vec<&str> = match t {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(|x| x.as_str()).collect(),
            _ => vec![],
        };
        if !allowed.contains(&type_name(v)) {
            errs.push(format!("{path}: type {} not in {allowed:?}", type_name(v)));
        }
    }
    if let Some(c) = schema.get("const") {
        if v != c {
            errs.push(format!("{path}: value {v} != const {c}"));
        }
    }
    if let Some(req) = schema.get("required").and_then(Value::as_array) {
        for key in req.iter().filter_map(|x| x.as_str()) {
            if v.get(key).is_none() {
                errs.push(format!("{path}: missing required key {key:?}"));
            }
        }
    }
    if let Some(props) = schema.get("properties").and_then(Value::as_object) {
        for (key, sub) in props {
            if let Some(child) = v.get(key) {
                validate(sub, child, &format!("{path}.{key}"), errs);
            }
        }
        if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
            if let Some(obj) = v.as_object() {
                for key in obj.keys() {
                    if !props.contains_key(key) {
                        errs.push(format!("{path}: unexpected key {key:?}"));
                    }
                }
            }
        }
    }
}

fn shipped_schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/cli-output.schema.json");
    serde_json::from_str(&std::fs::read_to_string(&path).expect("schema file is shipped"))
        .expect("schema file is valid JSON")
}

// ---------------------------------------------------------------------------

#[test]
fn listing_fifteen_dice_as_csv_gives_header_plus_fifteen_rows() {
    let (code, out, _) = run(&["dice", "list", "--count", "15", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 16);
    assert_eq!(lines[0], "position,index,m,n,c,sides");
    assert_eq!(lines[12], "12,17,96,132,114,37");
    assert_eq!(lines[15], "15,22,161,207,184,47");
}

#[test]
fn prime_thirty_seven_die_as_json() {
    let (code, out, _) = run(&["dice", "from-prime", "37", "--format", "json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["command"], "dice.from-prime");
    assert_eq!(v["payload"]["m"], "96");
    assert_eq!(v["payload"]["n"], "132");
    assert_eq!(v["payload"]["c"], "114");
    assert_eq!(v["payload"]["sides"], "37");
}

#[test]
fn coprime_count_at_ten_is_three() {
    let (code, out, _) = run(&["count", "coprime23", "10", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out, "n,count\n10,3\n");
    let (code, out, _) = run(&["count", "coprime23", "1000000", "--oracle", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("true\n"), "oracle disagreement: {out}");
}

#[test]
fn json_output_of_every_command_family_matches_the_shipped_schema() {
    let schema = shipped_schema();
    let cases: [&[&str]; 10] = [
        &["dice", "list", "--count", "3"],
        &["dice", "classify", "1", "6"],
        &["dice", "nearest", "7/2"],
        &["count", "coprime23", "100"],
        &["law", "pmf", "--m", "1", "--n", "4", "--a", "1/2"],
        &["law", "converge", "--k0", "17", "--indices", "17,19"],
        &["sim", "estimate", "--model", "die:1,6|atoms:1,1,1,1", "--functional", "atom:0",
          "--reps", "200", "--seed", "1"],
        &["app", "cards", "table", "--m", "0", "--n", "36"],
        &["app", "goe", "summary", "--r-grid", "0,1"],
        &["poly", "report", "--k0", "17", "--indices", "17,19", "--degree", "2", "--p", "2"],
    ];
    for args in cases {
        let full: Vec<&str> = args.iter().copied().chain(["--format", "json"]).collect();
        let (code, out, err) = run(&full);
        assert_eq!(code, 0, "{args:?} failed: {err}");
        let v: Value = serde_json::from_str(&out).unwrap_or_else(|e| {
            panic!("{args:?} wrote invalid JSON ({e}): {out}");
        });
        let mut errs = Vec::new();
        validate(&schema, &v, "$", &mut errs);
        assert!(errs.is_empty(), "{args:?} violates the schema: {errs:?}");
        // Round trip: re-serialize and re-parse to the same value.
        let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(v, again);
    }
}

#[test]
fn usage_errors_exit_two_and_domain_errors_exit_one() {
    let (code, _, _) = run(&["dice", "list"]); // missing --count
    assert_eq!(code, 2);
    let (code, _, _) = run(&["no-such-command"]);
    assert_eq!(code, 2);
    let (code, out, err) = run(&["dice", "from-index", "3"]);
    assert_eq!(code, 1);
    assert!(out.is_empty(), "domain errors must not write to stdout");
    assert!(err.starts_with("IndexNotInI:"), "stderr was {err:?}");
    let (code, _, err) = run(&["app", "cards", "partition", "--hand", "7", "--counts", "9,9,9,9"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("InvalidPartition:"), "stderr was {err:?}");
    let (code, _, _) = run(&["--help"]);
    assert_eq!(code, 0);
}

#[test]
fn rationals_are_rendered_exactly_and_as_decimals() {
    let (code, out, _) = run(&["law", "pmf", "--m", "1", "--n", "4", "--a", "1/2",
                               "--format", "json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let first = &v["payload"]["pmf"][0]["prob"];
    assert_eq!(first["exact"], "15/64");
    assert_eq!(first["decimal"], 0.234375);
    let (_, csv, _) = run(&["law", "pmf", "--m", "1", "--n", "4", "--a", "1/2",
                            "--format", "csv"]);
    assert!(csv.starts_with("j,prob_exact,prob\n0,15/64,0.234375\n"), "csv was {csv}");
}

#[test]
fn decimal_thinning_levels_convert_exactly_with_a_note() {
    let exact = run(&["law", "moments", "--m", "96", "--n", "132", "--a", "1/2",
                      "--max-order", "3", "--format", "csv"]);
    let decimal = run(&["law", "moments", "--m", "96", "--n", "132", "--a", "0.5",
                        "--max-order", "3", "--format", "csv"]);
    assert_eq!(exact.0, 0);
    assert_eq!(decimal.0, 0);
    assert_eq!(exact.1, decimal.1, "0.5 and 1/2 must produce identical output");
    assert!(
        decimal.2.contains("read as the exact rational 1/2"),
        "missing conversion note on stderr: {}",
        decimal.2
    );
    assert!(exact.2.is_empty());
}

#[test]
fn seed_comes_from_flag_then_environment_then_zero() {
    let flagged = run(&["app", "cards", "game", "--m", "1", "--n", "6", "--rounds", "500",
                        "--seed", "123", "--format", "json"]);
    let from_env = run_with_env(
        &["app", "cards", "game", "--m", "1", "--n", "6", "--rounds", "500",
          "--format", "json"],
        &[("ORTHODICE_SEED", "123")],
    );
    assert_eq!(flagged.0, 0);
    assert_eq!(flagged.1, from_env.1, "env seed must match the explicit flag");
    let v: Value = serde_json::from_str(&flagged.1).unwrap();
    assert_eq!(v["payload"]["seed"], 123);
    // The flag wins over the environment.
    let overridden = run_with_env(
        &["app", "cards", "game", "--m", "1", "--n", "6", "--rounds", "500",
          "--seed", "7", "--format", "json"],
        &[("ORTHODICE_SEED", "123")],
    );
    let v: Value = serde_json::from_str(&overridden.1).unwrap();
    assert_eq!(v["payload"]["seed"], 7);
}

#[test]
fn table_format_draws_an_underlined_header() {
    let (code, out, _) = run(&["dice", "decompose", "17"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("index"));
    assert!(lines[1].chars().all(|c| c == '-' || c == ' '));
    assert!(lines[2].contains("114") && lines[2].contains("18"));
}

#[test]
fn figure_data_commands_emit_the_documented_columns() {
    let (_, converge, _) = run(&["law", "converge", "--k0", "17", "--indices", "17,19",
                                 "--format", "csv"]);
    assert!(converge.starts_with("index,a_exact,a,tv_distance,pgf_sup_distance\n"));
    let (_, game, _) = run(&["app", "cards", "game", "--m", "1", "--n", "6", "--rounds", "50",
                             "--seed", "1", "--scatter", "--format", "csv"]);
    assert!(game.starts_with("round,count_spade,count_diamond,score_spade,score_diamond\n"));
    assert_eq!(game.lines().count(), 51);
    let (_, summary, _) = run(&["app", "goe", "summary", "--r-grid", "0,0.5", "--format", "csv"]);
    assert!(summary.starts_with(
        "r,a_r,nu_f,nu_f2,var_ratio_orthogonal,var_ratio_dirac,dirac_cross_covariance\n"
    ));
    let (_, curve, _) = run(&["poly", "report", "--k0", "17", "--indices", "17,19",
                              "--degree", "2", "--p", "2", "--curve", "--format", "csv"]);
    assert!(curve.starts_with("x,weight,charlier,die_17,die_19\n"), "curve was {curve}");
}
