//! CLI behavior: report schemas, exit codes, budget handling, and the
//! updated-human-model emission.

use serde_json::Value;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hxplain")
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hxplain-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(bin()).args(args).output().expect("spawn hxplain");
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
        out.status.code().unwrap_or(-1),
    )
}

// ---- minimal structural schema validator ------------------------------------

fn type_ok(ty: &str, v: &Value) -> bool {
    match ty {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "integer" => v.is_i64() || v.is_u64(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        _ => true,
    }
}

/// Checks the subset of JSON-schema the shipped schemas use: type lists,
/// required fields, const, enum, items, properties, $ref into $defs, oneOf
/// and prefixItems.
fn validate(schema: &Value, v: &Value, root: &Value, path: &str) -> Result<(), String> {
    if let Some(reference) = schema.get("$ref").and_then(Value::as_str) {
        let name = reference.trim_start_matches("#/$defs/");
        let target = root
            .get("$defs")
            .and_then(|d| d.get(name))
            .ok_or_else(|| format!("{path}: unresolved $ref {reference}"))?;
        return validate(target, v, root, path);
    }
    if let Some(c) = schema.get("const") {
        if c != v {
            return Err(format!("{path}: expected const {c}, got {v}"));
        }
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(v) {
            return Err(format!("{path}: {v} not in enum"));
        }
    }
    if let Some(one_of) = schema.get("oneOf").and_then(Value::as_array) {
        if !one_of.iter().any(|s| validate(s, v, root, path).is_ok()) {
            return Err(format!("{path}: no oneOf branch matched"));
        }
    }
    match schema.get("type") {
        Some(Value::String(ty)) => {
            if !type_ok(ty, v) {
                return Err(format!("{path}: expected {ty}"));
            }
        }
        Some(Value::Array(tys)) => {
            if !tys.iter().filter_map(Value::as_str).any(|ty| type_ok(ty, v)) {
                return Err(format!("{path}: type mismatch"));
            }
        }
        _ => {}
    }
    if let Some(required) = schema.get("required").and_then(Value::as_array) {
        for key in required.iter().filter_map(Value::as_str) {
            if v.get(key).is_none() {
                return Err(format!("{path}: missing required field `{key}`"));
            }
        }
    }
    if let (Some(props), Some(obj)) = (schema.get("properties").and_then(Value::as_object), v.as_object()) {
        for (key, sub) in props {
            if let Some(child) = obj.get(key) {
                validate(sub, child, root, &format!("{path}.{key}"))?;
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), v.as_array()) {
        for (i, child) in arr.iter().enumerate() {
            validate(items, child, root, &format!("{path}[{i}]"))?;
        }
    }
    if let (Some(prefix), Some(arr)) = (schema.get("prefixItems").and_then(Value::as_array), v.as_array()) {
        for (i, sub) in prefix.iter().enumerate() {
            let child = arr
                .get(i)
                .ok_or_else(|| format!("{path}: tuple too short"))?;
            validate(sub, child, root, &format!("{path}[{i}]"))?;
        }
    }
    Ok(())
}

fn schema(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn reports_validate_against_shipped_schemas() {
    let dir = tmpdir("schema");
    let rover = dir.join("rover.lhap.json");
    let wa = dir.join("wa.lhap.json");
    let wh = dir.join("wh.lhap.json");
    run(&["gen", "--bench", "rover", "--out", rover.to_str().unwrap()]);
    run(&["gen", "--bench", "warehouse", "--out", wa.to_str().unwrap()]);
    run(&["gen", "--bench", "warehouse", "--view", "human", "--out", wh.to_str().unwrap()]);

    let (out, _, code) =
        run(&["explain", "--model", rover.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&out).unwrap();
    let sch = schema("explain-report.schema.json");
    validate(&sch, &report, &sch, "$").unwrap();

    // A solvable model exercises the witness branch of the schema.
    let (out, _, code) = run(&[
        "explain",
        "--model",
        wa.to_str().unwrap(),
        "--depth",
        "6",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&out).unwrap();
    validate(&sch, &report, &sch, "$").unwrap();

    let (out, _, code) = run(&[
        "reconcile",
        "--human",
        wh.to_str().unwrap(),
        "--agent",
        wa.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&out).unwrap();
    let sch = schema("reconcile-report.schema.json");
    validate(&sch, &report, &sch, "$").unwrap();

    // Text output is a pure function of the JSON report: two runs, same text.
    let (t1, _, _) = run(&["reconcile", "--human", wh.to_str().unwrap(), "--agent", wa.to_str().unwrap()]);
    let (t2, _, _) = run(&["reconcile", "--human", wh.to_str().unwrap(), "--agent", wa.to_str().unwrap()]);
    assert_eq!(t1, t2);

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn budget_exceeded_exits_4() {
    let dir = tmpdir("budget");
    let rover = dir.join("rover.lhap.json");
    run(&["gen", "--bench", "rover", "--out", rover.to_str().unwrap()]);

    let (_, stderr, code) = run(&[
        "paths", "--model", rover.to_str().unwrap(), "--from", "l11", "--to", "l25",
        "--depth", "15", "--budget", "3",
    ]);
    assert_eq!(code, 4, "stderr: {stderr}");
    assert!(stderr.contains("budget"));

    // The env var sets the default; the flag overrides it.
    let out = Command::new(bin())
        .args(["lcs", "--model", rover.to_str().unwrap()])
        .env("HXPLAIN_BUDGET", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    let out = Command::new(bin())
        .args(["lcs", "--model", rover.to_str().unwrap(), "--budget", "1000000"])
        .env("HXPLAIN_BUDGET", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn reconcile_emits_updated_human_model() {
    let dir = tmpdir("updated");
    let wa = dir.join("wa.lhap.json");
    let wh = dir.join("wh.lhap.json");
    let updated = dir.join("wh-updated.lhap.json");
    run(&["gen", "--bench", "warehouse", "--out", wa.to_str().unwrap()]);
    run(&["gen", "--bench", "warehouse", "--view", "human", "--out", wh.to_str().unwrap()]);
    let (_, _, code) = run(&[
        "reconcile",
        "--human", wh.to_str().unwrap(),
        "--agent", wa.to_str().unwrap(),
        "--updated-human", updated.to_str().unwrap(),
        "--format", "json",
        "--out", dir.join("report.json").to_str().unwrap(),
    ]);
    assert_eq!(code, 0);

    let original = hxplain_io::parse_model(&std::fs::read_to_string(&wh).unwrap()).unwrap();
    let revised = hxplain_io::parse_model(&std::fs::read_to_string(&updated).unwrap()).unwrap();
    assert!(revised.problem.automaton.edges.len() < original.problem.automaton.edges.len());
    // The recorded invalid edges are gone; annotations list the bad segments.
    assert!(!revised.problem.automaton.edges.iter().any(|e| e.source == "l19" && e.target == "l20"));
    assert!(revised.metadata.keys().any(|k| k.starts_with("unusable_segment_")));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn lcs_exact_flag() {
    let dir = tmpdir("lcs");
    let wlm = dir.join("wlm.lhap.json");
    run(&["gen", "--bench", "water_level", "--out", wlm.to_str().unwrap()]);
    // 10 strings of length <= 21: far beyond the exact DP budget.
    let (out, _, code) = run(&["lcs", "--model", wlm.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("lcs: l1 l2 l6"), "{out}");
    assert!(out.contains("exact: false"));

    let (_, stderr, code) = run(&["lcs", "--model", wlm.to_str().unwrap(), "--exact"]);
    assert_eq!(code, 4, "forcing the exact DP must report the budget: {stderr}");

    // At a depth where only the two shortest paths exist, the DP fits.
    let (out, _, code) = run(&["lcs", "--model", wlm.to_str().unwrap(), "--depth", "4", "--exact"]);
    assert_eq!(code, 0);
    assert!(out.contains("exact: true"), "{out}");

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn gen_rejects_bad_parameters() {
    let dir = tmpdir("genbad");
    let out = dir.join("x.lhap.json");
    let (_, stderr, code) = run(&["gen", "--bench", "rover", "--rows", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("invalid parameters"));
    let (_, _, code) = run(&["gen", "--bench", "nosuch", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2);
    std::fs::remove_dir_all(&dir).ok();
}
