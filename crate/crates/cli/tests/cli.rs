use std::process::{Command, Output};

use serde_json::{json, Value};

fn cap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cap"))
        .args(args)
        .env("CAP_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn check_schema(name: &str, doc: &Value) {
    let text = include_str!("../../../schemas/cap-v1.schema.json");
    let mut schema: Value = serde_json::from_str(text).unwrap();
    schema["$ref"] = json!(format!("#/$defs/{name}"));
    let compiled = jsonschema::JSONSchema::options()
        .with_draft(jsonschema::Draft::Draft202012)
        .compile(&schema)
        .expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(doc) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    assert!(msgs.is_empty(), "{name} document does not match its schema: {msgs:#?}");
}

#[test]
fn adv_check() {
    let o = cap(&["adv", "check", "C1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["solvable"], true);
    assert!(v["families"].as_array().unwrap().contains(&json!("F1")));
    check_schema("verdict", &v);

    let o = cap(&["adv", "check", "R1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["solvable"], false);
    check_schema("verdict", &v);

    let o = cap(&["adv", "check", "GAMMA^w \\ { OK (LW)^w , LB (LW)^w }"]);
    check_schema("verdict", &stdout_json(&o));
}

#[test]
fn verify_exit_codes() {
    let o = cap(&["sim", "verify", "--adversary", "R1", "--algorithm", "aw", "--w", "(OK)^w", "--depth", "3"]);
    assert_eq!(o.status.code(), Some(3));
    let v = stdout_json(&o);
    assert!(!v["violations"].as_array().unwrap().is_empty());
    check_schema("report", &v);

    let o = cap(&["sim", "verify", "--adversary", "C1", "--depth", "2"]);
    assert_eq!(o.status.code(), Some(0));
    check_schema("report", &stdout_json(&o));

    let o = cap(&["sim", "verify", "--adversary", "S0", "--algorithm", "own-init", "--depth", "1"]);
    assert_eq!(o.status.code(), Some(3));
    check_schema("report", &stdout_json(&o));
}

#[test]
fn error_exit_codes() {
    let o = cap(&["adv", "check", "((OK)^w"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[parse]"));
    let o = cap(&["topo", "subdivide", "--rounds", "9"]);
    assert_eq!(o.status.code(), Some(2));
    let o = cap(&["sim", "verify", "--adversary", "C1", "--depth", "11"]);
    assert_eq!(o.status.code(), Some(2));
    let o = cap(&["index", "LW LL"]);
    assert_eq!(o.status.code(), Some(1));
    let o = cap(&["sim", "run", "--adversary", "C1", "--scenario", "LW (OK)^w"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn documents_match_schemas() {
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("index", vec!["index", "LW OK LB"]),
        ("limit", vec!["index", "--limit", "LW LB (OK)^w"]),
        ("witness_doc", vec!["adv", "witness", "C1"]),
        ("lowerbound", vec!["adv", "lowerbound", "S1", "--rmax", "4"]),
        ("automaton", vec!["adv", "compile", "C1"]),
        ("connectivity", vec!["adv", "connectivity", "R1"]),
        ("connectivity", vec!["adv", "connectivity", "GAMMA^w \\ { (LB)^w }"]),
        ("transcript", vec!["sim", "run", "--scenario", "LW LB (OK)^w", "--w", "(LW LB)^w"]),
        ("transcript", vec!["sim", "run", "--adversary", "C1", "--scenario", "OK (LB)^w", "--algorithm", "aeta"]),
        ("algorithms", vec!["sim", "algorithms"]),
        ("exploration", vec!["bivalency", "explore", "--adversary", "C1", "--depth", "3"]),
        ("exploration", vec!["bivalency", "explore", "--adversary", "R1", "--algorithm", "fixed-round:1", "--depth", "2"]),
        ("complex", vec!["topo", "subdivide", "--rounds", "2", "--square"]),
        ("complex", vec!["topo", "subdivide", "--rounds", "2", "--adversary", "S1"]),
        ("subdivision", vec!["topo", "subdivide", "--rounds", "4", "--adversary", "C1", "--terminating"]),
        ("components", vec!["topo", "components", "--rounds", "3"]),
        ("components", vec!["topo", "contrex", "--depth", "6"]),
    ];
    for (name, args) in cases {
        let o = cap(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        check_schema(name, &stdout_json(&o));
    }
}

#[test]
fn topo_outputs() {
    let o = cap(&["topo", "contrex"]);
    let v = stdout_json(&o);
    assert_eq!((v["abstract"].clone(), v["realization"].clone()), (json!(2), json!(1)));

    let o = cap(&["topo", "components", "--abstract", "--rounds", "3", "--adversary", "S0"]);
    let v = stdout_json(&o);
    assert_eq!(v["abstract"], 4);
    assert!(v.get("realization").is_none());

    let a = cap(&["--format", "svg", "topo", "subdivide", "--rounds", "3"]);
    let b = cap(&["--format", "svg", "topo", "subdivide", "--rounds", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let svg = String::from_utf8(a.stdout).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("viewBox=\"0 0 1000 1000\""));
    assert_eq!(svg.matches("<line").count(), 27);

    let dir = std::env::temp_dir().join(format!("cap-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("contrex.svg");
    let o = cap(&["topo", "contrex", "--depth", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.contains("stroke=\"red\""));
    let _ = std::fs::remove_dir_all(&dir);

    let o = cap(&["--format", "svg", "adv", "check", "C1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let args = ["bivalency", "explore", "--adversary", "C1", "--depth", "3"];
    assert_eq!(cap(&args).stdout, cap(&args).stdout);
    let args = ["sim", "verify", "--adversary", "S1", "--depth", "2"];
    assert_eq!(cap(&args).stdout, cap(&args).stdout);
}

#[test]
fn text_format() {
    let o = cap(&["--format", "text", "index", "--limit", "(OK)^w"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "1/2\n");
    let o = cap(&["--format", "text", "adv", "lowerbound", "R1", "--rmax", "2"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "2+\n");
}

#[test]
#[should_panic(expected = "does not match its schema")]
fn schema_rejects_malformed_documents() {
    let mut v = stdout_json(&cap(&["index", "LW OK LB"]));
    v["unexpected"] = json!(true);
    check_schema("index", &v);
}

#[test]
fn inputs_and_error_messages() {
    let o = cap(&["sim", "run", "--scenario", "LW LB (OK)^w", "--w", "(LW LB)^w", "--inputs", "1,0"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["inputs"], json!([1, 0]));
    assert_eq!(v["outcome"]["decisions"], json!([1, 1]));

    let o = cap(&["sim", "run", "--scenario", "(OK)^w", "--w", "(LW)^w", "--inputs", "1,0,1"]);
    assert_eq!(o.status.code(), Some(1));

    let o = cap(&["topo", "subdivide", "--rounds", "9"]);
    assert_eq!(String::from_utf8_lossy(&o.stderr), "error[resource]: 9 rounds exceeds 8\n");
}
