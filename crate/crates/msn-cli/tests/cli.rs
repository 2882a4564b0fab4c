use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const LINE: &str = r#"{"format":"msn/1","dim":1,"graded":true,"seminorms":[{"functionals":[["1"]]}]}"#;
const DOUBLE: &str = r#"{"format":"msn/1","dim":1,"graded":true,"seminorms":[{"functionals":[["1"]]},{"functionals":[["2"]]}]}"#;
const LINE2: &str = r#"{"format":"msn/1","dim":1,"graded":true,"seminorms":[{"functionals":[["1"]]},{"functionals":[["1"]]}]}"#;
const COORDS: &str = r#"{"format":"msn/1","dim":2,"graded":false,"seminorms":[{"functionals":[["1","0"]]},{"functionals":[["0","1"]]}]}"#;

fn msn(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msn")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("json on stderr")
}

fn map_file(dom: &str, cod: &str, rows: &[&[&str]]) -> String {
    let m: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
    serde_json::json!({"format": "msn/1", "domainRef": dom, "codomainRef": cod, "matrix": m}).to_string()
}

fn setup() -> tempfile::TempDir {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("l.json"), LINE).unwrap();
    fs::write(d.path().join("dbl.json"), DOUBLE).unwrap();
    fs::write(d.path().join("l2.json"), LINE2).unwrap();
    fs::write(d.path().join("x.json"), COORDS).unwrap();
    fs::write(d.path().join("id.json"), map_file("l.json", "l.json", &[&["1"]])).unwrap();
    fs::write(d.path().join("half.json"), map_file("l.json", "l.json", &[&["1/2"]])).unwrap();
    d
}

#[test]
fn invariant_of_coordinate_space() {
    let d = setup();
    let o = msn(d.path(), &["space", "invariant", "x.json"]);
    assert!(o.status.success());
    assert_eq!(stdout_json(&o)["alpha"], serde_json::json!({"": 2, "0": 1, "1": 1, "0,1": 0}));
}

#[test]
fn map_check_exit_codes() {
    let d = setup();
    assert_eq!(msn(d.path(), &["map", "check", "--delta", "0", "id.json"]).status.code(), Some(0));
    let o = msn(d.path(), &["map", "check", "--delta", "0", "half.json"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"], "notAnEmbedding");
    assert_eq!(e["witness"]["witness"]["level"], 0);
    assert_eq!(msn(d.path(), &["map", "check", "--delta", "1", "half.json"]).status.code(), Some(0));
}

#[test]
fn io_and_format_errors_exit_one() {
    let d = setup();
    let o = msn(d.path(), &["space", "inspect", "missing.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "io");
    fs::write(d.path().join("bad.json"), r#"{"format":"msn/1","dim":1,"graded":true,"seminorms":[{"functionals":[["0.5"]]}]}"#).unwrap();
    assert_eq!(msn(d.path(), &["space", "inspect", "bad.json"]).status.code(), Some(1));
    fs::write(d.path().join("old.json"), LINE.replace("msn/1", "msn/0")).unwrap();
    assert_eq!(msn(d.path(), &["space", "inspect", "old.json"]).status.code(), Some(1));
}

#[test]
fn push_on_the_line() {
    let d = setup();
    let o = msn(
        d.path(),
        &["amalgam", "push", "--x", "l.json", "--y", "l.json", "--z", "l.json", "--f", "id.json", "--g", "id.json", "--delta", "0", "--eps", "1/2", "--out", "out"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cert: Value = serde_json::from_str(&fs::read_to_string(d.path().join("out/certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["levels"][0]["distance"], "1/2");
    assert_eq!(cert["withinBound"], true);
    let w = msn(d.path(), &["space", "inspect", "out/w.json"]);
    assert_eq!(stdout_json(&w)["dim"], 2);
    // the legs reload and check as isometric
    assert!(msn(d.path(), &["map", "check", "out/legY.json"]).status.success());
}

#[test]
fn push_rejects_a_non_embedding() {
    let d = setup();
    let o = msn(d.path(), &["amalgam", "push", "--f", "half.json", "--g", "id.json", "--eps", "1/2"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "notAnEmbedding");
}

#[test]
fn space_transforms_round_trip() {
    let d = setup();
    let o = msn(d.path(), &["space", "truncate", "dbl.json", "--k", "1", "--out", "t"]);
    assert!(o.status.success());
    let got: Value = serde_json::from_str(&fs::read_to_string(d.path().join("t/space.json")).unwrap()).unwrap();
    assert_eq!(got, serde_json::from_str::<Value>(LINE).unwrap());
    let again = msn(d.path(), &["space", "graded", "t/space.json", "--out", "t2"]);
    assert!(again.status.success());
    assert_eq!(fs::read(d.path().join("t/space.json")).unwrap(), fs::read(d.path().join("t2/space.json")).unwrap());
    assert_eq!(msn(d.path(), &["space", "truncate", "dbl.json", "--k", "3"]).status.code(), Some(1));
    let q = msn(d.path(), &["space", "quotient", "x.json", "--level", "0"]);
    assert_eq!(stdout_json(&q)["quotient"]["dim"], 1);
}

#[test]
fn iso_commands() {
    let d = setup();
    let o = msn(d.path(), &["iso", "build", "l2.json", "dbl.json", "--out", "i"]);
    assert!(o.status.success());
    let o = msn(d.path(), &["iso", "build", "x.json", "l2.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["witness"]["reason"], "invariantMismatch");
    let bm = msn(d.path(), &["iso", "bm", "l2.json", "dbl.json"]);
    assert_eq!(stdout_json(&bm)["productUpperBound"], "2");
}

#[test]
fn tower_is_thread_independent_and_verifies() {
    let d = setup();
    let mut outs = Vec::new();
    for threads in ["1", "8"] {
        let dir = format!("tower{threads}");
        let o = msn(
            d.path(),
            &["tower", "build", "--catalog", "l.json", "--catalog", "dbl.json", "--stages", "3", "--seed", "5", "--threads", threads, "--out", &dir],
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outs.push(dir);
    }
    let mut names: Vec<_> = fs::read_dir(d.path().join(&outs[0])).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() > 3);
    for n in &names {
        assert_eq!(fs::read(d.path().join(&outs[0]).join(n)).unwrap(), fs::read(d.path().join(&outs[1]).join(n)).unwrap(), "{n:?}");
    }
    let v = msn(d.path(), &["tower", "verify", "tower1"]);
    assert!(v.status.success(), "{}", String::from_utf8_lossy(&v.stderr));
    assert_eq!(stdout_json(&v)["passed"], true);

    // a tampered distance must be caught
    let cpath = d.path().join("tower1/certificates.json");
    let mut c: Value = serde_json::from_str(&fs::read_to_string(&cpath).unwrap()).unwrap();
    c["certificates"][0]["distances"][0] = Value::String("1/1024".into());
    fs::write(&cpath, serde_json::to_string(&c).unwrap()).unwrap();
    let v = msn(d.path(), &["tower", "verify", "tower1"]);
    assert_eq!(v.status.code(), Some(2));
    assert!(!stderr_json(&v)["witness"].as_array().unwrap().is_empty());
}

#[test]
fn backforth_on_twin_towers() {
    let d = setup();
    for (dir, seed) in [("a", "1"), ("b", "2")] {
        let o = msn(d.path(), &["tower", "build", "--catalog", "l.json", "--stages", "3", "--seed", seed, "--out", dir]);
        assert!(o.status.success());
    }
    let o = msn(d.path(), &["tower", "backforth", "a", "b", "--n", "1", "--steps", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["holds"], true);
    assert_eq!(v["initial"]["bound"], "1/2");
}

#[test]
fn ramsey_net_oscillate_search() {
    let d = setup();
    fs::write(d.path().join("sq.json"), r#"{"format":"msn/1","dim":2,"graded":true,"seminorms":[{"functionals":[["0","1"],["1","0"]]}]}"#).unwrap();
    let o = msn(d.path(), &["ramsey", "net", "--x", "l.json", "--y", "sq.json", "--eps", "1", "--out", "n"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["points"], 8);
    let o = msn(d.path(), &["ramsey", "net", "--x", "l.json", "--y", "l.json", "--eps", "1", "--out", "m"]);
    assert_eq!(stdout_json(&o)["points"], 2);

    fs::write(d.path().join("clamp.json"), r#"{"format":"msn/1","kind":"continuous","level":1,"family":{"name":"coordinateClamp","coordinate":0}}"#).unwrap();
    let o = msn(d.path(), &["ramsey", "oscillate", "--net", "n/net.json", "--colouring", "clamp.json"]);
    assert_eq!(stdout_json(&o)["oscillation"], "1");

    // a table that jumps by 1 between neighbours at distance 1/2 breaks the Lipschitz contract
    let o = msn(d.path(), &["ramsey", "net", "--x", "l.json", "--y", "sq.json", "--eps", "1/2", "--out", "h"]);
    assert_eq!(stdout_json(&o)["points"], 16);
    let table: serde_json::Map<String, Value> = (0..16).map(|i| (i.to_string(), Value::String(if i == 0 { "1" } else { "0" }.into()))).collect();
    let bad = serde_json::json!({"format": "msn/1", "kind": "continuous", "level": 1, "table": table});
    fs::write(d.path().join("bad.json"), bad.to_string()).unwrap();
    let o = msn(d.path(), &["ramsey", "oscillate", "--net", "h/net.json", "--colouring", "bad.json"]);
    assert_eq!(o.status.code(), Some(2));

    fs::write(d.path().join("emb.json"), map_file("l.json", "sq.json", &[&["1"], &["0"]])).unwrap();
    fs::write(d.path().join("sign.json"), r#"{"format":"msn/1","kind":"discrete","colours":2,"family":{"name":"signOfFirst"}}"#).unwrap();
    let o = msn(
        d.path(),
        &["ramsey", "search", "--net-xz", "n/net.json", "--net-xy", "m/net.json", "--colouring", "sign.json", "--candidate", "emb.json", "--eps", "1/2"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["witness"]["found"], false);
    let o = msn(
        d.path(),
        &["ramsey", "search", "--net-xz", "n/net.json", "--net-xy", "m/net.json", "--colouring", "sign.json", "--candidate", "emb.json", "--eps", "2"],
    );
    assert_eq!(stdout_json(&o)["candidate"], 0);
}

#[test]
fn ramsey_product_identity() {
    let d = setup();
    fs::write(d.path().join("y0.json"), r#"{"format":"msn/1","dim":2,"graded":true,"seminorms":[{"functionals":[["1","0"]]}]}"#).unwrap();
    fs::write(d.path().join("y1.json"), r#"{"format":"msn/1","dim":2,"graded":true,"seminorms":[{"functionals":[["0","1"]]}]}"#).unwrap();
    fs::write(d.path().join("r0.json"), map_file("y0.json", "l.json", &[&["1", "0"]])).unwrap();
    fs::write(d.path().join("r1.json"), map_file("y1.json", "l.json", &[&["0", "1"]])).unwrap();
    fs::write(d.path().join("eta.json"), map_file("x.json", "y0.json", &[&["2", "1"], &["-1", "3"]])).unwrap();
    fs::write(d.path().join("mod.json"), r#"{"format":"msn/1","kind":"discrete","colours":3,"family":{"name":"modularSum","colours":3}}"#).unwrap();
    let o = msn(
        d.path(),
        &["ramsey", "product", "--colouring", "mod.json", "--factor", "l.json", "--factor", "l.json", "--rho", "r0.json", "--rho", "r1.json", "--eta", "eta.json"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["holds"], true);
}
