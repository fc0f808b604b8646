use std::path::Path;
use std::process::{Command, Output};

fn run(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fermat-zeta"))
        .arg("--quiet")
        .args(args)
        .env("FERMAT_ZETA_CACHE", cache)
        .output()
        .expect("run fermat-zeta")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn invariants_of_the_quintic() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["invariants", "--q", "2", "--d", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains(r#""br_reg":"1073741824""#), "{text}");
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["rank"], 14);
    assert_eq!(v["p_g"], 4);
}

#[test]
fn quadric_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "--q", "3", "--d", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["zeta", "--q", "2", "--d", "29"]).status.code(), Some(3));
    assert_eq!(run(dir.path(), &["zeta", "--q", "2"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["zeta", "--q", "6", "--d", "5"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["zeta", "--q", "2", "--d", "4"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["verify", "--q", "2", "--d", "3", "--emit", "csv"]).status.code(), Some(2));
    assert_eq!(
        run(dir.path(), &["--max-orbit-order", "3", "invariants", "--q", "2", "--d", "5"]).status.code(),
        Some(3)
    );
}

#[test]
fn zeta_output_is_cache_independent() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["zeta", "--q", "3", "--d", "4"];
    let cold = run(dir.path(), &args);
    let warm = run(dir.path(), &args);
    assert_eq!(cold.status.code(), Some(0));
    assert_eq!(cold.stdout, warm.stdout);
    assert!(dir.path().join("v1").is_dir());
    let v: serde_json::Value = serde_json::from_str(&stdout(&cold)).unwrap();
    // b2 = (d - 1)(d^2 - 3d + 3) + 1
    assert_eq!(v["degree"], 3 * 7 + 1);
    assert_eq!(v["poly"][0], "1");
}

#[test]
fn corrupt_cache_entries_are_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["invariants", "--q", "2", "--d", "7"];
    let clean = run(dir.path(), &args).stdout;
    let mut corrupted = 0;
    for entry in walk(dir.path()) {
        std::fs::write(&entry, "{ not json").unwrap();
        corrupted += 1;
    }
    assert!(corrupted > 0);
    let again = run(dir.path(), &args);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(again.stdout, clean);
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn zeta_csv_lists_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--emit", "csv", "zeta", "--q", "2", "--d", "3"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,coefficient");
    // (1 - 2T)^4 (1 + 2T)^3 = 1 - 2T - 12T^2 + ...
    assert_eq!(&lines[1..4], ["0,1", "1,-2", "2,-12"]);
    assert_eq!(lines.len(), 9);
}

#[test]
fn orbits_stickelberger_equidist() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["orbits", "--q", "2", "--d", "5", "--lambda", "circ"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["orbits"].as_array().unwrap().len(), 13);
    assert_eq!(v["stats"]["size"], 52);

    let o = run(dir.path(), &["stickelberger", "--p", "2", "--d", "5", "--tuple", "1,1,4,4"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["tuple"]["valuation"], "1");
    assert_eq!(v["w_total"], "0");
    assert_eq!(v["conjugate_pairs"], true);

    let o = run(dir.path(), &["stickelberger", "--p", "2", "--d", "5", "--tuple", "1,1,1,1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(dir.path(), &["equidist", "--d", "31", "--subgroup-of", "2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["subgroup"], serde_json::json!([1, 2, 4, 8, 16]));
    assert_eq!(v["holds"], true);
}

#[test]
fn sweep_skips_with_reasons() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--emit", "json", "sweep", "--q", "2", "--d-from", "3", "--d-to", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ds: Vec<u64> = v["rows"].as_array().unwrap().iter().map(|r| r["d"].as_u64().unwrap()).collect();
    assert_eq!(ds, [5]);
    let skipped: Vec<u64> = v["skipped"].as_array().unwrap().iter().map(|r| r["d"].as_u64().unwrap()).collect();
    assert_eq!(skipped, [3, 4, 6]);
}
