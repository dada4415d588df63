use std::path::Path;
use std::process::{Command, Output};

fn linkorbit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linkorbit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn index_constant_path_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("idx");
    let o = linkorbit(&["index", "--constant", "0.5", "--iterates", "3", "--out", arg(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("indices.csv")).unwrap();
    let rows: Vec<Vec<String>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    let triples: Vec<(&str, &str, &str)> = rows.iter().map(|r| (r[0].as_str(), r[1].as_str(), r[2].as_str())).collect();
    assert_eq!(triples, [("1", "1", "0"), ("2", "1", "2"), ("3", "3", "0")]);
    assert!(rows.iter().all(|r| r[7] == "true"));
    assert!(csv.starts_with("k,i,nu,prop210_lo,prop210_hi,prop212_lo,prop212_hi,ok\n"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("ok"));
}

#[test]
fn index_from_path_file_and_config() {
    let tmp = tempfile::tempdir().unwrap();
    let tau = std::f64::consts::TAU;
    let mut text = format!("1 {tau} 9\n");
    for j in 0..9 {
        let t = tau * j as f64 / 8.0;
        let b = 1.5 + 0.3 * t.cos();
        text.push_str(&format!("{t} {b} 0 0 {b}\n"));
    }
    std::fs::write(tmp.path().join("b.txt"), &text).unwrap();
    let direct = tmp.path().join("direct");
    let o = linkorbit(&[
        "index",
        "--path",
        arg(&tmp.path().join("b.txt")),
        "--period",
        &tau.to_string(),
        "--iterates",
        "2",
        "--out",
        arg(&direct),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // The same run from a config file with a relative path.
    std::fs::write(
        tmp.path().join("run.toml"),
        "mode = \"index\"\nk_list = [1, 2]\n[model]\nkind = \"linear\"\npath = { file = \"b.txt\" }\n",
    )
    .unwrap();
    let via = tmp.path().join("via");
    let o = linkorbit(&["index", "--config", arg(&tmp.path().join("run.toml")), "--out", arg(&via)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        std::fs::read_to_string(direct.join("indices.csv")).unwrap(),
        std::fs::read_to_string(via.join("indices.csv")).unwrap()
    );
    // A mismatched period is a config error.
    let o = linkorbit(&["index", "--path", arg(&tmp.path().join("b.txt")), "--period", "1.0", "--out", arg(&via)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tau"));
}

#[test]
fn check_example_hypotheses() {
    let tmp = tempfile::tempdir().unwrap();
    let o = linkorbit(&["check", "--out", arg(tmp.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(tmp.path());
    let verdicts = s["check"]["verdicts"].as_array().unwrap();
    assert_eq!(verdicts.len(), 5);
    for v in verdicts {
        let st = v["status"].as_str().unwrap();
        assert!(st == "Holds" || st == "Consistent", "{v}");
    }
}

#[test]
fn config_errors_exit_nonzero_with_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("scan.toml");
    std::fs::write(&cfg, "mode = \"scan\"\nk_list = []\n").unwrap();
    let o = linkorbit(&["scan", "--config", arg(&cfg), "--out", arg(&tmp.path().join("o"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k_list"));

    std::fs::write(&cfg, "mode = \"scan\"\n\n[solver]\nm = \"many\"\n").unwrap();
    let o = linkorbit(&["scan", "--config", arg(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"), "{}", String::from_utf8_lossy(&o.stderr));

    let json = tmp.path().join("bad.json");
    std::fs::write(&json, "{\"solver\": {\"tol\": 0.0}}").unwrap();
    let o = linkorbit(&["solve", "--config", arg(&json)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("solver.tol"));
}

#[test]
fn solve_is_deterministic_and_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let o = linkorbit(&["solve", "--modes", "16", "--seed", "7", "--out", arg(dir)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let sa = std::fs::read(a.join("summary.json")).unwrap();
    assert_eq!(sa, std::fs::read(b.join("summary.json")).unwrap());
    let s = summary(&a);
    assert_eq!(s["status"], "ok");
    assert_eq!(s["seed"], 7);
    let sol = &s["solve"]["solutions"][0];
    assert!(a.join(sol["file"].as_str().unwrap()).exists());
    assert!(a.join(sol["samples_file"].as_str().unwrap()).exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_sha256"], s["config_sha256"]);
    let names: Vec<&str> = manifest["files"].as_array().unwrap().iter().map(|f| f["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"summary.json"));
    // The loop file round-trips through the library reader.
    let z = linkorbit::loopspace::FourierLoop::read_csv(a.join(sol["file"].as_str().unwrap())).unwrap();
    assert_eq!(z.m(), 16);
}
