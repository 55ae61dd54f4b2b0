use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn liniso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liniso"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = liniso(args);
    assert!(
        out.status.success(),
        "liniso {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn norm_reports() {
    let dir = tempfile::tempdir().unwrap();
    let parity = write(dir.path(), "p.tt", "n=3\n55\n");
    let and2 = write(dir.path(), "a.tt", "n=2\n1\n");
    assert!(ok(&["norm", s(&parity)]).contains("spectral_norm = 1\n"));
    assert!(ok(&["norm", s(&and2)]).contains("spectral_norm = 2\n"));
    let out = ok(&["--json", "norm", s(&parity), "--gamma", "1/3"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["approx_f64"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-6);
    assert_eq!(v["approx"], "2/3");
}

#[test]
fn parse_errors_carry_positions() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.tt", "n=2\nz\n");
    let out = liniso(&["norm", s(&bad)]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2, column 1"), "{err}");
}

#[test]
fn gen_canon_wht() {
    let dir = tempfile::tempdir().unwrap();
    let (e1, e2) = (dir.path().join("e1.tt"), dir.path().join("e2.tt"));
    ok(&["gen", "--family", "parity:1", "--n", "3", "--out", s(&e1)]);
    ok(&["gen", "--family", "parity:2", "--n", "3", "--out", s(&e2)]);
    assert!(ok(&["norm", s(&e1)]).contains("spectral_norm = 1\n"));
    let (c1, c2) = (dir.path().join("c1.tt"), dir.path().join("c2.tt"));
    let m = ok(&["canon", s(&e1), "--out", s(&c1)]);
    ok(&["canon", s(&e2), "--out", s(&c2)]);
    assert_eq!(std::fs::read(&c1).unwrap(), std::fs::read(&c2).unwrap());
    assert_eq!(m.lines().count(), 3);

    let and2 = write(dir.path(), "a.tt", "n=2\n1\n");
    let wht = ok(&["wht", s(&and2)]);
    let coeffs: Vec<&str> = wht.lines().map(|l| l.split(' ').nth(1).unwrap()).collect();
    assert_eq!(coeffs, ["1/2", "1/2", "1/2", "-1/2"]);
}

#[test]
fn gen_is_seeded() {
    let a = ok(&["--seed", "5", "gen", "--family", "uniform", "--n", "4"]);
    let b = ok(&["--seed", "5", "gen", "--family", "uniform", "--n", "4"]);
    let c = ok(&["--seed", "6", "gen", "--family", "uniform", "--n", "4"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn lindist_and_guard() {
    let dir = tempfile::tempdir().unwrap();
    let one = write(dir.path(), "one.tt", "n=3\n00\n");
    let chi = write(dir.path(), "chi.tt", "n=3\n55\n");
    let out = ok(&["lindist", s(&one), s(&chi)]);
    assert!(out.starts_with("value = 1/2\n"));
    let out = ok(&["lindist", s(&chi), s(&chi), "--affine"]);
    assert!(out.contains("shift = 000"));

    let big = ok(&["gen", "--family", "uniform", "--n", "6"]);
    let big = write(dir.path(), "big.tt", &big);
    let out = liniso(&["lindist", s(&big), s(&big)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("guard is n <= 5"));
    assert!(liniso(&["--guard-n", "6", "canon", s(&one)]).status.success());
}

#[test]
fn protocol_runs_in_process() {
    let dir = tempfile::tempdir().unwrap();
    let one = write(dir.path(), "one.tt", "n=3\n00\n");
    let chi = write(dir.path(), "chi.tt", "n=3\n55\n");
    for cmd in ["run-det", "run-rand", "run-public"] {
        let v: Value = serde_json::from_str(&ok(&[
            "--json", cmd, "--f", s(&one), "--g", s(&chi), "--omega", "1/4",
        ]))
        .unwrap();
        assert_eq!(v["outcome"], "reject", "{cmd}");
        assert_eq!(v["stats"]["promise"], "far");
        let total = v["total_bits"].as_u64().unwrap();
        let lens: u64 = v["messages"]
            .as_array()
            .unwrap()
            .iter()
            .map(|m| m["len"].as_u64().unwrap())
            .sum();
        assert_eq!(total, lens);
    }
    let v: Value = serde_json::from_str(&ok(&[
        "--json", "run-public", "--f", s(&chi), "--g", s(&chi), "--omega", "1/4",
    ]))
    .unwrap();
    assert_eq!(v["outcome"], "accept");
    assert_eq!(v["total_bits"], 8);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys[..4], ["protocol", "n", "epsilon", "omega"]);
}

#[test]
fn protocol_over_tcp() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.tt", "n=3\n17\n");
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let addr = format!("127.0.0.1:{port}");
    let alice = Command::new(env!("CARGO_BIN_EXE_liniso"))
        .args(["--json", "run-det", "--omega", "1/4", "--f", s(&f), "--listen", &addr])
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    let bob: Value = serde_json::from_str(&ok(&[
        "--json", "run-det", "--omega", "1/4", "--g", s(&f), "--connect", &addr,
    ]))
    .unwrap();
    let alice: Value =
        serde_json::from_slice(&alice.wait_with_output().unwrap().stdout).unwrap();
    assert_eq!(bob["outcome"], "accept");
    assert_eq!(alice["total_bits"], bob["total_bits"]);
    assert_eq!(alice["messages"], bob["messages"]);
}

#[test]
fn phimap_and_reduction() {
    let out = ok(&["phimap", "--n", "1", "--ell", "2", "--omega", "1/4", "--verify"]);
    assert!(out.contains("verify = pass"), "{out}");
    assert_eq!(out.lines().filter(|l| l.contains(" -> ")).count(), 2);
    for oracle in ["exact", "det", "public"] {
        let out = ok(&[
            "reduce-equ", "--n", "1", "--ell", "2", "--omega", "1/4", "--oracle", oracle,
        ]);
        assert!(out.ends_with("agreement = 4/4\n"), "{oracle}: {out}");
    }
    let out = liniso(&["phimap", "--n", "3", "--ell", "1", "--omega", "1/4"]);
    assert!(!out.status.success());
}

#[test]
fn experiment_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let args = |out: &Path| {
        vec![
            "--seed".to_string(),
            "11".into(),
            "experiment".into(),
            "--protocol".into(),
            "det".into(),
            "--family".into(),
            "planted-junta:2".into(),
            "--n".into(),
            "3..4".into(),
            "--omega".into(),
            "1/4".into(),
            "--trials".into(),
            "10".into(),
            "--omit-timing".into(),
            "--out".into(),
            s(out).into(),
        ]
    };
    for out in [&a, &b] {
        let argv = args(out);
        ok(&argv.iter().map(String::as_str).collect::<Vec<_>>());
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,family,omega,t_ceiling,correct_frac,mean_bits,max_bits,wall_ms"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert_eq!(row.split(',').nth(4).unwrap(), "1.0000", "{row}");
    }
}

#[test]
fn experiment_rejects_bad_config() {
    for extra in [
        &["--trials", "0"][..],
        &["--n", "7"][..],
        &["--eps", "1/8"][..],
    ] {
        let mut argv = vec![
            "experiment", "--protocol", "rand", "--family", "uniform", "--omega", "1/4",
        ];
        if !extra.contains(&"--n") {
            argv.extend(["--n", "3"]);
        }
        argv.extend(extra);
        assert!(!liniso(&argv).status.success(), "{extra:?}");
    }
}
