use std::path::Path;
use std::process::Command;

use subcut::harness::REPORT_HEADER;

fn subcut(args: &[&str]) -> (bool, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_subcut")).args(args).output().unwrap();
    (
        out.status.success(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn root_prints_model_cuts_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = write(dir.path(), "k3.txt", "3 3\n1 2 1\n1 3 1\n2 3 1\n");
    let csv = dir.path().join("out.csv");
    let (ok, stdout, stderr) = subcut(&["root", &k3, "--cuts", "submodular", "--rounds", "5", "--report", csv.to_str().unwrap()]);
    assert!(ok, "{stderr}");
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "MODEL n=3 y=3 rows=10 targets=1");
    assert!(lines.iter().any(|l| l.starts_with("CUT kind=env rays=")));
    let report = std::fs::read_to_string(&csv).unwrap();
    let mut rows = report.lines();
    assert_eq!(rows.next(), Some(REPORT_HEADER));
    let fields: Vec<&str> = rows.next().unwrap().split(',').collect();
    assert_eq!(&fields[..5], &["k3.txt", "submodular", "3", "2", "2"]);
    assert_eq!(fields[5], "1");
}

#[test]
fn root_none_closes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = write(dir.path(), "k3.txt", "3 3\n1 2 1\n1 3 1\n2 3 1\n");
    let (ok, stdout, _) = subcut(&["root", &k3, "--cuts", "none"]);
    assert!(ok);
    assert!(stdout.lines().any(|l| l.starts_with("k3.txt,none,3,3,2,0,0,")));
}

#[test]
fn verify_passes_on_small_instances() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write(dir.path(), "p.mubo", "3 2\n3 1 2\n-2 1 2 3\nconstraint 1\n1 1 2\n");
    let (ok, stdout, stderr) = subcut(&["verify", &poly]);
    assert!(ok, "{stdout}{stderr}");
    assert!(stdout.contains("[PASS] linearization exact"));
    assert!(!stdout.contains("[FAIL]"));
}

#[test]
fn gen_is_seeded_and_parseable() {
    let (ok, a, _) = subcut(&["gen", "g05", "-n", "10", "--seed", "4"]);
    assert!(ok);
    let (_, b, _) = subcut(&["gen", "g05", "-n", "10", "--seed", "4"]);
    assert_eq!(a, b);
    assert!(subcut::formats::parse_graph(&a).is_ok());
    let (ok, poly, _) = subcut(&["gen", "autocorr", "-n", "6", "--seed", "1"]);
    assert!(ok);
    assert!(subcut::formats::parse_polynomial(&poly).is_ok());
    let (ok, _, stderr) = subcut(&["gen", "pw", "-n", "1"]);
    assert!(!ok && stderr.contains("n >= 2"));
}

#[test]
fn bench_runs_configured_modes() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..2 {
        let (ok, g, _) = subcut(&["gen", "g05", "-n", "8", "--seed", &seed.to_string()]);
        assert!(ok);
        write(dir.path(), &format!("g{seed}.txt"), &g);
    }
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"modes": ["none", "split", "submodular"], "rounds": 3}"#).unwrap();
    let (ok, stdout, stderr) = subcut(&["bench", dir.path().to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    assert!(ok, "{stderr}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with('g')).count(), 6);
    assert!(stdout.contains("mode") && stdout.contains("relative"));
}

#[test]
fn bad_input_is_reported_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "3 2\n1 2 1\n1 4 1\n");
    let (ok, _, stderr) = subcut(&["root", &bad]);
    assert!(!ok);
    assert!(stderr.contains("line 3"), "{stderr}");
    let big = write(dir.path(), "big.txt", "25 1\n1 2 1\n");
    let (ok, _, stderr) = subcut(&["root", &big]);
    assert!(!ok && stderr.contains(".ref"), "{stderr}");
    std::fs::write(dir.path().join("big.txt.ref"), "1\n").unwrap();
    let (ok, stdout, stderr) = subcut(&["root", &big, "--cuts", "split"]);
    assert!(ok, "{stderr}");
    assert!(stdout.contains("big.txt,split,1,1,1,0,0,"));
}
