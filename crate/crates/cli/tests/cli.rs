use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qpoker_cli::commands::{read_calibration, read_counts};

fn qpoker(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpoker")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn comment<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines().find_map(|l| l.strip_prefix(&format!("# {key}: "))).unwrap()
}

#[test]
fn simulate_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        let o = qpoker(&["simulate", "--shots", "2048", "--seed", "5", "--out", path(p)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(comment(&text, "config_hash").len(), 64);
    let e: f64 = comment(&text, "expectation").parse().unwrap();
    assert!((e - 4.0).abs() < 0.1);
    let counts = read_counts(&a).unwrap();
    assert_eq!(counts.as_slice().iter().sum::<u64>(), 2048);
    assert!(text.contains("\n11111,") && text.contains("\n01101,"));

    let other = dir.path().join("c.csv");
    qpoker(&["simulate", "--shots", "2048", "--seed", "6", "--out", path(&other)]);
    assert_ne!(text, fs::read_to_string(&other).unwrap());
}

#[test]
fn simulate_rejects_bad_input() {
    assert_eq!(code(&qpoker(&["simulate", "--shots", "0"])), 1);
    assert_eq!(code(&qpoker(&["simulate", "--circuit", "/no/such/file.json"])), 1);
    assert_eq!(code(&qpoker(&["simulate", "--bogus"])), 1);
    assert_eq!(code(&qpoker(&["--help"])), 0);
}

#[test]
fn simulate_on_noisy_device() {
    let o = qpoker(&["simulate", "--shots", "4096", "--device", "qx2"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let e: f64 = comment(&text, "expectation").parse().unwrap();
    assert!(e < 3.95 && e > 2.5, "{e}");
}

#[test]
fn transpile_reports_and_writes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("qx2.json");
    let o = qpoker(&["transpile", "--device", "qx2", "--out", path(&out)]);
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("cx: 9 depth: 11"), "{stdout}");
    assert!(stdout.contains("equivalence: PASS"));
    let c = qpoker_core::Circuit::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    qpoker_core::transpiler::check_coupling(&c, &qpoker_core::DeviceModel::qx2()).unwrap();

    let o = qpoker(&["transpile", "--device", "ourense", "--greedy"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&qpoker(&["transpile", "--device", "ideal:3"])), 1);
    assert_eq!(code(&qpoker(&["transpile", "--device", "nowhere"])), 1);
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("exp.json");
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn zne_writes_reports_and_reruns_from_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"circuit":"reference","device":"qx2","rs":[1,2,4],"reps":8,"shots":256,"seed":3}"#);
    let out = dir.path().join("run1");
    let o = qpoker(&["zne", "--config", path(&cfg), "--out", path(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let results = fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(results.lines().filter(|l| !l.starts_with('#')).count(), 1 + 3 * 8);
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.contains("r,mean,stderr"));
    let report = fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(report.contains("\nE_1,") && report.contains("\nE_4,") && report.contains("\n\"R(E_1,E_2,E_4)\","));

    let out2 = dir.path().join("run2");
    let o = qpoker(&["zne", "--config", path(&out.join("record.json")), "--out", path(&out2)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["results.csv", "summary.csv", "report.csv"] {
        assert_eq!(fs::read(out.join(f)).unwrap(), fs::read(out2.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn zne_validation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let dup = write_config(dir.path(), r#"{"circuit":"reference","device":"qx2","rs":[1,2,2],"reps":2,"shots":16}"#);
    assert_eq!(code(&qpoker(&["zne", "--config", path(&dup), "--out", path(&out)])), 1);
    let unknown = write_config(dir.path(), r#"{"circuit":"reference","device":"qx2","colour":"red"}"#);
    assert_eq!(code(&qpoker(&["zne", "--config", path(&unknown), "--out", path(&out)])), 1);
    let zero = write_config(dir.path(), r#"{"circuit":"reference","device":"qx2","shots":0}"#);
    assert_eq!(code(&qpoker(&["zne", "--config", path(&zero), "--out", path(&out)])), 1);
}

#[test]
fn calibrate_then_filter() {
    let dir = tempfile::tempdir().unwrap();
    let cal = dir.path().join("cal.csv");
    let o = qpoker(&["calibrate", "--device", "qx2", "--n", "2", "--shots", "4096", "--seed", "1", "--out", path(&cal)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("4 preparations"));
    let m = read_calibration(&cal).unwrap();
    for j in 0..4 {
        let col: f64 = (0..4).map(|i| m.matrix()[(i, j)]).sum();
        assert!((col - 1.0).abs() < 1e-9);
        assert!(m.matrix()[(j, j)] > 0.8);
    }
    let heat = fs::read_to_string(dir.path().join("cal-heatmap.csv")).unwrap();
    assert_eq!(heat.lines().filter(|l| !l.starts_with('#')).count(), 17);

    let counts = dir.path().join("counts.csv");
    fs::write(&counts, "# made up\nbitstring,count,probability\n00,13,0\n01,2,0\n10,2,0\n11,13,0\n").unwrap();
    let o = qpoker(&["filter", "--calibration", path(&cal), "--counts", path(&counts)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let raw: f64 = comment(&text, "raw expectation").parse().unwrap();
    let filtered: f64 = comment(&text, "filtered expectation").parse().unwrap();
    assert!((raw - 1.0).abs() < 1e-12);
    assert!(filtered >= 0.0 && filtered <= 2.0);

    assert_eq!(code(&qpoker(&["calibrate", "--device", "qx2", "--n", "9"])), 1);
    assert_eq!(code(&qpoker(&["filter", "--calibration", path(&counts), "--counts", path(&counts)])), 1);
}

#[test]
fn play_bot_conserves_chips() {
    let dir = tempfile::tempdir().unwrap();
    let o = qpoker(&["play-bot", "--hands", "20", "--players", "4", "--seed", "2", "--out", path(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("hands.csv")).unwrap();
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(csv.as_bytes());
    let mut per_hand = std::collections::BTreeMap::<u64, (u64, u64)>::new();
    for r in rdr.records() {
        let r = r.unwrap();
        let e = per_hand.entry(r[0].parse().unwrap()).or_default();
        e.0 += r[2].parse::<u64>().unwrap();
        e.1 += r[3].parse::<u64>().unwrap();
    }
    assert_eq!(per_hand.len(), 20);
    assert!(per_hand.values().all(|(a, b)| a == b));
    let log = fs::read_to_string(dir.path().join("hands.jsonl")).unwrap();
    assert_eq!(log.lines().filter(|l| l.contains("\"new_hand\"")).count(), 20);
    assert_eq!(code(&qpoker(&["play-bot", "--players", "1", "--out", path(dir.path())])), 1);
}
