use std::path::Path;
use std::process::{Command, Output};

fn presence(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_presence"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(2)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

fn out_arg(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = presence(&[
            "frequency",
            "--rho-u",
            "0.3",
            "--n",
            "1000",
            "--out",
            out_arg(p),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn seeded_posterior_is_reproducible() {
    let args = [
        "posterior",
        "--rho-u",
        "0.3",
        "--n",
        "500",
        "--seed",
        "17",
        "--format",
        "json",
    ];
    let first = presence(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, presence(&args).stdout);
    let v: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert!(v["summary"]["sampled_count"].as_u64().is_some());
    let other = presence(&[
        "posterior",
        "--rho-u",
        "0.3",
        "--n",
        "500",
        "--seed",
        "18",
        "--format",
        "json",
    ]);
    assert_ne!(first.stdout, other.stdout);
}

#[test]
fn frequency_peak_row() {
    let o = presence(&["frequency", "--rho-u", "0.3", "--n", "1000"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("# presence "));
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "z,presence_density,gaussian_density,histogram_density"
    );
    let table = rows(&text);
    assert_eq!(table.len(), 1001);
    let peak = table.iter().max_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    assert!((peak[0] - 0.3).abs() < 1e-12);
    assert!((peak[2] - (1000.0 / (2.0 * std::f64::consts::PI * 0.21)).sqrt()).abs() < 1e-9);
}

#[test]
fn even_split_over_two_trials() {
    let o = presence(&["frequency", "--rho-u", "0.5", "--n", "2", "--table", "bars"]);
    let masses: Vec<f64> = rows(&String::from_utf8(o.stdout).unwrap())
        .iter()
        .map(|r| r[1])
        .collect();
    assert_eq!(masses, vec![0.25, 0.5, 0.25]);
}

#[test]
fn posterior_summary() {
    let o = presence(&["posterior", "--z", "0.3", "--n", "1000", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["summary"]["mode"].as_f64().unwrap() - 0.3).abs() <= 1e-3);
    assert_eq!(v["rows"].as_array().unwrap().len(), 1001);

    let o = presence(&["posterior", "--z", "0.3", "--n", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let ci = &v["summary"]["credible_interval"];
    assert!(ci["hi"].as_f64().unwrap() - ci["lo"].as_f64().unwrap() > 0.6);
}

#[test]
fn decision_report() {
    let o = presence(&[
        "decision", "--rho-u", "0.3", "--w-u", "0.5", "--n", "1000", "--format", "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let s = &v["summary"];
    assert!(
        s["mismatch"]["presence_mass_in_weight_window"]
            .as_f64()
            .unwrap()
            < 1e-10
    );
    assert_eq!(s["bets_at_presence"]["choice"], "B");

    let rows = v["rows"].as_array().unwrap();
    let argmax = |key: &str| {
        rows.iter()
            .max_by(|a, b| {
                a[key]
                    .as_f64()
                    .unwrap()
                    .total_cmp(&b[key].as_f64().unwrap())
            })
            .unwrap()["z"]
            .as_f64()
            .unwrap()
    };
    assert!((argmax("presence") - 0.3).abs() < 1e-12);
    assert!((argmax("weight") - 0.5).abs() < 1e-12);

    let same = presence(&[
        "decision", "--rho-u", "0.3", "--w-u", "0.3", "--n", "1000", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&same.stdout).unwrap();
    assert!((v["summary"]["mismatch"]["overlap"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn decoherence_table_follows_closed_form() {
    let o = presence(&[
        "decohere",
        "--rho-u",
        "0.5",
        "--g",
        "0.7",
        "--env-qubits",
        "10",
    ]);
    for r in rows(&String::from_utf8(o.stdout).unwrap()) {
        assert!((r[1] - r[2]).abs() < 1e-9, "{r:?}");
    }
}

#[test]
fn invalid_arguments_leave_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    for args in [
        vec!["frequency", "--rho-u", "1.5", "--n", "10"],
        vec!["frequency", "--rho-u", "0.3", "--n", "0"],
        vec!["frequency", "--rho-u", "0.3", "--n", "10", "--delta-z", "2"],
        vec!["posterior", "--n", "10"],
        vec!["decision", "--rho-u", "0.3", "--n", "10"],
        vec!["posterior", "--z", "0.3", "--n", "10", "--grid-step", "0.3"],
    ] {
        let mut full = args.clone();
        full.extend(["--out", out_arg(&path)]);
        let o = presence(&full);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!path.exists());
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn unwritable_destination() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let o = presence(&[
        "frequency",
        "--rho-u",
        "0.3",
        "--n",
        "10",
        "--out",
        out_arg(&path),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!String::from_utf8(o.stderr).unwrap().is_empty());
}

#[test]
fn chebyshev_sweep() {
    let o = presence(&[
        "chebyshev",
        "--rho-u",
        "0.3",
        "--n",
        "1000",
        "--delta-z",
        "0.1",
    ]);
    let table = rows(&String::from_utf8(o.stdout).unwrap());
    let last = table.last().unwrap();
    assert_eq!(last[0], 1000.0);
    assert!((last[2] - 0.084).abs() < 1e-12);
    assert!(table.iter().all(|r| r[1] <= r[2]));
}
