use std::path::Path;
use std::process::{Command, Output};

use clap::Parser;
use uncertlab::report::csv_columns;
use uncertlab::{run, Report, ResultEntry, RunConfig};

const GOOD: &str = r#"{
  "observables": [
    {"name": "S_z", "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]]},
    {"name": "S_x", "matrix": [[[0, 0], [0.5, 0]], [[0.5, 0], [0, 0]]]}
  ],
  "states": [{"name": "tilted", "vector": [[1, 0], [1, 1]]}]
}"#;

fn uncertlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uncertlab")).args(args).output().expect("binary runs")
}

fn in_process(args: &[&str]) -> Report {
    let cfg = RunConfig::try_parse_from(std::iter::once("uncertlab").chain(args.iter().copied())).unwrap();
    run(&cfg).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn qubit_chain_catalog_reports_four_decoherent_leaves() {
    let out = uncertlab(&["catalog", "--scenario", "figure1-qubit", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.command, "catalog");
    let leaf_check = report
        .results
        .iter()
        .find_map(|r| match r {
            ResultEntry::Check { outcome, .. } if outcome.id == "decoherent-leaf-count" => Some(outcome),
            _ => None,
        })
        .unwrap();
    assert!(leaf_check.passed);
    assert_eq!(leaf_check.observed, vec![Some(4.0)]);
    let trees: Vec<_> = report
        .results
        .iter()
        .filter_map(|r| match r {
            ResultEntry::Chain { outcome, .. } => Some(outcome),
            _ => None,
        })
        .collect();
    assert_eq!(trees.len(), 2);
    let decoherent = trees.iter().find(|t| t.tree.decoherent).unwrap();
    assert_eq!(decoherent.tree.leaves().len(), 4);
    assert_eq!(decoherent.leaf_count, 4);
}

#[test]
fn every_catalog_scenario_exits_zero() {
    for name in uncertlab_core::catalog::SCENARIO_NAMES {
        let out = uncertlab(&["catalog", "--scenario", name]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn uffink_sweep_csv_has_one_row_per_cell() {
    let out = uncertlab(&["uffink", "--scenario", "qubit-sz-sweep", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers: Vec<String> = reader.headers().unwrap().iter().map(str::to_owned).collect();
    assert_eq!(headers, csv_columns("uffink"));
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 9 * 19);
    // α-major order, and every cell is either in domain and satisfied, or out of domain.
    assert_eq!((&rows[0][2], &rows[0][3]), ("0.55", "0.05"));
    assert_eq!((&rows[170][2], &rows[170][3]), ("0.95", "0.95"));
    for r in &rows {
        assert_eq!(&r[16], "true");
        let alpha: f64 = r[2].parse().unwrap();
        let beta: f64 = r[3].parse().unwrap();
        let in_domain = &r[5] == "true";
        assert_eq!(in_domain, beta <= 2.0 * alpha - 1.0 + 1e-12, "{r:?}");
    }
}

#[test]
fn csv_numbers_have_at_most_twelve_significant_digits() {
    let out = uncertlab(&["uffink", "--scenario", "qubit-sz-sweep", "--format", "csv"]);
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    for r in reader.records() {
        for field in r.unwrap().iter() {
            if field.parse::<f64>().is_ok() {
                let mantissa = field.split('e').next().unwrap();
                let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
                let significant = digits.trim_start_matches('0');
                assert!(significant.len() <= 12, "{field}");
            }
        }
    }
}

#[test]
fn single_cell_uffink() {
    let out =
        uncertlab(&["uffink", "--scenario", "qubit-sz-sweep", "--alpha", "0.9", "--beta", "0.6", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<_> = csv::Reader::from_reader(out.stdout.as_slice()).into_records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    let dt: f64 = rows[0][12].parse().unwrap();
    assert!((dt - 2.0 * 0.6f64.acos()).abs() < 1e-8);
}

#[test]
fn malformed_custom_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.cfg", "{\"observables\": [ {\"name\": \"A\", ");
    let out = uncertlab(&["relations", "--custom", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let skew = write(
        dir.path(),
        "skew.cfg",
        r#"{"observables": [{"name": "K", "matrix": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]}]}"#,
    );
    let out = uncertlab(&["relations", "--custom", &skew]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(K)"));

    let out = uncertlab(&["relations", "--custom", &dir.path().join("missing.cfg").to_string_lossy()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["relations"],
        &["relations", "--scenario", "nope"],
        &["relations", "--scenario", "figure1-qubit", "--custom", "x.cfg"],
        &["uffink", "--scenario", "qubit-sz-sweep", "--alpha", "0.9"],
        &["uffink", "--scenario", "qubit-sz-sweep", "--alpha", "1.5", "--beta", "0.5"],
        &["uffink", "--scenario", "qubit-sz-sweep", "--observable", "S_q"],
        &["catalog", "--scenario", "figure1-qubit", "--hbar", "0"],
        &["catalog", "--scenario", "figure1-qubit", "--tolerance", "bogus=1"],
        &["catalog", "--scenario", "figure1-qubit", "--tolerance", "mass"],
        &["sweep", "--scenario", "figure1-qubit"],
        &["sweep", "--samples", "0"],
        &["frobnicate"],
        // |up> is not an S_x eigenstate.
        &["chain", "--scenario", "spin-half-sy-zero"],
    ];
    for args in cases {
        let out = uncertlab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn custom_config_runs_with_normalization_warning() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", GOOD);
    let out = uncertlab(&["relations", "--custom", &good, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("normalized"));
    let rows: Vec<_> = csv::Reader::from_reader(out.stdout.as_slice()).into_records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    // (1, 1+i)/√3: ⟨S_z⟩ = −1/6, ⟨S_x⟩ = 1/3, ⟨S_y⟩ = 1/3.
    let lhs: f64 = rows[0][4].parse().unwrap();
    let rhs: f64 = rows[0][5].parse().unwrap();
    let sz = (0.25f64 - 1.0 / 36.0).sqrt();
    let sx = (0.25f64 - 1.0 / 9.0).sqrt();
    assert!((lhs - sz * sx).abs() < 1e-11);
    assert!((rhs - 1.0 / 6.0).abs() < 1e-11);
}

#[test]
fn json_reports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", GOOD);
    let runs: Vec<Vec<&str>> = vec![
        vec!["relations", "--scenario", "spin-half-sy-zero"],
        vec!["relations", "--custom", &good],
        vec!["uffink", "--scenario", "qubit-sz-sweep"],
        vec!["uffink", "--scenario", "spin-half-sy-zero", "--observable", "S_y", "--alpha", "0.9", "--beta", "0.3"],
        vec!["chain", "--scenario", "figure1-qubit"],
        vec!["catalog", "--scenario", "l0-joint"],
        vec!["catalog", "--scenario", "qubit-sz-sweep", "--hbar", "0.5"],
        vec!["sweep", "--seed", "11", "--samples", "40"],
        vec!["list"],
    ];
    for args in runs {
        let report = in_process(&args);
        let parsed: Report = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(parsed, report, "{args:?}");
        let out = uncertlab(&args);
        assert_eq!(String::from_utf8(out.stdout).unwrap(), report.to_json(), "{args:?}");
    }
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<String> =
        (0..3).map(|k| dir.path().join(format!("r{k}.json")).to_string_lossy().into_owned()).collect();
    for (k, seed) in ["5", "5", "6"].iter().enumerate() {
        let out = uncertlab(&["sweep", "--seed", seed, "--samples", "60", "--out", &paths[k]]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    let read = |p: &str| std::fs::read(p).unwrap();
    assert_eq!(read(&paths[0]), read(&paths[1]));
    assert_ne!(read(&paths[0]), read(&paths[2]));
    let report: Report = serde_json::from_slice(&read(&paths[0])).unwrap();
    assert_eq!(report.provenance.seed, Some(5));
    for format in ["json", "csv"] {
        let a = uncertlab(&["uffink", "--scenario", "qubit-sz-sweep", "--format", format]).stdout;
        let b = uncertlab(&["uffink", "--scenario", "qubit-sz-sweep", "--format", format]).stdout;
        assert_eq!(a, b);
    }
}

#[test]
fn out_file_replaces_existing_and_leaves_no_temporaries() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    std::fs::write(&path, "stale").unwrap();
    let out = uncertlab(&["list", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("name,description"));
    assert_eq!(text.lines().count(), 1 + uncertlab_core::catalog::SCENARIO_NAMES.len());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn tolerance_overrides_are_recorded() {
    let report = in_process(&["catalog", "--scenario", "figure1-qubit", "--tolerance", "prune=1e-9"]);
    assert_eq!(report.provenance.tolerances.prune, 1e-9);
    assert_eq!(report.provenance.tolerances.hermitian, 1e-10);
}

#[test]
fn violated_entries_make_the_report_fail() {
    let mut report = in_process(&["relations", "--scenario", "spin-half-sy-zero"]);
    assert!(report.ok());
    if let ResultEntry::Relation { report: r, .. } = &mut report.results[0] {
        r.satisfied = false;
    }
    assert!(!report.ok());
}
