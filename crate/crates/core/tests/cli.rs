use std::path::Path;
use std::process::{Command, Output};

use indoorsim::output::{read_cdf_csv, read_drops_jsonl, read_pas_csv, read_pdp_csv, read_summary_json};

fn indoorsim(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_indoorsim"));
    cmd.args(args).env_remove("INDOORSIM_OUT_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    indoorsim(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn generate_into(dir: &Path, seed: &str) -> Output {
    run(&[
        "generate",
        "--scenario",
        "140-nlos",
        "--drops",
        "40",
        "--seed",
        seed,
        "--format",
        "all",
        "--out-dir",
        dir.to_str().unwrap(),
    ])
}

#[test]
fn generate_writes_every_file_with_provenance() {
    let tmp = tempfile::tempdir().unwrap();
    let o = generate_into(tmp.path(), "77");
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("40 drops of 140GHz-NLOS"));

    let summary = read_summary_json(&tmp.path().join("summary.json")).unwrap();
    assert_eq!(summary.master_seed, 77);
    assert_eq!(summary.config_hash.len(), 64);
    assert_eq!(summary.num_drops, 40);

    let drops = read_drops_jsonl(&tmp.path().join("drops.jsonl")).unwrap();
    assert_eq!(drops.len(), 40);
    let pdp = read_pdp_csv(&tmp.path().join("pdp.csv")).unwrap();
    assert_eq!(pdp.len(), drops.iter().map(|d| d.num_subpaths()).sum::<usize>());
    assert!(!read_pas_csv(&tmp.path().join("pas.csv")).unwrap().is_empty());
    assert!(!read_cdf_csv(&tmp.path().join("cdf.csv")).unwrap().is_empty());

    let header = std::fs::read_to_string(tmp.path().join("pdp.csv")).unwrap();
    assert!(header.starts_with(&format!("# master_seed=77 config_hash={}", summary.config_hash)));
}

#[test]
fn same_seed_same_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    generate_into(a.path(), "5");
    generate_into(b.path(), "5");
    for f in ["drops.jsonl", "pdp.csv", "pas.csv", "cdf.csv", "summary.json"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn out_dir_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let o = indoorsim(&["generate", "--scenario", "28-los", "--drops", "3"])
        .env("INDOORSIM_OUT_DIR", tmp.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(tmp.path().join("summary.json").exists());
}

#[test]
fn analyze_generated_files() {
    let tmp = tempfile::tempdir().unwrap();
    generate_into(tmp.path(), "8");
    let report_dir = tmp.path().join("report");
    let o = run(&[
        "analyze",
        "--pdp",
        tmp.path().join("pdp.csv").to_str().unwrap(),
        "--pas",
        tmp.path().join("pas.csv").to_str().unwrap(),
        "--out-dir",
        report_dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["pdp"]["num_profiles"], 40);
    let hist = json["pas"]["lobe_count_histogram"].as_object().unwrap();
    let spectra: u64 = hist
        .values()
        .flat_map(|h| h.as_object().unwrap().values())
        .map(|v| v.as_u64().unwrap())
        .sum();
    assert_eq!(spectra, 80);
    assert_eq!(std::fs::read_to_string(report_dir.join("analysis.json")).unwrap(), stdout(&o));
}

#[test]
fn params_prints_table_and_overrides() {
    let o = run(&["params"]);
    assert_eq!(o.status.code(), Some(0));
    for s in ["28GHz-LOS", "28GHz-NLOS", "140GHz-LOS", "140GHz-NLOS"] {
        assert!(stdout(&o).contains(s), "{s}");
    }
    let o = run(&["params", "--scenario", "140-los", "--override", "mu_tau=30"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("mu_tau = 30"));
}

#[test]
fn invalid_input_exits_1() {
    for args in [
        &["generate", "--scenario", "60-los"][..],
        &["generate", "--drops", "0"],
        &["params", "--scenario", "140-los", "--override", "mu_tau=-1"],
        &["analyze"],
        &["no-such-command"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn io_failure_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["analyze", "--pdp", tmp.path().join("missing.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    // out-dir is an existing regular file
    let file = tmp.path().join("blocker");
    std::fs::write(&file, "x").unwrap();
    let o = run(&["generate", "--scenario", "28-nlos", "--drops", "2", "--out-dir", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn reproduce_is_deterministic() {
    let a = run(&["reproduce", "--drops", "200", "--seed", "4"]);
    let b = run(&["reproduce", "--drops", "200", "--seed", "4", "--workers", "1"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("140GHz-NLOS"));
}
