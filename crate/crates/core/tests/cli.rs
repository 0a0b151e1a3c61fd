//! The binary end to end: tables, exit codes and the fit pipeline.

use std::path::Path;
use std::process::{Command, Output};

use haldane::cli::table::{Table, Value};

fn haldane(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haldane"))
        .args(args)
        .env_remove("HALDANE_THREADS")
        .output()
        .expect("binary runs")
}

fn table(out: &Output) -> Table {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    Table::parse(std::str::from_utf8(&out.stdout).unwrap()).unwrap()
}

#[test]
fn contiguous_spectrum_csv() {
    let out = haldane(&["spectrum", "contiguous", "--l", "2", "--n", "8", "--normalized"]);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    let meta = lines.next().unwrap();
    assert!(meta.starts_with("# command=spectrum-contiguous version="));
    assert!(meta.contains(" l=2 n=8 normalized=true"));
    assert_eq!(lines.next().unwrap(), "index,lambda,ent_energy,multiplicity");
    let t = table(&out);
    let l = t.column_f64("lambda").unwrap();
    assert!((l[0] - 0.3345521).abs() < 1e-7);
    assert!(l[1..].iter().all(|x| (x - 0.2218160).abs() < 1e-7));
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["--threads", "1", "couplings", "--mode", "noncontiguous", "--la", "2", "--lb", "3,12"];
    assert_eq!(haldane(&args).stdout, haldane(&args).stdout);
}

#[test]
fn asymptotic_sop() {
    let t = table(&haldane(&["sop", "--mode", "asymptotic", "--n", "8"]));
    assert!((t.column_f64("value").unwrap()[0] + 0.4450541).abs() < 1e-7);
}

#[test]
fn verify_passes() {
    let out = haldane(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let t = table(&out);
    assert!(t.column("pass").unwrap().iter().all(|v| **v == Value::from("true")));
}

#[test]
fn exit_codes() {
    assert_eq!(haldane(&["spectrum", "contiguous", "--l", "2"]).status.code(), Some(2));
    assert_eq!(haldane(&["verify", "--bogus"]).status.code(), Some(2));
    assert_eq!(haldane(&["spectrum", "contiguous", "--l", "9", "--n", "8"]).status.code(), Some(2));
    assert_eq!(haldane(&["sop", "--mode", "ed", "--n", "20"]).status.code(), Some(3));
    assert_eq!(haldane(&["chi-ratio", "--l", "5", "--method", "brute-force"]).status.code(), Some(3));
    assert_eq!(haldane(&["--help"]).status.code(), Some(0));
}

fn write(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut full = vec!["--output", path.as_str()];
    full.extend_from_slice(args);
    let out = haldane(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

/// Exact transfer-matrix string order fed back through `fit sop`, in both
/// formats, recovers `O_∞ = −4/9`, `A = −4`, `ξ = 1/ln 3`.
#[test]
fn sop_fit_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let data = write(
            dir.path(),
            &format!("sop.{format}"),
            &["--format", format, "sop", "--mode", "transfer", "--n", "6,8,10,12,14"],
        );
        let t = table(&haldane(&["fit", "sop", "--input", &data]));
        let get = |c: &str| t.column_f64(c).unwrap()[0];
        assert!((get("asymptote") + 4.0 / 9.0).abs() < 1e-6, "{format}");
        assert!((get("amplitude") + 4.0).abs() < 1e-6, "{format}");
        assert!((get("xi") - 1.0 / 3f64.ln()).abs() < 1e-6, "{format}");
    }
    let mixed = write(dir.path(), "mixed.csv", &["sop", "--mode", "transfer", "--n", "5,6,7,8,9"]);
    assert_eq!(haldane(&["fit", "sop", "--input", &mixed]).status.code(), Some(1));
    assert!(haldane(&["fit", "sop", "--input", &mixed, "--allow-mixed-parity"]).status.success());
}

#[test]
fn gap_fit_reads_gap_tables() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "gaps.json", &["--format", "json", "gaps", "--theta", "0.2", "--sizes", "4,6,8", "--which", "phy"]);
    let t = table(&haldane(&["fit", "gap", "--input", &data]));
    assert_eq!(t.column("kind").unwrap()[0], &Value::from("phy"));
    let xi = t.column_f64("xi").unwrap()[0];
    assert!(xi > 1.0 && xi < 5.0, "{xi}");
}

#[test]
fn degenerate_chi_rows_are_marked() {
    let t = table(&haldane(&["chi-ratio", "--l", "1,2"]));
    let mult = t.column_f64("top_multiplicity").unwrap();
    assert!(mult[0] > 1.0);
    assert_eq!(mult[1], 1.0);
    assert_eq!(t.column("ratio").unwrap()[0], &Value::Missing);
    assert!((t.column_f64("ratio").is_err()));
}

#[test]
fn negative_theta_and_levels() {
    let t = table(&haldane(&["levels", "--theta", "0.2", "--n", "6", "--which", "phy"]));
    assert_eq!(t.meta_value("profile"), Some("1,3,5,3,3"));
    let t = table(&haldane(&["fidelity", "--theta-range", "-0.3:0.0:0.3", "--l", "3"]));
    assert_eq!(t.rows.len(), 2);
}
