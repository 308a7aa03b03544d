use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn cwshape(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cwshape"))
        .args(args)
        .arg("--quiet")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Value {
    let out = cwshape(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("summary is JSON")
}

fn p(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn header(path: &Path, key: &str) -> Option<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter_map(|l| l.strip_prefix('#'))
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")).map(str::to_string))
}

fn data_rows(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with('#')).count()
}

#[test]
fn generate_bfsk_reference_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "bfsk");
    let summary = ok(&["generate", "bfsk", "--degree", "9", "--chip-us", "40", "--fs", "1e6", "-o", s(&out)]);
    assert_eq!(summary["samples"], 20_440);
    assert!((summary["deviation_bandwidth_hz"].as_f64().unwrap() - 25e3).abs() < 1e-6);
    let wfm = p(dir.path(), "bfsk.wfm");
    assert_eq!(data_rows(&wfm), 20_440);
    assert_eq!(header(&wfm, "sample_rate_hz").unwrap(), "1000000");
    let wrf: f64 = header(&wfm, "wrf_hz").unwrap().parse().unwrap();
    assert!((wrf - 48.9237).abs() < 1e-4);
    assert_eq!(header(&wfm, "taps").unwrap(), "9,5");
    assert_eq!(header(&wfm, "manifest").unwrap(), "bfsk.manifest.json");

    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(p(dir.path(), "bfsk.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "generate");
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 2);
    assert_eq!(outputs[0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn noise_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        ok(&["generate", "noise", "--n", "20000", "--seed", "42", "--fs", "1e6", "-o", s(&p(dir.path(), "n"))]);
    }
    let fa = std::fs::read(p(a.path(), "n.wfm")).unwrap();
    let fb = std::fs::read(p(b.path(), "n.wfm")).unwrap();
    assert_eq!(fa, fb);
    assert_eq!(header(&p(a.path(), "n.wfm"), "seed").unwrap(), "42");
    assert_eq!(header(&p(a.path(), "n.wfm"), "wrf_hz").unwrap(), "50");
}

#[test]
fn costas_generate_shape_and_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let gen = p(dir.path(), "costas");
    let summary = ok(&["generate", "costas", "--order", "20", "--chip-ms", "1", "--step-khz", "1", "-o", s(&gen)]);
    assert_eq!(summary["samples"], 20_000);
    assert!((summary["deviation_bandwidth_hz"].as_f64().unwrap() - 20e3).abs() < 1e-6);
    let perm: Vec<usize> = header(&p(dir.path(), "costas.wfm"), "perm")
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    let perm_arg = perm.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
    let verdict = ok(&["verify-costas", "--perm", &perm_arg]);
    assert_eq!(verdict["costas"], true);

    let shaped = p(dir.path(), "shaped");
    let r = ok(&[
        "shape", "-i", s(&p(dir.path(), "costas.wfm")), "--obd-khz", "40", "--tol-db", "1e-3", "-o", s(&shaped),
    ]);
    assert_eq!(r["converged"], true);
    assert!(r["final_mask_violation_db"].as_f64().unwrap() <= 1e-3);
    let trace = std::fs::read_to_string(p(dir.path(), "shaped.trace.csv")).unwrap();
    assert_eq!(trace.lines().next().unwrap(), "iteration,max_violation_db,sum_violation_db");
    assert_eq!(trace.lines().count() as u64, r["iterations"].as_u64().unwrap() + 1);
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(p(dir.path(), "shaped.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["parameters"]["tol_db"], 1e-3);
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 1);

    let a = ok(&[
        "analyze", "paaf", "-i", s(&p(dir.path(), "shaped.cm.wfm")), "--doppler-hz", "500", "-o",
        s(&p(dir.path(), "amb")),
    ]);
    // 2·(500 / 50) + 1 Doppler rows
    assert_eq!(a["doppler_bins"], 21);
    let csv = std::fs::read_to_string(p(dir.path(), "amb.paaf.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "delay_s,doppler_hz,magnitude_db");
    assert_eq!(lines.count(), 21 * 20_000);
}

#[test]
fn capped_shape_still_writes_both_projections() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["generate", "bfsk", "-o", s(&p(dir.path(), "b"))]);
    let r = ok(&[
        "shape", "-i", s(&p(dir.path(), "b.wfm")), "--chimney-khz", "60", "--max-iter", "20", "-o",
        s(&p(dir.path(), "sh")),
    ]);
    assert_eq!(r["converged"], false);
    assert_eq!(r["iterations"], 20);
    for suffix in ["sh.cm.wfm", "sh.masked.wfm", "sh.trace.csv", "sh.summary.json", "sh.manifest.json"] {
        assert!(p(dir.path(), suffix).exists(), "{suffix}");
    }
    assert!(r["final_modulation_depth"].as_f64().unwrap() > 0.0);
}

#[test]
fn analyze_pacf_of_downsampled_bfsk() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["generate", "bfsk", "-o", s(&p(dir.path(), "b"))]);
    let r = ok(&[
        "analyze", "pacf", "-i", s(&p(dir.path(), "b.wfm")), "--downsample", "40", "--offset", "20", "-o",
        s(&p(dir.path(), "ds")),
    ]);
    assert_eq!(r["samples"], 511);
    assert!((r["max_sidelobe_db"].as_f64().unwrap() - -54.17).abs() < 0.5);
}

#[test]
fn analyze_lfm_bandwidth() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["generate", "lfm", "--bandwidth-khz", "20", "--wrf-hz", "50", "-o", s(&p(dir.path(), "l"))]);
    let r = ok(&[
        "analyze", "spectrum", "-i", s(&p(dir.path(), "l.wfm")), "--level-db", "-40", "-o", s(&p(dir.path(), "sp")),
    ]);
    let bw = r["bandwidths"][0]["bandwidth_hz"].as_f64().unwrap();
    assert!(bw > 20e3 && bw < 40e3, "{bw}");
    let csv = std::fs::read_to_string(p(dir.path(), "sp.spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 20_001);
}

#[test]
fn xpaf_rejects_mismatched_pair() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["generate", "noise", "--n", "1000", "--fs", "1e5", "-o", s(&p(dir.path(), "a"))]);
    ok(&["generate", "noise", "--n", "2000", "--fs", "1e5", "-o", s(&p(dir.path(), "b"))]);
    let out = cwshape(&[
        "analyze", "xpaf", "-i", s(&p(dir.path(), "a.wfm")), "--other", s(&p(dir.path(), "b.wfm")), "-o",
        s(&p(dir.path(), "x")),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("length"));
}

#[test]
fn xpaf_of_independent_noise() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["generate", "noise", "--n", "4000", "--seed", "1", "--fs", "2e5", "-o", s(&p(dir.path(), "a"))]);
    ok(&["generate", "noise", "--n", "4000", "--seed", "2", "--fs", "2e5", "-o", s(&p(dir.path(), "b"))]);
    let r = ok(&[
        "analyze", "xpaf", "-i", s(&p(dir.path(), "a.wfm")), "--other", s(&p(dir.path(), "b.wfm")),
        "--doppler-hz", "500", "-o", s(&p(dir.path(), "x")),
    ]);
    let rms = r["full"]["rms_sidelobe_db"].as_f64().unwrap();
    assert!((rms - -10.0 * 4000f64.log10()).abs() < 1.0, "{rms}");
}

#[test]
fn usage_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["generate", "noise", "--n", "100", "--fs", "100", "-o", s(&p(dir.path(), "n"))]);
    let no_mask = cwshape(&["shape", "-i", s(&p(dir.path(), "n.wfm")), "-o", s(&p(dir.path(), "x"))]);
    assert!(!no_mask.status.success());
    let bad_chip = cwshape(&["generate", "bfsk", "--chip-us", "40.5", "-o", s(&p(dir.path(), "y"))]);
    assert!(!bad_chip.status.success());
    let missing = cwshape(&["analyze", "pacf", "-i", s(&p(dir.path(), "nope.wfm")), "-o", s(&p(dir.path(), "z"))]);
    assert!(!missing.status.success());
    let not_perm = cwshape(&["verify-costas", "--perm", "1,1,2"]);
    assert!(!not_perm.status.success());
}

#[test]
fn verify_costas_reports_false_without_failing() {
    assert_eq!(ok(&["verify-costas", "--perm", "1,2,3"])["costas"], false);
    assert_eq!(ok(&["verify-costas", "--perm", "2,4,3,1"])["costas"], true);
}

#[test]
fn malformed_row_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let f = p(dir.path(), "bad.wfm");
    let mut text = String::from("#format_version=1\n#sample_rate_hz=8\n#wrf_hz=1\n#label=bad\n");
    for i in 0..8 {
        text.push_str(&if i == 6 { "6,1\n".to_string() } else { format!("{i},1,0\n") });
    }
    std::fs::write(&f, text).unwrap();
    let out = cwshape(&["analyze", "pacf", "-i", s(&f), "-o", s(&p(dir.path(), "o"))]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 7"), "{err}");
}
