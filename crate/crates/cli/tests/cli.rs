use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use tubelab::identity::Verdict;
use tubelab::io::{read_bounds_csv, read_certificates_csv, read_grid_csv, read_trajectory_csv};

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn tubelab(command: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tubelab"))
        .arg(command)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("process exited normally")
}

fn manifest(out: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

const SEGMENT: &str = "p = 7.0\nepsilon = 0.1\nresolution = \"coarse\"\n[geometry]\ndescriptor = \"segment\"\nn = 3\n";

#[test]
fn segment_certificate_has_the_exact_total() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, "run.toml", &format!("export_grid = true\n{SEGMENT}"));
    let out = dir.path().join("out");
    let run = tubelab("certify", &config, &out, &[]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let certs = read_certificates_csv(fs::File::open(out.join("certificate.csv")).unwrap()).unwrap();
    assert_eq!(certs.len(), 1);
    assert_eq!(certs[0].verdict, Verdict::CertifiedNonexistence);
    assert!((certs[0].total + 1.0 / 14.0).abs() < 1e-12, "{}", certs[0].total);
    let bounds = read_bounds_csv(fs::File::open(out.join("bounds.csv")).unwrap()).unwrap();
    assert_eq!(bounds.len(), 2);
    let grid = read_grid_csv(fs::File::open(out.join("grid.csv")).unwrap(), 3).unwrap();
    assert!(!grid.interior.is_empty() && !grid.boundary.is_empty());
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("certificate.json")).unwrap()).unwrap();
    assert_eq!(json["theorem"], "2.1");
    assert_eq!(json["verdict"], "certified-nonexistence");
    assert!((json["total"].as_f64().unwrap() + 1.0 / 14.0).abs() < 1e-12);
    let m = manifest(&out);
    assert_eq!(m["status"], "ok");
    assert_eq!(m["artifacts"].as_array().unwrap().len(), 4);
}

#[test]
fn sweep_writes_one_row_per_thickness_and_plots() {
    let dir = TempDir::new().unwrap();
    let text = "p = 12.0\nepsilons = [0.1, 0.05, 0.025]\nresolution = \"coarse\"\n[geometry]\ndescriptor = \"circle\"\nn = 4\n";
    let config = write_config(&dir, "sweep.toml", text);
    let out = dir.path().join("out");
    let run = tubelab("sweep", &config, &out, &[]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("sweep.json")).unwrap()).unwrap();
    assert_eq!(json["threshold"]["status"], "certified");
    assert_eq!(json["certificates"].as_array().unwrap().len(), 3);
    for name in ["mu_vs_epsilon", "total_vs_epsilon"] {
        let svg = fs::read_to_string(out.join(format!("{name}.svg"))).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
        assert!(out.join(format!("{name}.dat")).exists());
    }
}

#[test]
fn single_thickness_sweep_plots_a_marker() {
    let dir = TempDir::new().unwrap();
    let text = SEGMENT.replace("epsilon = 0.1", "epsilons = [0.1]");
    let config = write_config(&dir, "sweep.toml", &text);
    let out = dir.path().join("out");
    assert_eq!(code(&tubelab("sweep", &config, &out, &["--format", "csv"])), 0);
    let svg = fs::read_to_string(out.join("total_vs_epsilon.svg")).unwrap();
    assert!(!svg.contains("<polyline"));
    assert_eq!(svg.matches("<circle").count(), 1);
    assert!(!out.join("sweep.json").exists());
}

#[test]
fn radial_solution_vanishes_at_both_radii() {
    let dir = TempDir::new().unwrap();
    for nodal in [0usize, 2] {
        let text = format!("p = 7.0\nnodal_count = {nodal}\n[geometry]\ndescriptor = \"annulus 1 2\"\nn = 3\n");
        let config = write_config(&dir, "radial.toml", &text);
        let out = dir.path().join(format!("out-{nodal}"));
        let run = tubelab("radial", &config, &out, &[]);
        assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
        let summary: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
        assert!(summary["boundary_residual"].as_f64().unwrap() < 1e-8);
        let t = read_trajectory_csv(fs::File::open(out.join("solution.csv")).unwrap()).unwrap();
        assert_eq!(t.r[0], 1.0);
        assert_eq!(*t.r.last().unwrap(), 2.0);
        assert!(t.endpoint().abs() < 1e-8);
        // the plotted profile changes sign exactly at the interior zeros
        let dat = fs::read_to_string(out.join("profile.dat")).unwrap();
        let u: Vec<f64> = dat
            .lines()
            .filter(|l| !l.starts_with('#') && !l.is_empty())
            .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
            .collect();
        let interior = &u[1..u.len() - 1];
        let changes = interior.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count();
        assert_eq!(changes, nodal);
    }
}

#[test]
fn ball_identity_check_passes() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, "id.toml", "[geometry]\ndescriptor = \"ball 2.5\"\nn = 3\n");
    let out = dir.path().join("out");
    let run = tubelab("identity-check", &config, &out, &["--resolution", "coarse"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("identity.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    let expected = 2.0 * std::f64::consts::PI.powi(3) / 2.5;
    assert!((report["refined"]["lhs"].as_f64().unwrap() - expected).abs() < 1e-9 * expected);
}

#[test]
fn unknown_keys_exit_with_code_two() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, "bad.toml", &format!("tolerance = 1e-3\n{SEGMENT}"));
    let out = dir.path().join("out");
    let run = tubelab("certify", &config, &out, &[]);
    assert_eq!(code(&run), 2);
    assert!(String::from_utf8_lossy(&run.stderr).contains("tolerance"));
    assert!(!out.exists(), "nothing is written for an invalid configuration");
    let beyond = write_config(
        &dir,
        "far.toml",
        "p = 7.0\nepsilon = 1.5\n[geometry]\ndescriptor = \"circle\"\nn = 4\n",
    );
    assert_eq!(code(&tubelab("certify", &beyond, &out, &[])), 2);
    assert_eq!(
        code(&tubelab("radial", &write_config(&dir, "s.toml", SEGMENT), &out, &[])),
        2
    );
}

#[test]
fn missing_bracket_exits_with_code_three_and_keeps_the_scan() {
    let dir = TempDir::new().unwrap();
    let text = "p = 7.0\n[geometry]\ndescriptor = \"annulus 1 1.000001\"\nn = 3\n";
    let config = write_config(&dir, "thin.toml", text);
    let out = dir.path().join("out");
    let run = tubelab("radial", &config, &out, &[]);
    assert_eq!(code(&run), 3);
    let m = manifest(&out);
    assert_eq!(m["exit_code"], 3);
    assert!(m["error"].as_str().unwrap().contains("no shooting bracket"));
    let scan = fs::read_to_string(out.join("scan.csv")).unwrap();
    assert!(scan.starts_with("alpha,endpoint,zeros\n") && scan.lines().count() > 2);
}

#[test]
fn unwritable_output_exits_with_code_four() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, "run.toml", SEGMENT);
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"not a directory").unwrap();
    let run = tubelab("certify", &config, &blocker.join("out"), &[]);
    assert_eq!(code(&run), 4);
}

#[test]
fn invalid_thread_count_exits_with_code_two() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, "run.toml", SEGMENT);
    let run = Command::new(env!("CARGO_BIN_EXE_tubelab"))
        .args(["certify", "--config"])
        .arg(&config)
        .env("TUBELAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&run), 2);
}

#[test]
fn repeated_runs_write_identical_artifacts() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        &dir,
        "run.toml",
        &SEGMENT.replace("epsilon = 0.1", "epsilons = [0.2, 0.1]"),
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&tubelab("sweep", &config, &a, &["--format", "both"])), 0);
    assert_eq!(code(&tubelab("sweep", &config, &b, &[])), 0);
    let (ma, mb) = (manifest(&a), manifest(&b));
    assert_eq!(ma["artifacts"], mb["artifacts"]);
    for artifact in ma["artifacts"].as_array().unwrap() {
        let name = artifact["path"].as_str().unwrap();
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
}
