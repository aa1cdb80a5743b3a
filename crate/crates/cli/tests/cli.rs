use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn vpflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vpflow")).args(args).output().unwrap()
}

fn run_config(scenario: &str, config: &Path, out: &Path) -> Output {
    vpflow(&[scenario, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn write_config(dir: &TempDir, text: &str) -> PathBuf {
    let p = dir.path().join("test.cfg");
    fs::write(&p, text).unwrap();
    p
}

/// Data rows of a CSV, after the comment and header rows.
fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(2).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn every_shipped_config_passes() {
    let mut names: Vec<PathBuf> = fs::read_dir(configs()).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    assert!(names.len() >= 9);
    for path in names {
        let text = fs::read_to_string(&path).unwrap();
        let scenario = text
            .lines()
            .find_map(|l| l.strip_prefix("scenario"))
            .and_then(|l| l.split('=').nth(1))
            .unwrap()
            .trim()
            .to_string();
        let out = TempDir::new().unwrap();
        let o = run_config(&scenario, &path, out.path());
        assert!(
            o.status.success(),
            "{}: {}{}",
            path.display(),
            String::from_utf8_lossy(&o.stdout),
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn flow_csv_has_config_row_header_and_monotone_column() {
    let out = TempDir::new().unwrap();
    let o = run_config("flow", &configs().join("flow.cfg"), out.path());
    assert!(o.status.success());
    let csv = fs::read_to_string(out.path().join("flow.csv")).unwrap();
    let mut lines = csv.lines();
    let comment = lines.next().unwrap();
    assert!(comment.starts_with("# scenario=flow;"));
    assert!(comment.contains("density.family=box") && comment.contains("grid.points=513"));
    assert_eq!(lines.next().unwrap(), "t,log_v,v_over_bound,tail_ratio,flag");
    assert!(!csv.contains('\r'));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 6);
    let log_v: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(log_v.windows(2).all(|w| w[1] - w[0] >= -1e-4));
    // 17 significant digits
    let mantissa = rows[0][1].split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17);
    let svg = fs::read_to_string(out.path().join("flow.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 1);
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let cfg = configs().join("laplace-q.cfg");
    let cfg = cfg.to_str().unwrap();
    assert!(vpflow(&["laplace", "--config", cfg, "--out", a.path().to_str().unwrap()]).status.success());
    assert!(vpflow(&["laplace", "--config", cfg, "--out", b.path().to_str().unwrap(), "--threads", "1"])
        .status
        .success());
    for name in ["laplace-q.csv", "laplace-q.svg"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn nelson_rows_separate_the_two_sides_of_the_threshold() {
    let out = TempDir::new().unwrap();
    assert!(run_config("nelson", &configs().join("nelson.cfg"), out.path()).status.success());
    let csv = fs::read_to_string(out.path().join("nelson.csv")).unwrap();
    let rows = data_rows(&csv);
    let inf = |side: &str| {
        rows.iter()
            .filter(|r| r[2] == side)
            .map(|r| r[6].parse::<f64>().unwrap())
            .fold(f64::INFINITY, f64::min)
    };
    assert!(inf("admissible") >= 0.9);
    assert!(inf("below") <= 0.1);
    let svg = fs::read_to_string(out.path().join("nelson.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 3);
    assert!(svg.contains("class=\"legend\""));
}

#[test]
fn failed_assertion_gives_exit_status_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "[params]\ns = 1\np = 0.5\nq_offsets = -0.1\nbetas = 1, 2\n[assert]\nadmissible_min = 0.9\nbelow_max = 1e-9\n",
    );
    let o = run_config("nelson", &cfg, dir.path());
    assert_eq!(o.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("FAIL below_max"), "{stdout}");
    // the CSV is still written
    assert!(dir.path().join("nelson.csv").exists());
}

#[test]
fn tol_scale_loosens_tolerances() {
    let dir = TempDir::new().unwrap();
    // the endpoint slack of e^{-|x|^1.5} at s = 0.2 is about 4e-2
    let cfg = write_config(&dir, "[density]\nfamily = exp1.5\n[params]\ns = 0.2\n[assert]\nequality = 1e-4\n");
    let args = |scale: &'static str| {
        vec!["revhc", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--tol-scale", scale]
    };
    assert_eq!(vpflow(&args("1")).status.code(), Some(1));
    assert_eq!(vpflow(&args("1000")).status.code(), Some(0));
}

#[test]
fn invalid_config_reports_line_number() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "[density]\nfamily = box\n[params]\ntimes = 0.1, nope\n");
    let o = run_config("flow", &cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("line 4"), "{stderr}");
    let cfg = write_config(&dir, "[density]\nfamily = teapot\n");
    let stderr = String::from_utf8_lossy(&run_config("flow", &cfg, dir.path()).stderr).to_string();
    assert!(stderr.contains("line 2") && stderr.contains("teapot"), "{stderr}");
}

#[test]
fn unknown_scenario_and_missing_config_are_rejected() {
    assert_ne!(vpflow(&["teapot", "--config", "x.cfg"]).status.code(), Some(0));
    let o = vpflow(&["flow", "--config", "/nonexistent/x.cfg"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flagged_rows_fail_only_when_asserted() {
    let dir = TempDir::new().unwrap();
    // e^{-|x|} at the endpoint has edge-dominated OU averages
    let text = "[density]\nfamily = exp1\n[params]\ns = 0.2\n";
    let cfg = write_config(&dir, text);
    assert_eq!(run_config("revhc", &cfg, dir.path()).status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("revhc.csv")).unwrap();
    assert_eq!(data_rows(&csv)[0].last().unwrap(), "1");
    let cfg = write_config(&dir, &format!("{text}[assert]\nunflagged = true\n"));
    assert_eq!(run_config("revhc", &cfg, dir.path()).status.code(), Some(1));
}

#[test]
fn validate_prints_a_table_and_passes() {
    let dir = TempDir::new().unwrap();
    let o = run_config("validate", &configs().join("validate.cfg"), dir.path());
    assert!(o.status.success());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().filter(|l| l.starts_with("PASS")).count() >= 10, "{stdout}");
}
