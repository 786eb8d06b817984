use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn voladapt(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_voladapt"))
        .args(args)
        .env("VOLADAPT_OUTPUT_DIR", out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn list_shows_every_testcase() {
    let dir = tempfile::tempdir().unwrap();
    let o = voladapt(&["list"], dir.path());
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for id in voladapt::TESTCASE_IDS {
        assert!(text.contains(id), "{id} missing from\n{text}");
    }
}

#[test]
fn density_wave_run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = voladapt(
        &["run", "--testcase", "density_wave_1d", "--cells", "8", "--t-final", "0.05"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["initial.csv", "final.csv", "timeseries.csv", "stages.csv", "cost.csv", "report.txt"] {
        let text = fs::read_to_string(dir.path().join(f)).unwrap();
        assert!(text.starts_with("# voladapt "), "{f}: {text}");
    }
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("status = completed"));
    assert!(report.contains("t_end = 0.05"));
}

#[test]
fn weak_form_sod_exits_with_divergence_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = voladapt(&["run", "--testcase", "sod_modified", "--volume-mode", "wf"], dir.path());
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    let t_crash: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("t_crash = "))
        .expect("t_crash recorded")
        .parse()
        .unwrap();
    assert!(t_crash.is_finite() && t_crash < 0.2, "{t_crash}");
}

#[test]
fn adaptive_sod_stays_positive() {
    let dir = tempfile::tempdir().unwrap();
    let o = voladapt(&["run", "--testcase", "sod_modified", "--volume-mode", "adaptive_rigorous"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    let value = |key: &str| -> f64 {
        report
            .lines()
            .find_map(|l| l.strip_prefix(key))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert_eq!(value("t_end = "), 0.2);
    assert!(value("min_density = ") > 0.0);
    assert!(value("min_pressure = ") > 0.0);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "testcase = \"burgers_sine\"\n[discretization]\ncells = 8\nvolume_mode = \"fd\"\n[time]\nt_final = 0.5\n",
    )
    .unwrap();
    let o = voladapt(&["run", cfg.to_str().unwrap(), "--t-final", "0.01"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("volume_mode = fd"));
    assert!(report.contains("cells = 8x1"));
    assert!(report.contains("t_end = 0.01"));
}

#[test]
fn malformed_config_reports_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "testcase = \"kpp\"\n[time]\ncfll = 0.3\n").unwrap();
    let o = voladapt(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("line 3") && err.contains("cfll"), "{err}");

    fs::write(&cfg, "testcase = \"kpp\"\n[discretization]\nvolume_mode = \"magic\"\n").unwrap();
    let o = voladapt(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("volume_mode"), "{}", stderr(&o));
}

#[test]
fn missing_testcase_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = voladapt(&["run"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn oversized_spectrum_is_size_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = voladapt(&["spectrum", "--testcase", "khi_2d"], dir.path());
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn small_spectrum_writes_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let o = voladapt(
        &["spectrum", "--testcase", "density_wave_1d", "--cells", "4", "--modes", "wf,fd"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("spectrum_fd.csv")).unwrap();
    // 4 elements, 4 nodes, 3 variables
    assert_eq!(text.lines().count(), 2 + 48);
    assert!(dir.path().join("spectrum_summary.csv").exists());
}

#[test]
fn convergence_table_has_orders() {
    let dir = tempfile::tempdir().unwrap();
    let o = voladapt(
        &[
            "convergence",
            "--testcase",
            "density_wave_1d",
            "--grids",
            "16,32",
            "--t-final",
            "0.1",
            "--modes",
            "fd",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("errors_fd.csv")).unwrap();
    let last = text.lines().last().unwrap();
    let fields: Vec<&str> = last.split(',').collect();
    assert_eq!(fields[0], "32");
    let order: f64 = fields[3].parse().unwrap();
    assert!(order > 2.0, "{text}");
}

#[test]
fn convergence_without_exact_solution_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = voladapt(&["convergence", "--testcase", "khi_2d"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn deterministic_runs_are_bitwise_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "run",
        "--testcase",
        "density_wave_2d",
        "--cells",
        "2",
        "--t-final",
        "0.05",
        "--volume-mode",
        "adaptive_rigorous",
        "--deterministic",
    ];
    for dir in [&a, &b] {
        let o = voladapt(&args, dir.path());
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    for f in ["final.csv", "timeseries.csv", "stages.csv", "cost.csv", "report.txt"] {
        let x = fs::read(a.path().join(f)).unwrap();
        let y = fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
}

#[test]
fn output_flag_beats_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let o = voladapt(
        &[
            "run",
            "--testcase",
            "burgers_sine",
            "--cells",
            "4",
            "--t-final",
            "0.01",
            "--output",
            flag_dir.path().to_str().unwrap(),
        ],
        env_dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(flag_dir.path().join("final.csv").exists());
    assert!(!env_dir.path().join("final.csv").exists());
}

#[test]
fn bench_flux_table_and_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let o = voladapt(&["bench-flux", "--n-evals", "20000"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("bench_flux.csv")).unwrap();
    assert!(text.contains("ec_ranocha") && text.contains("ec_chandrashekar"));

    let o = voladapt(&["bench-flux", "--n-evals", "0"], dir.path());
    assert_eq!(code(&o), 2);
    let o = voladapt(&["bench-flux", "--equation", "burgers1d"], dir.path());
    assert_eq!(code(&o), 2);
}
