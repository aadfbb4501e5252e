use std::path::Path;
use std::process::{Command, Output};

use lhv_photons_cli::record::{parse_csv, ResultRecord};
use lhv_photons_cli::RunConfig;

const EXAMPLE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/config/example.json");

fn lhv(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lhv-photons"));
    cmd.args(args).env_remove("LHV_PHOTONS_OUT_DIR");
    if let Some(dir) = out_dir {
        cmd.env("LHV_PHOTONS_OUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn example_config_is_the_default() {
    assert_eq!(
        RunConfig::load(Path::new(EXAMPLE)).unwrap(),
        RunConfig::default()
    );
}

#[test]
fn success_exits_zero_without_diagnostics() {
    let o = lhv(&["analytic", "--config", EXAMPLE], None);
    assert!(o.status.success());
    assert!(o.stderr.is_empty());
    let rec = ResultRecord::from_json(&stdout(&o)).unwrap();
    assert_eq!(rec.config, RunConfig::default());
}

#[test]
fn degenerate_rho_is_not_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("zero.json");
    std::fs::write(&cfg, r#"{"experiment": {"alpha": 0.0, "beta": 0.0}}"#).unwrap();
    let o = lhv(
        &[
            "analytic",
            "--config",
            cfg.to_str().unwrap(),
            "--format",
            "csv",
        ],
        None,
    );
    assert!(o.status.success());
    assert!(o.stderr.is_empty());
    assert!(stdout(&o).contains(",degenerate"));
}

#[test]
fn diagnostics_exit_nonzero_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"sampler": {"chunk": 0}}"#).unwrap();
    let cases: [(&[&str], &str); 4] = [
        (&["simulate", "--n", "1"], "sampler.n"),
        (&["chsh", "--source", "empirical", "--n", "1"], "sampler.n"),
        (&["chsh", "--grid", "3"], "chsh.grid"),
        (
            &["analytic", "--config", bad.to_str().unwrap()],
            "sampler.chunk",
        ),
    ];
    for (args, field) in cases {
        let o = lhv(args, None);
        assert!(!o.status.success(), "{args:?}");
        assert!(o.stdout.is_empty());
        let err = String::from_utf8(o.stderr).unwrap();
        assert!(err.contains(field), "{args:?}: {err}");
    }
}

#[test]
fn flags_override_config_fields() {
    let o = lhv(
        &[
            "config",
            "--config",
            EXAMPLE,
            "--seed",
            "42",
            "--n",
            "1000",
            "--model",
            "amplitude-weighted",
            "--grid",
            "24",
            "--format",
            "csv",
            "--workers",
            "2",
            "--convention",
            "published",
            "--source",
            "empirical",
        ],
        None,
    );
    assert!(o.status.success());
    let cfg: RunConfig = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(cfg.sampler.seed, 42);
    assert_eq!(cfg.sampler.n, 1000);
    assert_eq!(cfg.detector_model.to_string(), "amplitude-weighted");
    assert_eq!(cfg.chsh.grid, 24);
    assert_eq!(cfg.workers, 2);
    assert_eq!(cfg.output.format.extension(), "csv");
}

#[test]
fn out_flag_writes_a_parseable_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/sim.csv");
    let o = lhv(
        &[
            "simulate",
            "--n",
            "5000",
            "--seed",
            "3",
            "--format",
            "csv",
            "--out",
            path.to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let parsed = parse_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(parsed.config().unwrap().sampler.seed, 3);
    assert!(parsed
        .meta_value("note")
        .unwrap()
        .starts_with("DISCREPANCY"));
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = lhv(
        &["sweep", "--n", "500", "--format", "csv"],
        Some(dir.path()),
    );
    assert!(o.status.success());
    let parsed =
        parse_csv(&std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap()).unwrap();
    assert_eq!(
        parsed.header,
        ["delta", "rho_closed", "rho_quadrature", "cov_mc", "se"]
    );
    assert_eq!(parsed.rows.len(), 17);
}

#[test]
fn same_seed_gives_identical_output_apart_from_run_identity() {
    let strip = |o: Output| -> String {
        stdout(&o)
            .lines()
            .filter(|l| !l.starts_with("# run_id=") && !l.starts_with("# created_unix_ms="))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let args = ["simulate", "--n", "20000", "--seed", "8", "--format", "csv"];
    assert_eq!(strip(lhv(&args, None)), strip(lhv(&args, None)));
}
