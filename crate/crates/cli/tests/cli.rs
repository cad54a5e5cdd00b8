//! Binary-level behavior: exit codes, output-directory resolution, and
//! byte-identical reruns.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sixm"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sixm-cli-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const SMALL_FIT: &str = "seed = 11\ntruth.d = 2\ntruth.rank = 1\n\
    truth.link = coefficients\ntruth.coefficients = 0.4, 0.3\n\
    noise.kind = gaussian\nnoise.sigma = 0.3\ndata.n = 60\n\
    chain.iterations = 3000\nchain.thin = 10\nchain.chains = 2\nrisk.n_mc = 1000\n";

#[test]
fn unknown_subcommand_and_missing_config_exit_2() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().args(["fit"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["fit", "--config", "/nonexistent/config.cfg", "--out", "/tmp"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_dataset_file_exits_2_and_names_the_path() {
    let dir = temp_dir("missing-data");
    let cfg = write_config(
        &dir,
        "fit.cfg",
        &format!("{SMALL_FIT}data.file = {}/no-such-dataset.csv\n", dir.display()),
    );
    let out = bin()
        .args(["fit", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("no-such-dataset.csv"),
        "stderr must name the missing path: {stderr}"
    );
}

#[test]
fn config_error_exits_2() {
    let dir = temp_dir("bad-config");
    let cfg = write_config(&dir, "bad.cfg", "seed = 1\ntruth.d = 2\nnope = 3\ndata.n = 5\n");
    let out = bin()
        .args(["fit", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
}

#[test]
fn fit_and_gen_data_reruns_are_byte_identical() {
    let dir = temp_dir("determinism");
    let cfg = write_config(&dir, "fit.cfg", SMALL_FIT);
    for sub in ["gen-data", "fit"] {
        let out_a = dir.join(format!("{sub}-a"));
        let out_b = dir.join(format!("{sub}-b"));
        for out in [&out_a, &out_b] {
            let st = bin()
                .arg(sub)
                .args(["--config"])
                .arg(&cfg)
                .arg("--out")
                .arg(out)
                .output()
                .unwrap();
            assert!(st.status.success(), "{sub} failed: {:?}", st);
        }
        let mut names: Vec<_> = std::fs::read_dir(&out_a)
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(!names.is_empty());
        for name in names {
            let a = std::fs::read(out_a.join(&name)).unwrap();
            let b = std::fs::read(out_b.join(&name)).unwrap();
            assert_eq!(a, b, "{sub}: {name:?} differs between reruns");
        }
    }
}

#[test]
fn fit_consumes_generated_dataset_file() {
    let dir = temp_dir("load-data");
    let cfg = write_config(&dir, "gen.cfg", SMALL_FIT);
    let gen_out = dir.join("gen");
    assert!(bin()
        .args(["gen-data", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&gen_out)
        .status()
        .unwrap()
        .success());
    let fit_cfg = write_config(
        &dir,
        "fit-from-file.cfg",
        &format!("{SMALL_FIT}data.file = {}/dataset.csv\n", gen_out.display()),
    );
    let st = bin()
        .args(["fit", "--config"])
        .arg(&fit_cfg)
        .arg("--out")
        .arg(dir.join("fit"))
        .output()
        .unwrap();
    assert!(st.status.success(), "{st:?}");
    assert!(dir.join("fit/report.csv").exists());
}

#[test]
fn env_var_overrides_output_directory() {
    let dir = temp_dir("env-out");
    let cfg = write_config(&dir, "gen.cfg", SMALL_FIT);
    let env_out = dir.join("from-env");
    let st = bin()
        .args(["gen-data", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("ignored"))
        .env("SIXM_OUT_DIR", &env_out)
        .status()
        .unwrap();
    assert!(st.success());
    assert!(env_out.join("dataset.csv").exists());
    assert!(!dir.join("ignored").join("dataset.csv").exists());
}

#[test]
fn validate_passes_and_negative_control_fails() {
    let dir = temp_dir("validate");
    let quick = "seed = 5\ntruth.d = 2\ndata.n = 20\n\
        validate.small_ball_draws = 150000\nvalidate.toy_steps = 400000\n\
        validate.pythagoras_draws = 40000\nvalidate.pythagoras_pairs = 2\n";
    let cfg = write_config(&dir, "validate.cfg", quick);
    let out = bin()
        .args(["validate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("ok"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let csv = std::fs::read_to_string(dir.join("ok/validate.csv")).unwrap();
    assert!(csv.lines().count() >= 6);
    assert!(!csv.contains(",0\n"), "all suites must pass: {csv}");

    let cfg_bug = write_config(
        &dir,
        "validate-bug.cfg",
        &format!("{quick}debug.flip_mh_sign = true\n"),
    );
    let out = bin()
        .args(["validate", "--config"])
        .arg(&cfg_bug)
        .arg("--out")
        .arg(dir.join("bug"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "negative control must exit 1");
    let csv = std::fs::read_to_string(dir.join("bug/validate.csv")).unwrap();
    let toy_row = csv
        .lines()
        .find(|l| l.starts_with("detailed_balance_toy"))
        .unwrap();
    assert!(toy_row.ends_with(",0"), "toy suite must fail: {toy_row}");
}
