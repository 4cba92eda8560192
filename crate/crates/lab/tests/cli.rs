use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_halfmap-lab"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("RAYON_NUM_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn unknown_suite_is_a_config_error() {
    let out = lab(&["nonsense"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
}

#[test]
fn config_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "# comment\nn = 64\nwobble = 3\n");
    let out = lab(&["identities", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("wobble"), "{err}");
    assert!(!dir.path().join("results").exists());
}

#[test]
fn grid_override_needs_a_grid() {
    let out = lab(&["seq", "--n", "64"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_verdict_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n = 64\ntrials = 2\ntol = 1e-30\n");
    let out_dir = dir.path().join("out");
    let out = lab(
        &[
            "identities",
            "--config",
            &cfg,
            "--out",
            out_dir.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    assert!(out_dir.join("identities_errors.csv").exists());
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "n = 256\ntrials = 12\nceiling = 20\ncm_coarse = 128\ncm_fine = 512\ncm_ceiling = 10\n",
    );
    let mut runs = Vec::new();
    for (i, threads) in ["1", "4"].into_iter().enumerate() {
        let out_dir = dir.path().join(format!("run{i}"));
        let out = lab(
            &[
                "paraproduct",
                "--config",
                &cfg,
                "--seed",
                "9",
                "--out",
                out_dir.to_str().unwrap(),
            ],
            Some(threads),
        );
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stdout)
        );
        let mut files: Vec<_> = fs::read_dir(&out_dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        runs.push(
            files
                .iter()
                .map(|f| fs::read(f).unwrap())
                .collect::<Vec<_>>(),
        );
    }
    assert_eq!(runs[0].len(), 4);
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn plots_are_optional() {
    let dir = tempfile::tempdir().unwrap();
    let plain = dir.path().join("plain");
    let plotted = dir.path().join("plotted");
    assert_eq!(
        lab(&["seq", "--out", plain.to_str().unwrap()], None)
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        lab(&["seq", "--out", plotted.to_str().unwrap(), "--plot"], None)
            .status
            .code(),
        Some(0)
    );
    assert!(!plain.join("seq_exponents.svg").exists());
    let svg = fs::read_to_string(plotted.join("seq_exponents.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn help_lists_suites_and_columns() {
    let out = lab(&["--help"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for needle in [
        "cancellation ladder: k, r_t",
        "max_sweep_change",
        "Exit status",
    ] {
        assert!(text.contains(needle), "{needle}");
    }
}
