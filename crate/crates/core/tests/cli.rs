use std::fs;
use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_fastosc");

fn write_config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

const SMALL: &str = r#"
scenario = "square_sin_figure4"

[parameters]
height = 12.0
target_k = 120.0
states = 3

[grid]
x_min = -3.0
x_max = 3.0
nodes_per_period = 16
"#;

#[test]
fn run_is_byte_reproducible_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL);
    let out1 = tmp.path().join("a");
    let out2 = tmp.path().join("b");
    for (out, threads) in [(&out1, "1"), (&out2, "3")] {
        let status = Command::new(BIN)
            .args([
                "run",
                cfg.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
                "--threads",
                threads,
                "--quiet",
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let mut names: Vec<_> = fs::read_dir(&out1).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n == "summary.json"));
    assert!(names.iter().any(|n| n == "eigenfunction_2.csv"));
    for name in names {
        assert_eq!(
            fs::read(out1.join(&name)).unwrap(),
            fs::read(out2.join(&name)).unwrap(),
            "{name:?}"
        );
    }

    let csv = fs::read_to_string(out1.join("eigenfunction_0.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "x,psi_exact,psi_effective,psi_corrected");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 4);
    // 17 significant digits: d.dddddddddddddddde±x
    let mantissa = first[1].trim_start_matches('-').split('e').next().unwrap();
    assert_eq!(mantissa.replace('.', "").len(), 17);

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out1.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["metadata"]["scenario"], "square_sin_figure4");
    assert!(summary["metadata"]["k"].as_f64().unwrap() > 0.0);
}

#[test]
fn config_flag_is_accepted() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL);
    let out = Command::new(BIN)
        .args(["validate", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok:"));
}

#[test]
fn list_scenarios_names_all_seven() {
    let out = Command::new(BIN).arg("list-scenarios").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "sech_figure1",
        "energies_figure2",
        "square_cos_figure3",
        "square_sin_figure4",
        "beams",
        "convergence_sweep",
        "averaging_sweep",
    ] {
        assert!(
            text.lines().any(|l| l.split_whitespace().next() == Some(name)),
            "{name}"
        );
    }
}

fn error_line(stderr: &[u8]) -> String {
    String::from_utf8_lossy(stderr)
        .lines()
        .find(|l| l.starts_with("error: kind="))
        .expect("machine-readable error line")
        .to_string()
}

#[test]
fn invalid_configs_fail_with_parsable_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("unknown.toml", "scenario = \"figure_five\"", "kind=config"),
        (
            "unused.toml",
            "scenario = \"beams\"\n[parameters]\nlambda = 3",
            "kind=config",
        ),
        (
            "range.toml",
            "scenario = \"sech_figure1\"\n[parameters]\nk = -1.0",
            "kind=invalid_parameter",
        ),
    ];
    for (name, text, kind) in cases {
        let cfg = write_config(tmp.path(), name, text);
        for cmd in ["validate", "run"] {
            let out = Command::new(BIN)
                .args([
                    cmd,
                    cfg.to_str().unwrap(),
                    "--out",
                    tmp.path().join("o").to_str().unwrap(),
                ])
                .output()
                .unwrap();
            assert!(!out.status.success(), "{name} {cmd}");
            assert!(
                error_line(&out.stderr).contains(kind),
                "{name}: {}",
                error_line(&out.stderr)
            );
        }
    }
    let out = Command::new(BIN).args(["run", "/nonexistent/x.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    error_line(&out.stderr);
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let out = Command::new(BIN)
            .args(["validate", path.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}: {}",
            path.display(),
            String::from_utf8_lossy(&out.stderr)
        );
        n += 1;
    }
    assert_eq!(n, 7);
}
