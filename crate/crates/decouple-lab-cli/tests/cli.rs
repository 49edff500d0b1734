//! End-to-end tests of the binary: exit codes, output formats, byte-level
//! reproducibility, and sidecar echo integrity.

use std::path::Path;
use std::process::Command as Proc;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_decouple-lab")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn threshold_golden_row_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("t.cfg");
    write(&cfg, "d=4\n");
    let out = dir.path().join("thr.csv");
    let run = || {
        let st = Proc::new(bin())
            .args(["threshold", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(st.success());
        std::fs::read(&out).unwrap()
    };
    let first = run();
    let text = String::from_utf8(first.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,value"));
    let row = lines.next().unwrap();
    assert!(
        row.starts_with("falconer_threshold,2.222222"),
        "row was {row}"
    );
    assert!(!text.contains('\r'));
    // byte-identical rerun
    let second = run();
    assert_eq!(first, second);
}

#[test]
fn sidecar_round_trips_through_parse_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("c.cfg");
    write(&cfg_path, "d=2\nR_list=128\nseed=9\nalpha=1\n");
    let out = dir.path().join("caps.csv");
    let st = Proc::new(bin())
        .args(["caps", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(st.success());
    let sidecar: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("caps.json")).unwrap()).unwrap();
    assert_eq!(sidecar["command"], "caps");
    assert_eq!(sidecar["seed"], 9);
    let echoed = sidecar["config"].as_str().unwrap();
    let parsed = decouple_lab_cli::parse_config(echoed, None).unwrap();
    assert_eq!(parsed.seed, 9);
    assert_eq!(parsed.r_list, vec![128.0]);
    assert_eq!(parsed.canonical_text(), echoed);
}

#[test]
fn example_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("e.cfg");
    write(&cfg, "d=2\nm=2\nalpha=1.0\nR_list=128\nseed=3\n");
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    for out in [&out1, &out2] {
        let st = Proc::new(bin())
            .args(["example", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(st.success());
    }
    assert_eq!(
        std::fs::read(&out1).unwrap(),
        std::fs::read(&out2).unwrap()
    );
}

#[test]
fn sweep_emits_per_scale_rows_and_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.cfg");
    write(&cfg, "d=2\nm=2\nalpha=0.5\nR_list=256,512,1024\np=4\n");
    let out = dir.path().join("sweep.csv");
    let st = Proc::new(bin())
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(st.success());
    let text = std::fs::read_to_string(&out).unwrap();
    for name in ["ratio_R256", "ratio_R512", "ratio_R1024", "fitted_slope", "slope_stderr"] {
        assert!(
            text.lines().any(|l| l.starts_with(&format!("{name},"))),
            "missing {name} in:\n{text}"
        );
    }
}

#[test]
fn validation_failure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    write(&cfg, "beta=0.2\neta=0.05\n");
    let st = Proc::new(bin())
        .args(["example", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(2));
    // unknown key too
    write(&cfg, "nonsense=1\n");
    let st = Proc::new(bin())
        .args(["caps", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn run_failure_exits_3_and_leaves_no_partial_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("d.cfg");
    // distset at a scale so coarse that no heavy-plate scales exist
    write(&cfg, "d=2\nm=2\nalpha=1.5\nR_list=16\n");
    let out = dir.path().join("never.csv");
    let st = Proc::new(bin())
        .args(["distset", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(3));
    assert!(!out.exists());
    assert!(!dir.path().join("never.json").exists());
    assert!(!dir.path().join("never.csv.tmp").exists());
}

#[test]
fn energy_command_reports_depth_growth() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("en.cfg");
    write(&cfg, "d=1\nalpha=0.6309297535714574\np=0.8\nR_list=5,6\n");
    let out = dir.path().join("en.csv");
    let st = Proc::new(bin())
        .args(["energy", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(st.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("energy_depth5,"));
    assert!(text.contains("energy_depth6,"));
    assert!(text.contains("growth_pct_depth5_to_6,"));
}

#[test]
fn netcheck_small_scale_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("n.cfg");
    write(&cfg, "d=2\nm=1\nR_list=4\n");
    let out = dir.path().join("net.csv");
    let st = Proc::new(bin())
        .args(["netcheck", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(st.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let cover_row = text
        .lines()
        .find(|l| l.starts_with("covering_fraction_inv4,"))
        .unwrap();
    let value: f64 = cover_row.split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(value, 1.0, "covering fraction below 1: {text}");
}
