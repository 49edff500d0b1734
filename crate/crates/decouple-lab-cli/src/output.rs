//! Report serialization: a two-column CSV (`name,value`, no quoting, LF
//! endings, 17-significant-digit floats) plus a JSON metadata sidecar that
//! carries the canonical config text. Files are written to temporaries and
//! renamed, so a failed run leaves nothing behind.

use crate::config::ExperimentConfig;
use decouple_lab_core::ExperimentReport;
use std::io::Write;
use std::path::{Path, PathBuf};

/// 17 significant digits: one before the point, sixteen after.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_text(report: &ExperimentReport) -> String {
    let mut out = String::from("name,value\n");
    for (name, value) in report.metrics() {
        out.push_str(name);
        out.push(',');
        out.push_str(&format_value(*value));
        out.push('\n');
    }
    out
}

#[derive(serde::Serialize)]
struct Sidecar<'a> {
    artifact_version: &'a str,
    command: String,
    seed: u64,
    config: String,
}

pub fn sidecar_json(cfg: &ExperimentConfig) -> String {
    let sc = Sidecar {
        artifact_version: env!("CARGO_PKG_VERSION"),
        command: cfg.command.to_string(),
        seed: cfg.seed,
        config: cfg.canonical_text(),
    };
    let mut text = serde_json::to_string_pretty(&sc).expect("sidecar serializes");
    text.push('\n');
    text
}

pub fn json_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes the CSV and its sidecar atomically (temp files renamed together).
pub fn write_report(
    csv_path: &Path,
    report: &ExperimentReport,
    cfg: &ExperimentConfig,
) -> std::io::Result<()> {
    let json = json_path(csv_path);
    let csv_tmp = csv_path.with_extension("csv.tmp");
    let json_tmp = csv_path.with_extension("json.tmp");
    let cleanup = |a: &Path, b: &Path| {
        let _ = std::fs::remove_file(a);
        let _ = std::fs::remove_file(b);
    };
    let result = (|| {
        let mut f = std::fs::File::create(&csv_tmp)?;
        f.write_all(csv_text(report).as_bytes())?;
        f.sync_all()?;
        let mut g = std::fs::File::create(&json_tmp)?;
        g.write_all(sidecar_json(cfg).as_bytes())?;
        g.sync_all()?;
        std::fs::rename(&csv_tmp, csv_path)?;
        std::fs::rename(&json_tmp, &json)?;
        Ok(())
    })();
    if result.is_err() {
        cleanup(&csv_tmp, &json_tmp);
    }
    result
}
