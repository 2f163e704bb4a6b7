//! Artifact writers. Tabular data goes to CSV with a fixed header per
//! command and full-precision floats; the manifest echoes the resolved
//! configuration so a run can be reproduced from its artifacts alone.

use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

pub fn float_cell(x: f64) -> String {
    format!("{x:.17e}")
}

pub fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<(), CliError> {
    let mut text = String::with_capacity(rows.len() * 64 + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    std::fs::write(path, text)
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    library_version: &'a str,
    config: &'a RunConfig,
}

pub fn write_manifest(dir: &Path, command: &str, cfg: &RunConfig) -> Result<(), CliError> {
    let manifest = Manifest {
        command,
        library_version: chromax_core::VERSION,
        config: cfg,
    };
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::config(format!("manifest: {e}")))?;
    text.push('\n');
    let path = dir.join("manifest.json");
    std::fs::write(&path, text)
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
}

#[derive(Serialize)]
struct Diagnostic<'a> {
    error: &'a str,
    command: &'a str,
    detail: &'a str,
}

/// Serialized to stderr and, when the output directory exists, to
/// error.json next to whatever artifacts the run managed to produce.
pub fn emit_diagnostic(dir: Option<&Path>, command: &str, detail: &str) {
    let diag = Diagnostic {
        error: "numerical_failure",
        command,
        detail,
    };
    match serde_json::to_string(&diag) {
        Ok(line) => eprintln!("{line}"),
        Err(_) => eprintln!("numerical failure in {command}: {detail}"),
    }
    if let Some(dir) = dir {
        if let Ok(mut pretty) = serde_json::to_string_pretty(&diag) {
            pretty.push('\n');
            let _ = std::fs::write(dir.join("error.json"), pretty);
        }
    }
}
