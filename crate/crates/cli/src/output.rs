use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sorkin_core::fresnel::RiemannGrid;
use sorkin_core::profile::ThickSlitSubstitution;
use sorkin_core::{EpsilonMode, Geometry, QuadratureSpec, Warning};

use crate::args::Format;

/// Everything needed to reproduce an output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub geometry: Geometry,
    pub methods: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub riemann_grid: Option<RiemannGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<EpsilonMode>,
    pub keep_quadratic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thick_slit: Option<ThickSlitSubstitution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paraxial_suspect: Option<Vec<bool>>,
    pub warnings: Vec<Warning>,
    pub tool_version: String,
    pub wall_time_s: f64,
}

/// Named numeric columns of equal length.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn push(&mut self, header: impl Into<String>, column: Vec<f64>) {
        self.headers.push(header.into());
        self.columns.push(column);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.headers.join(",");
        out.push('\n');
        let rows = self.columns.first().map_or(0, Vec::len);
        for r in 0..rows {
            for (i, col) in self.columns.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{:.16e}", col[r]).expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> serde_json::Map<String, serde_json::Value> {
        self.headers
            .iter()
            .zip(&self.columns)
            .map(|(h, c)| (h.clone(), serde_json::json!(c)))
            .collect()
    }
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

/// Emits a table as CSV (with a JSON manifest beside it) or as one JSON
/// document holding both.
pub fn emit(table: &Table, manifest: &RunManifest, out: Option<&Path>, format: Format) -> io::Result<()> {
    match format {
        Format::Csv => {
            let csv = table.to_csv();
            match out {
                Some(path) => {
                    write_atomic(path, csv.as_bytes())?;
                    let mut meta = serde_json::to_string_pretty(manifest).map_err(io::Error::other)?;
                    meta.push('\n');
                    write_atomic(&sidecar_path(path), meta.as_bytes())
                }
                None => io::stdout().lock().write_all(csv.as_bytes()),
            }
        }
        Format::Json => {
            let doc = serde_json::json!({ "manifest": manifest, "columns": table.to_json() });
            let mut text = serde_json::to_string_pretty(&doc).map_err(io::Error::other)?;
            text.push('\n');
            match out {
                Some(path) => write_atomic(path, text.as_bytes()),
                None => io::stdout().lock().write_all(text.as_bytes()),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_full_precision_and_lf() {
        let mut t = Table::default();
        t.push("theta_deg", vec![-0.1, 0.0]);
        t.push("kappa", vec![1.0 / 3.0, -5.556270586478316e-7]);
        let csv = t.to_csv();
        assert!(csv.starts_with("theta_deg,kappa\n-1.0000000000000001e-1,3.3333333333333331e-1\n0.0000000000000000e0,"));
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
        for line in csv.lines().skip(1) {
            for v in line.split(',') {
                let parsed: f64 = v.parse().unwrap();
                assert_eq!(format!("{parsed:.16e}"), v);
            }
        }
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        assert_eq!(sidecar_path(&path), dir.path().join("a.manifest.json"));
    }
}
