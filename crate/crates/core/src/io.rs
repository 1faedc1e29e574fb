//! Deterministic CSV/JSON emission and the run manifest.

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::lattice::Trajectory;

/// Fixed 17-significant-digit scientific formatting.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

/// Builds CSV text from a header and rows of preformatted cells.
pub fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Trajectory CSV with columns t, n, a, b.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,n,a,b\n");
    for snap in &traj.snapshots {
        for (k, n) in (traj.n_min..=traj.n_max).enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt_f64(snap.t),
                n,
                fmt_f64(snap.a[k]),
                fmt_f64(snap.b[k])
            );
        }
    }
    out
}

/// Finite-gap CSV with columns t, n, a_hat, b_hat.
pub fn finite_gap_csv(rows: &[(f64, i64, f64, f64)]) -> String {
    csv_text(
        &["t", "n", "a_hat", "b_hat"],
        rows.iter()
            .map(|&(t, n, a, b)| vec![fmt_f64(t), n.to_string(), fmt_f64(a), fmt_f64(b)]),
    )
}

/// Hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Record of one CLI run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub config: String,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, canonical_config: &str, outputs: Vec<String>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config_hash: sha256_hex(canonical_config.as_bytes()),
            config: canonical_config.to_string(),
            outputs,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        write_json(&path, self)?;
        Ok(path)
    }
}
