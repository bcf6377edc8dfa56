//! Line-delimited solution catalog, content-addressed by the digest of the canonical
//! serialization of each spec.

use super::format::{spec_value, SpecFile};
use crate::error::{Result, YbxError};
use crate::report::CheckReport;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Digest of the compact canonical serialization.
pub fn spec_digest(spec: &SpecFile) -> String {
    sha256_hex(spec_value(spec).to_string().as_bytes())
}

fn io_err(path: &Path, e: std::io::Error) -> YbxError {
    YbxError::Parse { path: path.display().to_string(), msg: e.to_string() }
}

/// Digests already present in the catalog. Lines that are not records are skipped.
pub fn catalog_digests(path: &Path) -> Result<Vec<String>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    Ok(text
        .lines()
        .filter_map(|l| serde_json::from_str::<Value>(l).ok())
        .filter_map(|v| v.get("digest").and_then(Value::as_str).map(str::to_string))
        .collect())
}

/// Appends `{digest, spec, checks, seed, timestamp}` as one line unless a record with the
/// same spec digest is already present. Returns whether a line was written.
pub fn catalog_append(spec: &SpecFile, reports: &[CheckReport], seed: u64, path: &Path) -> Result<bool> {
    let digest = spec_digest(spec);
    if catalog_digests(path)?.contains(&digest) {
        return Ok(false);
    }
    let checks: Vec<Value> = reports
        .iter()
        .map(|r| json!({"tag": r.tag, "pass": r.pass, "digest": sha256_hex(r.to_json(false).to_string().as_bytes())}))
        .collect();
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let record = json!({"digest": digest, "spec": spec_value(spec), "checks": checks, "seed": seed, "timestamp": timestamp});
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(|e| io_err(path, e))?;
    writeln!(f, "{record}").map_err(|e| io_err(path, e))?;
    Ok(true)
}

/// Specs stored in a catalog, in file order.
pub fn catalog_specs(path: &Path) -> Result<Vec<SpecFile>> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let origin = format!("{}:{}", path.display(), k + 1);
        let v: Value = serde_json::from_str(line).map_err(|e| YbxError::Parse { path: origin.clone(), msg: e.to_string() })?;
        let spec = v.get("spec").ok_or_else(|| YbxError::Parse { path: origin.clone(), msg: "record has no spec".into() })?;
        out.push(super::format::parse_spec_str(&spec.to_string(), &origin)?);
    }
    Ok(out)
}
