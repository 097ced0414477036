//! On-disk cache for computed modular polynomials and irreducible tables.
//!
//! One JSON file per entry under the cache directory, which defaults to
//! ./cache and can be redirected with the CACHE_DIR environment variable
//! (the only environment override in the crate). Every file carries a
//! version tag and is re-validated on load; anything that fails validation
//! is reported as corrupt and the caller falls back to recomputing.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fq::Fq;
use crate::modpoly::{crt_phi, BivarPolyA};
use crate::parse::parse_poly;
use crate::poly::{irreducibles, PolyA};

/// Format tag written into every cache file; bump on layout changes.
pub const CACHE_VERSION: &str = "dmodpoly-cache-v1";

/// Cache directory: $CACHE_DIR when set and nonempty, else ./cache.
pub fn cache_dir() -> PathBuf {
    match std::env::var_os("CACHE_DIR") {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => PathBuf::from("cache"),
    }
}

/// File path of the level-N table over F_q.
pub fn phi_path(dir: &Path, q: u32, n: &PolyA) -> PathBuf {
    dir.join(format!("phi_q{q}_{n}.json"))
}

/// File path of the degree-d irreducible list over F_q.
pub fn irred_path(dir: &Path, q: u32, d: usize) -> PathBuf {
    dir.join(format!("irred_q{q}_d{d}.json"))
}

fn corrupt(path: &Path, why: impl std::fmt::Display) -> Error {
    Error::CacheCorrupt(format!("{}: {why}", path.display()))
}

/// Store phi, creating the directory as needed. Returns the written path.
pub fn store_phi(dir: &Path, phi: &BivarPolyA) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = phi_path(dir, phi.q, &phi.n);
    let doc = json!({ "version": CACHE_VERSION, "phi": phi.to_json() });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| corrupt(&path, e))?;
    fs::write(&path, text)?;
    Ok(path)
}

/// Load a table, checking the version tag, the key, and the structural
/// invariants (monic in X, symmetry, height consistency) before returning.
pub fn load_phi(dir: &Path, q: u32, n: &PolyA) -> Result<BivarPolyA> {
    let path = phi_path(dir, q, n);
    let text = fs::read_to_string(&path).map_err(|e| corrupt(&path, e))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| corrupt(&path, e))?;
    if doc.get("version").and_then(Value::as_str) != Some(CACHE_VERSION) {
        return Err(corrupt(&path, "version tag mismatch"));
    }
    let body = doc.get("phi").ok_or_else(|| corrupt(&path, "missing phi"))?;
    let phi = BivarPolyA::from_json(body).map_err(|e| match e {
        Error::CacheCorrupt(why) => corrupt(&path, why),
        other => other,
    })?;
    if phi.q != q || phi.n != *n {
        return Err(corrupt(&path, "entry key does not match the file name"));
    }
    phi.validate().map_err(|e| corrupt(&path, e))?;
    Ok(phi)
}

/// Load phi from the cache, or compute and store it. A corrupt entry is
/// reported on stderr and silently recomputed.
pub fn load_or_compute_phi(dir: &Path, n: &PolyA) -> Result<BivarPolyA> {
    let q = n.fq().q;
    if phi_path(dir, q, n).exists() {
        match load_phi(dir, q, n) {
            Ok(phi) => return Ok(phi),
            Err(e) => eprintln!("warning: {e}; recomputing"),
        }
    }
    let phi = crt_phi(n)?;
    store_phi(dir, &phi)?;
    Ok(phi)
}

/// Store the monic irreducibles of one degree. Returns the written path.
pub fn store_irreducibles(dir: &Path, fq: &Arc<Fq>, d: usize) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = irred_path(dir, fq.q, d);
    let polys: Vec<String> = irreducibles(fq, d).iter().map(|p| p.to_string()).collect();
    let doc = json!({
        "version": CACHE_VERSION,
        "q": fq.q,
        "degree": d,
        "polys": polys,
    });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| corrupt(&path, e))?;
    fs::write(&path, text)?;
    Ok(path)
}

/// Load an irreducible list, re-validating every entry (monic, irreducible,
/// right degree, strictly ascending).
pub fn load_irreducibles(dir: &Path, fq: &Arc<Fq>, d: usize) -> Result<Vec<PolyA>> {
    let path = irred_path(dir, fq.q, d);
    let text = fs::read_to_string(&path).map_err(|e| corrupt(&path, e))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| corrupt(&path, e))?;
    if doc.get("version").and_then(Value::as_str) != Some(CACHE_VERSION) {
        return Err(corrupt(&path, "version tag mismatch"));
    }
    if doc.get("q").and_then(Value::as_u64) != Some(fq.q as u64)
        || doc.get("degree").and_then(Value::as_u64) != Some(d as u64)
    {
        return Err(corrupt(&path, "entry key does not match the file name"));
    }
    let rows = doc
        .get("polys")
        .and_then(Value::as_array)
        .ok_or_else(|| corrupt(&path, "missing polys"))?;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let s = row.as_str().ok_or_else(|| corrupt(&path, "non-string entry"))?;
        let p = parse_poly(fq, s).map_err(|e| corrupt(&path, e))?;
        if p.deg() != d as i64 || !p.is_monic() || !p.is_irreducible() {
            return Err(corrupt(&path, format!("{p} is not a monic irreducible of degree {d}")));
        }
        if let Some(prev) = out.last() {
            if *prev >= p {
                return Err(corrupt(&path, "entries out of order"));
            }
        }
        out.push(p);
    }
    Ok(out)
}

/// Cache entries present on disk, as (file name, byte size) sorted by name.
pub fn list(dir: &Path) -> Result<Vec<(String, u64)>> {
    let mut out = Vec::new();
    if dir.is_dir() {
        for entry in fs::read_dir(dir)? {
            let entry = entry?;
            let meta = entry.metadata()?;
            if meta.is_file() {
                out.push((entry.file_name().to_string_lossy().into_owned(), meta.len()));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Remove every regular file in the cache directory; returns how many.
pub fn clear(dir: &Path) -> Result<usize> {
    let mut n = 0;
    if dir.is_dir() {
        for entry in fs::read_dir(dir)? {
            let entry = entry?;
            if entry.metadata()?.is_file() {
                fs::remove_file(entry.path())?;
                n += 1;
            }
        }
    }
    Ok(n)
}
