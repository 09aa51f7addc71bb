//! Persistent eigenvalue tables.
//!
//! Layout: the tag line `SCSLAB-EIG-1`, a header line
//! `k=<k> n=<N> forms=<d> order=lambda2-asc`, then per form the L(1, sym² f)
//! value, the Petersson norm (NaN when absent) and λ(1..=N), all as
//! little-endian f64.

use crate::output::write_atomic;
use scslab_core::qarith::HeckeEigenform;
use std::path::{Path, PathBuf};

pub const CACHE_TAG: &str = "SCSLAB-EIG-1";
const ORDER_KEY: &str = "lambda2-asc";

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: not an eigenvalue cache (expected tag {CACHE_TAG}, found {found:?})")]
    Tag { path: PathBuf, found: String },
    #[error("{path}: bad header: {detail}")]
    Header { path: PathBuf, detail: String },
    #[error("{path}: body has {found} bytes, header implies {expected}")]
    Truncated { path: PathBuf, found: usize, expected: usize },
    #[error("{path}: invalid table: {detail}")]
    Table { path: PathBuf, detail: String },
}

pub fn cache_path(dir: &Path, k: u32, n: usize) -> PathBuf {
    dir.join(format!("eig-k{k}-n{n}.bin"))
}

/// Exact match first, otherwise the shortest cached table of weight k with N ≥ n.
pub fn find_cached(dir: &Path, k: u32, n: usize) -> Option<PathBuf> {
    let exact = cache_path(dir, k, n);
    if exact.is_file() {
        return Some(exact);
    }
    let prefix = format!("eig-k{k}-n");
    std::fs::read_dir(dir)
        .ok()?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let name = e.file_name().into_string().ok()?;
            let m: usize = name.strip_prefix(&prefix)?.strip_suffix(".bin")?.parse().ok()?;
            (m >= n).then_some((m, e.path()))
        })
        .min_by_key(|(m, _)| *m)
        .map(|(_, p)| p)
}

fn encode(forms: &[HeckeEigenform]) -> Vec<u8> {
    let k = forms.first().map(|f| f.weight()).unwrap_or(0);
    let n = forms.first().map(|f| f.len()).unwrap_or(0);
    let mut out = format!("{CACHE_TAG}\nk={k} n={n} forms={} order={ORDER_KEY}\n", forms.len()).into_bytes();
    for f in forms {
        out.extend_from_slice(&f.sym2_l1.unwrap_or(f64::NAN).to_le_bytes());
        out.extend_from_slice(&f.petersson_norm.unwrap_or(f64::NAN).to_le_bytes());
        for v in f.table() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn cache_store(path: &Path, forms: &[HeckeEigenform]) -> Result<(), CacheError> {
    let io = |source| CacheError::Io { path: path.to_path_buf(), source };
    if let Some(first) = forms.first() {
        if forms.iter().any(|f| f.weight() != first.weight() || f.len() != first.len()) {
            return Err(CacheError::Table {
                path: path.to_path_buf(),
                detail: "all forms must share weight and table length".into(),
            });
        }
    }
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    write_atomic(path, &encode(forms)).map_err(io)
}

fn take_line<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a str> {
    let rest = &bytes[*pos..];
    let end = rest.iter().position(|&b| b == b'\n')?;
    *pos += end + 1;
    std::str::from_utf8(&rest[..end]).ok()
}

pub fn cache_load(path: &Path) -> Result<Vec<HeckeEigenform>, CacheError> {
    let p = || path.to_path_buf();
    let bytes = std::fs::read(path).map_err(|source| CacheError::Io { path: p(), source })?;
    let mut pos = 0;
    let tag = take_line(&bytes, &mut pos).unwrap_or("");
    if tag != CACHE_TAG {
        return Err(CacheError::Tag { path: p(), found: tag.chars().take(32).collect() });
    }
    let header = take_line(&bytes, &mut pos).ok_or_else(|| CacheError::Header { path: p(), detail: "missing".into() })?;
    let mut k = None;
    let mut n = None;
    let mut count = None;
    let mut order = None;
    for item in header.split_whitespace() {
        match item.split_once('=') {
            Some(("k", v)) => k = v.parse::<u32>().ok(),
            Some(("n", v)) => n = v.parse::<usize>().ok(),
            Some(("forms", v)) => count = v.parse::<usize>().ok(),
            Some(("order", v)) => order = Some(v.to_string()),
            _ => return Err(CacheError::Header { path: p(), detail: format!("unexpected field '{item}'") }),
        }
    }
    let (Some(k), Some(n), Some(count)) = (k, n, count) else {
        return Err(CacheError::Header { path: p(), detail: format!("incomplete header '{header}'") });
    };
    if order.as_deref() != Some(ORDER_KEY) {
        return Err(CacheError::Header { path: p(), detail: format!("ordering key {order:?}, expected {ORDER_KEY}") });
    }
    let body = &bytes[pos..];
    let expected = count.checked_mul(n + 2).and_then(|v| v.checked_mul(8)).unwrap_or(usize::MAX);
    if body.len() != expected {
        return Err(CacheError::Truncated { path: p(), found: body.len(), expected });
    }
    let mut vals = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let mut forms = Vec::with_capacity(count);
    for i in 0..count {
        let l = vals.next().unwrap();
        let norm = vals.next().unwrap();
        let lambda: Vec<f64> = vals.by_ref().take(n).collect();
        let mut f = HeckeEigenform::new(k, lambda)
            .map_err(|e| CacheError::Table { path: p(), detail: format!("form {i}: {e}") })?;
        if !l.is_nan() {
            f = f.with_sym2_l1(l);
        }
        if !norm.is_nan() {
            f = f.with_petersson_norm(norm);
        }
        forms.push(f);
    }
    if n >= 2 && forms.windows(2).any(|w| w[0].lambda(2) > w[1].lambda(2)) {
        return Err(CacheError::Table { path: p(), detail: "forms are not sorted by λ(2)".into() });
    }
    Ok(forms)
}
