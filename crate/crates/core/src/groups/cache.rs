//! On-disk cache of enumerated groups.
//!
//! Layout: the magic `SOCF1`, a header (kind: u8, rank: u32, q: u32,
//! order: u64, all little-endian), then one packed base-q digit string per
//! element in key order, each stored little-endian in the fewest bytes that
//! hold q^(dim^2) - 1.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::mat::Mat;

use super::{FiniteGroup, GroupKind, GroupSpec};

const MAGIC: &[u8; 5] = b"SOCF1";

fn key_width(spec: &GroupSpec) -> usize {
    let bits = (spec.dim() * spec.dim()) as f64 * (spec.q as f64).log2();
    (bits.ceil() as usize).div_ceil(8).max(1)
}

/// Cache file name, keyed by group and crate version.
pub fn cache_path(dir: &Path, spec: &GroupSpec) -> PathBuf {
    let kind = match spec.kind {
        GroupKind::SoEven => "so_even",
        GroupKind::SoOdd => "so_odd",
        GroupKind::Gl => "gl",
    };
    dir.join(format!(
        "{kind}-{}-{}-v{}.socf",
        spec.rank,
        spec.q,
        env!("CARGO_PKG_VERSION")
    ))
}

pub fn write_cache(path: &Path, g: &FiniteGroup) -> Result<()> {
    let spec = g.spec();
    let width = key_width(&spec);
    let mut buf = Vec::with_capacity(32 + width * g.order());
    buf.extend_from_slice(MAGIC);
    buf.push(spec.kind.code());
    buf.extend_from_slice(&(spec.rank as u32).to_le_bytes());
    buf.extend_from_slice(&spec.q.to_le_bytes());
    buf.extend_from_slice(&(g.order() as u64).to_le_bytes());
    for x in g.elements() {
        buf.extend_from_slice(&x.key().to_le_bytes()[..width]);
    }
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    fs::File::create(&tmp)?.write_all(&buf)?;
    fs::rename(tmp, path)?;
    Ok(())
}

/// Read and validate a cache file against the expected group.
pub fn read_cache(path: &Path, spec: &GroupSpec) -> Result<FiniteGroup> {
    let mut buf = Vec::new();
    fs::File::open(path)?.read_to_end(&mut buf)?;
    let bad = |why: &str| Error::Io(format!("{}: {why}", path.display()));
    if buf.len() < 22 || &buf[..5] != MAGIC {
        return Err(bad("bad magic"));
    }
    let kind = GroupKind::from_code(buf[5]).ok_or_else(|| bad("unknown kind"))?;
    let rank = u32::from_le_bytes(buf[6..10].try_into().unwrap()) as usize;
    let q = u32::from_le_bytes(buf[10..14].try_into().unwrap());
    let order = u64::from_le_bytes(buf[14..22].try_into().unwrap());
    if (GroupSpec { kind, rank, q }) != *spec {
        return Err(bad("header does not match the requested group"));
    }
    if order as u128 != spec.expected_order() {
        return Err(bad("wrong element count"));
    }
    let width = key_width(spec);
    let body = &buf[22..];
    if body.len() != width * order as usize {
        return Err(bad("truncated body"));
    }
    let mut keys = Vec::with_capacity(order as usize);
    for chunk in body.chunks_exact(width) {
        let mut bytes = [0u8; 16];
        bytes[..width].copy_from_slice(chunk);
        keys.push(u128::from_le_bytes(bytes));
    }
    if keys.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("keys not strictly increasing"));
    }
    let n = spec.dim();
    if keys.iter().any(|&k| !spec.contains(&Mat::from_key(n, q, k))) {
        return Err(bad("element outside the group"));
    }
    Ok(FiniteGroup::from_sorted_keys(*spec, keys))
}

/// Use the cache when it validates, otherwise enumerate and rewrite it.
/// Returns the group and a warning when the cache had to be rebuilt.
pub fn load_or_enumerate(
    spec: GroupSpec,
    dir: Option<&Path>,
    budget: usize,
) -> Result<(FiniteGroup, Option<String>)> {
    let Some(dir) = dir else {
        return Ok((FiniteGroup::enumerate(spec, budget)?, None));
    };
    let path = cache_path(dir, &spec);
    let mut warning = None;
    if path.exists() {
        match read_cache(&path, &spec) {
            Ok(g) => return Ok((g, None)),
            Err(e) => warning = Some(format!("cache rebuilt: {e}")),
        }
    }
    let g = FiniteGroup::enumerate(spec, budget)?;
    write_cache(&path, &g)?;
    Ok((g, warning))
}
