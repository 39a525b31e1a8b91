// Copyright 2026 The schur-shadows Authors
// SPDX-License-Identifier: Apache-2.0

//! Binary basis cache.
//!
//! Layout (little-endian): magic `SCHB`, version u32, d u32, n u32,
//! partition count u32, checksum u64 (first 8 bytes of the SHA-256 of the
//! payload), then the payload. Per partition: part count u32, parts u32…,
//! dim_q u32, dim_p u32, dim_q·d weight counts u32, and for every `(i, j)`
//! a u64 term count followed by `(index u64, re f64, im f64)` triples.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use super::{build_schur_basis, LambdaBlock, SchurBasis, SparseVector};
use crate::qudit::BasisIndex;
use crate::young::{Partition, WeightVector};
use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"SCHB";
const HEADER_LEN: usize = 28;

fn checksum(payload: &[u8]) -> u64 {
    let digest = Sha256::digest(payload);
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

fn put_u32(buf: &mut Vec<u8>, v: usize) {
    buf.extend_from_slice(&(v as u32).to_le_bytes());
}

pub fn to_bytes(basis: &SchurBasis) -> Vec<u8> {
    let mut payload = Vec::new();
    for b in basis.blocks() {
        put_u32(&mut payload, b.partition.num_parts());
        for &p in b.partition.parts() {
            put_u32(&mut payload, p);
        }
        put_u32(&mut payload, b.dim_q);
        put_u32(&mut payload, b.dim_p);
        for w in &b.weights {
            for &c in w.counts() {
                put_u32(&mut payload, c);
            }
        }
        for v in &b.vectors {
            payload.extend_from_slice(&(v.terms().len() as u64).to_le_bytes());
            for &(idx, a) in v.terms() {
                payload.extend_from_slice(&(idx.0 as u64).to_le_bytes());
                payload.extend_from_slice(&a.re.to_le_bytes());
                payload.extend_from_slice(&a.im.to_le_bytes());
            }
        }
    }
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    put_u32(&mut out, basis.local_dim());
    put_u32(&mut out, basis.num_qudits());
    put_u32(&mut out, basis.blocks().len());
    out.extend_from_slice(&checksum(&payload).to_le_bytes());
    out.extend_from_slice(&payload);
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, k: usize) -> Result<&[u8]> {
        if self.buf.len() - self.pos < k {
            return Err(Error::Malformed("unexpected end of payload".into()));
        }
        let s = &self.buf[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }

    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn from_bytes(bytes: &[u8]) -> Result<SchurBasis> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Malformed(format!(
            "file is {} bytes, shorter than the header",
            bytes.len()
        )));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Malformed("bad magic".into()));
    }
    let mut head = Reader { buf: bytes, pos: 4 };
    let version = head.u32()? as u32;
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let d = head.u32()?;
    let n = head.u32()?;
    let count = head.u32()?;
    let stored = head.u64()?;
    let payload = &bytes[HEADER_LEN..];
    if checksum(payload) != stored {
        return Err(Error::Checksum);
    }
    let mut r = Reader { buf: payload, pos: 0 };
    let mut blocks = Vec::with_capacity(count);
    for _ in 0..count {
        let k = r.u32()?;
        if k == 0 || k > d {
            return Err(Error::Malformed(format!("partition with {k} parts for d={d}")));
        }
        let parts = (0..k).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
        let partition = Partition::new(parts).map_err(|e| Error::Malformed(e.to_string()))?;
        let dim_q = r.u32()?;
        let dim_p = r.u32()?;
        let weights = (0..dim_q)
            .map(|_| (0..d).map(|_| r.u32()).collect::<Result<Vec<_>>>().map(WeightVector))
            .collect::<Result<Vec<_>>>()?;
        let mut vectors = Vec::with_capacity(dim_q * dim_p);
        for _ in 0..dim_q * dim_p {
            let terms = r.u64()? as usize;
            if terms > (payload.len() - r.pos) / 24 {
                return Err(Error::Malformed("term count exceeds payload".into()));
            }
            let mut list = Vec::with_capacity(terms);
            for _ in 0..terms {
                let idx = r.u64()? as usize;
                let re = r.f64()?;
                let im = r.f64()?;
                list.push((BasisIndex(idx), Complex64::new(re, im)));
            }
            if list.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(Error::Malformed("indices not strictly increasing".into()));
            }
            vectors.push(SparseVector { terms: list });
        }
        blocks.push(LambdaBlock {
            partition,
            dim_q,
            dim_p,
            weights,
            vectors,
        });
    }
    if r.pos != payload.len() {
        return Err(Error::Malformed(format!("{} trailing bytes", payload.len() - r.pos)));
    }
    SchurBasis::new(d, n, blocks)
}

pub fn save_basis(basis: &SchurBasis, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension("schb.tmp");
    fs::write(&tmp, to_bytes(basis))?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_basis(path: &Path) -> Result<SchurBasis> {
    from_bytes(&fs::read(path)?)
}

/// `$SCHUR_SHADOWS_CACHE_DIR`, else `$XDG_CACHE_HOME/schur-shadows`, else
/// `~/.cache/schur-shadows`.
pub fn cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os("SCHUR_SHADOWS_CACHE_DIR") {
        return PathBuf::from(dir);
    }
    if let Some(xdg) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(xdg).join("schur-shadows");
    }
    std::env::var_os("HOME")
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir)
        .join(".cache")
        .join("schur-shadows")
}

pub fn cache_path(dir: &Path, d: usize, n: usize) -> PathBuf {
    dir.join(format!("schur_d{d}_n{n}_v{FORMAT_VERSION}.schb"))
}

/// Loads the cached basis for `(d, n)` from `dir`, building and saving it on a miss.
pub fn load_or_build(dir: &Path, d: usize, n: usize) -> Result<SchurBasis> {
    let path = cache_path(dir, d, n);
    if path.exists() {
        let basis = load_basis(&path)?;
        if basis.local_dim() == d && basis.num_qudits() == n {
            return Ok(basis);
        }
    }
    let (basis, _) = build_schur_basis(d, n)?;
    save_basis(&basis, &path)?;
    Ok(basis)
}
