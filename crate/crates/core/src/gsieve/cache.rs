//! Flat little-endian table cache:
//! `b"GPRIMTAB"`, `u32` version, `u64` max_norm, `u64` count, then `count`
//! pairs of `i64` (re, im). Arguments and norms are recomputed on load.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::table::PrimeTable;
use crate::error::{Error, Result};
use crate::gint::GaussInt;

pub const CACHE_MAGIC: &[u8; 8] = b"GPRIMTAB";
pub const CACHE_VERSION: u32 = 1;
const HEADER_LEN: u64 = 8 + 4 + 8 + 8;

pub fn write_table<W: Write>(table: &PrimeTable, mut w: W) -> Result<()> {
    w.write_all(CACHE_MAGIC)?;
    w.write_all(&CACHE_VERSION.to_le_bytes())?;
    w.write_all(&table.max_norm().to_le_bytes())?;
    w.write_all(&(table.len() as u64).to_le_bytes())?;
    for g in table.primes() {
        w.write_all(&g.re.to_le_bytes())?;
        w.write_all(&g.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_i64<R: Read>(r: &mut R) -> Result<i64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(i64::from_le_bytes(b))
}

/// Reads a cache image. `len_hint` is the total byte length when known and
/// is used to reject truncated or padded files before allocating.
pub fn read_table<R: Read>(mut r: R, len_hint: Option<u64>) -> Result<PrimeTable> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|_| Error::Cache("file too short for header".into()))?;
    if &magic != CACHE_MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != CACHE_VERSION {
        return Err(Error::Cache(format!("cache version {version}, expected {CACHE_VERSION}")));
    }
    let max_norm = read_u64(&mut r)?;
    let count = read_u64(&mut r)?;
    if let Some(len) = len_hint {
        if count.checked_mul(16).and_then(|b| b.checked_add(HEADER_LEN)) != Some(len) {
            return Err(Error::Cache(format!("entry count {count} does not match file length {len}")));
        }
    }
    let mut primes = Vec::with_capacity(count.min(1 << 28) as usize);
    for _ in 0..count {
        let re = read_i64(&mut r).map_err(|_| Error::Cache("truncated entry list".into()))?;
        let im = read_i64(&mut r).map_err(|_| Error::Cache("truncated entry list".into()))?;
        primes.push(GaussInt::new(re, im));
    }
    PrimeTable::from_primes(max_norm, primes)
}

/// Writes to `path`; refuses to overwrite an existing file.
pub fn save_table(table: &PrimeTable, path: &Path) -> Result<()> {
    let f = File::options().write(true).create_new(true).open(path)?;
    write_table(table, BufWriter::new(f))
}

pub fn load_table(path: &Path) -> Result<PrimeTable> {
    let f = File::open(path)?;
    let len = f.metadata()?.len();
    read_table(BufReader::new(f), Some(len))
}

/// Loads `path` when it holds a table covering `max_norm`, otherwise builds
/// one and writes it there if the file does not exist yet.
pub fn load_or_build(path: &Path, max_norm: u64) -> Result<PrimeTable> {
    if path.exists() {
        let t = load_table(path)?;
        if t.max_norm() >= max_norm {
            return Ok(if t.max_norm() == max_norm { t } else { t.truncated(max_norm) });
        }
        return PrimeTable::build(max_norm);
    }
    let t = PrimeTable::build(max_norm)?;
    save_table(&t, path)?;
    Ok(t)
}
