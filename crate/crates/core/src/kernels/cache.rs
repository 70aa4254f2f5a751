//! Binary kernel cache.
//!
//! Layout, little-endian:
//!
//! ```text
//! "PKT1"            4 bytes
//! format version    u32 (= 1)
//! code version      u32 length + UTF-8 bytes
//! k                 u32
//! n_max             u32
//! grid half points  u64
//! grid step         f64
//! tail kind         u8 (0 = power law) + f64 exponent
//! value count       u64
//! values            f64 × count
//! ```
//!
//! One file per `(k, n_max, grid, code version)`; files are written to a
//! temporary name and renamed into place.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::kernels::table::{KernelGrid, KernelOptions, KernelSet, KernelTable, TailModel};

const MAGIC: &[u8; 4] = b"PKT1";
const FORMAT_VERSION: u32 = 1;
const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn cache_file_name(k: usize, n_max: usize, grid: &KernelGrid) -> String {
    format!(
        "kernel_k{k}_n{n_max}_h{}_s{:e}_v{CODE_VERSION}.pkt",
        grid.half_points(),
        grid.step()
    )
}

pub fn encode_table(table: &KernelTable) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + 8 * table.values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(CODE_VERSION.len() as u32).to_le_bytes());
    out.extend_from_slice(CODE_VERSION.as_bytes());
    out.extend_from_slice(&(table.k as u32).to_le_bytes());
    out.extend_from_slice(&(table.n_max_used as u32).to_le_bytes());
    out.extend_from_slice(&(table.grid.half_points() as u64).to_le_bytes());
    out.extend_from_slice(&table.grid.step().to_le_bytes());
    match table.tail {
        TailModel::PowerLaw { exponent } => {
            out.push(0);
            out.extend_from_slice(&exponent.to_le_bytes());
        }
    }
    out.extend_from_slice(&(table.values.len() as u64).to_le_bytes());
    for v in &table.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::format("kernel cache", "truncated file"))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

pub fn decode_table(bytes: &[u8]) -> Result<KernelTable> {
    let mut c = Cursor { buf: bytes, pos: 0 };
    if c.take(4)? != MAGIC {
        return Err(Error::format("kernel cache", "bad magic"));
    }
    let version = c.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::format("kernel cache", format!("unsupported format version {version}")));
    }
    let len = c.u32()? as usize;
    let code = std::str::from_utf8(c.take(len)?)
        .map_err(|_| Error::format("kernel cache", "code version is not UTF-8"))?;
    if code != CODE_VERSION {
        return Err(Error::format(
            "kernel cache",
            format!("written by version {code}, this is {CODE_VERSION}"),
        ));
    }
    let k = c.u32()? as usize;
    let n_max_used = c.u32()? as usize;
    let half_points = c.u64()? as usize;
    let step = c.f64()?;
    let grid = KernelGrid::new(half_points as f64 * step, step)?;
    if grid.half_points() != half_points {
        return Err(Error::format("kernel cache", "inconsistent grid"));
    }
    let tail = match c.u8()? {
        0 => TailModel::PowerLaw { exponent: c.f64()? },
        other => return Err(Error::format("kernel cache", format!("unknown tail kind {other}"))),
    };
    let count = c.u64()? as usize;
    if count != grid.n_points() {
        return Err(Error::format(
            "kernel cache",
            format!("{count} values for a grid of {} points", grid.n_points()),
        ));
    }
    let values = (0..count).map(|_| c.f64()).collect::<Result<Vec<_>>>()?;
    if c.pos != bytes.len() {
        return Err(Error::format("kernel cache", "trailing bytes"));
    }
    Ok(KernelTable {
        k,
        n_max_used,
        grid,
        values,
        tail,
    })
}

/// Writes `bytes` to `path` through a sibling temporary file and a rename.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let file_name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp = dir.join(format!(".{file_name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
        f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn write_table(path: &Path, table: &KernelTable) -> Result<()> {
    write_atomic(path, &encode_table(table))
}

pub fn read_table(path: &Path) -> Result<KernelTable> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    decode_table(&bytes)
}

fn cached(dir: &Path, k: usize, options: &KernelOptions) -> Option<KernelTable> {
    let path: PathBuf = dir.join(cache_file_name(k, options.n_max, &options.grid));
    let t = read_table(&path).ok()?;
    (t.k == k && t.n_max_used == options.n_max && t.grid == options.grid).then_some(t)
}

impl KernelSet {
    /// Loads `F_1..F_{k_max}` from `dir`, building and caching the set when any
    /// table is missing or stale.
    pub fn load_or_build(dir: &Path, k_max: usize, options: KernelOptions) -> Result<Self> {
        let hits: Option<Vec<KernelTable>> = (1..=k_max).map(|k| cached(dir, k, &options)).collect();
        if let Some(tables) = hits {
            return Self::from_tables(options, tables);
        }
        let set = Self::build(k_max, options)?;
        for t in set.tables() {
            write_table(&dir.join(cache_file_name(t.k, options.n_max, &options.grid)), t)?;
        }
        Ok(set)
    }
}
