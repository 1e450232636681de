//! Versioned flat-file index format. All integers are little-endian `u64`
//! unless noted, floats are little-endian IEEE-754 `f64`.
//!
//! ```text
//! header
//!   magic          8 bytes  "TSMIDX\0\0"
//!   version        u32      FORMAT_VERSION
//!   transform      u8       0 identity, 1 paa, 2 dft, 3 dct, 4 haar
//!   windowing      u8       0 sliding, 1 disjoint, 2 j-sliding
//!   use_tree       u8       0 or 1
//!   reserved       u8       0
//!   transform_arg  u64      frames (paa) or coefficients, 0 for identity
//!   window         u64      ω
//!   factor         u64      J for j-sliding, else 0
//!   pack_count     u64
//!   fanout         u64
//!   fingerprint    u64      dataset content hash
//!   dim            u64      MBR dimensionality
//!   mbr_count      u64
//!   entry_count    u64
//!   skipped_count  u64, then skipped_count × u64 sequence ids
//! MBR table (mbr_count rows)
//!   low            dim × f64
//!   high           dim × f64
//!   first_entry    u64      row in the entry table
//!   entries        u64      number of entries
//! entry table (entry_count rows)
//!   sequence_id    u64
//!   start          u64
//! ```
//!
//! The STR tree is not stored; it is rebuilt deterministically on load.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Entry, IndexConfig, Mbr, SubsequenceIndex};
use crate::error::{Error, Result};
use crate::transforms::{Transform, TransformKind};
use crate::windowing::WindowingKind;

pub const MAGIC: &[u8; 8] = b"TSMIDX\0\0";
pub const FORMAT_VERSION: u32 = 1;

fn put(w: &mut impl Write, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn put_f(w: &mut impl Write, v: f64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

pub fn write_index(idx: &SubsequenceIndex, w: &mut impl Write) -> Result<()> {
    let cfg = &idx.config;
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    let (kind, factor) = match cfg.windowing {
        WindowingKind::Sliding => (0u8, 0),
        WindowingKind::Disjoint => (1, 0),
        WindowingKind::JSliding(j) => (2, j as u64),
    };
    w.write_all(&[cfg.transform.kind().code(), kind, u8::from(cfg.use_tree), 0])?;
    put(w, cfg.transform.param() as u64)?;
    put(w, cfg.window as u64)?;
    put(w, factor)?;
    put(w, cfg.pack_count as u64)?;
    put(w, cfg.fanout as u64)?;
    put(w, idx.fingerprint)?;
    put(w, idx.dim() as u64)?;
    put(w, idx.mbrs.len() as u64)?;
    put(w, idx.entry_count() as u64)?;
    put(w, idx.skipped.len() as u64)?;
    for &s in &idx.skipped {
        put(w, s as u64)?;
    }
    let mut first = 0u64;
    for m in &idx.mbrs {
        for &v in m.low.iter().chain(&m.high) {
            put_f(w, v)?;
        }
        put(w, first)?;
        put(w, m.entries.len() as u64)?;
        first += m.entries.len() as u64;
    }
    for e in idx.entries() {
        put(w, e.sequence_id as u64)?;
        put(w, e.start as u64)?;
    }
    Ok(())
}

struct Reader<R> {
    inner: R,
}

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.inner
            .read_exact(&mut buf)
            .map_err(|e| Error::IndexFormat(format!("truncated file: {e}")))?;
        Ok(buf)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?)
            .map_err(|_| Error::IndexFormat("value does not fit in usize".into()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }
}

pub fn read_index(r: impl Read) -> Result<SubsequenceIndex> {
    let mut r = Reader { inner: r };
    if &r.bytes::<8>()? != MAGIC {
        return Err(Error::IndexFormat("bad magic; not an index file".into()));
    }
    let version = u32::from_le_bytes(r.bytes()?);
    if version != FORMAT_VERSION {
        return Err(Error::IndexFormat(format!(
            "unsupported version {version} (expected {FORMAT_VERSION})"
        )));
    }
    let [tcode, wcode, tree_flag, _] = r.bytes::<4>()?;
    let kind = TransformKind::from_code(tcode)
        .ok_or_else(|| Error::IndexFormat(format!("unknown transform code {tcode}")))?;
    let param = r.usize()?;
    let window = r.usize()?;
    let factor = r.usize()?;
    let windowing = match wcode {
        0 => WindowingKind::Sliding,
        1 => WindowingKind::Disjoint,
        2 => WindowingKind::JSliding(factor),
        c => return Err(Error::IndexFormat(format!("unknown windowing code {c}"))),
    };
    let config = IndexConfig {
        transform: Transform::new(kind, param),
        window,
        windowing,
        pack_count: r.usize()?,
        fanout: r.usize()?,
        use_tree: tree_flag != 0,
    };
    config
        .validate()
        .map_err(|e| Error::IndexFormat(format!("invalid stored configuration: {e}")))?;
    let fingerprint = r.u64()?;
    let dim = r.usize()?;
    let mbr_count = r.usize()?;
    let entry_count = r.usize()?;
    let skipped_count = r.usize()?;
    let skipped = (0..skipped_count)
        .map(|_| r.usize())
        .collect::<Result<Vec<_>>>()?;

    let mut spans = Vec::with_capacity(mbr_count.min(1 << 20));
    let mut mbrs = Vec::with_capacity(mbr_count.min(1 << 20));
    for _ in 0..mbr_count {
        let low = (0..dim).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        let high = (0..dim).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        spans.push((r.usize()?, r.usize()?));
        mbrs.push(Mbr {
            low,
            high,
            entries: Vec::new(),
        });
    }
    let entries = (0..entry_count)
        .map(|_| {
            Ok(Entry {
                sequence_id: r.usize()?,
                start: r.usize()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    for (m, (first, count)) in mbrs.iter_mut().zip(spans) {
        let end = first
            .checked_add(count)
            .filter(|&e| e <= entries.len() && count > 0)
            .ok_or_else(|| Error::IndexFormat("MBR entry span out of range".into()))?;
        m.entries = entries[first..end].to_vec();
    }
    if mbrs.is_empty() {
        return Err(Error::IndexFormat("index holds no MBRs".into()));
    }
    Ok(SubsequenceIndex::from_parts(
        config,
        mbrs,
        fingerprint,
        skipped,
    ))
}

pub fn save_index(idx: &SubsequenceIndex, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_index(idx, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_index(path: impl AsRef<Path>) -> Result<SubsequenceIndex> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    read_index(BufReader::new(File::open(path)?))
}
