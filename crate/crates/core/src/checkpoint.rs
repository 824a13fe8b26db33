//! Binary solution checkpoints.
//!
//! Layout (little-endian): magic `DGFXSTAT`, version `u32`, time `f64`,
//! step `u64`, `N u32`, `n_var u32`, `n_elems u64`, mesh fingerprint `u32`,
//! one kind byte per element, the solution in SFC element order
//! (fixed stride `(N+1)^2 n_var` doubles), then the user block (config
//! text, version string and build identifier, each length-prefixed) and a
//! CRC32 of everything before it.

use crate::error::{Error, Result};
use crate::field::{ElementField, ElementKind};
use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use std::fs::File;
use std::io::{BufReader, Cursor, Read, Seek, SeekFrom, Write};
use std::ops::Range;
use std::path::Path;

const MAGIC: &[u8; 8] = b"DGFXSTAT";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 8 + 8 + 4 + 4 + 8 + 4;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Identifies the producing build; part of every checkpoint's user block.
pub fn build_id() -> String {
    format!("dgflux {CODE_VERSION} ({} {})", std::env::consts::OS, std::env::consts::ARCH)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub time: f64,
    pub step: u64,
    pub degree: usize,
    pub mesh_fingerprint: u32,
    pub kinds: Vec<ElementKind>,
    pub solution: ElementField,
    pub config_text: String,
    pub code_version: String,
    pub build: String,
}

fn fmt_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

struct Header {
    time: f64,
    step: u64,
    degree: usize,
    nvar: usize,
    n_elems: usize,
    fingerprint: u32,
}

fn read_header(r: &mut impl Read) -> Result<Header> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|_| fmt_err("truncated checkpoint header"))?;
    if &magic != MAGIC {
        return Err(fmt_err("not a checkpoint file (bad magic)"));
    }
    let version = r.read_u32::<LE>()?;
    if version != VERSION {
        return Err(fmt_err(format!("unsupported checkpoint version {version} (expected {VERSION})")));
    }
    Ok(Header {
        time: r.read_f64::<LE>()?,
        step: r.read_u64::<LE>()?,
        degree: r.read_u32::<LE>()? as usize,
        nvar: r.read_u32::<LE>()? as usize,
        n_elems: r.read_u64::<LE>()? as usize,
        fingerprint: r.read_u32::<LE>()?,
    })
}

fn read_string(r: &mut impl Read) -> Result<String> {
    let n = r.read_u64::<LE>()? as usize;
    let mut b = vec![0u8; n];
    r.read_exact(&mut b)?;
    String::from_utf8(b).map_err(|_| fmt_err("user block is not UTF-8"))
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let s = &self.solution;
        if self.kinds.len() != s.n_elems || s.np != self.degree + 1 {
            return Err(Error::InvalidArgument("checkpoint fields disagree on the element count or degree".into()));
        }
        let mut buf = Vec::with_capacity(HEADER_LEN + s.n_elems + 8 * s.data.len() + self.config_text.len() + 128);
        buf.extend_from_slice(MAGIC);
        buf.write_u32::<LE>(VERSION)?;
        buf.write_f64::<LE>(self.time)?;
        buf.write_u64::<LE>(self.step)?;
        buf.write_u32::<LE>(self.degree as u32)?;
        buf.write_u32::<LE>(s.nvar as u32)?;
        buf.write_u64::<LE>(s.n_elems as u64)?;
        buf.write_u32::<LE>(self.mesh_fingerprint)?;
        buf.extend(self.kinds.iter().map(|k| k.to_byte()));
        for v in &s.data {
            buf.write_f64::<LE>(*v)?;
        }
        for text in [&self.config_text, &self.code_version, &self.build] {
            buf.write_u64::<LE>(text.len() as u64)?;
            buf.extend_from_slice(text.as_bytes());
        }
        let crc = crc32fast::hash(&buf);
        buf.write_u32::<LE>(crc)?;
        Ok(buf)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Checkpoint> {
        if bytes.len() < HEADER_LEN + 4 {
            return Err(fmt_err("truncated checkpoint"));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 4);
        if crc32fast::hash(body) != u32::from_le_bytes(tail.try_into().expect("four bytes")) {
            return Err(fmt_err("checkpoint checksum mismatch (truncated or corrupt file)"));
        }
        let mut r = Cursor::new(body);
        let h = read_header(&mut r)?;
        let np = h.degree + 1;
        let n = h.n_elems * np * np * h.nvar;
        if body.len() < HEADER_LEN + h.n_elems + 8 * n {
            return Err(fmt_err("checkpoint payload shorter than its header implies"));
        }
        let mut kinds = Vec::with_capacity(h.n_elems);
        for e in 0..h.n_elems {
            let b = r.read_u8()?;
            kinds.push(ElementKind::from_byte(b).ok_or_else(|| fmt_err(format!("element {e}: bad kind byte {b}")))?);
        }
        let mut solution = ElementField::zeros(h.nvar, np, h.n_elems);
        r.read_f64_into::<LE>(&mut solution.data)?;
        let config_text = read_string(&mut r)?;
        let code_version = read_string(&mut r)?;
        let build = read_string(&mut r)?;
        if r.position() as usize != body.len() {
            return Err(fmt_err("trailing bytes after the user block"));
        }
        Ok(Checkpoint {
            time: h.time,
            step: h.step,
            degree: h.degree,
            mesh_fingerprint: h.fingerprint,
            kinds,
            solution,
            config_text,
            code_version,
            build,
        })
    }

    /// Writes atomically: a temporary file is renamed over `path`.
    pub fn write(&self, path: &Path) -> Result<()> {
        let bytes = self.to_bytes()?;
        let tmp = path.with_extension("partial");
        {
            let mut f = File::create(&tmp)?;
            f.write_all(&bytes)?;
            f.sync_all()?;
        }
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Checkpoint> {
        let mut bytes = Vec::new();
        File::open(path)?.read_to_end(&mut bytes)?;
        Checkpoint::from_bytes(&bytes)
    }
}

/// Reads the solution of the elements in `range` by offset, without
/// loading the rest of the file (the checksum is not verified).
pub fn read_checkpoint_elements(path: &Path, range: Range<usize>) -> Result<(Vec<ElementKind>, Vec<f64>)> {
    let mut r = BufReader::new(File::open(path)?);
    let h = read_header(&mut r)?;
    if range.start > range.end || range.end > h.n_elems {
        return Err(Error::InvalidArgument(format!("element range {range:?} outside 0..{}", h.n_elems)));
    }
    let stride = (h.degree + 1) * (h.degree + 1) * h.nvar;
    r.seek(SeekFrom::Start((HEADER_LEN + range.start) as u64))?;
    let mut kb = vec![0u8; range.len()];
    r.read_exact(&mut kb).map_err(|_| fmt_err("truncated kind table"))?;
    let kinds = kb.iter().map(|&b| ElementKind::from_byte(b).ok_or_else(|| fmt_err("bad kind byte"))).collect::<Result<_>>()?;
    r.seek(SeekFrom::Start((HEADER_LEN + h.n_elems + 8 * stride * range.start) as u64))?;
    let mut data = vec![0.0; stride * range.len()];
    r.read_f64_into::<LE>(&mut data).map_err(|_| fmt_err("truncated solution records"))?;
    Ok((kinds, data))
}
