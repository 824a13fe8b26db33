//! Binary mesh files.
//!
//! Layout (little-endian): magic `DGFXMESH`, version `u32`, header
//! (`ngeo u32`, `n_elems u64`, `n_sides u64`, `next_edge u64`, boundary-name
//! table, refined-edge table), fixed-stride element records in SFC order,
//! fixed-stride side records, CRC32 of everything before it.

use super::{Element, FaceRef, Mesh, Side, SideKind};
use crate::error::{Error, Result};
use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Cursor, Read, Seek, SeekFrom, Write};
use std::ops::Range;
use std::path::Path;

const MAGIC: &[u8; 8] = b"DGFXMESH";
const VERSION: u32 = 1;
const NO_BC: u16 = u16::MAX;
const SIDE_STRIDE: usize = 8 + 1 + 1 + 1 + 8 + 8 + 1 + 1 + 1;

fn element_stride(ngeo: usize) -> usize {
    8 + 4 * 8 + 4 * 2 + 4 * 8 + (ngeo + 1) * (ngeo + 1) * 16
}

fn fmt_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub fn write_mesh(mesh: &Mesh, path: &Path) -> Result<()> {
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.write_u32::<LE>(VERSION)?;
    buf.write_u32::<LE>(mesh.ngeo as u32)?;
    buf.write_u64::<LE>(mesh.n_elems() as u64)?;
    buf.write_u64::<LE>(mesh.sides.len() as u64)?;
    buf.write_u64::<LE>(mesh.next_edge)?;
    buf.write_u32::<LE>(mesh.bc_names.len() as u32)?;
    for name in &mesh.bc_names {
        buf.write_u32::<LE>(name.len() as u32)?;
        buf.extend_from_slice(name.as_bytes());
    }
    buf.write_u64::<LE>(mesh.edge_children.len() as u64)?;
    for (p, c) in &mesh.edge_children {
        buf.write_u64::<LE>(*p)?;
        buf.write_u64::<LE>(c[0])?;
        buf.write_u64::<LE>(c[1])?;
    }
    for el in &mesh.elements {
        buf.write_u64::<LE>(el.sfc_key)?;
        for g in el.edges {
            buf.write_u64::<LE>(g)?;
        }
        for b in el.face_bc {
            buf.write_u16::<LE>(b.unwrap_or(NO_BC))?;
        }
        for s in el.sides {
            buf.write_u64::<LE>(s as u64)?;
        }
        for p in &el.nodes {
            buf.write_f64::<LE>(p[0])?;
            buf.write_f64::<LE>(p[1])?;
        }
    }
    for s in &mesh.sides {
        buf.write_u64::<LE>(s.master.elem as u64)?;
        buf.write_u8(s.master.face)?;
        buf.write_u8(s.master.flip)?;
        let (kind, a, b, face, flip, upper) = match s.kind {
            SideKind::Boundary { bc } => (0u8, bc as u64, 0u64, 0u8, 0u8, 0u8),
            SideKind::Interior { slave } => (1, slave.elem as u64, 0, slave.face, slave.flip, 0),
            SideKind::MortarParent { children } => (2, children[0] as u64, children[1] as u64, 0, 0, 0),
            SideKind::MortarChild { parent, upper, slave } => {
                (3, parent as u64, slave.elem as u64, slave.face, slave.flip, upper as u8)
            }
        };
        buf.write_u8(kind)?;
        buf.write_u64::<LE>(a)?;
        buf.write_u64::<LE>(b)?;
        buf.write_u8(face)?;
        buf.write_u8(flip)?;
        buf.write_u8(upper)?;
    }
    let crc = crc32fast::hash(&buf);
    buf.write_u32::<LE>(crc)?;
    let mut f = File::create(path)?;
    f.write_all(&buf)?;
    f.flush()?;
    Ok(())
}

struct Header {
    ngeo: usize,
    n_elems: usize,
    n_sides: usize,
    next_edge: u64,
    bc_names: Vec<String>,
    edge_children: BTreeMap<u64, [u64; 2]>,
}

fn read_header(r: &mut impl Read) -> Result<Header> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|_| fmt_err("file too short for a mesh header"))?;
    if &magic != MAGIC {
        return Err(fmt_err("not a mesh file (bad magic)"));
    }
    let version = r.read_u32::<LE>()?;
    if version != VERSION {
        return Err(fmt_err(format!("unsupported mesh version {version} (expected {VERSION})")));
    }
    let ngeo = r.read_u32::<LE>()? as usize;
    let n_elems = r.read_u64::<LE>()? as usize;
    let n_sides = r.read_u64::<LE>()? as usize;
    let next_edge = r.read_u64::<LE>()?;
    if ngeo == 0 || ngeo > 64 {
        return Err(fmt_err(format!("implausible geometry degree {ngeo}")));
    }
    let nbc = r.read_u32::<LE>()? as usize;
    if nbc > u16::MAX as usize {
        return Err(fmt_err("boundary table too large"));
    }
    let mut bc_names = Vec::with_capacity(nbc);
    for _ in 0..nbc {
        let len = r.read_u32::<LE>()? as usize;
        if len > 4096 {
            return Err(fmt_err("boundary name too long"));
        }
        let mut s = vec![0u8; len];
        r.read_exact(&mut s)?;
        bc_names.push(String::from_utf8(s).map_err(|_| fmt_err("boundary name is not UTF-8"))?);
    }
    let nref = r.read_u64::<LE>()? as usize;
    let mut edge_children = BTreeMap::new();
    for _ in 0..nref {
        let p = r.read_u64::<LE>()?;
        edge_children.insert(p, [r.read_u64::<LE>()?, r.read_u64::<LE>()?]);
    }
    Ok(Header { ngeo, n_elems, n_sides, next_edge, bc_names, edge_children })
}

fn read_element(r: &mut impl Read, ngeo: usize, global_id: usize) -> Result<Element> {
    let sfc_key = r.read_u64::<LE>()?;
    let mut edges = [0u64; 4];
    for g in &mut edges {
        *g = r.read_u64::<LE>()?;
    }
    let mut face_bc = [None; 4];
    for b in &mut face_bc {
        let v = r.read_u16::<LE>()?;
        *b = (v != NO_BC).then_some(v);
    }
    let mut sides = [0usize; 4];
    for s in &mut sides {
        *s = r.read_u64::<LE>()? as usize;
    }
    let nn = (ngeo + 1) * (ngeo + 1);
    let mut nodes = Vec::with_capacity(nn);
    for _ in 0..nn {
        nodes.push([r.read_f64::<LE>()?, r.read_f64::<LE>()?]);
    }
    Ok(Element { global_id, sfc_key, edges, face_bc, nodes, sides })
}

fn read_side(r: &mut impl Read, id: usize, n_elems: usize, n_sides: usize) -> Result<Side> {
    let elem = r.read_u64::<LE>()? as usize;
    let mface = r.read_u8()?;
    let mflip = r.read_u8()?;
    let kind = r.read_u8()?;
    let a = r.read_u64::<LE>()? as usize;
    let b = r.read_u64::<LE>()? as usize;
    let face = r.read_u8()?;
    let flip = r.read_u8()?;
    let upper = r.read_u8()?;
    let bad_elem = |e: usize| e >= n_elems;
    if bad_elem(elem) || mface > 3 || face > 3 || mflip > 1 || flip > 1 {
        return Err(fmt_err(format!("side {id}: corrupt record")));
    }
    let kind = match kind {
        0 => SideKind::Boundary { bc: a as u16 },
        1 if !bad_elem(a) => SideKind::Interior { slave: FaceRef { elem: a, face, flip } },
        2 if a < n_sides && b < n_sides => SideKind::MortarParent { children: [a, b] },
        3 if a < n_sides && !bad_elem(b) => {
            SideKind::MortarChild { parent: a, upper: upper == 1, slave: FaceRef { elem: b, face, flip } }
        }
        _ => return Err(fmt_err(format!("side {id}: corrupt record"))),
    };
    Ok(Side { id, master: FaceRef { elem, face: mface, flip: mflip }, kind })
}

/// Reads a whole mesh; the checksum is verified before anything is decoded.
pub fn read_mesh(path: &Path) -> Result<Mesh> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < MAGIC.len() + 8 {
        return Err(fmt_err("truncated mesh file"));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let mut r = Cursor::new(body);
    let h = read_header(&mut r)?;
    let stored = u32::from_le_bytes(tail.try_into().expect("four bytes"));
    if crc32fast::hash(body) != stored {
        return Err(fmt_err("mesh checksum mismatch"));
    }
    let expected = r.position() as usize + h.n_elems * element_stride(h.ngeo) + h.n_sides * SIDE_STRIDE;
    if body.len() != expected {
        return Err(fmt_err(format!("mesh body has {} bytes, header implies {expected}", body.len())));
    }
    let mut elements = Vec::with_capacity(h.n_elems);
    for k in 0..h.n_elems {
        elements.push(read_element(&mut r, h.ngeo, k)?);
    }
    let mut sides = Vec::with_capacity(h.n_sides);
    for k in 0..h.n_sides {
        sides.push(read_side(&mut r, k, h.n_elems, h.n_sides)?);
    }
    if elements.iter().any(|e| e.sides.iter().any(|&s| s >= h.n_sides)) {
        return Err(fmt_err("element references a missing side"));
    }
    Ok(Mesh {
        ngeo: h.ngeo,
        elements,
        sides,
        bc_names: h.bc_names,
        edge_children: h.edge_children,
        next_edge: h.next_edge,
    })
}

/// Decodes only the element records in `range` (header checked, records
/// read by offset; the trailing checksum is not verified).
pub fn read_elements(path: &Path, range: Range<usize>) -> Result<Vec<Element>> {
    let mut r = BufReader::new(File::open(path)?);
    let h = read_header(&mut r)?;
    if range.end > h.n_elems || range.start > range.end {
        return Err(Error::InvalidArgument(format!("element range {range:?} outside 0..{}", h.n_elems)));
    }
    let start = r.stream_position()?;
    r.seek(SeekFrom::Start(start + (range.start * element_stride(h.ngeo)) as u64))?;
    range.map(|k| read_element(&mut r, h.ngeo, k).map_err(|_| fmt_err("truncated element records"))).collect()
}
