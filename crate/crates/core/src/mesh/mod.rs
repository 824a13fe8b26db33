//! Curved quadrilateral meshes: generation, analytic curving, SFC ordering,
//! side connectivity with master/slave/flip, 2:1 mortar refinement and
//! partitioning.
//!
//! Reference element conventions:
//! - mapping nodes are equispaced on `[-1,1]^2`, stored `i + (ngeo+1) j` with `i` along xi^1;
//! - local faces are `0: -xi1`, `1: +xi1`, `2: -xi2`, `3: +xi2`;
//! - faces 0/1 are parameterized by xi^2, faces 2/3 by xi^1, both increasing.

mod geometry;
mod io;
mod partition;

pub use geometry::{compute_metrics, FaceGeometry, Geometry};
pub use io::{read_elements, read_mesh, write_mesh};
pub use partition::{partition_ranges, Partitioning, SideGroups};

use crate::basis::{build_diff_matrix, build_interpolation_matrix};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use std::collections::{BTreeMap, HashMap};

/// Opposite-side tolerance used when matching face coordinates.
const MATCH_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    /// Position in SFC order (equals the index in `Mesh::elements`).
    pub global_id: usize,
    pub sfc_key: u64,
    /// Topological edge ids in local face order.
    pub edges: [u64; 4],
    /// Boundary tag per local face, if the face lies on a physical boundary.
    pub face_bc: [Option<u16>; 4],
    /// `(ngeo+1)^2` physical coordinates of the geometry interpolation.
    pub nodes: Vec<[f64; 2]>,
    /// Side id per local face (the parent side for a big mortar face).
    pub sides: [usize; 4],
}

/// One element face as seen from a side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceRef {
    pub elem: usize,
    pub face: u8,
    /// 0: same traversal as the side's master parameter, 1: reversed.
    pub flip: u8,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SideKind {
    Boundary { bc: u16 },
    Interior { slave: FaceRef },
    /// Big face of a 2:1 interface. Its master is the big element.
    MortarParent { children: [usize; 2] },
    /// Half of a big face. The master slot holds the interpolated big trace,
    /// the slave is the small element. `upper` is the half covering `[0,1]`
    /// of the parent parameter.
    MortarChild { parent: usize, upper: bool, slave: FaceRef },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Side {
    pub id: usize,
    pub master: FaceRef,
    pub kind: SideKind,
}

impl Side {
    pub fn slave(&self) -> Option<FaceRef> {
        match self.kind {
            SideKind::Interior { slave } | SideKind::MortarChild { slave, .. } => Some(slave),
            _ => None,
        }
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self.kind, SideKind::Boundary { .. })
    }

    pub fn is_mortar(&self) -> bool {
        matches!(self.kind, SideKind::MortarParent { .. } | SideKind::MortarChild { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub ngeo: usize,
    pub elements: Vec<Element>,
    /// Grouped as boundary, inner conforming, mortar parents, mortar children.
    pub sides: Vec<Side>,
    pub bc_names: Vec<String>,
    /// Refined edges and their halves in the parameter direction of the
    /// element that split them.
    pub edge_children: BTreeMap<u64, [u64; 2]>,
    pub next_edge: u64,
}

/// Axis-aligned rectangle `[x0,x1] x [y0,y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Bounds {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn unit() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0)
    }
}

/// Morton (Z-order) index with the x bit least significant.
pub fn sfc_index(i: u32, j: u32, level: u32) -> Result<u64> {
    if level > 31 || (level < 32 && ((i as u64) >> level != 0 || (j as u64) >> level != 0)) {
        return Err(Error::InvalidArgument(format!("cell ({i},{j}) outside a level-{level} grid")));
    }
    let mut key = 0u64;
    for b in 0..level {
        key |= (((i >> b) & 1) as u64) << (2 * b);
        key |= (((j >> b) & 1) as u64) << (2 * b + 1);
    }
    Ok(key)
}

pub(crate) fn equispaced(n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![0.0];
    }
    (0..=n).map(|k| -1.0 + 2.0 * k as f64 / n as f64).collect()
}

/// Local face: fixed reference coordinate index and the node index along the face.
#[inline]
pub fn face_node(face: u8, n: usize, p: usize) -> (usize, usize) {
    match face {
        0 => (0, p),
        1 => (n, p),
        2 => (p, 0),
        _ => (p, n),
    }
}

/// Reference coordinates of face parameter `s`.
#[inline]
pub fn face_point(face: u8, s: f64) -> [f64; 2] {
    match face {
        0 => [-1.0, s],
        1 => [1.0, s],
        2 => [s, -1.0],
        _ => [s, 1.0],
    }
}

impl Element {
    /// Evaluates the geometry polynomial at a reference point.
    pub fn map(&self, ngeo: usize, xi: [f64; 2]) -> [f64; 2] {
        let r = equispaced(ngeo);
        let lx = lagrange_row(&r, xi[0]);
        let ly = lagrange_row(&r, xi[1]);
        let np = ngeo + 1;
        let mut out = [0.0; 2];
        for j in 0..np {
            for i in 0..np {
                let w = lx[i] * ly[j];
                out[0] += w * self.nodes[i + np * j][0];
                out[1] += w * self.nodes[i + np * j][1];
            }
        }
        out
    }

    pub fn centroid(&self, ngeo: usize) -> [f64; 2] {
        self.map(ngeo, [0.0, 0.0])
    }
}

fn lagrange_row(nodes: &[f64], x: f64) -> Vec<f64> {
    build_interpolation_matrix(nodes, &[x]).expect("distinct nodes").row(0).to_vec()
}

/// Flip that maps slave face endpoints onto master endpoints, allowing a
/// common translation (periodic images).
fn match_orientation(m: [[f64; 2]; 2], s: [[f64; 2]; 2]) -> (u8, f64) {
    let dev = |a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]| {
        let t0 = [a[0] - b[0], a[1] - b[1]];
        let t1 = [c[0] - d[0], c[1] - d[1]];
        (t0[0] - t1[0]).abs() + (t0[1] - t1[1]).abs()
    };
    let straight = dev(s[0], m[0], s[1], m[1]);
    let reversed = dev(s[0], m[1], s[1], m[0]);
    if straight <= reversed {
        (0, straight)
    } else {
        (1, reversed)
    }
}

impl Mesh {
    /// Structured `nx x ny` mesh with `ngeo = 1`. `bc_tags` name the
    /// boundaries at x0, x1, y0, y1; periodic directions ignore their tags.
    pub fn generate_cartesian(
        nx: usize,
        ny: usize,
        bounds: Bounds,
        bc_tags: [&str; 4],
        periodic: [bool; 2],
    ) -> Result<Mesh> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument(format!("element counts must be positive, got {nx}x{ny}")));
        }
        if !(bounds.x1 > bounds.x0) || !(bounds.y1 > bounds.y0) {
            return Err(Error::InvalidArgument(format!("degenerate bounds {bounds:?}")));
        }
        let mut bc_names: Vec<String> = Vec::new();
        let mut tag = |name: &str| -> u16 {
            match bc_names.iter().position(|n| n == name) {
                Some(k) => k as u16,
                None => {
                    bc_names.push(name.to_string());
                    (bc_names.len() - 1) as u16
                }
            }
        };
        let face_tags: [Option<u16>; 4] = [
            (!periodic[0]).then(|| tag(bc_tags[0])),
            (!periodic[0]).then(|| tag(bc_tags[1])),
            (!periodic[1]).then(|| tag(bc_tags[2])),
            (!periodic[1]).then(|| tag(bc_tags[3])),
        ];
        // vertical edges: (nx+1) * ny, horizontal: nx * (ny+1)
        let vx = |i: usize, j: usize| -> u64 {
            let i = if periodic[0] { i % nx } else { i };
            (j * (nx + 1) + i) as u64
        };
        let offset = ((nx + 1) * ny) as u64;
        let hy = |i: usize, j: usize| -> u64 {
            let j = if periodic[1] { j % ny } else { j };
            offset + (j * nx + i) as u64
        };
        let level = (nx.max(ny) as f64).log2().ceil() as u32;
        let dx = (bounds.x1 - bounds.x0) / nx as f64;
        let dy = (bounds.y1 - bounds.y0) / ny as f64;
        let mut elements = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let xa = bounds.x0 + dx * i as f64;
                let xb = if i + 1 == nx { bounds.x1 } else { bounds.x0 + dx * (i + 1) as f64 };
                let ya = bounds.y0 + dy * j as f64;
                let yb = if j + 1 == ny { bounds.y1 } else { bounds.y0 + dy * (j + 1) as f64 };
                let mut face_bc = [None; 4];
                if i == 0 {
                    face_bc[0] = face_tags[0];
                }
                if i + 1 == nx {
                    face_bc[1] = face_tags[1];
                }
                if j == 0 {
                    face_bc[2] = face_tags[2];
                }
                if j + 1 == ny {
                    face_bc[3] = face_tags[3];
                }
                elements.push(Element {
                    global_id: 0,
                    sfc_key: sfc_index(i as u32, j as u32, level)?,
                    edges: [vx(i, j), vx(i + 1, j), hy(i, j), hy(i, j + 1)],
                    face_bc,
                    nodes: vec![[xa, ya], [xb, ya], [xa, yb], [xb, yb]],
                    sides: [usize::MAX; 4],
                });
            }
        }
        let next_edge = offset + (nx * (ny + 1)) as u64;
        Mesh::from_elements(1, elements, bc_names, BTreeMap::new(), next_edge)
    }

    /// Builds a mesh from elements with geometry and edge ids; sorts by SFC
    /// key and connects sides.
    pub fn from_elements(
        ngeo: usize,
        mut elements: Vec<Element>,
        bc_names: Vec<String>,
        edge_children: BTreeMap<u64, [u64; 2]>,
        next_edge: u64,
    ) -> Result<Mesh> {
        if elements.iter().any(|e| e.nodes.len() != (ngeo + 1) * (ngeo + 1)) {
            return Err(Error::InvalidArgument(format!("every element needs {} mapping nodes", (ngeo + 1) * (ngeo + 1))));
        }
        elements.sort_by_key(|e| e.sfc_key);
        for (k, e) in elements.iter_mut().enumerate() {
            e.global_id = k;
        }
        let mut mesh = Mesh { ngeo, elements, sides: Vec::new(), bc_names, edge_children, next_edge };
        mesh.connect_sides()?;
        Ok(mesh)
    }

    pub fn n_elems(&self) -> usize {
        self.elements.len()
    }

    pub fn n_mortars(&self) -> usize {
        self.sides.iter().filter(|s| matches!(s.kind, SideKind::MortarParent { .. })).count()
    }

    /// Face endpoints in the element's own parameter direction.
    fn face_ends(&self, e: usize, face: u8) -> [[f64; 2]; 2] {
        let el = &self.elements[e];
        [el.map(self.ngeo, face_point(face, -1.0)), el.map(self.ngeo, face_point(face, 1.0))]
    }

    fn face_point_at(&self, e: usize, face: u8, s: f64) -> [f64; 2] {
        self.elements[e].map(self.ngeo, face_point(face, s))
    }

    /// Rebuilds the side list from edge ids: master = lower element id (the
    /// lower face index for an element meeting itself), flip by coordinate
    /// matching, 2:1 mortars from refined edges.
    pub fn connect_sides(&mut self) -> Result<()> {
        let mut by_edge: BTreeMap<u64, Vec<(usize, u8)>> = BTreeMap::new();
        for (k, el) in self.elements.iter().enumerate() {
            for f in 0..4u8 {
                by_edge.entry(el.edges[f as usize]).or_default().push((k, f));
            }
        }
        let mut boundary = Vec::new();
        let mut inner = Vec::new();
        let mut parents = Vec::new();
        let mut children_sides: Vec<(usize, [FaceRef; 2], usize)> = Vec::new();
        let child_edges: std::collections::HashSet<u64> = self.edge_children.values().flatten().copied().collect();
        for (&edge, faces) in &by_edge {
            match faces.len() {
                2 => {
                    let (a, b) = (faces[0], faces[1]);
                    let (m, s) = if (a.0, a.1) <= (b.0, b.1) { (a, b) } else { (b, a) };
                    let (flip, dev) = match_orientation(self.face_ends(m.0, m.1), self.face_ends(s.0, s.1));
                    if dev > MATCH_TOL * self.length_scale() {
                        return Err(Error::Connectivity(format!(
                            "faces ({},{}) and ({},{}) share edge {edge} but do not coincide",
                            m.0, m.1, s.0, s.1
                        )));
                    }
                    inner.push(Side {
                        id: 0,
                        master: FaceRef { elem: m.0, face: m.1, flip: 0 },
                        kind: SideKind::Interior { slave: FaceRef { elem: s.0, face: s.1, flip } },
                    });
                }
                1 => {
                    let (e, f) = faces[0];
                    if let Some(bc) = self.elements[e].face_bc[f as usize] {
                        boundary.push(Side {
                            id: 0,
                            master: FaceRef { elem: e, face: f, flip: 0 },
                            kind: SideKind::Boundary { bc },
                        });
                        continue;
                    }
                    if let Some(halves) = self.edge_children.get(&edge) {
                        let mut refs = Vec::new();
                        for h in halves {
                            match by_edge.get(h).map(|v| v.as_slice()) {
                                Some([one]) => refs.push(*one),
                                _ => {
                                    return Err(Error::Connectivity(format!(
                                        "edge {edge} of element {e}: refinement ratio exceeds 2:1"
                                    )))
                                }
                            }
                        }
                        let big = FaceRef { elem: e, face: f, flip: 0 };
                        let c = self.orient_children(big, [refs[0], refs[1]])?;
                        parents.push(Side { id: 0, master: big, kind: SideKind::MortarParent { children: [0, 0] } });
                        children_sides.push((parents.len() - 1, c, e));
                        continue;
                    }
                    if child_edges.contains(&edge) {
                        // handled through its parent
                        continue;
                    }
                    return Err(Error::Connectivity(format!("dangling face {f} of element {e} (edge {edge})")));
                }
                n => {
                    return Err(Error::Connectivity(format!("edge {edge} is shared by {n} faces")));
                }
            }
        }
        let mut sides = boundary;
        sides.extend(inner);
        let parent_base = sides.len();
        sides.extend(parents);
        for (p, c, big) in children_sides {
            let pid = parent_base + p;
            let mut ids = [0; 2];
            for (k, slave) in c.into_iter().enumerate() {
                ids[k] = sides.len();
                sides.push(Side {
                    id: 0,
                    master: sides[pid].master,
                    kind: SideKind::MortarChild { parent: pid, upper: k == 1, slave },
                });
            }
            debug_assert_eq!(sides[pid].master.elem, big);
            sides[pid].kind = SideKind::MortarParent { children: ids };
        }
        for el in &mut self.elements {
            el.sides = [usize::MAX; 4];
        }
        for (k, s) in sides.iter_mut().enumerate() {
            s.id = k;
            match s.kind {
                SideKind::MortarChild { slave, .. } => {
                    self.elements[slave.elem].sides[slave.face as usize] = k;
                }
                SideKind::Interior { slave } => {
                    self.elements[s.master.elem].sides[s.master.face as usize] = k;
                    self.elements[slave.elem].sides[slave.face as usize] = k;
                }
                _ => self.elements[s.master.elem].sides[s.master.face as usize] = k,
            }
        }
        if let Some(e) = self.elements.iter().find(|e| e.sides.contains(&usize::MAX)) {
            return Err(Error::Connectivity(format!("element {} has an unconnected face", e.global_id)));
        }
        self.sides = sides;
        Ok(())
    }

    fn length_scale(&self) -> f64 {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for el in &self.elements {
            for p in &el.nodes {
                for d in 0..2 {
                    lo[d] = lo[d].min(p[d]);
                    hi[d] = hi[d].max(p[d]);
                }
            }
        }
        (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1.0)
    }

    /// Orders the two small faces along the big face parameter and finds each one's flip.
    fn orient_children(&self, big: FaceRef, small: [(usize, u8); 2]) -> Result<[FaceRef; 2]> {
        let lower = [self.face_point_at(big.elem, big.face, -1.0), self.face_point_at(big.elem, big.face, 0.0)];
        let upper = [self.face_point_at(big.elem, big.face, 0.0), self.face_point_at(big.elem, big.face, 1.0)];
        let mut best: Option<(f64, [FaceRef; 2])> = None;
        for order in [[0, 1], [1, 0]] {
            let a = small[order[0]];
            let b = small[order[1]];
            let (fa, da) = match_orientation(lower, self.face_ends(a.0, a.1));
            let (fb, db) = match_orientation(upper, self.face_ends(b.0, b.1));
            // both halves must share one translation
            let ta = if fa == 0 { self.face_ends(a.0, a.1)[0] } else { self.face_ends(a.0, a.1)[1] };
            let tb = if fb == 0 { self.face_ends(b.0, b.1)[0] } else { self.face_ends(b.0, b.1)[1] };
            let shift = ((ta[0] - lower[0][0]) - (tb[0] - upper[0][0])).abs()
                + ((ta[1] - lower[0][1]) - (tb[1] - upper[0][1])).abs();
            let dev = da + db + shift;
            let refs = [
                FaceRef { elem: a.0, face: a.1, flip: fa },
                FaceRef { elem: b.0, face: b.1, flip: fb },
            ];
            if best.as_ref().map_or(true, |(d, _)| dev < *d) {
                best = Some((dev, refs));
            }
        }
        let (dev, refs) = best.expect("two orderings tried");
        if dev > MATCH_TOL * self.length_scale() {
            return Err(Error::Connectivity(format!(
                "small faces do not tile face {} of element {}",
                big.face, big.elem
            )));
        }
        Ok(refs)
    }

    /// Resamples every element from an analytic deformation of its current
    /// geometry at degree `ngeo` and rejects folded elements.
    pub fn apply_curving(&self, mapping: &dyn Fn([f64; 2]) -> [f64; 2], ngeo: usize) -> Result<Mesh> {
        if ngeo == 0 {
            return Err(Error::InvalidArgument("ngeo must be at least 1".into()));
        }
        let r = equispaced(ngeo);
        let mut out = self.clone();
        out.ngeo = ngeo;
        for (el, src) in out.elements.iter_mut().zip(&self.elements) {
            let mut nodes = Vec::with_capacity((ngeo + 1) * (ngeo + 1));
            for &b in &r {
                for &a in &r {
                    nodes.push(mapping(src.map(self.ngeo, [a, b])));
                }
            }
            el.nodes = nodes;
        }
        let bad: Vec<usize> =
            out.elements.iter().filter(|e| scaled_jacobian(e, ngeo) <= 0.0).map(|e| e.global_id).collect();
        if !bad.is_empty() {
            return Err(Error::InvalidElements(bad));
        }
        Ok(out)
    }

    /// Splits the flagged elements 2x2 (children inherit the parent's
    /// polynomial geometry) and reconnects; hanging faces become mortars.
    pub fn refine(&self, flags: &[bool]) -> Result<Mesh> {
        if flags.len() != self.n_elems() {
            return Err(Error::InvalidArgument("one refinement flag per element required".into()));
        }
        if !flags.iter().any(|&f| f) {
            return Ok(self.clone());
        }
        let mut edge_children = self.edge_children.clone();
        let mut next_edge = self.next_edge;
        let split_edge = |edge: u64, reversed: bool, next: &mut u64, map: &mut BTreeMap<u64, [u64; 2]>| {
            let halves = *map.entry(edge).or_insert_with(|| {
                let h = [*next, *next + 1];
                *next += 2;
                h
            });
            if reversed {
                [halves[1], halves[0]]
            } else {
                halves
            }
        };
        let ng = self.ngeo;
        let r = equispaced(ng);
        let mut elements = Vec::new();
        for (k, el) in self.elements.iter().enumerate() {
            let mut el = el.clone();
            el.sfc_key <<= 2;
            if !flags[k] {
                elements.push(el);
                continue;
            }
            // halves in this element's parameter direction; an edge split
            // first from the other side may run the opposite way
            let mut halves = [[0u64; 2]; 4];
            for f in 0..4u8 {
                let side = &self.sides[el.sides[f as usize]];
                halves[f as usize] = match &side.kind {
                    SideKind::MortarParent { children } => children.map(|c| {
                        let s = self.sides[c].slave().expect("child side has a slave");
                        self.elements[s.elem].edges[s.face as usize]
                    }),
                    SideKind::Interior { slave } if slave.elem == k && slave.face == f => {
                        split_edge(el.edges[f as usize], slave.flip == 1, &mut next_edge, &mut edge_children)
                    }
                    _ => split_edge(el.edges[f as usize], false, &mut next_edge, &mut edge_children),
                };
            }
            let mid_x = [next_edge, next_edge + 1];
            let mid_y = [next_edge + 2, next_edge + 3];
            next_edge += 4;
            for b in 0..2usize {
                for a in 0..2usize {
                    let lo = [-1.0 + a as f64, -1.0 + b as f64];
                    let mut nodes = Vec::with_capacity((ng + 1) * (ng + 1));
                    for &t in &r {
                        for &s in &r {
                            nodes.push(el.map(ng, [lo[0] + 0.5 * (s + 1.0), lo[1] + 0.5 * (t + 1.0)]));
                        }
                    }
                    let edges = [
                        if a == 0 { halves[0][b] } else { mid_y[b] },
                        if a == 1 { halves[1][b] } else { mid_y[b] },
                        if b == 0 { halves[2][a] } else { mid_x[a] },
                        if b == 1 { halves[3][a] } else { mid_x[a] },
                    ];
                    let face_bc = [
                        if a == 0 { el.face_bc[0] } else { None },
                        if a == 1 { el.face_bc[1] } else { None },
                        if b == 0 { el.face_bc[2] } else { None },
                        if b == 1 { el.face_bc[3] } else { None },
                    ];
                    elements.push(Element {
                        global_id: 0,
                        sfc_key: el.sfc_key + (a + 2 * b) as u64,
                        edges,
                        face_bc,
                        nodes,
                        sides: [usize::MAX; 4],
                    });
                }
            }
        }
        // a refined edge whose halves are both used by two faces is conforming again
        let mut count: HashMap<u64, usize> = HashMap::new();
        for e in &elements {
            for &g in &e.edges {
                *count.entry(g).or_default() += 1;
            }
        }
        edge_children.retain(|parent, _| count.contains_key(parent));
        Mesh::from_elements(ng, elements, self.bc_names.clone(), edge_children, next_edge)
    }

    /// Refines the elements whose centroid satisfies `region`.
    pub fn build_mortar_interfaces(&self, region: &dyn Fn([f64; 2]) -> bool) -> Result<Mesh> {
        let flags: Vec<bool> = self.elements.iter().map(|e| region(e.centroid(self.ngeo))).collect();
        self.refine(&flags)
    }

    /// Per-mesh scaled-Jacobian histogram with buckets `<0, [0,0.1), [0.1,0.2), [0.2,0.3), >=0.3`.
    pub fn scaled_jacobian_histogram(&self) -> [usize; 5] {
        let mut h = [0; 5];
        for e in &self.elements {
            let s = scaled_jacobian(e, self.ngeo);
            let k = if s < 0.0 {
                0
            } else if s < 0.1 {
                1
            } else if s < 0.2 {
                2
            } else if s < 0.3 {
                3
            } else {
                4
            };
            h[k] += 1;
        }
        h
    }

    /// Short deterministic fingerprint of geometry and topology (not of side numbering).
    pub fn fingerprint(&self) -> u32 {
        let mut h = crc32fast::Hasher::new();
        h.update(&(self.ngeo as u64).to_le_bytes());
        for e in &self.elements {
            h.update(&e.sfc_key.to_le_bytes());
            for g in e.edges {
                h.update(&g.to_le_bytes());
            }
            for p in &e.nodes {
                h.update(&p[0].to_le_bytes());
                h.update(&p[1].to_le_bytes());
            }
        }
        h.finalize()
    }
}

/// `min J / max |J|` of the geometry mapping sampled on an equispaced
/// `(2 ngeo + 1)^2` grid; a value `<= 0` flags a folded element.
pub fn scaled_jacobian(el: &Element, ngeo: usize) -> f64 {
    let r = equispaced(ngeo);
    let d = build_diff_matrix(&r).expect("distinct nodes");
    let np = ngeo + 1;
    let ns = 2 * ngeo + 1;
    let samples: Vec<f64> = (0..ns).map(|k| -1.0 + 2.0 * k as f64 / (ns - 1) as f64).collect();
    let interp = build_interpolation_matrix(&r, &samples).expect("distinct nodes");
    // derivatives at the mapping nodes, exact for the polynomial
    let mut dxi = vec![[0.0; 2]; np * np];
    let mut deta = vec![[0.0; 2]; np * np];
    for j in 0..np {
        for i in 0..np {
            for a in 0..np {
                for c in 0..2 {
                    dxi[i + np * j][c] += d.get(i, a) * el.nodes[a + np * j][c];
                    deta[i + np * j][c] += d.get(j, a) * el.nodes[i + np * a][c];
                }
            }
        }
    }
    let eval = |f: &[[f64; 2]], p: usize, q: usize| -> [f64; 2] {
        let mut out = [0.0; 2];
        for j in 0..np {
            for i in 0..np {
                let w = interp.get(p, i) * interp.get(q, j);
                out[0] += w * f[i + np * j][0];
                out[1] += w * f[i + np * j][1];
            }
        }
        out
    };
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for q in 0..ns {
        for p in 0..ns {
            let a = eval(&dxi, p, q);
            let b = eval(&deta, p, q);
            let jac = a[0] * b[1] - b[0] * a[1];
            lo = lo.min(jac);
            hi = hi.max(jac.abs());
        }
    }
    if hi == 0.0 {
        return 0.0;
    }
    lo / hi
}

/// Dense interpolation from equispaced mapping nodes to arbitrary 1D points.
pub(crate) fn geometry_interpolation(ngeo: usize, points: &[f64]) -> Matrix {
    build_interpolation_matrix(&equispaced(ngeo), points).expect("distinct nodes")
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn wavy(p: [f64; 2]) -> [f64; 2] {
        let pi = std::f64::consts::PI;
        [p[0] + 0.1 * (pi * p[1]).sin(), p[1]]
    }

    fn count(mesh: &Mesh) -> (usize, usize, usize) {
        let b = mesh.sides.iter().filter(|s| s.is_boundary()).count();
        let i = mesh.sides.iter().filter(|s| matches!(s.kind, SideKind::Interior { .. })).count();
        (mesh.n_elems(), i, b)
    }

    #[test]
    fn cartesian_counts() {
        let m = Mesh::generate_cartesian(1, 1, Bounds::unit(), ["a"; 4], [false; 2]).unwrap();
        assert_eq!(count(&m), (1, 0, 4));
        let m = Mesh::generate_cartesian(2, 2, Bounds::unit(), ["a"; 4], [true; 2]).unwrap();
        assert_eq!(count(&m), (4, 8, 0));
        let m = Mesh::generate_cartesian(3, 2, Bounds::unit(), ["a"; 4], [false; 2]).unwrap();
        assert_eq!(count(&m), (6, 7, 10));
        assert!(Mesh::generate_cartesian(0, 2, Bounds::unit(), ["a"; 4], [false; 2]).is_err());
        assert!(Mesh::generate_cartesian(2, 2, Bounds::new(0.0, 0.0, 0.0, 1.0), ["a"; 4], [false; 2]).is_err());
    }

    #[test]
    fn brute_force_edge_count() {
        for (nx, ny) in [(1, 3), (4, 2), (5, 5)] {
            let m = Mesh::generate_cartesian(nx, ny, Bounds::unit(), ["a"; 4], [false; 2]).unwrap();
            // enumerate unique geometric edges by their midpoints
            let mut mids: Vec<(i64, i64)> = Vec::new();
            for e in &m.elements {
                for f in 0..4u8 {
                    let p = e.map(1, face_point(f, 0.0));
                    let key = ((p[0] * 1e6).round() as i64, (p[1] * 1e6).round() as i64);
                    if !mids.contains(&key) {
                        mids.push(key);
                    }
                }
            }
            assert_eq!(m.sides.len(), mids.len());
            assert_eq!(count(&m).2, 2 * (nx + ny));
        }
    }

    #[test]
    fn sfc_examples() {
        assert_eq!(sfc_index(0, 0, 5).unwrap(), 0);
        assert_eq!(sfc_index(1, 0, 1).unwrap(), 1);
        assert_eq!(sfc_index(0, 1, 1).unwrap(), 2);
        let mut seen = vec![false; 16];
        for j in 0..4 {
            for i in 0..4 {
                let k = sfc_index(i, j, 2).unwrap() as usize;
                assert!(!seen[k]);
                seen[k] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
        assert!(sfc_index(4, 0, 2).is_err());
    }

    #[test]
    fn elements_follow_sfc_order() {
        let m = Mesh::generate_cartesian(3, 3, Bounds::unit(), ["a"; 4], [false; 2]).unwrap();
        assert!(m.elements.windows(2).all(|w| w[0].sfc_key < w[1].sfc_key));
        assert!(m.elements.iter().enumerate().all(|(k, e)| e.global_id == k));
        // first four elements form the lower-left 2x2 block
        let c: Vec<[f64; 2]> = m.elements[..4].iter().map(|e| e.centroid(1)).collect();
        assert!(c.iter().all(|p| p[0] < 2.0 / 3.0 && p[1] < 2.0 / 3.0));
    }

    #[test]
    fn two_by_one_master_and_flip() {
        let m = Mesh::generate_cartesian(2, 1, Bounds::unit(), ["a"; 4], [false; 2]).unwrap();
        let inner: Vec<&Side> = m.sides.iter().filter(|s| !s.is_boundary()).collect();
        assert_eq!(inner.len(), 1);
        assert_eq!(inner[0].master.elem, 0);
        assert_eq!(inner[0].master.face, 1);
        assert_eq!(inner[0].slave(), Some(FaceRef { elem: 1, face: 0, flip: 0 }));
    }

    #[test]
    fn reversed_neighbor_gets_flip_one() {
        // right element rotated by 180 degrees: its -xi1 face... becomes +xi1
        let left = Element {
            global_id: 0,
            sfc_key: 0,
            edges: [0, 1, 2, 3],
            face_bc: [Some(0), None, Some(0), Some(0)],
            nodes: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
            sides: [0; 4],
        };
        let right = Element {
            global_id: 0,
            sfc_key: 1,
            edges: [4, 1, 5, 6],
            face_bc: [Some(0), None, Some(0), Some(0)],
            nodes: vec![[2.0, 1.0], [1.0, 1.0], [2.0, 0.0], [1.0, 0.0]],
            sides: [0; 4],
        };
        let m = Mesh::from_elements(1, vec![left, right], vec!["wall".into()], BTreeMap::new(), 7).unwrap();
        let s = m.sides.iter().find(|s| !s.is_boundary()).unwrap();
        assert_eq!(s.master, FaceRef { elem: 0, face: 1, flip: 0 });
        assert_eq!(s.slave(), Some(FaceRef { elem: 1, face: 1, flip: 1 }));
    }

    #[test]
    fn periodic_single_element_meets_itself() {
        let m = Mesh::generate_cartesian(1, 1, Bounds::unit(), ["a"; 4], [true, true]).unwrap();
        assert_eq!(m.sides.len(), 2);
        for s in &m.sides {
            let sl = s.slave().unwrap();
            assert_eq!((s.master.elem, sl.elem), (0, 0));
            assert!(s.master.face < sl.face);
            assert_eq!(sl.flip, 0);
        }
    }

    #[test]
    fn curving_identity_and_affine() {
        let m = Mesh::generate_cartesian(2, 2, Bounds::unit(), ["a"; 4], [false; 2]).unwrap();
        let id = m.apply_curving(&|p| p, 3).unwrap();
        for (a, b) in id.elements.iter().zip(&m.elements) {
            for x in [[-0.3, 0.2], [1.0, -1.0], [0.9, 0.1]] {
                let (p, q) = (a.map(3, x), b.map(1, x));
                assert!((p[0] - q[0]).abs() < 1e-15 && (p[1] - q[1]).abs() < 1e-15);
            }
        }
        let folded = m.apply_curving(&|p| [p[0] + 2.0 * (8.0 * p[1]).sin() * p[0] * (1.0 - p[0]), p[1]], 4);
        assert!(matches!(folded, Err(Error::InvalidElements(_))));
    }

    #[test]
    fn scaled_jacobian_examples() {
        let m = Mesh::generate_cartesian(4, 4, Bounds::unit(), ["a"; 4], [false; 2]).unwrap();
        assert!(m.elements.iter().all(|e| (scaled_jacobian(e, 1) - 1.0).abs() < 1e-14));
        let c = m.apply_curving(&wavy, 4).unwrap();
        assert!(c.elements.iter().all(|e| {
            let s = scaled_jacobian(e, 4);
            s > 0.0 && s <= 1.0
        }));
        // a folded quad: one corner pulled across the opposite diagonal
        let mut e = m.elements[0].clone();
        e.nodes = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-0.5, -0.5]];
        assert!(scaled_jacobian(&e, 1) < 0.0);
        let h = c.scaled_jacobian_histogram();
        assert_eq!(h.iter().sum::<usize>(), 16);
        assert_eq!(h[4], 16);
    }

    #[test]
    fn mortar_refinement_counts() {
        let m = Mesh::generate_cartesian(2, 1, Bounds::unit(), ["a"; 4], [false; 2]).unwrap();
        let r = m.refine(&[true, false]).unwrap();
        assert_eq!(r.n_elems(), 5);
        assert_eq!(r.n_mortars(), 1);
        let parent = r.sides.iter().find(|s| matches!(s.kind, SideKind::MortarParent { .. })).unwrap();
        assert_eq!(r.elements[parent.master.elem].centroid(1)[0], 0.75);
        if let SideKind::MortarParent { children } = parent.kind {
            for (k, c) in children.iter().enumerate() {
                match r.sides[*c].kind {
                    SideKind::MortarChild { upper, slave, .. } => {
                        assert_eq!(upper, k == 1);
                        let y = r.elements[slave.elem].centroid(1)[1];
                        assert_eq!(y < 0.5, k == 0);
                    }
                    _ => panic!("child side expected"),
                }
            }
        }
        assert_eq!(m.refine(&[false, false]).unwrap(), m);
        let all = m.refine(&[true, true]).unwrap();
        assert_eq!((all.n_elems(), all.n_mortars()), (8, 0));
        // a second refinement next to an unrefined element breaks 2:1
        let flags: Vec<bool> = r.elements.iter().map(|e| e.centroid(1)[0] < 0.5 && e.centroid(1)[1] < 0.5).collect();
        assert!(matches!(r.refine(&flags), Err(Error::Connectivity(_))));
    }

    #[test]
    fn periodic_mortar_and_region_refinement() {
        let m = Mesh::generate_cartesian(4, 4, Bounds::unit(), ["a"; 4], [true; 2]).unwrap();
        let r = m.build_mortar_interfaces(&|p| p[0] < 0.25).unwrap();
        assert_eq!(r.n_elems(), 16 + 4 * 3);
        // left column refined: interfaces on its right and, periodically, its left
        assert_eq!(r.n_mortars(), 8);
        let same = m.build_mortar_interfaces(&|_| false).unwrap();
        assert_eq!(same, m);
    }
}
