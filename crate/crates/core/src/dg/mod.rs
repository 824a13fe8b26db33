//! Semi-discrete hybrid DG/FV operator `U_t = L(U, t)`.
//!
//! Stages per evaluation: prolong traces (or FV payloads) to sides,
//! exchange, mortar interpolation, BR1 lifting when parabolic, FV
//! reconstruction, side fluxes by the compute owner, flux return, then the
//! per-element DG or FV update.

pub mod boundary;
pub mod kernels;

pub use boundary::{BoundaryCondition, StateFn};

use crate::basis::{FvVandermonde, MortarMatrices, NodalBasis};
use crate::equations::{numerical_flux, EquationSystem, RiemannSolver, TwoPointFlux, MAX_VAR};
use crate::error::{Error, Location, Result};
use crate::field::{ElementField, ElementKind};
use crate::fv::{self, GhostKind, IndicatorConfig, IndicatorKind, Limiter, SubcellGeometry, SwitchDecision};
use crate::lifting::{lift_element, viscous_surface_flux};
use crate::mesh::{compute_metrics, Geometry, Mesh, Partitioning, SideKind};
use crate::mortar::{mortar_interpolate, mortar_project};
use kernels::{
    prolong_to_faces, strong_face_correction, surface_integral, volume_integral_split, volume_integral_strong,
    volume_integral_weak,
};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VolumeForm {
    Weak,
    Strong,
    Split(TwoPointFlux),
}

impl fmt::Display for VolumeForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VolumeForm::Weak => f.write_str("weak"),
            VolumeForm::Strong => f.write_str("strong"),
            VolumeForm::Split(_) => f.write_str("split"),
        }
    }
}

impl FromStr for VolumeForm {
    type Err = Error;
    /// `split` defaults to the entropy-conserving two-point flux.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "weak" => Ok(VolumeForm::Weak),
            "strong" => Ok(VolumeForm::Strong),
            "split" => Ok(VolumeForm::Split(TwoPointFlux::ChandrashekarEc)),
            other => Err(Error::InvalidArgument(format!("unknown volume form '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    pub form: VolumeForm,
    pub riemann: RiemannSolver,
    pub limiter: Limiter,
}

impl Default for Settings {
    fn default() -> Self {
        Self { form: VolumeForm::Weak, riemann: RiemannSolver::Rusanov, limiter: Limiter::MinMod }
    }
}

/// Number of lifted variables carried by the gradient machinery.
fn lift_width(eq: &EquationSystem) -> usize {
    match eq {
        EquationSystem::Scalar { .. } => 1,
        _ => 3,
    }
}

#[inline]
fn reindex(flip: u8, np: usize, p: usize) -> usize {
    if flip == 1 {
        np - 1 - p
    } else {
        p
    }
}

/// Master/slave slots of one kind of side data plus the partition mirror.
#[derive(Clone, Debug)]
struct SideData {
    blk: usize,
    m: Vec<f64>,
    s: Vec<f64>,
    mirror: Vec<f64>,
}

impl SideData {
    fn new(n_sides: usize, np: usize, width: usize, n_interface: usize) -> Self {
        let blk = np * width;
        Self { blk, m: vec![0.0; n_sides * blk], s: vec![0.0; n_sides * blk], mirror: vec![0.0; n_interface * blk] }
    }

    /// Where `elem` deposits its view of `side`.
    #[inline]
    fn slot(&mut self, part: &Partitioning, side: usize, elem: usize, master: bool) -> &mut [f64] {
        let b = self.blk;
        if part.is_remote(side, elem) {
            let k = part.mirror_slot[side];
            &mut self.mirror[k * b..(k + 1) * b]
        } else if master {
            &mut self.m[side * b..(side + 1) * b]
        } else {
            &mut self.s[side * b..(side + 1) * b]
        }
    }

    /// What `elem` sees of `side` after a return: its own role's slot.
    #[inline]
    fn read(&self, part: &Partitioning, side: usize, elem: usize, master: bool) -> &[f64] {
        let b = self.blk;
        if part.is_remote(side, elem) {
            let k = part.mirror_slot[side];
            &self.mirror[k * b..(k + 1) * b]
        } else if master {
            &self.m[side * b..(side + 1) * b]
        } else {
            &self.s[side * b..(side + 1) * b]
        }
    }

    #[inline]
    fn master(&self, side: usize) -> &[f64] {
        &self.m[side * self.blk..(side + 1) * self.blk]
    }

    #[inline]
    fn slave(&self, side: usize) -> &[f64] {
        &self.s[side * self.blk..(side + 1) * self.blk]
    }

    fn exchange(&mut self, part: &Partitioning, mesh: &Mesh) -> Result<()> {
        part.exchange_face_data(mesh, &self.mirror, self.blk, &mut self.m, &mut self.s)
    }

    /// Non-owners receive their own role's slot (fluxes).
    fn send_back(&mut self, part: &Partitioning, mesh: &Mesh) {
        part.return_face_data(mesh, &self.m, &self.s, self.blk, &mut self.mirror);
    }

    /// Non-owners receive the opposite role's slot (neighbor payloads).
    fn send_opposite_back(&mut self, part: &Partitioning, mesh: &Mesh) {
        part.return_face_data(mesh, &self.s, &self.m, self.blk, &mut self.mirror);
    }

    /// Mortar parent master trace to the children's master slots.
    fn interpolate_mortars(&mut self, mesh: &Mesh, mortar: &MortarMatrices, width: usize) {
        let b = self.blk;
        for side in &mesh.sides {
            if let SideKind::MortarParent { children } = side.kind {
                let (lo, up) = (children[0].min(children[1]), children[0].max(children[1]));
                let (head, tail) = self.m.split_at_mut(up * b);
                let (parent, lower) = if side.id < lo {
                    let (h, t) = head.split_at_mut(lo * b);
                    (&h[side.id * b..(side.id + 1) * b], &mut t[..b])
                } else {
                    unreachable!("mortar parents precede their children")
                };
                let (l, u) = if children[0] == lo { (lower, &mut tail[..b]) } else { (&mut tail[..b], lower) };
                mortar_interpolate(mortar, width, parent, l, u);
            }
        }
    }

    /// Child master-slot fluxes projected onto the parent master slot.
    fn project_mortars(&mut self, mesh: &Mesh, mortar: &MortarMatrices, width: usize, part: usize, owner: &[usize]) {
        let b = self.blk;
        for side in &mesh.sides {
            if let SideKind::MortarParent { children } = side.kind {
                if owner[side.id] != part {
                    continue;
                }
                let (head, tail) = self.m.split_at_mut(children[0].min(children[1]) * b);
                let base = children[0].min(children[1]);
                let l = &tail[(children[0] - base) * b..(children[0] - base + 1) * b];
                let u = &tail[(children[1] - base) * b..(children[1] - base + 1) * b];
                mortar_project(mortar, width, l, u, &mut head[side.id * b..(side.id + 1) * b]);
            }
        }
    }
}

/// Preallocated buffers; evaluating the operator allocates nothing.
#[derive(Clone, Debug)]
struct Workspace {
    u: SideData,
    lift: SideData,
    grad: SideData,
    recon: SideData,
    flux: SideData,
    lflux: SideData,
    gx: Vec<f64>,
    gy: Vec<f64>,
    xlo: Vec<f64>,
    xhi: Vec<f64>,
    ylo: Vec<f64>,
    yhi: Vec<f64>,
    // element scratch
    traces: Vec<f64>,
    nodal: Vec<f64>,
    f1: Vec<f64>,
    f2: Vec<f64>,
    v1: Vec<f64>,
    v2: Vec<f64>,
    acc: Vec<f64>,
    faces: Vec<f64>,
    prim: Vec<f64>,
    ghost: Vec<f64>,
    rec: [Vec<f64>; 4],
    // side scratch
    left: Vec<f64>,
    right: Vec<f64>,
    side_flux: Vec<f64>,
    dg_flux: Vec<f64>,
    tmp: Vec<f64>,
    tmp2: Vec<f64>,
}

impl Workspace {
    fn new(nv: usize, nl: usize, np: usize, n_elems: usize, n_sides: usize, n_if: usize) -> Self {
        let n2 = np * np;
        let wmax = nv.max(2 * nl);
        let field = n_elems * n2 * nv;
        Self {
            u: SideData::new(n_sides, np, nv, n_if),
            lift: SideData::new(n_sides, np, nl, n_if),
            grad: SideData::new(n_sides, np, 2 * nl, n_if),
            recon: SideData::new(n_sides, np, nv, n_if),
            flux: SideData::new(n_sides, np, nv, n_if),
            lflux: SideData::new(n_sides, np, 2 * nl, n_if),
            gx: vec![0.0; n_elems * n2 * nl],
            gy: vec![0.0; n_elems * n2 * nl],
            xlo: vec![0.0; field],
            xhi: vec![0.0; field],
            ylo: vec![0.0; field],
            yhi: vec![0.0; field],
            traces: vec![0.0; 4 * np * wmax],
            nodal: vec![0.0; n2 * wmax],
            f1: vec![0.0; n2 * nv],
            f2: vec![0.0; n2 * nv],
            v1: vec![0.0; n2 * nv],
            v2: vec![0.0; n2 * nv],
            acc: vec![0.0; n2 * nv],
            faces: vec![0.0; 4 * np * wmax],
            prim: vec![0.0; n2 * nv],
            ghost: vec![0.0; 4 * np * nv],
            rec: std::array::from_fn(|_| vec![0.0; n2 * nv]),
            left: vec![0.0; np * nv],
            right: vec![0.0; np * nv],
            side_flux: vec![0.0; np * nv],
            dg_flux: vec![0.0; np * nv],
            tmp: vec![0.0; n2 * wmax],
            tmp2: vec![0.0; n2 * wmax],
        }
    }
}

/// Immutable discretization data shared by all stages.
struct Ctx<'a> {
    eq: &'a EquationSystem,
    basis: &'a NodalBasis,
    mesh: &'a Mesh,
    geo: &'a Geometry,
    part: &'a Partitioning,
    settings: &'a Settings,
    bcs: &'a [BoundaryCondition],
    mortar: &'a MortarMatrices,
    vdm: &'a FvVandermonde,
    sg: &'a SubcellGeometry,
    kinds: &'a [ElementKind],
    nl: usize,
}

impl Ctx<'_> {
    /// Side of local face `f`, whether `e` is its master, and the flip.
    #[inline]
    fn role(&self, e: usize, f: usize) -> (usize, bool, u8) {
        let side = self.mesh.elements[e].sides[f];
        match self.mesh.sides[side].slave() {
            Some(sl) if sl.elem == e && sl.face as usize == f => (side, false, sl.flip),
            _ => (side, true, 0),
        }
    }

    fn np(&self) -> usize {
        self.basis.np()
    }

    /// Writes local face traces (`4 x np x width`) of `e` into `sd`.
    fn deposit(&self, sd: &mut SideData, e: usize, traces: &[f64], width: usize) {
        let np = self.np();
        for f in 0..4 {
            let (side, master, flip) = self.role(e, f);
            let slot = sd.slot(self.part, side, e, master);
            for p in 0..np {
                let q = reindex(flip, np, p);
                slot[q * width..(q + 1) * width].copy_from_slice(&traces[(f * np + p) * width..(f * np + p + 1) * width]);
            }
        }
    }

    /// Gathers outward side data of `e` into local face order.
    fn gather(&self, sd: &SideData, e: usize, width: usize, out: &mut [f64]) {
        let np = self.np();
        for f in 0..4 {
            let (side, master, flip) = self.role(e, f);
            let src = sd.read(self.part, side, e, master);
            let sign = if master { 1.0 } else { -1.0 };
            for p in 0..np {
                let q = reindex(flip, np, p);
                for c in 0..width {
                    out[(f * np + p) * width + c] = sign * src[q * width + c];
                }
            }
        }
    }

    fn prolong(&self, ws: &mut Workspace, u: &ElementField, e: usize, lifting: bool) -> Result<()> {
        let np = self.np();
        let nv = self.eq.nvar();
        let ue = u.elem(e);
        match self.kinds[e] {
            ElementKind::Dg => {
                prolong_to_faces(self.basis, nv, ue, &mut ws.traces);
                self.deposit(&mut ws.u, e, &ws.traces, nv);
                if lifting {
                    let nl = self.nl;
                    for k in 0..np * np {
                        self.eq
                            .lifted_variables(&ue[k * nv..(k + 1) * nv], &mut ws.nodal[k * nl..(k + 1) * nl])
                            .map_err(|err| err.at(Location::Node { element: e, i: k % np, j: k / np }))?;
                    }
                    prolong_to_faces(self.basis, nl, &ws.nodal, &mut ws.traces);
                    self.deposit(&mut ws.lift, e, &ws.traces, nl);
                }
            }
            ElementKind::Fv => {
                for p in 0..np {
                    for (f, (i, j)) in [(0, p), (np - 1, p), (p, 0), (p, np - 1)].into_iter().enumerate() {
                        let o = (j * np + i) * nv;
                        ws.traces[(f * np + p) * nv..(f * np + p + 1) * nv].copy_from_slice(&ue[o..o + nv]);
                    }
                }
                self.deposit(&mut ws.u, e, &ws.traces, nv);
            }
        }
        Ok(())
    }

    /// `u* n_d s-hat` on one side.
    fn lift_side(&self, ws: &mut Workspace, s: usize, t: f64) -> Result<()> {
        let np = self.np();
        let (nv, nl) = (self.eq.nvar(), self.nl);
        let side = &self.mesh.sides[s];
        let fg = &self.geo.faces[s];
        let b = 2 * nl;
        match side.kind {
            SideKind::MortarParent { .. } => return Ok(()),
            SideKind::Boundary { bc } => {
                let bc = &self.bcs[bc as usize];
                for p in 0..np {
                    let um = &ws.u.master(s)[p * nv..(p + 1) * nv];
                    let mut ghost = [0.0; MAX_VAR];
                    bc.ghost(self.eq, um, fg.normal[p], fg.x[p], t, &mut ghost);
                    let mut star = [0.0; 3];
                    bc.lifted_state(self.eq, um, &ghost, &mut star).map_err(|err| err.at(Location::Side(s)))?;
                    let o = s * ws.lflux.blk + p * b;
                    for c in 0..nl {
                        ws.lflux.m[o + c] = star[c] * fg.normal[p][0] * fg.surf[p];
                        ws.lflux.m[o + nl + c] = star[c] * fg.normal[p][1] * fg.surf[p];
                    }
                }
            }
            _ => {
                for p in 0..np {
                    let o = s * ws.lflux.blk + p * b;
                    for c in 0..nl {
                        let star = 0.5 * (ws.lift.master(s)[p * nl + c] + ws.lift.slave(s)[p * nl + c]);
                        ws.lflux.m[o + c] = star * fg.normal[p][0] * fg.surf[p];
                        ws.lflux.m[o + nl + c] = star * fg.normal[p][1] * fg.surf[p];
                    }
                }
                let blk = ws.lflux.blk;
                ws.lflux.s[s * blk..(s + 1) * blk].copy_from_slice(&ws.lflux.m[s * blk..(s + 1) * blk]);
            }
        }
        Ok(())
    }

    /// BR1 gradients into `ws.gx`, `ws.gy` and their side traces.
    fn lift(&self, ws: &mut Workspace, u: &ElementField, t: f64) -> Result<()> {
        let np = self.np();
        let n2 = np * np;
        let (nv, nl) = (self.eq.nvar(), self.nl);
        for p in 0..self.part.count() {
            let g = &self.part.groups[p];
            for &s in g.boundary.iter().chain(&g.inner).chain(&g.mpi_master) {
                self.lift_side(ws, s, t)?;
            }
            ws.lflux.project_mortars(self.mesh, self.mortar, 2 * nl, p, &self.part.side_owner);
        }
        ws.lflux.send_back(self.part, self.mesh);
        for e in 0..self.mesh.n_elems() {
            let ue = u.elem(e);
            for k in 0..n2 {
                self.eq
                    .lifted_variables(&ue[k * nv..(k + 1) * nv], &mut ws.nodal[k * nl..(k + 1) * nl])
                    .map_err(|err| err.at(Location::Node { element: e, i: k % np, j: k / np }))?;
            }
            self.gather(&ws.lflux, e, 2 * nl, &mut ws.faces);
            let r = e * n2..(e + 1) * n2;
            lift_element(
                self.basis,
                nl,
                &ws.nodal[..n2 * nl],
                &self.geo.ja[r.clone()],
                &self.geo.jac[r],
                &ws.faces,
                &mut ws.gx[e * n2 * nl..(e + 1) * n2 * nl],
                &mut ws.gy[e * n2 * nl..(e + 1) * n2 * nl],
            );
            for k in 0..n2 {
                for c in 0..nl {
                    ws.nodal[k * 2 * nl + c] = ws.gx[(e * n2 + k) * nl + c];
                    ws.nodal[k * 2 * nl + nl + c] = ws.gy[(e * n2 + k) * nl + c];
                }
            }
            prolong_to_faces(self.basis, 2 * nl, &ws.nodal, &mut ws.traces);
            self.deposit(&mut ws.grad, e, &ws.traces, 2 * nl);
        }
        ws.grad.exchange(self.part, self.mesh)?;
        ws.grad.interpolate_mortars(self.mesh, self.mortar, 2 * nl);
        Ok(())
    }

    /// Limited reconstruction of FV element `e`; stores face states and deposits element-face values.
    fn reconstruct(&self, ws: &mut Workspace, u: &ElementField, e: usize) -> Result<()> {
        let np = self.np();
        let nv = self.eq.nvar();
        let n2 = np * np;
        let ue = u.elem(e);
        for k in 0..n2 {
            self.eq
                .to_primitive(&ue[k * nv..(k + 1) * nv], &mut ws.prim[k * nv..(k + 1) * nv])
                .map_err(|err| err.at(Location::Subcell { element: e, i: k % np, j: k / np }))?;
        }
        let mut kinds = [GhostKind::None; 4];
        for f in 0..4 {
            let (side, master, flip) = self.role(e, f);
            let sd = &self.mesh.sides[side];
            let Some(other) = (match sd.kind {
                SideKind::Interior { slave } => Some(if master { slave.elem } else { sd.master.elem }),
                _ => None,
            }) else {
                continue;
            };
            let payload = if self.part.is_remote(side, e) {
                ws.u.read(self.part, side, e, master)
            } else if master {
                ws.u.slave(side)
            } else {
                ws.u.master(side)
            };
            let src: &[f64] = match self.kinds[other] {
                ElementKind::Fv => {
                    kinds[f] = GhostKind::Mean;
                    payload
                }
                ElementKind::Dg => {
                    kinds[f] = GhostKind::Trace;
                    fv::face_apply(&self.vdm.dg_to_fv, nv, payload, &mut ws.left);
                    &ws.left
                }
            };
            for p in 0..np {
                let q = reindex(flip, np, p);
                let o = (f * np + p) * nv;
                self.eq
                    .to_primitive(&src[q * nv..(q + 1) * nv], &mut ws.ghost[o..o + nv])
                    .map_err(|err| err.at(Location::Side(side)))?;
            }
        }
        let [a, b, c, d] = &mut ws.rec;
        fv::reconstruct(self.settings.limiter, np, nv, &ws.prim, kinds, &ws.ghost, a, b, c, d);
        let r = e * n2 * nv..(e + 1) * n2 * nv;
        for (src, dst) in ws.rec.iter().zip([&mut ws.xlo, &mut ws.xhi, &mut ws.ylo, &mut ws.yhi]) {
            let dst = &mut dst[r.clone()];
            for k in 0..n2 {
                fv::to_cons(self.eq, &src[k * nv..(k + 1) * nv], &mut dst[k * nv..(k + 1) * nv], e, k % np, k / np)?;
            }
        }
        for p in 0..np {
            let cells = [(&ws.xlo, 0, p), (&ws.xhi, np - 1, p), (&ws.ylo, p, 0), (&ws.yhi, p, np - 1)];
            for (f, (arr, i, j)) in cells.into_iter().enumerate() {
                let o = r.start + (j * np + i) * nv;
                ws.traces[(f * np + p) * nv..(f * np + p + 1) * nv].copy_from_slice(&arr[o..o + nv]);
            }
        }
        self.deposit(&mut ws.recon, e, &ws.traces, nv);
        Ok(())
    }

    /// Numerical flux `f* s-hat` (convective minus viscous) on one side.
    fn side_flux(&self, ws: &mut Workspace, s: usize, t: f64, parabolic: bool) -> Result<()> {
        let np = self.np();
        let (nv, nl) = (self.eq.nvar(), self.nl);
        let side = &self.mesh.sides[s];
        let fg = &self.geo.faces[s];
        let solver = self.settings.riemann;
        let blk = ws.flux.blk;
        let loc = |err: Error| err.at(Location::Side(s));
        match side.kind {
            SideKind::MortarParent { .. } => {}
            SideKind::Boundary { bc } => {
                let bc = &self.bcs[bc as usize];
                let fv_side = self.kinds[side.master.elem] == ElementKind::Fv;
                for p in 0..np {
                    let (n, x, surf) = if fv_side {
                        let k = s * np + p;
                        (self.sg.seg_normal[k], self.sg.seg_x[k], self.sg.seg_surf[k])
                    } else {
                        (fg.normal[p], fg.x[p], fg.surf[p])
                    };
                    let inner = if fv_side { &ws.recon.master(s)[p * nv..(p + 1) * nv] } else { &ws.u.master(s)[p * nv..(p + 1) * nv] };
                    let mut ghost = [0.0; MAX_VAR];
                    let mut f = [0.0; MAX_VAR];
                    bc.ghost(self.eq, inner, n, x, t, &mut ghost);
                    numerical_flux(self.eq, solver, inner, &ghost[..nv], n, &mut f).map_err(loc)?;
                    if parabolic {
                        let g = &ws.grad.master(s)[p * 2 * nl..(p + 1) * 2 * nl];
                        let mut fv = [0.0; MAX_VAR];
                        bc.viscous_flux(self.eq, inner, &ghost, &g[..nl], &g[nl..], n, &mut fv).map_err(loc)?;
                        for v in 0..nv {
                            f[v] -= fv[v];
                        }
                    }
                    for v in 0..nv {
                        ws.flux.m[s * blk + p * nv + v] = f[v] * surf;
                    }
                }
            }
            SideKind::Interior { slave } | SideKind::MortarChild { slave, .. } => {
                let mk = self.kinds[side.master.elem];
                let sk = self.kinds[slave.elem];
                if mk == ElementKind::Dg && sk == ElementKind::Dg {
                    for p in 0..np {
                        let (ul, ur) = (&ws.u.master(s)[p * nv..(p + 1) * nv], &ws.u.slave(s)[p * nv..(p + 1) * nv]);
                        let mut f = [0.0; MAX_VAR];
                        numerical_flux(self.eq, solver, ul, ur, fg.normal[p], &mut f).map_err(loc)?;
                        if parabolic {
                            let w = 2 * nl;
                            let mut fv = [0.0; MAX_VAR];
                            viscous_surface_flux(
                                self.eq,
                                ul,
                                ur,
                                &ws.grad.master(s)[p * w..(p + 1) * w],
                                &ws.grad.slave(s)[p * w..(p + 1) * w],
                                fg.normal[p],
                                &mut fv,
                            )
                            .map_err(loc)?;
                            for v in 0..nv {
                                f[v] -= fv[v];
                            }
                        }
                        for v in 0..nv {
                            ws.flux.m[s * blk + p * nv + v] = f[v] * fg.surf[p];
                        }
                    }
                    let (m, sl) = (&ws.flux.m[s * blk..(s + 1) * blk], &mut ws.flux.s[s * blk..(s + 1) * blk]);
                    sl.copy_from_slice(m);
                } else {
                    match mk {
                        ElementKind::Fv => ws.left.copy_from_slice(ws.recon.master(s)),
                        ElementKind::Dg => fv::face_apply(&self.vdm.dg_to_fv, nv, ws.u.master(s), &mut ws.left),
                    }
                    match sk {
                        ElementKind::Fv => ws.right.copy_from_slice(ws.recon.slave(s)),
                        ElementKind::Dg => fv::face_apply(&self.vdm.dg_to_fv, nv, ws.u.slave(s), &mut ws.right),
                    }
                    let r = s * np..(s + 1) * np;
                    fv::mixed_interface_flux(
                        self.eq,
                        solver,
                        &ws.left,
                        &ws.right,
                        &self.sg.seg_normal[r.clone()],
                        &self.sg.seg_surf[r],
                        &mut ws.side_flux,
                    )
                    .map_err(loc)?;
                    fv::face_apply(&self.vdm.fv_to_dg, nv, &ws.side_flux, &mut ws.dg_flux);
                    let pick = |k: ElementKind| if k == ElementKind::Fv { &ws.side_flux } else { &ws.dg_flux };
                    ws.flux.m[s * blk..(s + 1) * blk].copy_from_slice(pick(mk));
                    ws.flux.s[s * blk..(s + 1) * blk].copy_from_slice(pick(sk));
                }
            }
        }
        Ok(())
    }

    fn dg_update(&self, ws: &mut Workspace, u: &ElementField, e: usize, parabolic: bool, ut: &mut [f64]) -> Result<()> {
        let np = self.np();
        let n2 = np * np;
        let (nv, nl) = (self.eq.nvar(), self.nl);
        let ue = u.elem(e);
        let ja = &self.geo.ja[e * n2..(e + 1) * n2];
        let split = matches!(self.settings.form, VolumeForm::Split(_));
        for k in 0..n2 {
            let (mut fx, mut fy) = ([0.0; MAX_VAR], [0.0; MAX_VAR]);
            let at = |err: Error| err.at(Location::Node { element: e, i: k % np, j: k / np });
            self.eq.physical_flux(&ue[k * nv..(k + 1) * nv], &mut fx, &mut fy).map_err(at)?;
            let (m1, m2) = (ja[k][0], ja[k][1]);
            for v in 0..nv {
                ws.f1[k * nv + v] = m1[0] * fx[v] + m1[1] * fy[v];
                ws.f2[k * nv + v] = m2[0] * fx[v] + m2[1] * fy[v];
            }
            if parabolic {
                let (mut gx, mut gy) = ([0.0; MAX_VAR], [0.0; MAX_VAR]);
                let g = (e * n2 + k) * nl;
                self.eq.viscous_flux(&ue[k * nv..(k + 1) * nv], &ws.gx[g..g + nl], &ws.gy[g..g + nl], &mut gx, &mut gy).map_err(at)?;
                for v in 0..nv {
                    let (a, b) = (-(m1[0] * gx[v] + m1[1] * gy[v]), -(m2[0] * gx[v] + m2[1] * gy[v]));
                    ws.v1[k * nv + v] = a;
                    ws.v2[k * nv + v] = b;
                    if !split {
                        ws.f1[k * nv + v] += a;
                        ws.f2[k * nv + v] += b;
                    }
                }
            }
        }
        ws.acc.fill(0.0);
        self.gather(&ws.flux, e, nv, &mut ws.faces);
        match self.settings.form {
            VolumeForm::Weak => {
                volume_integral_weak(self.basis, nv, &ws.f1, &ws.f2, &mut ws.acc);
                surface_integral(self.basis, nv, &ws.faces, &mut ws.acc);
            }
            VolumeForm::Strong => {
                volume_integral_strong(self.basis, nv, &ws.f1, &ws.f2, &mut ws.acc);
                surface_integral(self.basis, nv, &ws.faces, &mut ws.acc);
                strong_face_correction(self.basis, nv, &ws.f1, &ws.f2, &mut ws.acc);
            }
            VolumeForm::Split(variant) => {
                volume_integral_split(self.eq, self.basis, variant, e, ue, ja, &ws.f1, &ws.f2, &mut ws.prim, &mut ws.acc)?;
                if parabolic {
                    volume_integral_strong(self.basis, nv, &ws.v1, &ws.v2, &mut ws.acc);
                    for k in 0..n2 * nv {
                        ws.f1[k] += ws.v1[k];
                        ws.f2[k] += ws.v2[k];
                    }
                }
                surface_integral(self.basis, nv, &ws.faces, &mut ws.acc);
                strong_face_correction(self.basis, nv, &ws.f1, &ws.f2, &mut ws.acc);
            }
        }
        for k in 0..n2 {
            let inv = -1.0 / self.geo.jac[e * n2 + k];
            for v in 0..nv {
                ut[k * nv + v] = ws.acc[k * nv + v] * inv;
            }
        }
        Ok(())
    }

    fn fv_update(&self, ws: &mut Workspace, e: usize, ut: &mut [f64]) -> Result<()> {
        let nv = self.eq.nvar();
        let n = self.np() * self.np() * nv;
        self.gather(&ws.flux, e, nv, &mut ws.faces);
        let r = e * n..(e + 1) * n;
        fv::fv_time_derivative(
            self.eq,
            self.settings.riemann,
            self.sg,
            e,
            &ws.xlo[r.clone()],
            &ws.xhi[r.clone()],
            &ws.ylo[r.clone()],
            &ws.yhi[r],
            &ws.faces,
            ut,
        )
    }
}

/// The assembled hybrid operator with its mesh, metrics and buffers.
#[derive(Debug)]
pub struct Operator {
    pub eq: EquationSystem,
    pub basis: NodalBasis,
    pub mesh: Mesh,
    pub geo: Geometry,
    pub part: Partitioning,
    pub settings: Settings,
    pub bcs: Vec<BoundaryCondition>,
    pub mortar: MortarMatrices,
    pub vdm: FvVandermonde,
    pub subcells: SubcellGeometry,
    pub kinds: Vec<ElementKind>,
    /// Elements next to a mortar, which stay DG.
    pub mortar_adjacent: Vec<bool>,
    nl: usize,
    ws: Workspace,
}

impl Operator {
    /// `bcs[k]` is applied to boundary tag `k` of the mesh.
    pub fn new(
        eq: EquationSystem,
        mesh: Mesh,
        basis: NodalBasis,
        settings: Settings,
        bcs: Vec<BoundaryCondition>,
        partitions: usize,
    ) -> Result<Self> {
        if matches!(settings.form, VolumeForm::Split(_)) && !basis.is_lobatto() {
            return Err(Error::InvalidArgument(
                "the split form needs the summation-by-parts property of LGL nodes; use nodes = LGL".into(),
            ));
        }
        for s in &mesh.sides {
            if let SideKind::Boundary { bc } = s.kind {
                let Some(b) = bcs.get(bc as usize) else {
                    return Err(Error::InvalidArgument(format!(
                        "no boundary condition for tag '{}'",
                        mesh.bc_names.get(bc as usize).map(String::as_str).unwrap_or("?")
                    )));
                };
                b.check(&eq)?;
            }
        }
        let geo = compute_metrics(&mesh, &basis)?;
        let part = Partitioning::new(&mesh, partitions)?;
        let mortar = basis.mortar_matrices()?;
        let vdm = basis.fv_vandermonde()?;
        let subcells = SubcellGeometry::new(&mesh, &geo, &basis, &vdm.dg_to_fv)?;
        let nl = lift_width(&eq);
        let ws = Workspace::new(eq.nvar(), nl, basis.np(), mesh.n_elems(), mesh.sides.len(), part.interface.len());
        let mortar_adjacent = fv::mortar_adjacent(&mesh);
        let kinds = vec![ElementKind::Dg; mesh.n_elems()];
        Ok(Self { eq, basis, mesh, geo, part, settings, bcs, mortar, vdm, subcells, kinds, mortar_adjacent, nl, ws })
    }

    pub fn np(&self) -> usize {
        self.basis.np()
    }

    pub fn n_elems(&self) -> usize {
        self.mesh.n_elems()
    }

    pub fn new_field(&self) -> ElementField {
        ElementField::zeros(self.eq.nvar(), self.np(), self.n_elems())
    }

    fn split(&mut self) -> (Ctx<'_>, &mut Workspace) {
        (
            Ctx {
                eq: &self.eq,
                basis: &self.basis,
                mesh: &self.mesh,
                geo: &self.geo,
                part: &self.part,
                settings: &self.settings,
                bcs: &self.bcs,
                mortar: &self.mortar,
                vdm: &self.vdm,
                sg: &self.subcells,
                kinds: &self.kinds,
                nl: self.nl,
            },
            &mut self.ws,
        )
    }

    /// Evaluates `U_t = L(U, t)`.
    pub fn time_derivative(&mut self, u: &ElementField, t: f64, ut: &mut ElementField) -> Result<()> {
        let parabolic = self.eq.is_parabolic();
        let any_fv = self.kinds.contains(&ElementKind::Fv);
        if parabolic && any_fv {
            return Err(Error::InvalidArgument("FV subcells are not combined with viscous terms".into()));
        }
        let (ctx, ws) = self.split();
        let (nv, nl) = (ctx.eq.nvar(), ctx.nl);
        for r in &ctx.part.ranges {
            for e in r.clone() {
                ctx.prolong(ws, u, e, parabolic)?;
            }
        }
        ws.u.exchange(ctx.part, ctx.mesh)?;
        ws.u.interpolate_mortars(ctx.mesh, ctx.mortar, nv);
        if parabolic {
            ws.lift.exchange(ctx.part, ctx.mesh)?;
            ws.lift.interpolate_mortars(ctx.mesh, ctx.mortar, nl);
            ctx.lift(ws, u, t)?;
        }
        if any_fv {
            // FV elements need their neighbors' payloads as well
            ws.u.send_opposite_back(ctx.part, ctx.mesh);
            for e in 0..ctx.mesh.n_elems() {
                if ctx.kinds[e] == ElementKind::Fv {
                    ctx.reconstruct(ws, u, e)?;
                }
            }
            ws.recon.exchange(ctx.part, ctx.mesh)?;
        }
        for p in 0..ctx.part.count() {
            let g = &ctx.part.groups[p];
            for &s in g.boundary.iter().chain(&g.inner).chain(&g.mpi_master) {
                ctx.side_flux(ws, s, t, parabolic)?;
            }
            ws.flux.project_mortars(ctx.mesh, ctx.mortar, nv, p, &ctx.part.side_owner);
        }
        ws.flux.send_back(ctx.part, ctx.mesh);
        for e in 0..ctx.mesh.n_elems() {
            let out = ut.elem_mut(e);
            match ctx.kinds[e] {
                ElementKind::Dg => ctx.dg_update(ws, u, e, parabolic, out)?,
                ElementKind::Fv => ctx.fv_update(ws, e, out)?,
            }
        }
        Ok(())
    }

    /// BR1 gradients `(d/dx, d/dy)` of the lifted variables, node-major per element.
    /// All elements must be DG.
    pub fn lifted_gradients(&mut self, u: &ElementField, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        if self.kinds.contains(&ElementKind::Fv) {
            return Err(Error::InvalidArgument("gradients need an all-DG representation".into()));
        }
        let (ctx, ws) = self.split();
        for e in 0..ctx.mesh.n_elems() {
            ctx.prolong(ws, u, e, true)?;
        }
        ws.u.exchange(ctx.part, ctx.mesh)?;
        ws.u.interpolate_mortars(ctx.mesh, ctx.mortar, ctx.eq.nvar());
        ws.lift.exchange(ctx.part, ctx.mesh)?;
        ws.lift.interpolate_mortars(ctx.mesh, ctx.mortar, ctx.nl);
        ctx.lift(ws, u, t)?;
        Ok((ws.gx.clone(), ws.gy.clone()))
    }

    /// Width of the lifted-variable vector returned by [`Operator::lifted_gradients`].
    pub fn lifted_count(&self) -> usize {
        self.nl
    }

    /// Switches element `e` of `u` to subcell means.
    pub fn to_fv(&mut self, u: &mut ElementField, e: usize) {
        if self.kinds[e] == ElementKind::Fv {
            return;
        }
        let n2 = self.np() * self.np();
        let nv = self.eq.nvar();
        let r = e * n2..(e + 1) * n2;
        fv::dg_to_fv(&self.vdm.dg_to_fv, nv, &self.geo.jac[r.clone()], &self.subcells.jfv[r], u.elem_mut(e), &mut self.ws.tmp, &mut self.ws.tmp2);
        self.kinds[e] = ElementKind::Fv;
    }

    /// Switches element `e` of `u` back to the DG polynomial.
    pub fn to_dg(&mut self, u: &mut ElementField, e: usize) {
        if self.kinds[e] == ElementKind::Dg {
            return;
        }
        let n2 = self.np() * self.np();
        let nv = self.eq.nvar();
        let r = e * n2..(e + 1) * n2;
        fv::fv_to_dg(&self.vdm.fv_to_dg, nv, &self.geo.jac[r.clone()], &self.subcells.jfv[r], u.elem_mut(e), &mut self.ws.tmp, &mut self.ws.tmp2);
        self.kinds[e] = ElementKind::Dg;
    }

    /// Evaluates the troubled-cell indicator of every element.
    pub fn indicators(&mut self, u: &ElementField, kind: IndicatorKind) -> Result<Vec<f64>> {
        let np = self.np();
        let n2 = np * np;
        let nv = self.eq.nvar();
        let ne = self.n_elems();
        let mut out = vec![0.0; ne];
        match kind {
            IndicatorKind::PerssonModal => {
                let modal = fv::indicator::modal_matrix(&self.basis)?;
                let mut vals = vec![0.0; n2];
                let (mut t1, mut t2) = (vec![0.0; n2 * nv], vec![0.0; n2 * nv]);
                let mut elem = vec![0.0; n2 * nv];
                for (e, o) in out.iter_mut().enumerate() {
                    elem.copy_from_slice(u.elem(e));
                    if self.kinds[e] == ElementKind::Fv {
                        let r = e * n2..(e + 1) * n2;
                        fv::fv_to_dg(&self.vdm.fv_to_dg, nv, &self.geo.jac[r.clone()], &self.subcells.jfv[r], &mut elem, &mut t1, &mut t2);
                    }
                    for k in 0..n2 {
                        vals[k] = elem[k * nv];
                    }
                    *o = fv::indicator_persson(&modal, &vals, &mut t1[..n2], &mut t2[..n2]);
                }
            }
            IndicatorKind::JamesonPressure => {
                let gamma = self.eq.gamma().ok_or_else(|| Error::InvalidArgument("the pressure indicator needs a gas".into()))?;
                let mut p = vec![0.0; ne * n2];
                for e in 0..ne {
                    for k in 0..n2 {
                        let q = crate::equations::cons_to_prim(gamma, u.node(e, k % np, k / np))
                            .map_err(|err| err.at(Location::Node { element: e, i: k % np, j: k / np }))?;
                        p[e * n2 + k] = q.p;
                    }
                }
                let mut ghost = vec![vec![0.0; np]; 4];
                for (e, o) in out.iter_mut().enumerate() {
                    let mut have = [false; 4];
                    for f in 0..4 {
                        let side = &self.mesh.sides[self.mesh.elements[e].sides[f]];
                        let SideKind::Interior { slave } = side.kind else { continue };
                        let (other, flip) = if slave.elem == e && slave.face as usize == f {
                            (side.master, slave.flip)
                        } else {
                            (slave, slave.flip)
                        };
                        for (pt, g) in ghost[f].iter_mut().enumerate() {
                            let q = reindex(flip, np, pt);
                            let (i, j) = match other.face {
                                0 => (0, q),
                                1 => (np - 1, q),
                                2 => (q, 0),
                                _ => (q, np - 1),
                            };
                            *g = p[other.elem * n2 + j * np + i];
                        }
                        have[f] = true;
                    }
                    let gh: [Option<&[f64]>; 4] = std::array::from_fn(|f| have[f].then(|| ghost[f].as_slice()));
                    *o = fv::indicator_jameson(np, &p[e * n2..(e + 1) * n2], gh);
                }
            }
        }
        Ok(out)
    }

    /// One switching pass: returns `(to_fv, to_dg)` counts.
    pub fn update_kinds(&mut self, u: &mut ElementField, cfg: &IndicatorConfig) -> Result<(usize, usize)> {
        let ind = self.indicators(u, cfg.kind)?;
        let decisions = fv::update_representation(&self.kinds, &ind, cfg, &self.mortar_adjacent);
        let mut counts = (0, 0);
        for (e, d) in decisions.into_iter().enumerate() {
            match d {
                SwitchDecision::Keep => {}
                SwitchDecision::ToFv => {
                    self.to_fv(u, e);
                    counts.0 += 1;
                }
                SwitchDecision::ToDg => {
                    self.to_dg(u, e);
                    counts.1 += 1;
                }
            }
        }
        Ok(counts)
    }

    /// Integral of every variable over the domain.
    pub fn integrals(&self, u: &ElementField) -> Vec<f64> {
        let np = self.np();
        let n2 = np * np;
        let nv = self.eq.nvar();
        let w2 = self.subcells.width * self.subcells.width;
        let mut out = vec![0.0; nv];
        for e in 0..self.n_elems() {
            for k in 0..n2 {
                let vol = match self.kinds[e] {
                    ElementKind::Dg => self.basis.weights[k % np] * self.basis.weights[k / np] * self.geo.jac[e * n2 + k],
                    ElementKind::Fv => w2 * self.subcells.jfv[e * n2 + k],
                };
                for v in 0..nv {
                    out[v] += vol * u.elem(e)[k * nv + v];
                }
            }
        }
        out
    }

    /// Discrete L2 norm of `a - b` per variable, with the same quadrature as [`Self::integrals`].
    pub fn l2_diff(&self, a: &ElementField, b: &ElementField) -> Vec<f64> {
        let np = self.np();
        let n2 = np * np;
        let nv = self.eq.nvar();
        let w2 = self.subcells.width * self.subcells.width;
        let mut out = vec![0.0; nv];
        for e in 0..self.n_elems() {
            for k in 0..n2 {
                let vol = match self.kinds[e] {
                    ElementKind::Dg => self.basis.weights[k % np] * self.basis.weights[k / np] * self.geo.jac[e * n2 + k],
                    ElementKind::Fv => w2 * self.subcells.jfv[e * n2 + k],
                };
                for v in 0..nv {
                    let d = a.elem(e)[k * nv + v] - b.elem(e)[k * nv + v];
                    out[v] += vol * d * d;
                }
            }
        }
        out.iter().map(|s| s.sqrt()).collect()
    }

    /// Fraction of FV elements.
    pub fn fv_fraction(&self) -> f64 {
        self.kinds.iter().filter(|&&k| k == ElementKind::Fv).count() as f64 / self.n_elems() as f64
    }

    /// Samples `f(x, t)` at the solution nodes of DG elements. FV elements
    /// get subcell means from a Gauss rule inside each subcell; the weights
    /// are positive, so discontinuous data does not overshoot.
    pub fn project(&mut self, f: &dyn Fn([f64; 2], f64, &mut [f64]), t: f64) -> ElementField {
        let mut u = self.new_field();
        let np = self.np();
        let n2 = np * np;
        let nv = self.eq.nvar();
        let (gauss, gw) = crate::basis::build_nodes(self.basis.degree, crate::basis::NodeFamily::LegendreGauss).expect("degree already validated");
        let width = self.subcells.width;
        // sub-points of each subcell along one direction: (reference coordinate, Lagrange row)
        let sub: Vec<Vec<(f64, Vec<f64>)>> = (0..np)
            .map(|a| {
                gauss
                    .iter()
                    .map(|g| {
                        let xi = -1.0 + width * (a as f64 + 0.5 * (g + 1.0));
                        (xi, self.basis.lagrange(xi))
                    })
                    .collect()
            })
            .collect();
        let mut val = [0.0; MAX_VAR];
        for e in 0..self.n_elems() {
            if self.kinds[e] == ElementKind::Dg {
                for k in 0..n2 {
                    f(self.geo.x[e * n2 + k], t, &mut u.elem_mut(e)[k * nv..(k + 1) * nv]);
                }
                continue;
            }
            let elem = &self.mesh.elements[e];
            let jac = &self.geo.jac[e * n2..(e + 1) * n2];
            for b in 0..np {
                for a in 0..np {
                    let mut sum = [0.0; MAX_VAR];
                    let mut vol = 0.0;
                    for (q, (eta, ly)) in sub[b].iter().enumerate() {
                        for (p, (xi, lx)) in sub[a].iter().enumerate() {
                            let mut jq = 0.0;
                            for (jj, lyj) in ly.iter().enumerate() {
                                for (ii, lxi) in lx.iter().enumerate() {
                                    jq += lxi * lyj * jac[jj * np + ii];
                                }
                            }
                            let wq = gw[p] * gw[q] * jq;
                            f(elem.map(self.mesh.ngeo, [*xi, *eta]), t, &mut val[..nv]);
                            for v in 0..nv {
                                sum[v] += wq * val[v];
                            }
                            vol += wq;
                        }
                    }
                    let out = u.node_mut(e, a, b);
                    for v in 0..nv {
                        out[v] = sum[v] / vol;
                    }
                }
            }
        }
        u
    }
}
