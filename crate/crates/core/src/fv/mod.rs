//! FV subcells: the `(N+1)^2` DG coefficients of a troubled element are
//! reinterpreted as means on an equispaced subcell grid of width
//! `w = 2/(N+1)` and advanced with a second-order TVD scheme.

pub mod indicator;
mod switching;

pub use indicator::{indicator_jameson, indicator_persson, IndicatorConfig, IndicatorKind, PERSSON_FLOOR};
pub use switching::{update_representation, SwitchDecision};

use crate::basis::NodalBasis;
use crate::error::{Error, Location, Result};
use crate::equations::{numerical_flux, EquationSystem, RiemannSolver, MAX_VAR};
use crate::linalg::Matrix;
use crate::mesh::{Geometry, Mesh, SideKind};
use std::fmt;
use std::str::FromStr;

/// Slope limiter applied to primitive-variable differences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Limiter {
    MinMod,
    /// Unlimited central slope.
    Central,
    /// First-order, piecewise constant.
    Zero,
}

impl fmt::Display for Limiter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Limiter::MinMod => "minmod",
            Limiter::Central => "central",
            Limiter::Zero => "zero",
        })
    }
}

impl FromStr for Limiter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "minmod" => Ok(Limiter::MinMod),
            "central" => Ok(Limiter::Central),
            "zero" | "first-order" => Ok(Limiter::Zero),
            other => Err(Error::InvalidArgument(format!("unknown limiter '{other}'"))),
        }
    }
}

#[inline]
pub fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

impl Limiter {
    #[inline]
    pub fn slope(self, left: f64, right: f64) -> f64 {
        match self {
            Limiter::MinMod => minmod(left, right),
            Limiter::Central => 0.5 * (left + right),
            Limiter::Zero => 0.0,
        }
    }
}

/// Applies `m` along both tensor directions of one element (`np x np`
/// nodes of `nv` values); `tmp` needs the same length as `src`.
pub fn tensor_apply(m: &Matrix, nv: usize, np: usize, src: &[f64], tmp: &mut [f64], dst: &mut [f64]) {
    for j in 0..np {
        for i in 0..np {
            for v in 0..nv {
                let mut s = 0.0;
                for a in 0..np {
                    s += m.get(i, a) * src[(j * np + a) * nv + v];
                }
                tmp[(j * np + i) * nv + v] = s;
            }
        }
    }
    for j in 0..np {
        for i in 0..np {
            for v in 0..nv {
                let mut s = 0.0;
                for b in 0..np {
                    s += m.get(j, b) * tmp[(b * np + i) * nv + v];
                }
                dst[(j * np + i) * nv + v] = s;
            }
        }
    }
}

/// DG nodal values to subcell means, in place: `U_fv = (V x V)(J U) / J_fv`.
pub fn dg_to_fv(vdm: &Matrix, nv: usize, jac: &[f64], jfv: &[f64], u: &mut [f64], tmp: &mut [f64], tmp2: &mut [f64]) {
    let np = vdm.rows();
    for k in 0..np * np {
        for v in 0..nv {
            tmp2[k * nv + v] = jac[k] * u[k * nv + v];
        }
    }
    tensor_apply(vdm, nv, np, tmp2, tmp, u);
    for k in 0..np * np {
        for v in 0..nv {
            u[k * nv + v] /= jfv[k];
        }
    }
}

/// Subcell means back to DG nodal values, in place.
pub fn fv_to_dg(inv: &Matrix, nv: usize, jac: &[f64], jfv: &[f64], u: &mut [f64], tmp: &mut [f64], tmp2: &mut [f64]) {
    let np = inv.rows();
    for k in 0..np * np {
        for v in 0..nv {
            tmp2[k * nv + v] = jfv[k] * u[k * nv + v];
        }
    }
    tensor_apply(inv, nv, np, tmp2, tmp, u);
    for k in 0..np * np {
        for v in 0..nv {
            u[k * nv + v] /= jac[k];
        }
    }
}

/// Subcell volumes, face vectors and side segments of all elements.
///
/// Face vectors are the integrated normals `(dy, -dx)` of the straight
/// chords between subcell corners, so every subcell is a closed polygon
/// and constant states are preserved exactly.
#[derive(Clone, Debug)]
pub struct SubcellGeometry {
    pub np: usize,
    pub width: f64,
    /// Subcell Jacobian `J_fv = (V x V) J`, per element `j np + i`.
    pub jfv: Vec<f64>,
    /// `np+1` corner rows per element, `(e (np+1) + b)(np+1) + a`.
    pub corners: Vec<[f64; 2]>,
    /// +xi^1 face vectors: `(e np + j)(np+1) + i`, face `i` between subcells `i-1` and `i`.
    pub xi_faces: Vec<[f64; 2]>,
    /// +xi^2 face vectors: `(e np + i)(np+1) + j`.
    pub eta_faces: Vec<[f64; 2]>,
    /// Per side and FV point: master-outward unit normal, `s-hat = |chord|/w`, chord midpoint.
    pub seg_normal: Vec<[f64; 2]>,
    pub seg_surf: Vec<f64>,
    pub seg_x: Vec<[f64; 2]>,
}

impl SubcellGeometry {
    pub fn new(mesh: &Mesh, geo: &Geometry, basis: &NodalBasis, vdm: &Matrix) -> Result<Self> {
        let np = basis.np();
        let nc = np + 1;
        let w = 2.0 / np as f64;
        let pts: Vec<f64> = (0..nc).map(|k| -1.0 + w * k as f64).collect();
        let to_corner = crate::basis::build_interpolation_matrix(&geo.lgl_nodes, &pts)?;
        let ne = mesh.n_elems();
        let mut s = Self {
            np,
            width: w,
            jfv: vec![0.0; ne * np * np],
            corners: vec![[0.0; 2]; ne * nc * nc],
            xi_faces: vec![[0.0; 2]; ne * np * nc],
            eta_faces: vec![[0.0; 2]; ne * np * nc],
            seg_normal: vec![[0.0; 2]; mesh.sides.len() * np],
            seg_surf: vec![0.0; mesh.sides.len() * np],
            seg_x: vec![[0.0; 2]; mesh.sides.len() * np],
        };
        let mut tmp = vec![0.0; np * np];
        for e in 0..ne {
            let jac = &geo.jac[e * np * np..(e + 1) * np * np];
            tensor_apply(vdm, 1, np, jac, &mut tmp, &mut s.jfv[e * np * np..(e + 1) * np * np]);
            for b in 0..nc {
                for a in 0..nc {
                    let mut c = [0.0; 2];
                    for q in 0..np {
                        for p in 0..np {
                            let wgt = to_corner.get(a, p) * to_corner.get(b, q);
                            let x = geo.xn[(e * np + q) * np + p];
                            c[0] += wgt * x[0];
                            c[1] += wgt * x[1];
                        }
                    }
                    s.corners[(e * nc + b) * nc + a] = c;
                }
            }
            for j in 0..np {
                for i in 0..nc {
                    let (p0, p1) = (s.corner(e, i, j), s.corner(e, i, j + 1));
                    s.xi_faces[(e * np + j) * nc + i] = [p1[1] - p0[1], -(p1[0] - p0[0])];
                }
            }
            for i in 0..np {
                for j in 0..nc {
                    let (p0, p1) = (s.corner(e, i, j), s.corner(e, i + 1, j));
                    s.eta_faces[(e * np + i) * nc + j] = [-(p1[1] - p0[1]), p1[0] - p0[0]];
                }
            }
        }
        for side in &mesh.sides {
            if side.is_mortar() {
                continue;
            }
            let (e, f) = (side.master.elem, side.master.face);
            for p in 0..np {
                let (v, a, b) = s.face_segment(e, f, p);
                let len = (v[0] * v[0] + v[1] * v[1]).sqrt();
                let k = side.id * np + p;
                s.seg_normal[k] = [v[0] / len, v[1] / len];
                s.seg_surf[k] = len / w;
                s.seg_x[k] = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            }
        }
        Ok(s)
    }

    #[inline]
    pub fn corner(&self, e: usize, a: usize, b: usize) -> [f64; 2] {
        let nc = self.np + 1;
        self.corners[(e * nc + b) * nc + a]
    }

    /// Outward integrated normal and end points of segment `p` on local face `f`.
    fn face_segment(&self, e: usize, f: u8, p: usize) -> ([f64; 2], [f64; 2], [f64; 2]) {
        let np = self.np;
        let nc = np + 1;
        match f {
            0 | 1 => {
                let i = if f == 0 { 0 } else { np };
                let v = self.xi_faces[(e * np + p) * nc + i];
                let sg = if f == 0 { -1.0 } else { 1.0 };
                ([sg * v[0], sg * v[1]], self.corner(e, i, p), self.corner(e, i, p + 1))
            }
            _ => {
                let j = if f == 2 { 0 } else { np };
                let v = self.eta_faces[(e * np + p) * nc + j];
                let sg = if f == 2 { -1.0 } else { 1.0 };
                ([sg * v[0], sg * v[1]], self.corner(e, p, j), self.corner(e, p + 1, j))
            }
        }
    }

    /// Total physical area `sum w^2 J_fv` of element `e`.
    pub fn element_volume(&self, e: usize) -> f64 {
        let n2 = self.np * self.np;
        self.jfv[e * n2..(e + 1) * n2].iter().sum::<f64>() * self.width * self.width
    }
}

/// What lies beyond an element face when reconstructing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GhostKind {
    /// Physical boundary or mortar: zero slope across the face.
    None,
    /// Adjacent subcell mean of an FV neighbor, one subcell width away.
    Mean,
    /// DG neighbor's trace sampled at the subcell face, half a width away.
    Trace,
}

/// Limited primitive reconstruction of one FV element.
///
/// `prim` holds the subcell means in primitive variables; `ghost` holds
/// `4 x np x nv` primitive neighbor values in local face order. Outputs are
/// the primitive values at the low/high face of every subcell per direction.
#[allow(clippy::too_many_arguments)]
pub fn reconstruct(
    limiter: Limiter,
    np: usize,
    nv: usize,
    prim: &[f64],
    kinds: [GhostKind; 4],
    ghost: &[f64],
    xi_lo: &mut [f64],
    xi_hi: &mut [f64],
    eta_lo: &mut [f64],
    eta_hi: &mut [f64],
) {
    let g = |f: usize, p: usize, v: usize| ghost[(f * np + p) * nv + v];
    let at = |i: usize, j: usize, v: usize| prim[(j * np + i) * nv + v];
    let edge = |kind: GhostKind, inner: f64, other: f64| match kind {
        GhostKind::None => 0.0,
        GhostKind::Mean => inner - other,
        GhostKind::Trace => 2.0 * (inner - other),
    };
    for j in 0..np {
        for i in 0..np {
            for v in 0..nv {
                let q = at(i, j, v);
                let dl = if i == 0 { edge(kinds[0], q, g(0, j, v)) } else { q - at(i - 1, j, v) };
                let dr = if i + 1 == np { -edge(kinds[1], q, g(1, j, v)) } else { at(i + 1, j, v) - q };
                let s = limiter.slope(dl, dr);
                let k = (j * np + i) * nv + v;
                xi_lo[k] = q - 0.5 * s;
                xi_hi[k] = q + 0.5 * s;
                let dl = if j == 0 { edge(kinds[2], q, g(2, i, v)) } else { q - at(i, j - 1, v) };
                let dr = if j + 1 == np { -edge(kinds[3], q, g(3, i, v)) } else { at(i, j + 1, v) - q };
                let s = limiter.slope(dl, dr);
                eta_lo[k] = q - 0.5 * s;
                eta_hi[k] = q + 0.5 * s;
            }
        }
    }
}

/// Converts a primitive state to conservative, reporting the subcell on failure.
#[inline]
pub(crate) fn to_cons(eq: &EquationSystem, q: &[f64], out: &mut [f64], element: usize, i: usize, j: usize) -> Result<()> {
    eq.from_primitive(q, out).map_err(|e| e.at(Location::Subcell { element, i, j }))?;
    eq.check_state(out).map_err(|e| e.at(Location::Subcell { element, i, j }))
}

/// Subcell flux differencing of one FV element.
///
/// `xi_lo`.. are conservative face states from [`reconstruct`]; `faces`
/// holds the element-face fluxes `f* s-hat` at the FV points (local order,
/// outward). Writes `U_t`.
#[allow(clippy::too_many_arguments)]
pub fn fv_time_derivative(
    eq: &EquationSystem,
    solver: RiemannSolver,
    sg: &SubcellGeometry,
    e: usize,
    xi_lo: &[f64],
    xi_hi: &[f64],
    eta_lo: &[f64],
    eta_hi: &[f64],
    faces: &[f64],
    ut: &mut [f64],
) -> Result<()> {
    let np = sg.np;
    let nc = np + 1;
    let nv = eq.nvar();
    let w = sg.width;
    ut.fill(0.0);
    let mut f = [0.0; MAX_VAR];
    for j in 0..np {
        for i in 1..np {
            let v = sg.xi_faces[(e * np + j) * nc + i];
            let len = (v[0] * v[0] + v[1] * v[1]).sqrt();
            let (l, r) = ((j * np + i - 1) * nv, (j * np + i) * nv);
            numerical_flux(eq, solver, &xi_hi[l..l + nv], &xi_lo[r..r + nv], [v[0] / len, v[1] / len], &mut f)
                .map_err(|err| err.at(Location::Subcell { element: e, i, j }))?;
            for c in 0..nv {
                ut[l + c] -= f[c] * len;
                ut[r + c] += f[c] * len;
            }
        }
    }
    for i in 0..np {
        for j in 1..np {
            let v = sg.eta_faces[(e * np + i) * nc + j];
            let len = (v[0] * v[0] + v[1] * v[1]).sqrt();
            let (l, r) = (((j - 1) * np + i) * nv, (j * np + i) * nv);
            numerical_flux(eq, solver, &eta_hi[l..l + nv], &eta_lo[r..r + nv], [v[0] / len, v[1] / len], &mut f)
                .map_err(|err| err.at(Location::Subcell { element: e, i, j }))?;
            for c in 0..nv {
                ut[l + c] -= f[c] * len;
                ut[r + c] += f[c] * len;
            }
        }
    }
    for p in 0..np {
        let cells = [(0, p), (np - 1, p), (p, 0), (p, np - 1)];
        for (face, &(i, j)) in cells.iter().enumerate() {
            let k = (j * np + i) * nv;
            for c in 0..nv {
                ut[k + c] -= w * faces[(face * np + p) * nv + c];
            }
        }
    }
    for k in 0..np * np {
        let scale = 1.0 / (w * w * sg.jfv[e * np * np + k]);
        for c in 0..nv {
            ut[k * nv + c] *= scale;
        }
    }
    Ok(())
}

/// Applies the 1D matrix `m` along a face of `np` points with `nv` values each.
#[inline]
pub fn face_apply(m: &Matrix, nv: usize, src: &[f64], dst: &mut [f64]) {
    let np = m.rows();
    for p in 0..np {
        for v in 0..nv {
            let mut s = 0.0;
            for q in 0..np {
                s += m.get(p, q) * src[q * nv + v];
            }
            dst[p * nv + v] = s;
        }
    }
}

/// Flux on a side touching at least one FV element, at the FV points.
///
/// `left`/`right` are conservative states on the subcell face points
/// (DG traces already mapped with the face Vandermonde). Returns
/// `f* s-hat` per point into `fv_flux`; the DG view is
/// `V_fv->dg fv_flux`.
pub fn mixed_interface_flux(
    eq: &EquationSystem,
    solver: RiemannSolver,
    left: &[f64],
    right: &[f64],
    normals: &[[f64; 2]],
    surf: &[f64],
    fv_flux: &mut [f64],
) -> Result<()> {
    let nv = eq.nvar();
    for (p, (n, s)) in normals.iter().zip(surf).enumerate() {
        let o = p * nv;
        numerical_flux(eq, solver, &left[o..o + nv], &right[o..o + nv], *n, &mut fv_flux[o..o + nv])?;
        for v in 0..nv {
            fv_flux[o + v] *= s;
        }
    }
    Ok(())
}

/// Mortar-adjacent elements, which never switch to FV.
pub fn mortar_adjacent(mesh: &Mesh) -> Vec<bool> {
    let mut out = vec![false; mesh.n_elems()];
    for s in &mesh.sides {
        match s.kind {
            SideKind::MortarParent { .. } => out[s.master.elem] = true,
            SideKind::MortarChild { slave, .. } => out[slave.elem] = true,
            _ => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::NodeFamily;
    use crate::mesh::{compute_metrics, Bounds};
    use rand::{Rng, SeedableRng};

    #[test]
    fn minmod_cases() {
        assert_eq!(minmod(1.0, 2.0), 1.0);
        assert_eq!(minmod(-1.0, 2.0), 0.0);
        assert_eq!(minmod(-3.0, -2.0), -2.0);
        assert_eq!(Limiter::Central.slope(1.0, 3.0), 2.0);
        assert_eq!(Limiter::Zero.slope(1.0, 3.0), 0.0);
        assert_eq!("MinMod".parse::<Limiter>().unwrap(), Limiter::MinMod);
    }

    fn curved_setup(n: usize) -> (Mesh, NodalBasis, Geometry) {
        let pi = std::f64::consts::PI;
        let m = Mesh::generate_cartesian(3, 3, Bounds::unit(), ["w"; 4], [false; 2])
            .unwrap()
            .apply_curving(&|p| [p[0] + 0.05 * (pi * p[1]).sin(), p[1] + 0.04 * (2.0 * pi * p[0]).sin()], 3)
            .unwrap();
        let b = NodalBasis::new(n, NodeFamily::LegendreGaussLobatto).unwrap();
        let g = compute_metrics(&m, &b).unwrap();
        (m, b, g)
    }

    #[test]
    fn subcell_means_of_linear_data() {
        // N=2, samples of xi: means are the cell centers -2/3, 0, 2/3
        let b = NodalBasis::new(2, NodeFamily::LegendreGauss).unwrap();
        let vdm = b.fv_vandermonde().unwrap();
        let np = 3;
        let mut u: Vec<f64> = (0..9).map(|k| b.nodes[k % np]).collect();
        let ones = vec![1.0; 9];
        let (mut t1, mut t2) = (vec![0.0; 9], vec![0.0; 9]);
        dg_to_fv(&vdm.dg_to_fv, 1, &ones, &ones, &mut u, &mut t1, &mut t2);
        for k in 0..9 {
            assert!((u[k] - [-2.0 / 3.0, 0.0, 2.0 / 3.0][k % np]).abs() < 1e-14);
        }
    }

    #[test]
    fn transfer_conserves_and_round_trips() {
        let (m, b, g) = curved_setup(4);
        let vdm = b.fv_vandermonde().unwrap();
        let sg = SubcellGeometry::new(&m, &g, &b, &vdm.dg_to_fv).unwrap();
        let np = b.np();
        let n2 = np * np;
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let (mut t1, mut t2) = (vec![0.0; n2 * 2], vec![0.0; n2 * 2]);
        for e in 0..m.n_elems() {
            let jac = &g.jac[e * n2..(e + 1) * n2];
            let jfv = &sg.jfv[e * n2..(e + 1) * n2];
            let u0: Vec<f64> = (0..n2 * 2).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut u = u0.clone();
            let dg_int = |u: &[f64], v: usize| {
                (0..n2).map(|k| b.weights[k % np] * b.weights[k / np] * jac[k] * u[k * 2 + v]).sum::<f64>()
            };
            let before = [dg_int(&u, 0), dg_int(&u, 1)];
            dg_to_fv(&vdm.dg_to_fv, 2, jac, jfv, &mut u, &mut t1, &mut t2);
            let w2 = sg.width * sg.width;
            for v in 0..2 {
                let fv: f64 = (0..n2).map(|k| w2 * jfv[k] * u[k * 2 + v]).sum();
                assert!((fv - before[v]).abs() < 1e-13);
            }
            fv_to_dg(&vdm.fv_to_dg, 2, jac, jfv, &mut u, &mut t1, &mut t2);
            assert!(u.iter().zip(&u0).all(|(a, c)| (a - c).abs() < 1e-12));
        }
    }

    #[test]
    fn subcell_volumes_match_element_volume() {
        let (m, b, g) = curved_setup(5);
        let vdm = b.fv_vandermonde().unwrap();
        let sg = SubcellGeometry::new(&m, &g, &b, &vdm.dg_to_fv).unwrap();
        let np = b.np();
        for e in 0..m.n_elems() {
            let dg: f64 = (0..np * np).map(|k| b.weights[k % np] * b.weights[k / np] * g.jac[e * np * np + k]).sum();
            assert!((sg.element_volume(e) - dg).abs() < 1e-12);
            // every subcell closes
            let nc = np + 1;
            for j in 0..np {
                for i in 0..np {
                    let a = sg.xi_faces[(e * np + j) * nc + i + 1];
                    let c = sg.xi_faces[(e * np + j) * nc + i];
                    let d = sg.eta_faces[(e * np + i) * nc + j + 1];
                    let f = sg.eta_faces[(e * np + i) * nc + j];
                    for k in 0..2 {
                        assert!((a[k] - c[k] + d[k] - f[k]).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn reconstruction_of_linear_data() {
        let np = 4;
        let prim: Vec<f64> = (0..np * np).map(|k| 2.0 * (k % np) as f64 + 1.0).collect();
        let mut ghost = vec![0.0; 4 * np];
        for p in 0..np {
            ghost[p] = -1.0; // left FV neighbor mean
            ghost[np + p] = 8.0; // right DG trace at the face
        }
        let mut out = vec![vec![0.0; np * np]; 4];
        let [a, b, c, d] = &mut out[..] else { unreachable!() };
        reconstruct(Limiter::MinMod, np, 1, &prim, [GhostKind::Mean, GhostKind::Trace, GhostKind::None, GhostKind::None], &ghost, a, b, c, d);
        for i in 0..np {
            assert!((out[0][i] - 2.0 * i as f64).abs() < 1e-14);
            assert!((out[1][i] - 2.0 * (i + 1) as f64).abs() < 1e-14);
            // constant in eta: no slope
            assert_eq!(out[2][i], prim[i]);
        }
        // local extremum is flattened
        let peak = vec![0.0, 3.0, 0.0, 0.0];
        let mut lo = vec![0.0; 16];
        let mut hi = vec![0.0; 16];
        let (mut c2, mut d2) = (vec![0.0; 16], vec![0.0; 16]);
        let prim: Vec<f64> = (0..16).map(|k| peak[k % 4]).collect();
        reconstruct(Limiter::MinMod, 4, 1, &prim, [GhostKind::None; 4], &vec![0.0; 16], &mut lo, &mut hi, &mut c2, &mut d2);
        assert_eq!((lo[1], hi[1]), (3.0, 3.0));
    }

    #[test]
    fn first_order_upwind_on_one_element() {
        // scalar advection a=(1,0), single element [0,1]^2, zero slopes
        let m = Mesh::generate_cartesian(1, 1, Bounds::unit(), ["w"; 4], [false; 2]).unwrap();
        let b = NodalBasis::new(3, NodeFamily::LegendreGaussLobatto).unwrap();
        let g = compute_metrics(&m, &b).unwrap();
        let vdm = b.fv_vandermonde().unwrap();
        let sg = SubcellGeometry::new(&m, &g, &b, &vdm.dg_to_fv).unwrap();
        let eq = EquationSystem::scalar([1.0, 0.0], 0.0).unwrap();
        let np = 4;
        let u: Vec<f64> = (0..16).map(|k| [1.0, 3.0, 2.0, 5.0][k % 4]).collect();
        let mut faces = vec![0.0; 4 * np];
        for p in 0..np {
            // inflow of value 4 from the left, outflow of the last cell to the right
            faces[p] = -4.0 * 0.25 / sg.width;
            faces[np + p] = 5.0 * 0.25 / sg.width;
        }
        let mut ut = vec![0.0; 16];
        fv_time_derivative(&eq, RiemannSolver::Rusanov, &sg, 0, &u, &u, &u, &u, &faces, &mut ut).unwrap();
        let h = 0.25;
        let row = [1.0, 3.0, 2.0, 5.0];
        for i in 0..np {
            let upwind = if i == 0 { 4.0 } else { row[i - 1] };
            let expect = -(row[i] - upwind) / h;
            assert!((ut[i] - expect).abs() < 1e-12, "{i}: {} vs {expect}", ut[i]);
        }
    }
}
