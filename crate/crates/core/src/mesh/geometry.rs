//! Metric terms, Jacobians and face normals at the solution nodes.
//!
//! The geometry is first reduced to a continuous degree-N interpolant on
//! N-LGL nodes, then evaluated exactly at the solution nodes and
//! differentiated with the collocation matrix. This makes the discrete
//! metric identities hold for both node families and any `ngeo`.

use super::{geometry_interpolation, Mesh, SideKind};
use crate::basis::{build_interpolation_matrix, build_nodes, NodalBasis, NodeFamily};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Face quantities of one side in master orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceGeometry {
    /// Unit normal, outward from the master element.
    pub normal: Vec<[f64; 2]>,
    pub tangent: Vec<[f64; 2]>,
    /// Surface element `s-hat`.
    pub surf: Vec<f64>,
    pub x: Vec<[f64; 2]>,
}

#[derive(Clone, Debug)]
pub struct Geometry {
    pub np: usize,
    /// Physical coordinates at the solution nodes, `e np^2 + j np + i`.
    pub x: Vec<[f64; 2]>,
    pub jac: Vec<f64>,
    /// `ja[k]` is the metric vector `Ja^(k+1)`.
    pub ja: Vec<[[f64; 2]; 2]>,
    /// Degree-N geometry sampled at the N-LGL nodes.
    pub xn: Vec<[f64; 2]>,
    pub lgl_nodes: Vec<f64>,
    pub faces: Vec<FaceGeometry>,
}

impl Geometry {
    #[inline]
    pub fn idx(&self, e: usize, i: usize, j: usize) -> usize {
        (e * self.np + j) * self.np + i
    }

    /// Outward `n s-hat` vectors of an element face in the element's own parameter direction.
    pub fn face_vectors(&self, basis: &NodalBasis, e: usize, face: u8) -> Vec<[f64; 2]> {
        let np = self.np;
        let (k, sign, ell) = match face {
            0 => (0, -1.0, &basis.ell_minus),
            1 => (0, 1.0, &basis.ell_plus),
            2 => (1, -1.0, &basis.ell_minus),
            _ => (1, 1.0, &basis.ell_plus),
        };
        (0..np)
            .map(|p| {
                let mut v = [0.0; 2];
                for q in 0..np {
                    let (i, j) = if k == 0 { (q, p) } else { (p, q) };
                    let m = self.ja[self.idx(e, i, j)][k];
                    v[0] += ell[q] * m[0];
                    v[1] += ell[q] * m[1];
                }
                [sign * v[0], sign * v[1]]
            })
            .collect()
    }

    /// Physical face points of an element face in its own parameter direction.
    pub fn face_points(&self, basis: &NodalBasis, e: usize, face: u8) -> Vec<[f64; 2]> {
        let np = self.np;
        let ell = if face % 2 == 0 { &basis.ell_minus } else { &basis.ell_plus };
        (0..np)
            .map(|p| {
                let mut v = [0.0; 2];
                for q in 0..np {
                    let (i, j) = if face < 2 { (q, p) } else { (p, q) };
                    let x = self.x[self.idx(e, i, j)];
                    v[0] += ell[q] * x[0];
                    v[1] += ell[q] * x[1];
                }
                v
            })
            .collect()
    }

    /// Largest `|sum_i d(Ja^i)/d xi^i|` over all nodes.
    pub fn metric_identity_residual(&self, basis: &NodalBasis) -> f64 {
        let np = self.np;
        let n_elems = self.jac.len() / (np * np);
        let mut worst: f64 = 0.0;
        for e in 0..n_elems {
            for j in 0..np {
                for i in 0..np {
                    for d in 0..2 {
                        let mut s = 0.0;
                        for a in 0..np {
                            s += basis.d.get(i, a) * self.ja[self.idx(e, a, j)][0][d];
                            s += basis.d.get(j, a) * self.ja[self.idx(e, i, a)][1][d];
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }
}

fn tensor_apply(m: &Matrix, src: &[[f64; 2]], nsrc: usize) -> Vec<[f64; 2]> {
    let nd = m.rows();
    // along i, then along j
    let mut tmp = vec![[0.0; 2]; nd * nsrc];
    for j in 0..nsrc {
        for p in 0..nd {
            let mut v = [0.0; 2];
            for i in 0..nsrc {
                let w = m.get(p, i);
                v[0] += w * src[i + nsrc * j][0];
                v[1] += w * src[i + nsrc * j][1];
            }
            tmp[p + nd * j] = v;
        }
    }
    let mut out = vec![[0.0; 2]; nd * nd];
    for q in 0..nd {
        for p in 0..nd {
            let mut v = [0.0; 2];
            for j in 0..nsrc {
                let w = m.get(q, j);
                v[0] += w * tmp[p + nd * j][0];
                v[1] += w * tmp[p + nd * j][1];
            }
            out[p + nd * q] = v;
        }
    }
    out
}

/// Solution-node metrics and per-side face geometry for `basis`.
pub fn compute_metrics(mesh: &Mesh, basis: &NodalBasis) -> Result<Geometry> {
    let n = basis.degree;
    if n == 0 {
        return Err(Error::InvalidArgument("metrics need polynomial degree N >= 1".into()));
    }
    let np = n + 1;
    let (lgl, _) = build_nodes(n, NodeFamily::LegendreGaussLobatto)?;
    let to_lgl = geometry_interpolation(mesh.ngeo, &lgl);
    let to_sol = match basis.family {
        NodeFamily::LegendreGaussLobatto => None,
        NodeFamily::LegendreGauss => Some(build_interpolation_matrix(&lgl, &basis.nodes)?),
    };
    let ne = mesh.n_elems();
    let mut geo = Geometry {
        np,
        x: Vec::with_capacity(ne * np * np),
        jac: Vec::with_capacity(ne * np * np),
        ja: Vec::with_capacity(ne * np * np),
        xn: Vec::with_capacity(ne * np * np),
        lgl_nodes: lgl.clone(),
        faces: Vec::with_capacity(mesh.sides.len()),
    };
    let mut bad = Vec::new();
    for el in &mesh.elements {
        // differentiate relative to the first node so the offset does not feed roundoff
        let o = el.nodes[0];
        let local: Vec<[f64; 2]> = el.nodes.iter().map(|p| [p[0] - o[0], p[1] - o[1]]).collect();
        let xl = tensor_apply(&to_lgl, &local, mesh.ngeo + 1);
        let xs = match &to_sol {
            Some(m) => tensor_apply(m, &xl, np),
            None => xl.clone(),
        };
        let shift = |v: &[[f64; 2]]| -> Vec<[f64; 2]> { v.iter().map(|p| [p[0] + o[0], p[1] + o[1]]).collect() };
        let (xn, x) = (shift(&xl), shift(&xs));
        let mut folded = false;
        for j in 0..np {
            for i in 0..np {
                let (mut dxi, mut deta) = ([0.0; 2], [0.0; 2]);
                for a in 0..np {
                    let (da, db) = (basis.d.get(i, a), basis.d.get(j, a));
                    for c in 0..2 {
                        dxi[c] += da * xs[a + np * j][c];
                        deta[c] += db * xs[i + np * a][c];
                    }
                }
                let jac = dxi[0] * deta[1] - deta[0] * dxi[1];
                folded |= !(jac > 0.0);
                geo.jac.push(jac);
                geo.ja.push([[deta[1], -deta[0]], [-dxi[1], dxi[0]]]);
            }
        }
        if folded {
            bad.push(el.global_id);
        }
        geo.x.extend_from_slice(&x);
        geo.xn.extend_from_slice(&xn);
    }
    if !bad.is_empty() {
        return Err(Error::InvalidElements(bad));
    }
    for side in &mesh.sides {
        let (vecs, pts) = match side.kind {
            SideKind::MortarChild { slave, .. } => {
                // the small element's own face, negated and seen from the master
                let v = geo.face_vectors(basis, slave.elem, slave.face);
                let x = geo.face_points(basis, slave.elem, slave.face);
                let at = |p: usize| if slave.flip == 1 { np - 1 - p } else { p };
                ((0..np).map(|p| [-v[at(p)][0], -v[at(p)][1]]).collect(), (0..np).map(|p| x[at(p)]).collect())
            }
            _ => (
                geo.face_vectors(basis, side.master.elem, side.master.face),
                geo.face_points(basis, side.master.elem, side.master.face),
            ),
        };
        let mut f = FaceGeometry {
            normal: Vec::with_capacity(np),
            tangent: Vec::with_capacity(np),
            surf: Vec::with_capacity(np),
            x: pts,
        };
        for v in vecs {
            let s = (v[0] * v[0] + v[1] * v[1]).sqrt();
            let nrm = [v[0] / s, v[1] / s];
            f.normal.push(nrm);
            f.tangent.push([-nrm[1], nrm[0]]);
            f.surf.push(s);
        }
        geo.faces.push(f);
    }
    Ok(geo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{Bounds, Mesh};

    fn wavy(p: [f64; 2]) -> [f64; 2] {
        let pi = std::f64::consts::PI;
        [p[0] + 0.1 * (pi * p[1]).sin(), p[1] + 0.05 * (2.0 * pi * p[0]).sin()]
    }

    #[test]
    fn affine_square_metrics() {
        let h = 0.25;
        let m = Mesh::generate_cartesian(4, 4, Bounds::unit(), ["w"; 4], [false; 2]).unwrap();
        for family in [NodeFamily::LegendreGauss, NodeFamily::LegendreGaussLobatto] {
            let b = NodalBasis::new(3, family).unwrap();
            let g = compute_metrics(&m, &b).unwrap();
            assert!(g.jac.iter().all(|&j| (j - h * h / 4.0).abs() < 1e-14));
            for f in &g.faces {
                assert!(f.surf.iter().all(|&s| (s - h / 2.0).abs() < 1e-14));
            }
        }
    }

    #[test]
    fn rotation_and_affine_scaling() {
        let m = Mesh::generate_cartesian(2, 2, Bounds::unit(), ["w"; 4], [false; 2]).unwrap();
        let b = NodalBasis::new(4, NodeFamily::LegendreGaussLobatto).unwrap();
        let g0 = compute_metrics(&m, &b).unwrap();
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let rot = m.apply_curving(&|p| [c * p[0] - c * p[1], c * p[0] + c * p[1]], 1).unwrap();
        let g1 = compute_metrics(&rot, &b).unwrap();
        for (a, r) in g0.jac.iter().zip(&g1.jac) {
            assert!((a - r).abs() < 1e-14);
        }
        for (f0, f1) in g0.faces.iter().zip(&g1.faces) {
            for (n0, n1) in f0.normal.iter().zip(&f1.normal) {
                let rn = [c * n0[0] - c * n0[1], c * n0[0] + c * n0[1]];
                assert!((rn[0] - n1[0]).abs() < 1e-14 && (rn[1] - n1[1]).abs() < 1e-14);
            }
        }
        let stretched = m.apply_curving(&|p| [2.0 * p[0], p[1] + 3.0], 1).unwrap();
        let g2 = compute_metrics(&stretched, &b).unwrap();
        for (a, r) in g0.jac.iter().zip(&g2.jac) {
            assert!((2.0 * a - r).abs() < 1e-14);
        }
        for (f0, f2) in g0.faces.iter().zip(&g2.faces) {
            for (n0, n2) in f0.normal.iter().zip(&f2.normal) {
                assert!((n0[0] - n2[0]).abs() < 1e-14 && (n0[1] - n2[1]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn curved_metric_identities_and_unit_normals() {
        let m = Mesh::generate_cartesian(4, 4, Bounds::unit(), ["w"; 4], [false; 2])
            .unwrap()
            .apply_curving(&wavy, 4)
            .unwrap();
        for n in [2, 3, 5, 7] {
            for family in [NodeFamily::LegendreGauss, NodeFamily::LegendreGaussLobatto] {
                let b = NodalBasis::new(n, family).unwrap();
                let g = compute_metrics(&m, &b).unwrap();
                assert!(g.metric_identity_residual(&b) < 1e-12, "N={n} {family}");
                for f in &g.faces {
                    for (v, s) in f.normal.iter().zip(&f.surf) {
                        assert!(((v[0] * v[0] + v[1] * v[1]).sqrt() - 1.0).abs() < 1e-13);
                        assert!(*s > 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn faces_are_watertight() {
        let m = Mesh::generate_cartesian(3, 3, Bounds::unit(), ["w"; 4], [false; 2])
            .unwrap()
            .apply_curving(&wavy, 3)
            .unwrap();
        let b = NodalBasis::new(4, NodeFamily::LegendreGauss).unwrap();
        let g = compute_metrics(&m, &b).unwrap();
        for s in &m.sides {
            if let Some(sl) = s.slave() {
                let pm = g.face_points(&b, s.master.elem, s.master.face);
                let ps = g.face_points(&b, sl.elem, sl.face);
                for p in 0..b.np() {
                    let q = if sl.flip == 1 { b.degree - p } else { p };
                    assert!((pm[p][0] - ps[q][0]).abs() < 1e-12 && (pm[p][1] - ps[q][1]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn outward_normals_point_away_from_master() {
        let m = Mesh::generate_cartesian(2, 2, Bounds::unit(), ["w"; 4], [false; 2])
            .unwrap()
            .apply_curving(&wavy, 2)
            .unwrap();
        let b = NodalBasis::new(3, NodeFamily::LegendreGaussLobatto).unwrap();
        let g = compute_metrics(&m, &b).unwrap();
        for s in &m.sides {
            let c = m.elements[s.master.elem].centroid(m.ngeo);
            let f = &g.faces[s.id];
            let k = b.degree / 2;
            let d = [f.x[k][0] - c[0], f.x[k][1] - c[1]];
            assert!(d[0] * f.normal[k][0] + d[1] * f.normal[k][1] > 0.0);
        }
    }

    #[test]
    fn mortar_faces_are_consistent_with_parent() {
        let m = Mesh::generate_cartesian(2, 2, Bounds::unit(), ["w"; 4], [false; 2])
            .unwrap()
            .apply_curving(&wavy, 3)
            .unwrap()
            .refine(&[true, false, false, false])
            .unwrap();
        let b = NodalBasis::new(4, NodeFamily::LegendreGaussLobatto).unwrap();
        let g = compute_metrics(&m, &b).unwrap();
        assert!(m.n_mortars() > 0);
        for s in &m.sides {
            if let SideKind::MortarChild { parent, upper, .. } = s.kind {
                let big = &m.sides[parent].master;
                let el = &m.elements[big.elem];
                for (p, x) in g.faces[s.id].x.iter().enumerate() {
                    let t = 0.5 * (b.nodes[p] + if upper { 1.0 } else { -1.0 });
                    let y = el.map(m.ngeo, crate::mesh::face_point(big.face, t));
                    assert!((x[0] - y[0]).abs() < 1e-12 && (x[1] - y[1]).abs() < 1e-12);
                }
            }
        }
    }
}
