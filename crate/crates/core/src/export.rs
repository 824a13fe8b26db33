//! Supersampled visualization output: legacy ASCII VTK and CSV.
//!
//! DG elements are sampled on an equispaced `(nvis+1)^2` grid; FV elements
//! are written as their `(N+1)^2` constant subcell patches.

use crate::equations::{cons_to_prim, EquationSystem};
use crate::dg::Operator;
use crate::error::{Error, Result};
use crate::field::{ElementField, ElementKind};
use crate::linalg::Matrix;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derived {
    Pressure,
    /// Specific entropy `ln(p / rho^gamma)`.
    Entropy,
    /// `dv/dx - du/dy` from lifted velocity gradients.
    Vorticity,
}

impl Derived {
    pub fn parse(name: &str) -> Result<Derived> {
        match name.trim().to_ascii_lowercase().as_str() {
            "p" | "pressure" => Ok(Derived::Pressure),
            "s" | "entropy" => Ok(Derived::Entropy),
            "omega" | "vorticity" => Ok(Derived::Vorticity),
            other => Err(Error::InvalidArgument(format!("unknown derived quantity '{other}' (known: p, s, omega)"))),
        }
    }

    pub fn parse_list(list: &str) -> Result<Vec<Derived>> {
        list.split(',').filter(|s| !s.trim().is_empty()).map(Derived::parse).collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Derived::Pressure => "p",
            Derived::Entropy => "s",
            Derived::Vorticity => "omega",
        }
    }
}

pub fn conserved_names(eq: &EquationSystem) -> Vec<&'static str> {
    match eq {
        EquationSystem::Scalar { .. } => vec!["phi"],
        _ => vec!["rho", "rhou", "rhov", "rhoE"],
    }
}

/// Unstructured quad grid with point data and per-cell element info.
#[derive(Debug, Clone, Default)]
pub struct VisData {
    pub points: Vec<[f64; 2]>,
    pub cells: Vec<[usize; 4]>,
    pub cell_element: Vec<usize>,
    /// 0 for DG, 1 for FV.
    pub cell_kind: Vec<u8>,
    pub names: Vec<String>,
    /// `fields[k][p]`: variable `k` at point `p`.
    pub fields: Vec<Vec<f64>>,
}

fn equispaced(nvis: usize) -> Vec<f64> {
    (0..=nvis).map(|k| -1.0 + 2.0 * k as f64 / nvis as f64).collect()
}

/// Applies the tensor interpolation `m (x) m` to nodal data with `w` values per node.
fn interp2(m: &Matrix, np: usize, w: usize, src: &[f64]) -> Vec<f64> {
    let nq = m.rows();
    let mut tmp = vec![0.0; nq * np * w];
    for j in 0..np {
        for a in 0..nq {
            for i in 0..np {
                let l = m.get(a, i);
                for v in 0..w {
                    tmp[(j * nq + a) * w + v] += l * src[(j * np + i) * w + v];
                }
            }
        }
    }
    let mut out = vec![0.0; nq * nq * w];
    for b in 0..nq {
        for j in 0..np {
            let l = m.get(b, j);
            for a in 0..nq {
                for v in 0..w {
                    out[(b * nq + a) * w + v] += l * tmp[(j * nq + a) * w + v];
                }
            }
        }
    }
    out
}

fn derived_value(eq: &EquationSystem, d: Derived, u: &[f64], grad: Option<([f64; 3], [f64; 3])>) -> Result<f64> {
    let gamma = eq.gamma().ok_or_else(|| Error::InvalidArgument(format!("'{}' needs a gas system", d.name())))?;
    Ok(match d {
        Derived::Pressure => cons_to_prim(gamma, u)?.p,
        Derived::Entropy => {
            let q = cons_to_prim(gamma, u)?;
            (q.p / q.rho.powf(gamma)).ln()
        }
        Derived::Vorticity => {
            let (gx, gy) = grad.expect("gradients computed for vorticity");
            gx[1] - gy[0]
        }
    })
}

/// Gradients of `(u, v, p/rho)` at the subcell centres of FV element `e`,
/// by central differences of the subcell means (one-sided at the element
/// edges) mapped through the difference Jacobian of the centre positions.
fn subcell_gradients(op: &Operator, u: &ElementField, e: usize) -> Result<Vec<([f64; 3], [f64; 3])>> {
    let gamma = op.eq.gamma().expect("checked by the caller");
    let np = op.np();
    let mut q = vec![[0.0; 3]; np * np];
    let mut x = vec![[0.0; 2]; np * np];
    for j in 0..np {
        for i in 0..np {
            let p = cons_to_prim(gamma, u.node(e, i, j))?;
            q[j * np + i] = [p.u, p.v, p.p / p.rho];
            let c = [op.subcells.corner(e, i, j), op.subcells.corner(e, i + 1, j), op.subcells.corner(e, i + 1, j + 1), op.subcells.corner(e, i, j + 1)];
            x[j * np + i] = [0.25 * (c[0][0] + c[1][0] + c[2][0] + c[3][0]), 0.25 * (c[0][1] + c[1][1] + c[2][1] + c[3][1])];
        }
    }
    let stencil = |k: usize| if k == 0 { (0, 1, 1.0) } else if k == np - 1 { (np - 2, np - 1, 1.0) } else { (k - 1, k + 1, 0.5) };
    let mut out = Vec::with_capacity(np * np);
    for j in 0..np {
        for i in 0..np {
            let (i0, i1, si) = stencil(i);
            let (j0, j1, sj) = stencil(j);
            let (a, b) = (j * np + i0, j * np + i1);
            let (c, d) = (j0 * np + i, j1 * np + i);
            let (xi, yi) = (si * (x[b][0] - x[a][0]), si * (x[b][1] - x[a][1]));
            let (xj, yj) = (sj * (x[d][0] - x[c][0]), sj * (x[d][1] - x[c][1]));
            let det = xi * yj - xj * yi;
            let (mut gx, mut gy) = ([0.0; 3], [0.0; 3]);
            for v in 0..3 {
                let (qi, qj) = (si * (q[b][v] - q[a][v]), sj * (q[d][v] - q[c][v]));
                gx[v] = (qi * yj - qj * yi) / det;
                gy[v] = (xi * qj - xj * qi) / det;
            }
            out.push((gx, gy));
        }
    }
    Ok(out)
}

/// Samples `u` for visualization. `op` is borrowed mutably only to compute
/// lifted gradients on a temporary all-DG copy; its state is restored.
pub fn sample(op: &mut Operator, u: &ElementField, nvis: usize, derived: &[Derived]) -> Result<VisData> {
    if nvis == 0 {
        return Err(Error::InvalidArgument("nvis must be at least 1".into()));
    }
    let eq = op.eq;
    if !derived.is_empty() && eq.gamma().is_none() {
        return Err(Error::InvalidArgument("derived quantities need a gas system".into()));
    }
    let np = op.np();
    let n2 = np * np;
    let nv = eq.nvar();
    let grads = if derived.contains(&Derived::Vorticity) {
        // FV subcell means are admissible states, so they can stand in for
        // nodal values while lifting; FV gradients are replaced below
        let all_dg = vec![ElementKind::Dg; op.n_elems()];
        let kinds = std::mem::replace(&mut op.kinds, all_dg);
        let g = op.lifted_gradients(u, 0.0);
        op.kinds = kinds;
        Some(g?)
    } else {
        None
    };
    let nl = op.lifted_count();
    let vm = op.basis.interpolation_to(&equispaced(nvis));

    let mut names: Vec<String> = conserved_names(&eq).iter().map(|s| s.to_string()).collect();
    names.extend(derived.iter().map(|d| d.name().to_string()));
    let mut out = VisData { names, fields: vec![Vec::new(); nv + derived.len()], ..Default::default() };
    let push_point = |out: &mut VisData, x: [f64; 2], vals: &[f64], grad: Option<([f64; 3], [f64; 3])>| -> Result<usize> {
        for v in 0..nv {
            out.fields[v].push(vals[v]);
        }
        for (k, d) in derived.iter().enumerate() {
            out.fields[nv + k].push(derived_value(&eq, *d, vals, grad)?);
        }
        out.points.push(x);
        Ok(out.points.len() - 1)
    };
    let grad_at = |g: &(Vec<f64>, Vec<f64>), k: usize| -> ([f64; 3], [f64; 3]) {
        let (mut a, mut b) = ([0.0; 3], [0.0; 3]);
        a[..nl.min(3)].copy_from_slice(&g.0[k * nl..k * nl + nl.min(3)]);
        b[..nl.min(3)].copy_from_slice(&g.1[k * nl..k * nl + nl.min(3)]);
        (a, b)
    };

    for e in 0..op.n_elems() {
        let geo_x: Vec<f64> = op.geo.x[e * n2..(e + 1) * n2].iter().flat_map(|p| [p[0], p[1]]).collect();
        let gr = match &grads {
            Some((gx, gy)) => {
                let ix = interp2(&vm, np, nl, &gx[e * n2 * nl..(e + 1) * n2 * nl]);
                let iy = interp2(&vm, np, nl, &gy[e * n2 * nl..(e + 1) * n2 * nl]);
                Some((ix, iy))
            }
            None => None,
        };
        match op.kinds[e] {
            ElementKind::Dg => {
                let q = nvis + 1;
                let xs = interp2(&vm, np, 2, &geo_x);
                let us = interp2(&vm, np, nv, u.elem(e));
                let base = out.points.len();
                for k in 0..q * q {
                    let g = gr.as_ref().map(|g| grad_at(g, k));
                    push_point(&mut out, [xs[2 * k], xs[2 * k + 1]], &us[k * nv..(k + 1) * nv], g)?;
                }
                for b in 0..nvis {
                    for a in 0..nvis {
                        let p = base + b * q + a;
                        out.cells.push([p, p + 1, p + q + 1, p + q]);
                        out.cell_element.push(e);
                        out.cell_kind.push(0);
                    }
                }
            }
            ElementKind::Fv => {
                let fd = match grads {
                    Some(_) => Some(subcell_gradients(op, u, e)?),
                    None => None,
                };
                for j in 0..np {
                    for i in 0..np {
                        let g = fd.as_ref().map(|g| g[j * np + i]);
                        let vals = u.node(e, i, j);
                        let mut ids = [0; 4];
                        for (c, (a, b)) in [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)].into_iter().enumerate() {
                            ids[c] = push_point(&mut out, op.subcells.corner(e, a, b), vals, g)?;
                        }
                        out.cells.push(ids);
                        out.cell_element.push(e);
                        out.cell_kind.push(1);
                    }
                }
            }
        }
    }
    Ok(out)
}

impl VisData {
    pub fn to_vtk(&self, title: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# vtk DataFile Version 3.0\n{}\nASCII\nDATASET UNSTRUCTURED_GRID", title.lines().next().unwrap_or("dgflux"));
        let _ = writeln!(s, "POINTS {} double", self.points.len());
        for p in &self.points {
            let _ = writeln!(s, "{:.17e} {:.17e} 0", p[0], p[1]);
        }
        let _ = writeln!(s, "CELLS {} {}", self.cells.len(), 5 * self.cells.len());
        for c in &self.cells {
            let _ = writeln!(s, "4 {} {} {} {}", c[0], c[1], c[2], c[3]);
        }
        let _ = writeln!(s, "CELL_TYPES {}", self.cells.len());
        for _ in &self.cells {
            s.push_str("9\n");
        }
        let _ = writeln!(s, "CELL_DATA {}", self.cells.len());
        s.push_str("SCALARS element_kind int 1\nLOOKUP_TABLE default\n");
        for k in &self.cell_kind {
            let _ = writeln!(s, "{k}");
        }
        s.push_str("SCALARS element_id int 1\nLOOKUP_TABLE default\n");
        for e in &self.cell_element {
            let _ = writeln!(s, "{e}");
        }
        let _ = writeln!(s, "POINT_DATA {}", self.points.len());
        for (name, f) in self.names.iter().zip(&self.fields) {
            let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
            for v in f {
                let _ = writeln!(s, "{v:.17e}");
            }
        }
        s
    }

    /// One row per point: coordinates, then every field.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y");
        for n in &self.names {
            s.push(',');
            s.push_str(n);
        }
        s.push('\n');
        for (k, p) in self.points.iter().enumerate() {
            let _ = write!(s, "{:.17e},{:.17e}", p[0], p[1]);
            for f in &self.fields {
                let _ = write!(s, ",{:.17e}", f[k]);
            }
            s.push('\n');
        }
        s
    }

    pub fn field(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|k| self.fields[k].as_slice())
    }

    /// Writes `<stem>.vtk` and `<stem>.csv`.
    pub fn write(&self, stem: &Path, title: &str) -> Result<()> {
        std::fs::write(stem.with_extension("vtk"), self.to_vtk(title))?;
        std::fs::write(stem.with_extension("csv"), self.to_csv())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{NodalBasis, NodeFamily};
    use crate::dg::{BoundaryCondition, Operator, Settings};
    use std::sync::Arc;
    use crate::equations::{prim_to_cons, Prim};
    use crate::mesh::{Bounds, Mesh};

    fn gas_op(n: usize) -> Operator {
        let mesh = Mesh::generate_cartesian(3, 2, Bounds::new(0.0, 1.5, 0.0, 1.0), ["a"; 4], [true; 2]).unwrap();
        let eq = EquationSystem::euler(1.4).unwrap();
        Operator::new(eq, mesh, NodalBasis::new(n, NodeFamily::LegendreGaussLobatto).unwrap(), Settings::default(), vec![], 1).unwrap()
    }

    #[test]
    fn constant_state_samples_to_the_constant() {
        let mut op = gas_op(3);
        let c = prim_to_cons(1.4, Prim::new(1.2, 0.3, -0.2, 0.9)).unwrap();
        let mut u = op.project(&|_, _, s| s.copy_from_slice(&c), 0.0);
        op.to_fv(&mut u, 2);
        let vis = sample(&mut op, &u, 5, &[Derived::Pressure, Derived::Vorticity]).unwrap();
        for v in 0..4 {
            assert!(vis.fields[v].iter().all(|x| (x - c[v]).abs() < 1e-13));
        }
        assert!(vis.field("p").unwrap().iter().all(|p| (p - 0.9).abs() < 1e-13));
        assert!(vis.field("omega").unwrap().iter().all(|w| w.abs() < 1e-11));
        assert_eq!(op.kinds[2], ElementKind::Fv);
        // every cell carries its element kind
        assert_eq!(vis.cell_kind.len(), vis.cells.len());
        assert_eq!(vis.cell_kind.iter().filter(|&&k| k == 1).count(), 16);
        let vtk = vis.to_vtk("t");
        assert!(vtk.contains(&format!("CELL_DATA {}", vis.cells.len())) && vtk.contains("SCALARS element_kind"));
    }

    #[test]
    fn equispaced_samples_match_polynomial_evaluation() {
        let n = 4;
        let mut op = gas_op(n);
        let f = |x: [f64; 2]| 1.0 + 0.1 * x[0].powi(3) * x[1] - 0.05 * x[1].powi(4) + 0.2 * x[0] * x[1];
        let u = op.project(&|x, _, s| s.copy_from_slice(&[f(x), 0.1, 0.0, 2.5]), 0.0);
        for nvis in [1, 3, 7] {
            let vis = sample(&mut op, &u, nvis, &[]).unwrap();
            let worst = vis.points.iter().zip(&vis.fields[0]).map(|(p, v)| (f(*p) - v).abs()).fold(0.0, f64::max);
            assert!(worst < 1e-13, "nvis {nvis}: {worst:e}");
        }
    }

    #[test]
    fn vorticity_of_solid_rotation() {
        // u = -y, v = x: omega = 2
        let state = |x: [f64; 2], _t: f64, s: &mut [f64]| s.copy_from_slice(&prim_to_cons(1.4, Prim::new(1.0, -x[1], x[0], 5.0)).unwrap());
        let mesh = Mesh::generate_cartesian(3, 2, Bounds::new(0.0, 1.5, 0.0, 1.0), ["a"; 4], [false; 2]).unwrap();
        let eq = EquationSystem::euler(1.4).unwrap();
        let bc = BoundaryCondition::Dirichlet(Arc::new(state));
        let mut op = Operator::new(eq, mesh, NodalBasis::new(3, NodeFamily::LegendreGaussLobatto).unwrap(), Settings::default(), vec![bc], 1).unwrap();
        let u = op.project(&state, 0.0);
        let vis = sample(&mut op, &u, 2, &[Derived::Vorticity]).unwrap();
        let worst = vis.field("omega").unwrap().iter().map(|w| (w - 2.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-10, "{worst:e}");

        // FV elements: differences of subcell means are exact for linear velocity
        op.kinds[4] = ElementKind::Fv;
        let u = op.project(&state, 0.0);
        let vis = sample(&mut op, &u, 2, &[Derived::Vorticity]).unwrap();
        let w = vis.field("omega").unwrap();
        let fv_cells: Vec<&[usize; 4]> = vis.cells.iter().zip(&vis.cell_kind).filter(|(_, &k)| k == 1).map(|(c, _)| c).collect();
        assert_eq!(fv_cells.len(), 16);
        for c in fv_cells {
            for &p in c {
                assert!((w[p] - 2.0).abs() < 1e-12, "{}", w[p]);
            }
        }
        assert_eq!(op.kinds[4], ElementKind::Fv);
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(Derived::parse_list("p,s,omega").is_ok());
        assert!(Derived::parse_list("p,mach").is_err());
        let mut op = gas_op(2);
        let u = op.new_field();
        assert!(sample(&mut op, &u, 0, &[]).is_err());
    }
}
