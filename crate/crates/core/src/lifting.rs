//! BR1 lifting: weak-form gradients of the lifted variables with the
//! arithmetic mean as interface value.

use crate::basis::NodalBasis;
use crate::equations::{EquationSystem, MAX_VAR};
use crate::error::Result;

/// Gradients of one element.
///
/// `lifted` is node-major `np^2 x nl`; `faces` holds `u* n_d s-hat` as
/// `4 x np x (2 nl)` (x-components then y-components per point), outward
/// and in local face order. Writes `gx`, `gy` (`np^2 x nl`).
#[allow(clippy::too_many_arguments)]
pub fn lift_element(
    basis: &NodalBasis,
    nl: usize,
    lifted: &[f64],
    ja: &[[[f64; 2]; 2]],
    jac: &[f64],
    faces: &[f64],
    gx: &mut [f64],
    gy: &mut [f64],
) {
    let np = basis.np();
    let dh = &basis.dhat;
    let (lm, lp) = (&basis.ell_hat_minus, &basis.ell_hat_plus);
    let w = 2 * nl;
    let fc = |f: usize, p: usize, c: usize| faces[(f * np + p) * w + c];
    for j in 0..np {
        for i in 0..np {
            let k = j * np + i;
            for c in 0..nl {
                let (mut sx, mut sy) = (0.0, 0.0);
                for a in 0..np {
                    let (d, m) = (dh.get(i, a), ja[j * np + a][0]);
                    let u = lifted[(j * np + a) * nl + c];
                    sx += d * m[0] * u;
                    sy += d * m[1] * u;
                }
                for b in 0..np {
                    let (d, m) = (dh.get(j, b), ja[b * np + i][1]);
                    let u = lifted[(b * np + i) * nl + c];
                    sx += d * m[0] * u;
                    sy += d * m[1] * u;
                }
                sx += lm[i] * fc(0, j, c) + lp[i] * fc(1, j, c) + lm[j] * fc(2, i, c) + lp[j] * fc(3, i, c);
                sy += lm[i] * fc(0, j, nl + c) + lp[i] * fc(1, j, nl + c) + lm[j] * fc(2, i, nl + c) + lp[j] * fc(3, i, nl + c);
                gx[k * nl + c] = sx / jac[k];
                gy[k * nl + c] = sy / jac[k];
            }
        }
    }
}

/// `1/2 (F^v(UL, gL) + F^v(UR, gR)) . n`; gradients are `[gx.., gy..]`.
pub fn viscous_surface_flux(
    eq: &EquationSystem,
    ul: &[f64],
    ur: &[f64],
    gl: &[f64],
    gr: &[f64],
    n: [f64; 2],
    out: &mut [f64],
) -> Result<()> {
    let nl = eq.nvar_lift().max(gl.len() / 2);
    let nv = eq.nvar();
    let (mut ax, mut ay, mut bx, mut by) = ([0.0; MAX_VAR], [0.0; MAX_VAR], [0.0; MAX_VAR], [0.0; MAX_VAR]);
    eq.viscous_flux(ul, &gl[..nl], &gl[nl..2 * nl], &mut ax, &mut ay)?;
    eq.viscous_flux(ur, &gr[..nl], &gr[nl..2 * nl], &mut bx, &mut by)?;
    for v in 0..nv {
        out[v] = 0.5 * ((ax[v] + bx[v]) * n[0] + (ay[v] + by[v]) * n[1]);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::{prim_to_cons, Prim};

    #[test]
    fn viscous_mean_cases() {
        let eq = EquationSystem::navier_stokes(1.4, 0.01, 0.72).unwrap();
        let u = prim_to_cons(1.4, Prim::new(1.0, 0.3, -0.2, 1.0)).unwrap();
        let w = prim_to_cons(1.4, Prim::new(0.8, -0.1, 0.5, 1.3)).unwrap();
        let g = [0.1, -0.3, 0.2, 0.5, 0.05, -0.4];
        let h = [-0.2, 0.1, 0.3, 0.0, 0.6, 0.2];
        let n = [0.6, 0.8];
        let mut out = [0.0; 4];
        viscous_surface_flux(&eq, &u, &u, &g, &g, n, &mut out).unwrap();
        let (mut fx, mut fy) = ([0.0; 4], [0.0; 4]);
        eq.viscous_flux(&u, &g[..3], &g[3..], &mut fx, &mut fy).unwrap();
        for v in 0..4 {
            assert!((out[v] - (fx[v] * n[0] + fy[v] * n[1])).abs() < 1e-15);
        }
        viscous_surface_flux(&eq, &u, &w, &[0.0; 6], &[0.0; 6], n, &mut out).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
        viscous_surface_flux(&eq, &u, &w, &g, &h, n, &mut out).unwrap();
        let (mut gx, mut gy) = ([0.0; 4], [0.0; 4]);
        eq.viscous_flux(&w, &h[..3], &h[3..], &mut gx, &mut gy).unwrap();
        for v in 0..4 {
            let expect = 0.5 * (fx[v] * n[0] + fy[v] * n[1]) + 0.5 * (gx[v] * n[0] + gy[v] * n[1]);
            assert!((out[v] - expect).abs() < 1e-15);
        }
    }
}
