//! Single-element DGSEM kernels. Element data is node-major,
//! `(j np + i) nv + v`; face data is `4 x np x nv` in local face order.

use crate::basis::NodalBasis;
use crate::equations::{cons_to_prim, contravariant_two_point, contravariant_two_point_prim, EquationSystem, Prim, TwoPointFlux, MAX_VAR};
use crate::error::{Location, Result};

/// Traces on the four local faces, each in the face's own parameter direction.
pub fn prolong_to_faces(basis: &NodalBasis, nv: usize, u: &[f64], traces: &mut [f64]) {
    let np = basis.np();
    let at = |i: usize, j: usize| (j * np + i) * nv;
    if basis.is_lobatto() {
        for p in 0..np {
            for (f, k) in [at(0, p), at(np - 1, p), at(p, 0), at(p, np - 1)].into_iter().enumerate() {
                traces[(f * np + p) * nv..(f * np + p + 1) * nv].copy_from_slice(&u[k..k + nv]);
            }
        }
        return;
    }
    traces[..4 * np * nv].fill(0.0);
    for p in 0..np {
        for q in 0..np {
            let (lm, lp) = (basis.ell_minus[q], basis.ell_plus[q]);
            for v in 0..nv {
                traces[p * nv + v] += lm * u[at(q, p) + v];
                traces[(np + p) * nv + v] += lp * u[at(q, p) + v];
                traces[(2 * np + p) * nv + v] += lm * u[at(p, q) + v];
                traces[(3 * np + p) * nv + v] += lp * u[at(p, q) + v];
            }
        }
    }
}

/// Adds `sum_a M_ia (F1_aj - F1_ij) + sum_b M_jb (F2_ib - F2_ij)`.
///
/// Working on differences keeps constant fluxes exactly silent; the
/// dropped `F_ij sum_a M_ia` part is reinstated analytically by the callers.
fn flux_differences(m: &crate::linalg::Matrix, nv: usize, f1: &[f64], f2: &[f64], acc: &mut [f64]) {
    let np = m.rows();
    for j in 0..np {
        for i in 0..np {
            let o = (j * np + i) * nv;
            for a in 0..np {
                let d = m.get(i, a);
                let src = (j * np + a) * nv;
                for v in 0..nv {
                    acc[o + v] += d * (f1[src + v] - f1[o + v]);
                }
            }
        }
    }
    for j in 0..np {
        for i in 0..np {
            let o = (j * np + i) * nv;
            for b in 0..np {
                let d = m.get(j, b);
                let src = (b * np + i) * nv;
                for v in 0..nv {
                    acc[o + v] += d * (f2[src + v] - f2[o + v]);
                }
            }
        }
    }
}

/// Weak-form volume term `sum_a D-hat_ia F1_aj + sum_b D-hat_jb F2_ib`.
///
/// Uses the exact row sums `sum_a D-hat_ia = l-hat_i(-1) - l-hat_i(1)`.
pub fn volume_integral_weak(basis: &NodalBasis, nv: usize, f1: &[f64], f2: &[f64], acc: &mut [f64]) {
    flux_differences(&basis.dhat, nv, f1, f2, acc);
    let np = basis.np();
    for j in 0..np {
        for i in 0..np {
            let o = (j * np + i) * nv;
            let (ri, rj) = (
                basis.ell_hat_minus[i] - basis.ell_hat_plus[i],
                basis.ell_hat_minus[j] - basis.ell_hat_plus[j],
            );
            for v in 0..nv {
                acc[o + v] += ri * f1[o + v] + rj * f2[o + v];
            }
        }
    }
}

/// Strong-form volume term `sum_a D_ia F1_aj + sum_b D_jb F2_ib` (rows of `D` sum to zero).
pub fn volume_integral_strong(basis: &NodalBasis, nv: usize, f1: &[f64], f2: &[f64], acc: &mut [f64]) {
    flux_differences(&basis.d, nv, f1, f2, acc);
}

/// Split-form volume term `2 sum_a D_ia F#1(U_ij, U_aj) + 2 sum_b D_jb F#2(U_ij, U_ib)`
/// with arithmetically averaged metrics.
///
/// `f1`, `f2` are the contravariant fluxes at the nodes; as rows of `D` sum
/// to zero, each two-point flux enters relative to them and the diagonal
/// drops out. `prim` is scratch for `np^2 x 4` primitive values.
#[allow(clippy::too_many_arguments)]
pub fn volume_integral_split(
    eq: &EquationSystem,
    basis: &NodalBasis,
    variant: TwoPointFlux,
    e: usize,
    u: &[f64],
    ja: &[[[f64; 2]; 2]],
    f1: &[f64],
    f2: &[f64],
    prim: &mut [f64],
    acc: &mut [f64],
) -> Result<()> {
    let np = basis.np();
    let nv = eq.nvar();
    let gamma = match *eq {
        EquationSystem::Euler { gamma } | EquationSystem::NavierStokes { gamma, .. } => Some(gamma),
        EquationSystem::Scalar { .. } => None,
    };
    if let Some(gamma) = gamma {
        for (k, q) in prim.chunks_exact_mut(4).take(np * np).enumerate() {
            let p = cons_to_prim(gamma, &u[k * nv..(k + 1) * nv]).map_err(|err| err.at(Location::Node { element: e, i: k % np, j: k / np }))?;
            q.copy_from_slice(&[p.rho, p.u, p.v, p.p]);
        }
    }
    let node_prim = |k: usize| Prim::new(prim[4 * k], prim[4 * k + 1], prim[4 * k + 2], prim[4 * k + 3]);
    let mut f = [0.0; MAX_VAR];
    let avg = |a: [f64; 2], b: [f64; 2]| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    for k in 0..2 {
        let fk = if k == 0 { f1 } else { f2 };
        for line in 0..np {
            for p in 0..np {
                for q in p + 1..np {
                    let (ka, kb) = if k == 0 { (line * np + p, line * np + q) } else { (p * np + line, q * np + line) };
                    let (a, b) = (ka * nv, kb * nv);
                    let m = avg(ja[ka][k], ja[kb][k]);
                    match gamma {
                        Some(gamma) => contravariant_two_point_prim(gamma, variant, &node_prim(ka), u[a + 3], &node_prim(kb), u[b + 3], m, &mut f),
                        None => contravariant_two_point(eq, variant, &u[a..a + nv], &u[b..b + nv], m, &mut f)
                            .map_err(|err| err.at(Location::Node { element: e, i: ka % np, j: ka / np }))?,
                    }
                    let (dpq, dqp) = (2.0 * basis.d.get(p, q), 2.0 * basis.d.get(q, p));
                    for v in 0..nv {
                        acc[a + v] += dpq * (f[v] - fk[a + v]);
                        acc[b + v] += dqp * (f[v] - fk[b + v]);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Adds `l-hat(+-1)` weighted face fluxes (outward, `f* s-hat`).
pub fn surface_integral(basis: &NodalBasis, nv: usize, faces: &[f64], acc: &mut [f64]) {
    let np = basis.np();
    let (lm, lp) = (&basis.ell_hat_minus, &basis.ell_hat_plus);
    let fc = |f: usize, p: usize, v: usize| faces[(f * np + p) * nv + v];
    for j in 0..np {
        for i in 0..np {
            let o = (j * np + i) * nv;
            for v in 0..nv {
                acc[o + v] += lm[i] * fc(0, j, v) + lp[i] * fc(1, j, v) + lm[j] * fc(2, i, v) + lp[j] * fc(3, i, v);
            }
        }
    }
}

/// Strong-form correction: subtracts the interpolated interior contravariant
/// flux on each face, turning `D F + l-hat f*` into `D F + l-hat (f* - F)`.
pub fn strong_face_correction(basis: &NodalBasis, nv: usize, f1: &[f64], f2: &[f64], acc: &mut [f64]) {
    let np = basis.np();
    let (lm, lp) = (&basis.ell_minus, &basis.ell_plus);
    let (hm, hp) = (&basis.ell_hat_minus, &basis.ell_hat_plus);
    let mut b = [[0.0; MAX_VAR]; 4];
    for line in 0..np {
        for row in b.iter_mut() {
            row[..nv].fill(0.0);
        }
        for q in 0..np {
            let (x, y) = ((line * np + q) * nv, (q * np + line) * nv);
            for v in 0..nv {
                b[0][v] += lm[q] * f1[x + v];
                b[1][v] += lp[q] * f1[x + v];
                b[2][v] += lm[q] * f2[y + v];
                b[3][v] += lp[q] * f2[y + v];
            }
        }
        // line is j for the xi^1 faces and i for the xi^2 faces
        for p in 0..np {
            let (x, y) = ((line * np + p) * nv, (p * np + line) * nv);
            for v in 0..nv {
                acc[x + v] += hm[p] * b[0][v] - hp[p] * b[1][v];
                acc[y + v] += hm[p] * b[2][v] - hp[p] * b[3][v];
            }
        }
    }
}
