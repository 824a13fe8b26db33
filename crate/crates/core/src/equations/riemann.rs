//! Approximate Riemann solvers for the interface flux `f*(UL, UR, n)`.
//!
//! `n` is a unit normal pointing from the left (master) to the right state.

use super::{cons_to_prim, two_point_flux, EquationSystem, Prim, TwoPointFlux, MAX_VAR};
use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

/// Harten entropy-fix width relative to the Roe-averaged sound speed.
const ROE_FIX_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiemannSolver {
    Rusanov,
    Hll,
    Roe,
    /// Arithmetic mean of the physical fluxes, no dissipation.
    Central,
    /// A symmetric two-point flux used as the surface flux (no dissipation).
    TwoPoint(TwoPointFlux),
}

impl fmt::Display for RiemannSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RiemannSolver::Rusanov => f.write_str("rusanov"),
            RiemannSolver::Hll => f.write_str("hll"),
            RiemannSolver::Roe => f.write_str("roe"),
            RiemannSolver::Central => f.write_str("central"),
            RiemannSolver::TwoPoint(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for RiemannSolver {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "rusanov" | "llf" => Ok(RiemannSolver::Rusanov),
            "hll" => Ok(RiemannSolver::Hll),
            "roe" => Ok(RiemannSolver::Roe),
            "central" => Ok(RiemannSolver::Central),
            other => other
                .parse::<TwoPointFlux>()
                .map(RiemannSolver::TwoPoint)
                .map_err(|_| format!("unknown Riemann solver '{s}'")),
        }
    }
}

/// Evaluates `f*(ul, ur, n)` into `out`.
pub fn numerical_flux(
    eq: &EquationSystem,
    solver: RiemannSolver,
    ul: &[f64],
    ur: &[f64],
    n: [f64; 2],
    out: &mut [f64],
) -> Result<()> {
    match *eq {
        EquationSystem::Scalar { velocity, .. } => {
            if !ul[0].is_finite() || !ur[0].is_finite() {
                return Err(Error::non_physical(&[ul[0], ur[0]]));
            }
            let an = velocity[0] * n[0] + velocity[1] * n[1];
            let mean = 0.5 * (an * ul[0] + an * ur[0]);
            out[0] = match solver {
                RiemannSolver::Central | RiemannSolver::TwoPoint(_) => mean,
                _ => mean - 0.5 * an.abs() * (ur[0] - ul[0]),
            };
            Ok(())
        }
        EquationSystem::Euler { gamma } | EquationSystem::NavierStokes { gamma, .. } => {
            let ql = cons_to_prim(gamma, ul)?;
            let qr = cons_to_prim(gamma, ur)?;
            match solver {
                RiemannSolver::Rusanov => rusanov(gamma, ul, ur, &ql, &qr, n, out),
                RiemannSolver::Hll => hll(gamma, ul, ur, &ql, &qr, n, out),
                RiemannSolver::Roe => roe(gamma, ul, ur, &ql, &qr, n, out)?,
                RiemannSolver::Central => {
                    let (fl, fr) = (normal_flux(&ql, ul[3], n), normal_flux(&qr, ur[3], n));
                    for v in 0..4 {
                        out[v] = 0.5 * (fl[v] + fr[v]);
                    }
                }
                RiemannSolver::TwoPoint(variant) => {
                    let mut fx = [0.0; MAX_VAR];
                    let mut fy = [0.0; MAX_VAR];
                    two_point_flux(eq, variant, ul, ur, &mut fx, &mut fy)?;
                    for v in 0..4 {
                        out[v] = fx[v] * n[0] + fy[v] * n[1];
                    }
                }
            }
            Ok(())
        }
    }
}

#[inline(always)]
fn normal_flux(q: &Prim, e: f64, n: [f64; 2]) -> [f64; 4] {
    let un = q.u * n[0] + q.v * n[1];
    let m = q.rho * un;
    [m, m * q.u + q.p * n[0], m * q.v + q.p * n[1], un * (e + q.p)]
}

fn rusanov(gamma: f64, ul: &[f64], ur: &[f64], ql: &Prim, qr: &Prim, n: [f64; 2], out: &mut [f64]) {
    let fl = normal_flux(ql, ul[3], n);
    let fr = normal_flux(qr, ur[3], n);
    let sl = (ql.u * n[0] + ql.v * n[1]).abs() + ql.sound_speed(gamma);
    let sr = (qr.u * n[0] + qr.v * n[1]).abs() + qr.sound_speed(gamma);
    let lam = sl.max(sr);
    for v in 0..4 {
        out[v] = 0.5 * (fl[v] + fr[v]) - 0.5 * lam * (ur[v] - ul[v]);
    }
}

fn hll(gamma: f64, ul: &[f64], ur: &[f64], ql: &Prim, qr: &Prim, n: [f64; 2], out: &mut [f64]) {
    let fl = normal_flux(ql, ul[3], n);
    let fr = normal_flux(qr, ur[3], n);
    let (unl, unr) = (ql.u * n[0] + ql.v * n[1], qr.u * n[0] + qr.v * n[1]);
    let (al, ar) = (ql.sound_speed(gamma), qr.sound_speed(gamma));
    let sl = (unl - al).min(unr - ar);
    let sr = (unl + al).max(unr + ar);
    if sl >= 0.0 {
        out[..4].copy_from_slice(&fl);
    } else if sr <= 0.0 {
        out[..4].copy_from_slice(&fr);
    } else {
        let inv = 1.0 / (sr - sl);
        for v in 0..4 {
            out[v] = (sr * fl[v] - sl * fr[v] + sl * sr * (ur[v] - ul[v])) * inv;
        }
    }
}

/// Roe flux in the normal-aligned frame with Harten's entropy fix on the acoustic waves.
fn roe(gamma: f64, ul: &[f64], ur: &[f64], ql: &Prim, qr: &Prim, n: [f64; 2], out: &mut [f64]) -> Result<()> {
    let rot = |q: &Prim| (q.u * n[0] + q.v * n[1], -q.u * n[1] + q.v * n[0]);
    let (unl, utl) = rot(ql);
    let (unr, utr) = rot(qr);
    let hl = (ul[3] + ql.p) / ql.rho;
    let hr = (ur[3] + qr.p) / qr.rho;
    let (sl, sr) = (ql.rho.sqrt(), qr.rho.sqrt());
    let inv = 1.0 / (sl + sr);
    let un = (sl * unl + sr * unr) * inv;
    let ut = (sl * utl + sr * utr) * inv;
    let h = (sl * hl + sr * hr) * inv;
    let a2 = (gamma - 1.0) * (h - 0.5 * (un * un + ut * ut));
    if !(a2 > 0.0) {
        return Err(Error::RoeAverage(format!("Roe-averaged sound speed squared {a2:e}")));
    }
    let a = a2.sqrt();
    let rho = sl * sr;

    let (drho, dp, dun, dut) = (qr.rho - ql.rho, qr.p - ql.p, unr - unl, utr - utl);
    let alpha = [
        (dp - rho * a * dun) / (2.0 * a2),
        drho - dp / a2,
        rho * dut,
        (dp + rho * a * dun) / (2.0 * a2),
    ];
    let delta = ROE_FIX_FRACTION * a;
    let fix = |l: f64| {
        let m = l.abs();
        if m < delta {
            (l * l + delta * delta) / (2.0 * delta)
        } else {
            m
        }
    };
    let lam = [fix(un - a), un.abs(), un.abs(), fix(un + a)];
    let vecs = [
        [1.0, un - a, ut, h - un * a],
        [1.0, un, ut, 0.5 * (un * un + ut * ut)],
        [0.0, 0.0, 1.0, ut],
        [1.0, un + a, ut, h + un * a],
    ];
    let mut diss = [0.0; 4];
    for k in 0..4 {
        let s = lam[k] * alpha[k];
        for v in 0..4 {
            diss[v] += s * vecs[k][v];
        }
    }
    let fl = [ql.rho * unl, ql.rho * unl * unl + ql.p, ql.rho * unl * utl, unl * (ul[3] + ql.p)];
    let fr = [qr.rho * unr, qr.rho * unr * unr + qr.p, qr.rho * unr * utr, unr * (ur[3] + qr.p)];
    let g: [f64; 4] = std::array::from_fn(|v| 0.5 * (fl[v] + fr[v]) - 0.5 * diss[v]);
    out[0] = g[0];
    out[1] = g[1] * n[0] - g[2] * n[1];
    out[2] = g[1] * n[1] + g[2] * n[0];
    out[3] = g[3];
    Ok(())
}
