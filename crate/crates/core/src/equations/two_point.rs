//! Symmetric two-point volume fluxes for the split form.

use super::{cons_to_prim, euler_flux_prim, EquationSystem, Prim, MAX_VAR};
use crate::error::Result;
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoPointFlux {
    /// `(F(a) + F(b)) / 2`; reproduces the standard DGSEM volume integral.
    StandardMean,
    /// Kinetic-energy preserving flux of Pirozzoli.
    PirozzoliKep,
    /// Entropy-conserving and kinetic-energy preserving flux of Chandrashekar.
    ChandrashekarEc,
}

impl fmt::Display for TwoPointFlux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TwoPointFlux::StandardMean => "standard",
            TwoPointFlux::PirozzoliKep => "pirozzoli",
            TwoPointFlux::ChandrashekarEc => "chandrashekar",
        })
    }
}

impl FromStr for TwoPointFlux {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "standard" | "mean" | "standardmean" => Ok(TwoPointFlux::StandardMean),
            "pirozzoli" | "kep" | "pirozzolikep" => Ok(TwoPointFlux::PirozzoliKep),
            "chandrashekar" | "ec" | "chandrashekarec" => Ok(TwoPointFlux::ChandrashekarEc),
            _ => Err(format!("unknown two-point flux '{s}'")),
        }
    }
}

/// Logarithmic mean `(b - a) / (ln b - ln a)`, with a series expansion near `a = b`.
#[inline]
pub(crate) fn ln_mean(a: f64, b: f64) -> f64 {
    let f2 = (a * (a - 2.0 * b) + b * b) / (a * (a + 2.0 * b) + b * b);
    if f2 < 1e-4 {
        (a + b) / (2.0 + f2 * (2.0 / 3.0 + f2 * (2.0 / 5.0 + 2.0 / 7.0 * f2)))
    } else {
        (b - a) / (b / a).ln()
    }
}

fn order(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// `F#(a, b)` in x and y. The operands are put in a canonical order first so the
/// result is bitwise symmetric.
#[inline]
pub fn two_point_flux(
    eq: &EquationSystem,
    variant: TwoPointFlux,
    a: &[f64],
    b: &[f64],
    fx: &mut [f64],
    fy: &mut [f64],
) -> Result<()> {
    let nv = eq.nvar();
    let (a, b) = if order(&a[..nv], &b[..nv]) == Ordering::Greater { (b, a) } else { (a, b) };
    match *eq {
        EquationSystem::Scalar { velocity, .. } => {
            eq.check_state(a)?;
            eq.check_state(b)?;
            let m = 0.5 * (a[0] + b[0]);
            fx[0] = velocity[0] * m;
            fy[0] = velocity[1] * m;
            Ok(())
        }
        EquationSystem::Euler { gamma } | EquationSystem::NavierStokes { gamma, .. } => {
            let qa = cons_to_prim(gamma, a)?;
            let qb = cons_to_prim(gamma, b)?;
            match variant {
                TwoPointFlux::StandardMean => standard(&qa, a[3], &qb, b[3], fx, fy),
                TwoPointFlux::PirozzoliKep => pirozzoli(&qa, a[3], &qb, b[3], fx, fy),
                TwoPointFlux::ChandrashekarEc => chandrashekar(gamma, &qa, &qb, fx, fy),
            }
            Ok(())
        }
    }
}

/// Contravariant two-point flux `F#_x m_x + F#_y m_y` with averaged metric `m`.
#[inline]
pub fn contravariant_two_point(
    eq: &EquationSystem,
    variant: TwoPointFlux,
    a: &[f64],
    b: &[f64],
    m: [f64; 2],
    out: &mut [f64],
) -> Result<()> {
    let mut fx = [0.0; MAX_VAR];
    let mut fy = [0.0; MAX_VAR];
    two_point_flux(eq, variant, a, b, &mut fx, &mut fy)?;
    for v in 0..eq.nvar() {
        out[v] = fx[v] * m[0] + fy[v] * m[1];
    }
    Ok(())
}

/// Contravariant Euler two-point flux from precomputed primitive states and
/// total energies. No canonical ordering: callers evaluate each pair once.
#[inline]
pub fn contravariant_two_point_prim(gamma: f64, variant: TwoPointFlux, qa: &Prim, ea: f64, qb: &Prim, eb: f64, m: [f64; 2], out: &mut [f64]) {
    let (rho, pn) = match variant {
        TwoPointFlux::StandardMean => {
            let (mut ax, mut ay, mut bx, mut by) = ([0.0; 4], [0.0; 4], [0.0; 4], [0.0; 4]);
            euler_flux_prim(qa, ea, &mut ax, &mut ay);
            euler_flux_prim(qb, eb, &mut bx, &mut by);
            for v in 0..4 {
                out[v] = 0.5 * ((ax[v] + bx[v]) * m[0] + (ay[v] + by[v]) * m[1]);
            }
            return;
        }
        TwoPointFlux::PirozzoliKep => (0.5 * (qa.rho + qb.rho), 0.5 * (qa.p + qb.p)),
        TwoPointFlux::ChandrashekarEc => {
            let (beta_a, beta_b) = (0.5 * qa.rho / qa.p, 0.5 * qb.rho / qb.p);
            (ln_mean(qa.rho, qb.rho), 0.25 * (qa.rho + qb.rho) / (0.5 * (beta_a + beta_b)))
        }
    };
    let u = 0.5 * (qa.u + qb.u);
    let v = 0.5 * (qa.v + qb.v);
    let mn = rho * (u * m[0] + v * m[1]);
    out[0] = mn;
    out[1] = mn * u + pn * m[0];
    out[2] = mn * v + pn * m[1];
    out[3] = match variant {
        TwoPointFlux::PirozzoliKep => mn * 0.5 * ((ea + qa.p) / qa.rho + (eb + qb.p) / qb.rho),
        _ => {
            let beta_mean = ln_mean(0.5 * qa.rho / qa.p, 0.5 * qb.rho / qb.p);
            let vel2 = 0.5 * (qa.u * qa.u + qa.v * qa.v) + 0.5 * (qb.u * qb.u + qb.v * qb.v);
            let e_int = 0.5 * (1.0 / ((gamma - 1.0) * beta_mean) - vel2);
            mn * e_int + out[1] * u + out[2] * v
        }
    };
}

fn standard(qa: &Prim, ea: f64, qb: &Prim, eb: f64, fx: &mut [f64], fy: &mut [f64]) {
    let (mut ax, mut ay, mut bx, mut by) = ([0.0; 4], [0.0; 4], [0.0; 4], [0.0; 4]);
    euler_flux_prim(qa, ea, &mut ax, &mut ay);
    euler_flux_prim(qb, eb, &mut bx, &mut by);
    for v in 0..4 {
        fx[v] = 0.5 * (ax[v] + bx[v]);
        fy[v] = 0.5 * (ay[v] + by[v]);
    }
}

fn pirozzoli(qa: &Prim, ea: f64, qb: &Prim, eb: f64, fx: &mut [f64], fy: &mut [f64]) {
    let rho = 0.5 * (qa.rho + qb.rho);
    let u = 0.5 * (qa.u + qb.u);
    let v = 0.5 * (qa.v + qb.v);
    let p = 0.5 * (qa.p + qb.p);
    let h = 0.5 * ((ea + qa.p) / qa.rho + (eb + qb.p) / qb.rho);
    let mx = rho * u;
    let my = rho * v;
    fx[0] = mx;
    fx[1] = mx * u + p;
    fx[2] = mx * v;
    fx[3] = mx * h;
    fy[0] = my;
    fy[1] = my * u;
    fy[2] = my * v + p;
    fy[3] = my * h;
}

fn chandrashekar(gamma: f64, qa: &Prim, qb: &Prim, fx: &mut [f64], fy: &mut [f64]) {
    let beta_a = 0.5 * qa.rho / qa.p;
    let beta_b = 0.5 * qb.rho / qb.p;
    let rho_avg = 0.5 * (qa.rho + qb.rho);
    let rho_mean = ln_mean(qa.rho, qb.rho);
    let beta_mean = ln_mean(beta_a, beta_b);
    let beta_avg = 0.5 * (beta_a + beta_b);
    let u = 0.5 * (qa.u + qb.u);
    let v = 0.5 * (qa.v + qb.v);
    let p_mean = 0.5 * rho_avg / beta_avg;
    let vel2 = 0.5 * (qa.u * qa.u + qa.v * qa.v) + 0.5 * (qb.u * qb.u + qb.v * qb.v);
    let e_int = 0.5 * (1.0 / ((gamma - 1.0) * beta_mean) - vel2);

    let m = rho_mean * u;
    fx[0] = m;
    fx[1] = m * u + p_mean;
    fx[2] = m * v;
    fx[3] = m * e_int + fx[1] * u + fx[2] * v;

    let m = rho_mean * v;
    fy[0] = m;
    fy[1] = m * u;
    fy[2] = m * v + p_mean;
    fy[3] = m * e_int + fy[1] * u + fy[2] * v;
}
