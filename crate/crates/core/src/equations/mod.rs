//! Equation systems: scalar advection-diffusion, compressible Euler and
//! compressible Navier-Stokes (constant viscosity, `R = 1`).
//!
//! States are passed as slices of length `nvar()`; all functions are pure.

mod entropy;
pub mod exact_riemann;
mod riemann;
mod two_point;

pub use entropy::{entropy, entropy_flux_potential, entropy_variables};
pub use riemann::{numerical_flux, RiemannSolver};
pub use two_point::{contravariant_two_point, contravariant_two_point_prim, two_point_flux, TwoPointFlux};

use crate::error::{Error, Result};

/// Largest number of conservative variables of any shipped system.
pub const MAX_VAR: usize = 4;

/// Gas constant in code units.
pub const R_GAS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EquationSystem {
    /// `phi_t + a . grad(phi) = kappa lap(phi)`.
    Scalar { velocity: [f64; 2], diffusivity: f64 },
    Euler { gamma: f64 },
    NavierStokes { gamma: f64, mu: f64, prandtl: f64 },
}

/// Primitive Euler state; temperature is `p / (rho R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prim {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub p: f64,
}

impl Prim {
    pub fn new(rho: f64, u: f64, v: f64, p: f64) -> Self {
        Self { rho, u, v, p }
    }

    pub fn temperature(&self) -> f64 {
        self.p / (self.rho * R_GAS)
    }

    pub fn sound_speed(&self, gamma: f64) -> f64 {
        (gamma * self.p / self.rho).sqrt()
    }
}

#[inline]
pub fn cons_to_prim(gamma: f64, u: &[f64]) -> Result<Prim> {
    let rho = u[0];
    if !(rho > 0.0) {
        return Err(Error::non_physical(&u[..4]));
    }
    let inv = 1.0 / rho;
    let vx = u[1] * inv;
    let vy = u[2] * inv;
    let p = (gamma - 1.0) * (u[3] - 0.5 * (u[1] * vx + u[2] * vy));
    if !(p > 0.0) {
        return Err(Error::non_physical(&u[..4]));
    }
    Ok(Prim { rho, u: vx, v: vy, p })
}

#[inline]
pub fn prim_to_cons(gamma: f64, q: Prim) -> Result<[f64; 4]> {
    if !(q.rho > 0.0 && q.p > 0.0) || !q.u.is_finite() || !q.v.is_finite() {
        return Err(Error::non_physical(&[q.rho, q.u, q.v, q.p]));
    }
    Ok([q.rho, q.rho * q.u, q.rho * q.v, q.p / (gamma - 1.0) + 0.5 * q.rho * (q.u * q.u + q.v * q.v)])
}

/// Euler flux in both directions from a primitive state.
#[inline(always)]
pub(crate) fn euler_flux_prim(q: &Prim, e: f64, fx: &mut [f64], fy: &mut [f64]) {
    let mx = q.rho * q.u;
    let my = q.rho * q.v;
    fx[0] = mx;
    fx[1] = mx * q.u + q.p;
    fx[2] = mx * q.v;
    fx[3] = q.u * (e + q.p);
    fy[0] = my;
    fy[1] = my * q.u;
    fy[2] = my * q.v + q.p;
    fy[3] = q.v * (e + q.p);
}

impl EquationSystem {
    pub fn scalar(velocity: [f64; 2], diffusivity: f64) -> Result<Self> {
        if !(diffusivity >= 0.0) || !velocity.iter().all(|a| a.is_finite()) {
            return Err(Error::InvalidArgument("scalar system needs finite velocity and diffusivity >= 0".into()));
        }
        Ok(EquationSystem::Scalar { velocity, diffusivity })
    }

    pub fn euler(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) {
            return Err(Error::InvalidArgument(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(EquationSystem::Euler { gamma })
    }

    pub fn navier_stokes(gamma: f64, mu: f64, prandtl: f64) -> Result<Self> {
        if !(gamma > 1.0) || !(mu >= 0.0) || !(prandtl > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need gamma > 1, mu >= 0, Pr > 0 (got {gamma}, {mu}, {prandtl})"
            )));
        }
        Ok(EquationSystem::NavierStokes { gamma, mu, prandtl })
    }

    #[inline]
    pub fn nvar(&self) -> usize {
        match self {
            EquationSystem::Scalar { .. } => 1,
            _ => 4,
        }
    }

    /// Number of lifted variables: `phi` for the scalar system, `(u, v, T)` for Navier-Stokes.
    #[inline]
    pub fn nvar_lift(&self) -> usize {
        match self {
            EquationSystem::Scalar { .. } => 1,
            EquationSystem::Euler { .. } => 0,
            EquationSystem::NavierStokes { .. } => 3,
        }
    }

    pub fn is_parabolic(&self) -> bool {
        match *self {
            EquationSystem::Scalar { diffusivity, .. } => diffusivity > 0.0,
            EquationSystem::Euler { .. } => false,
            EquationSystem::NavierStokes { mu, .. } => mu > 0.0,
        }
    }

    pub fn is_euler_like(&self) -> bool {
        !matches!(self, EquationSystem::Scalar { .. })
    }

    pub fn gamma(&self) -> Option<f64> {
        match *self {
            EquationSystem::Euler { gamma } | EquationSystem::NavierStokes { gamma, .. } => Some(gamma),
            EquationSystem::Scalar { .. } => None,
        }
    }

    /// Heat conductivity `mu gamma R / ((gamma - 1) Pr)`.
    pub fn conductivity(&self) -> f64 {
        match *self {
            EquationSystem::NavierStokes { gamma, mu, prandtl } => mu * gamma * R_GAS / ((gamma - 1.0) * prandtl),
            _ => 0.0,
        }
    }

    /// Checks the positivity invariants of a conservative state.
    #[inline]
    pub fn check_state(&self, u: &[f64]) -> Result<()> {
        match *self {
            EquationSystem::Scalar { .. } => {
                if u[0].is_finite() {
                    Ok(())
                } else {
                    Err(Error::non_physical(&u[..1]))
                }
            }
            EquationSystem::Euler { gamma } | EquationSystem::NavierStokes { gamma, .. } => {
                cons_to_prim(gamma, u).map(|_| ())
            }
        }
    }

    /// Convective flux in x and y.
    #[inline]
    pub fn physical_flux(&self, u: &[f64], fx: &mut [f64], fy: &mut [f64]) -> Result<()> {
        match *self {
            EquationSystem::Scalar { velocity, .. } => {
                if !u[0].is_finite() {
                    return Err(Error::non_physical(&u[..1]));
                }
                fx[0] = velocity[0] * u[0];
                fy[0] = velocity[1] * u[0];
                Ok(())
            }
            EquationSystem::Euler { gamma } | EquationSystem::NavierStokes { gamma, .. } => {
                let q = cons_to_prim(gamma, u)?;
                euler_flux_prim(&q, u[3], fx, fy);
                Ok(())
            }
        }
    }

    /// `F(U) . n` into `out`.
    #[inline]
    pub fn normal_flux(&self, u: &[f64], n: [f64; 2], out: &mut [f64]) -> Result<()> {
        let mut fx = [0.0; MAX_VAR];
        let mut fy = [0.0; MAX_VAR];
        self.physical_flux(u, &mut fx, &mut fy)?;
        for v in 0..self.nvar() {
            out[v] = fx[v] * n[0] + fy[v] * n[1];
        }
        Ok(())
    }

    /// Largest convective signal speed in direction `n` (unit or not).
    #[inline]
    pub fn max_wavespeed(&self, u: &[f64], n: [f64; 2]) -> Result<f64> {
        match *self {
            EquationSystem::Scalar { velocity, .. } => Ok((velocity[0] * n[0] + velocity[1] * n[1]).abs()),
            EquationSystem::Euler { gamma } | EquationSystem::NavierStokes { gamma, .. } => {
                let q = cons_to_prim(gamma, u)?;
                let norm = (n[0] * n[0] + n[1] * n[1]).sqrt();
                Ok((q.u * n[0] + q.v * n[1]).abs() + q.sound_speed(gamma) * norm)
            }
        }
    }

    /// Largest eigenvalue bound of the diffusion operator.
    #[inline]
    pub fn viscous_scale(&self, u: &[f64]) -> Result<f64> {
        match *self {
            EquationSystem::Scalar { diffusivity, .. } => Ok(diffusivity),
            EquationSystem::Euler { gamma } => cons_to_prim(gamma, u).map(|_| 0.0),
            EquationSystem::NavierStokes { gamma, mu, prandtl } => {
                let q = cons_to_prim(gamma, u)?;
                Ok((4.0 * mu / (3.0 * q.rho)).max(gamma * mu / (prandtl * q.rho)))
            }
        }
    }

    /// Variables reconstructed and limited in FV subcells.
    #[inline]
    pub fn to_primitive(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        match *self {
            EquationSystem::Scalar { .. } => {
                out[0] = u[0];
                Ok(())
            }
            EquationSystem::Euler { gamma } | EquationSystem::NavierStokes { gamma, .. } => {
                let q = cons_to_prim(gamma, u)?;
                out[..4].copy_from_slice(&[q.rho, q.u, q.v, q.p]);
                Ok(())
            }
        }
    }

    #[inline]
    pub fn from_primitive(&self, q: &[f64], out: &mut [f64]) -> Result<()> {
        match *self {
            EquationSystem::Scalar { .. } => {
                out[0] = q[0];
                Ok(())
            }
            EquationSystem::Euler { gamma } | EquationSystem::NavierStokes { gamma, .. } => {
                let c = prim_to_cons(gamma, Prim::new(q[0], q[1], q[2], q[3]))?;
                out[..4].copy_from_slice(&c);
                Ok(())
            }
        }
    }

    /// Lifted variables: `phi` (scalar) or `(u, v, T)` (Navier-Stokes and Euler diagnostics).
    #[inline]
    pub fn lifted_variables(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        match *self {
            EquationSystem::Scalar { .. } => {
                out[0] = u[0];
                Ok(())
            }
            EquationSystem::Euler { gamma } | EquationSystem::NavierStokes { gamma, .. } => {
                let q = cons_to_prim(gamma, u)?;
                out[0] = q.u;
                out[1] = q.v;
                out[2] = q.temperature();
                Ok(())
            }
        }
    }

    /// Viscous flux `F^v(U, grad)`; `gx`/`gy` are x/y derivatives of the lifted variables.
    #[inline]
    pub fn viscous_flux(&self, u: &[f64], gx: &[f64], gy: &[f64], fx: &mut [f64], fy: &mut [f64]) -> Result<()> {
        match *self {
            EquationSystem::Scalar { diffusivity, .. } => {
                if !u[0].is_finite() {
                    return Err(Error::non_physical(&u[..1]));
                }
                fx[0] = diffusivity * gx[0];
                fy[0] = diffusivity * gy[0];
                Ok(())
            }
            EquationSystem::Euler { gamma } => {
                cons_to_prim(gamma, u)?;
                fx[..4].fill(0.0);
                fy[..4].fill(0.0);
                Ok(())
            }
            EquationSystem::NavierStokes { gamma, mu, .. } => {
                let q = cons_to_prim(gamma, u)?;
                let k = self.conductivity();
                let (ux, vx, tx) = (gx[0], gx[1], gx[2]);
                let (uy, vy, ty) = (gy[0], gy[1], gy[2]);
                let div = ux + vy;
                let txx = mu * (2.0 * ux - 2.0 / 3.0 * div);
                let tyy = mu * (2.0 * vy - 2.0 / 3.0 * div);
                let txy = mu * (uy + vx);
                fx[0] = 0.0;
                fx[1] = txx;
                fx[2] = txy;
                fx[3] = q.u * txx + q.v * txy + k * tx;
                fy[0] = 0.0;
                fy[1] = txy;
                fy[2] = tyy;
                fy[3] = q.u * txy + q.v * tyy + k * ty;
                Ok(())
            }
        }
    }
}
