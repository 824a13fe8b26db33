//! Weakly imposed boundary conditions via ghost states.

use crate::equations::{EquationSystem, MAX_VAR};
use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Conservative state at a point and time.
pub type StateFn = Arc<dyn Fn([f64; 2], f64, &mut [f64]) + Send + Sync>;

#[derive(Clone)]
pub enum BoundaryCondition {
    /// Ghost state from an exact solution.
    Dirichlet(StateFn),
    /// Inviscid wall: normal velocity reflected.
    SlipWall,
    /// No-slip wall without heat flux.
    AdiabaticWall,
}

impl fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryCondition::Dirichlet(_) => "Dirichlet",
            BoundaryCondition::SlipWall => "SlipWall",
            BoundaryCondition::AdiabaticWall => "AdiabaticWall",
        })
    }
}

impl BoundaryCondition {
    pub fn check(&self, eq: &EquationSystem) -> Result<()> {
        match self {
            BoundaryCondition::Dirichlet(_) => Ok(()),
            BoundaryCondition::SlipWall if eq.is_euler_like() => Ok(()),
            BoundaryCondition::AdiabaticWall if matches!(eq, EquationSystem::NavierStokes { .. }) => Ok(()),
            other => Err(Error::InvalidArgument(format!("{other:?} boundary is not defined for this equation system"))),
        }
    }

    pub fn ghost(&self, eq: &EquationSystem, inner: &[f64], n: [f64; 2], x: [f64; 2], t: f64, out: &mut [f64]) {
        let nv = eq.nvar();
        match self {
            BoundaryCondition::Dirichlet(f) => f(x, t, &mut out[..nv]),
            BoundaryCondition::SlipWall => {
                let un = inner[1] * n[0] + inner[2] * n[1];
                out[0] = inner[0];
                out[1] = inner[1] - 2.0 * un * n[0];
                out[2] = inner[2] - 2.0 * un * n[1];
                out[3] = inner[3];
            }
            BoundaryCondition::AdiabaticWall => {
                out[0] = inner[0];
                out[1] = -inner[1];
                out[2] = -inner[2];
                out[3] = inner[3];
            }
        }
    }

    /// Lifted variables imposed on the boundary for BR1.
    pub fn lifted_state(&self, eq: &EquationSystem, inner: &[f64], ghost: &[f64], out: &mut [f64]) -> Result<()> {
        match self {
            BoundaryCondition::Dirichlet(_) => eq.lifted_variables(ghost, out),
            BoundaryCondition::SlipWall => {
                let (mut a, mut b) = ([0.0; 3], [0.0; 3]);
                eq.lifted_variables(inner, &mut a)?;
                eq.lifted_variables(ghost, &mut b)?;
                for k in 0..3 {
                    out[k] = 0.5 * (a[k] + b[k]);
                }
                Ok(())
            }
            BoundaryCondition::AdiabaticWall => {
                eq.lifted_variables(inner, out)?;
                out[0] = 0.0;
                out[1] = 0.0;
                Ok(())
            }
        }
    }

    /// Viscous normal flux `F^v . n` on the boundary given the interior gradients.
    pub fn viscous_flux(
        &self,
        eq: &EquationSystem,
        inner: &[f64],
        ghost: &[f64],
        gx: &[f64],
        gy: &[f64],
        n: [f64; 2],
        out: &mut [f64],
    ) -> Result<()> {
        let nv = eq.nvar();
        let (mut fx, mut fy) = ([0.0; MAX_VAR], [0.0; MAX_VAR]);
        eq.viscous_flux(inner, gx, gy, &mut fx, &mut fy)?;
        for v in 0..nv {
            out[v] = fx[v] * n[0] + fy[v] * n[1];
        }
        match self {
            BoundaryCondition::AdiabaticWall => {
                // zero wall velocity and zero heat flux
                out[3] = 0.0;
            }
            _ => {
                eq.viscous_flux(ghost, gx, gy, &mut fx, &mut fy)?;
                for v in 0..nv {
                    out[v] = 0.5 * (out[v] + fx[v] * n[0] + fy[v] * n[1]);
                }
            }
        }
        Ok(())
    }
}
