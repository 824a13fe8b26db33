//! Mathematical entropy pair used by the entropy-conserving flux and its tests.
//!
//! Euler: `S = -rho s / (gamma - 1)` with `s = ln p - gamma ln rho`, flux potential `psi_d = rho u_d`.
//! Scalar: `S = phi^2 / 2`, `psi_d = a_d phi^2 / 2`.

use super::{cons_to_prim, EquationSystem};
use crate::error::Result;

pub fn entropy(eq: &EquationSystem, u: &[f64]) -> Result<f64> {
    match *eq {
        EquationSystem::Scalar { .. } => {
            eq.check_state(u)?;
            Ok(0.5 * u[0] * u[0])
        }
        EquationSystem::Euler { gamma } | EquationSystem::NavierStokes { gamma, .. } => {
            let q = cons_to_prim(gamma, u)?;
            let s = q.p.ln() - gamma * q.rho.ln();
            Ok(-q.rho * s / (gamma - 1.0))
        }
    }
}

/// `w = dS/dU`.
pub fn entropy_variables(eq: &EquationSystem, u: &[f64], w: &mut [f64]) -> Result<()> {
    match *eq {
        EquationSystem::Scalar { .. } => {
            eq.check_state(u)?;
            w[0] = u[0];
        }
        EquationSystem::Euler { gamma } | EquationSystem::NavierStokes { gamma, .. } => {
            let q = cons_to_prim(gamma, u)?;
            let s = q.p.ln() - gamma * q.rho.ln();
            let beta = q.rho / q.p;
            w[0] = (gamma - s) / (gamma - 1.0) - 0.5 * beta * (q.u * q.u + q.v * q.v);
            w[1] = beta * q.u;
            w[2] = beta * q.v;
            w[3] = -beta;
        }
    }
    Ok(())
}

/// Entropy flux potential `psi_d = w . F_d - Q_d` in direction `d` (0 = x, 1 = y).
pub fn entropy_flux_potential(eq: &EquationSystem, u: &[f64], d: usize) -> Result<f64> {
    match *eq {
        EquationSystem::Scalar { velocity, .. } => {
            eq.check_state(u)?;
            Ok(0.5 * velocity[d] * u[0] * u[0])
        }
        EquationSystem::Euler { gamma } | EquationSystem::NavierStokes { gamma, .. } => {
            cons_to_prim(gamma, u)?;
            Ok(u[1 + d])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::{prim_to_cons, Prim};
    use rand::{Rng, SeedableRng};

    #[test]
    fn reference_state_has_zero_specific_entropy() {
        let eq = EquationSystem::euler(1.4).unwrap();
        let u = prim_to_cons(1.4, Prim::new(1.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(entropy(&eq, &u).unwrap(), 0.0);
        assert!(entropy(&eq, &[1.0, 5.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn entropy_variables_match_finite_differences() {
        let eq = EquationSystem::euler(1.4).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let h = 1e-7;
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let q = Prim::new(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0));
            let u = prim_to_cons(1.4, q).unwrap();
            let mut w = [0.0; 4];
            entropy_variables(&eq, &u, &mut w).unwrap();
            for k in 0..4 {
                let (mut up, mut um) = (u, u);
                up[k] += h;
                um[k] -= h;
                let fd = (entropy(&eq, &up).unwrap() - entropy(&eq, &um).unwrap()) / (2.0 * h);
                worst = worst.max((fd - w[k]).abs());
            }
        }
        assert!(worst < 1e-6, "{worst:e}");
    }

    #[test]
    fn entropy_potential_identity_for_euler() {
        // psi = w . F - Q with Q = S u
        let eq = EquationSystem::euler(1.4).unwrap();
        let u = prim_to_cons(1.4, Prim::new(1.2, 0.4, -0.3, 0.9)).unwrap();
        let mut w = [0.0; 4];
        entropy_variables(&eq, &u, &mut w).unwrap();
        let (mut fx, mut fy) = ([0.0; 4], [0.0; 4]);
        eq.physical_flux(&u, &mut fx, &mut fy).unwrap();
        let s = entropy(&eq, &u).unwrap();
        let px: f64 = (0..4).map(|k| w[k] * fx[k]).sum::<f64>() - s * u[1] / u[0];
        let py: f64 = (0..4).map(|k| w[k] * fy[k]).sum::<f64>() - s * u[2] / u[0];
        assert!((px - entropy_flux_potential(&eq, &u, 0).unwrap()).abs() < 1e-13);
        assert!((py - entropy_flux_potential(&eq, &u, 1).unwrap()).abs() < 1e-13);
    }
}
