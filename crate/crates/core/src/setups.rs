//! Initial conditions and exact solutions, selected by name from the run configuration.

use crate::config::{InitialKind, RunConfig};
use crate::equations::exact_riemann::ExactRiemann;
use crate::equations::{prim_to_cons, EquationSystem, Prim};
use crate::error::{Error, Result};
use crate::mesh::Bounds;
use std::f64::consts::PI;

/// Shu's shock-vortex vortex: strength, core radius, decay rate, centre.
const SV_EPS: f64 = 0.3;
const SV_RC: f64 = 0.05;
const SV_ALPHA: f64 = 0.204;
const SV_CENTER: [f64; 2] = [0.25, 0.5];
const SV_SHOCK_X: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct Setup {
    pub kind: InitialKind,
    eq: EquationSystem,
    domain: Bounds,
    velocity: [f64; 2],
    state: Vec<f64>,
    vortex_strength: f64,
    vortex_radius: f64,
    sod: Option<ExactRiemann>,
    /// Pre- and post-shock states of the shock-vortex case.
    shock: Option<(Prim, Prim)>,
}

/// Rankine-Hugoniot states of a stationary normal shock with upstream `(1, Ma c, 0, 1)`.
pub fn stationary_shock(gamma: f64, mach: f64) -> Result<(Prim, Prim)> {
    if !(mach > 1.0) {
        return Err(Error::InvalidArgument(format!("a shock needs Ma > 1, got {mach}")));
    }
    let m2 = mach * mach;
    let left = Prim::new(1.0, mach * gamma.sqrt(), 0.0, 1.0);
    let rho = (gamma + 1.0) * m2 / ((gamma - 1.0) * m2 + 2.0);
    let p = 1.0 + 2.0 * gamma / (gamma + 1.0) * (m2 - 1.0);
    Ok((left, Prim::new(rho, left.u / rho, 0.0, p)))
}

impl Setup {
    pub fn new(cfg: &RunConfig, eq: EquationSystem) -> Result<Setup> {
        let gamma = eq.gamma().unwrap_or(1.4);
        let sod = match cfg.initial {
            InitialKind::Sod => {
                Some(ExactRiemann::new(gamma, Prim::new(1.0, 0.0, 0.0, 1.0), Prim::new(0.125, 0.0, 0.0, 0.1))?)
            }
            _ => None,
        };
        let shock = match cfg.initial {
            InitialKind::ShockVortex => Some(stationary_shock(gamma, cfg.shock_mach)?),
            _ => None,
        };
        let velocity = match (cfg.initial, cfg.initial_state.len()) {
            (InitialKind::Vortex, 4) => [cfg.initial_state[1], cfg.initial_state[2]],
            (InitialKind::Vortex, _) => [1.0, 1.0],
            _ => cfg.advection_velocity,
        };
        Ok(Setup {
            kind: cfg.initial,
            eq,
            domain: cfg.domain,
            velocity,
            state: cfg.initial_state.clone(),
            vortex_strength: cfg.vortex_strength,
            vortex_radius: cfg.vortex_radius,
            sod,
            shock,
        })
    }

    /// Whether [`Setup::state`] is an exact solution for `t > 0`.
    pub fn is_exact(&self) -> bool {
        match self.kind {
            InitialKind::Constant | InitialKind::Vortex | InitialKind::Sod => true,
            InitialKind::Sine => !matches!(self.eq, EquationSystem::NavierStokes { .. }),
            InitialKind::ShockVortex => false,
        }
    }

    fn set_prim(&self, q: Prim, out: &mut [f64]) {
        let c = prim_to_cons(self.eq.gamma().unwrap_or(1.4), q).expect("setups produce physical states");
        out[..4].copy_from_slice(&c);
    }

    /// Conservative state at `x`, time `t` (the initial state for non-exact setups).
    pub fn state(&self, x: [f64; 2], t: f64, out: &mut [f64]) {
        let b = &self.domain;
        let (lx, ly) = (b.x1 - b.x0, b.y1 - b.y0);
        match self.kind {
            InitialKind::Constant => match self.eq {
                EquationSystem::Scalar { .. } => out[0] = self.state[0],
                _ => self.set_prim(Prim::new(self.state[0], self.state[1], self.state[2], self.state[3]), out),
            },
            InitialKind::Sine => {
                let (kx, ky) = (2.0 * PI / lx, 2.0 * PI / ly);
                let a = self.velocity;
                let phase = kx * (x[0] - b.x0 - a[0] * t) + ky * (x[1] - b.y0 - a[1] * t);
                match self.eq {
                    EquationSystem::Scalar { diffusivity, .. } => {
                        out[0] = (-diffusivity * (kx * kx + ky * ky) * t).exp() * phase.sin();
                    }
                    _ => self.set_prim(Prim::new(1.0 + 0.2 * phase.sin(), a[0], a[1], 1.0), out),
                }
            }
            InitialKind::Vortex => {
                let gamma = self.eq.gamma().unwrap_or(1.4);
                let wrap = |d: f64, l: f64| d - l * (d / l).round();
                let cx = 0.5 * (b.x0 + b.x1) + self.velocity[0] * t;
                let cy = 0.5 * (b.y0 + b.y1) + self.velocity[1] * t;
                let r0 = self.vortex_radius;
                let (dx, dy) = (wrap(x[0] - cx, lx) / r0, wrap(x[1] - cy, ly) / r0);
                let r2 = dx * dx + dy * dy;
                let beta = self.vortex_strength;
                let g = (0.5 * (1.0 - r2)).exp();
                let du = -beta / (2.0 * PI) * dy * g;
                let dv = beta / (2.0 * PI) * dx * g;
                let temp = 1.0 - (gamma - 1.0) * beta * beta / (8.0 * gamma * PI * PI) * g * g;
                let rho = temp.powf(1.0 / (gamma - 1.0));
                self.set_prim(Prim::new(rho, self.velocity[0] + du, self.velocity[1] + dv, rho * temp), out);
            }
            InitialKind::Sod => {
                let x0 = 0.5 * (b.x0 + b.x1);
                let q = if t > 0.0 {
                    self.sod.as_ref().expect("built with the setup").sample((x[0] - x0) / t)
                } else if x[0] < x0 {
                    Prim::new(1.0, 0.0, 0.0, 1.0)
                } else {
                    Prim::new(0.125, 0.0, 0.0, 0.1)
                };
                self.set_prim(q, out);
            }
            InitialKind::ShockVortex => {
                let gamma = self.eq.gamma().unwrap_or(1.4);
                let (left, right) = self.shock.expect("built with the setup");
                if x[0] >= SV_SHOCK_X {
                    return self.set_prim(right, out);
                }
                let (dx, dy) = (x[0] - SV_CENTER[0], x[1] - SV_CENTER[1]);
                let tau2 = (dx * dx + dy * dy) / (SV_RC * SV_RC);
                let e = (SV_ALPHA * (1.0 - tau2)).exp();
                // eps tau e sin(theta), with tau sin(theta) = dy / rc
                let du = SV_EPS * dy / SV_RC * e;
                let dv = -SV_EPS * dx / SV_RC * e;
                let dt = -(gamma - 1.0) * SV_EPS * SV_EPS * e * e / (4.0 * SV_ALPHA * gamma);
                let temp = left.p / left.rho + dt;
                let rho = temp.powf(1.0 / (gamma - 1.0));
                self.set_prim(Prim::new(rho, left.u + du, left.v + dv, rho * temp), out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::cons_to_prim;

    fn gas_cfg(initial: &str) -> RunConfig {
        RunConfig::parse(&format!("equation = euler\ninitial = {initial}")).unwrap()
    }

    #[test]
    fn shock_states_satisfy_rankine_hugoniot() {
        let g = 1.4;
        let (l, r) = stationary_shock(g, 1.5).unwrap();
        let flux = |q: Prim| {
            let e = q.p / (g - 1.0) + 0.5 * q.rho * q.u * q.u;
            [q.rho * q.u, q.rho * q.u * q.u + q.p, q.u * (e + q.p)]
        };
        let (fl, fr) = (flux(l), flux(r));
        for k in 0..3 {
            assert!((fl[k] - fr[k]).abs() < 1e-13 * fl[k].abs(), "{k}: {} vs {}", fl[k], fr[k]);
        }
        assert!(stationary_shock(g, 0.9).is_err());
    }

    #[test]
    fn vortex_is_isentropic_and_decays_to_free_stream() {
        let c = gas_cfg("vortex");
        let s = Setup::new(&c, EquationSystem::euler(1.4).unwrap()).unwrap();
        let mut u = [0.0; 4];
        for x in [[0.5, 0.5], [0.52, 0.47], [0.6, 0.55]] {
            s.state(x, 0.0, &mut u);
            let q = cons_to_prim(1.4, &u).unwrap();
            assert!((q.p / q.rho.powf(1.4) - 1.0).abs() < 1e-13);
        }
        s.state([0.0, 0.0], 0.0, &mut u);
        let q = cons_to_prim(1.4, &u).unwrap();
        assert!((q.rho - 1.0).abs() < 1e-9 && (q.u - 1.0).abs() < 1e-5);
        // periodic transport: one period later the field repeats
        let (mut a, mut b) = ([0.0; 4], [0.0; 4]);
        s.state([0.3, 0.6], 0.0, &mut a);
        s.state([0.3, 0.6], 1.0, &mut b);
        for v in 0..4 {
            assert!((a[v] - b[v]).abs() < 1e-12);
        }
    }

    #[test]
    fn sod_exact_solution_has_the_textbook_plateau() {
        let c = gas_cfg("sod");
        let s = Setup::new(&c, EquationSystem::euler(1.4).unwrap()).unwrap();
        let mut u = [0.0; 4];
        // contact at x = 0.5 + u* t, u* = 0.92745
        s.state([0.6, 0.5], 0.2, &mut u);
        let q = cons_to_prim(1.4, &u).unwrap();
        assert!((q.p - 0.30313).abs() < 1e-4 && (q.rho - 0.42632).abs() < 1e-4, "{q:?}");
        s.state([0.7, 0.5], 0.2, &mut u);
        assert!((cons_to_prim(1.4, &u).unwrap().rho - 0.26557).abs() < 1e-4);
    }

    #[test]
    fn scalar_sine_decays_with_diffusion() {
        let c = RunConfig::parse("diffusivity = 0.1\nadvection_velocity = 0 0").unwrap();
        let s = Setup::new(&c, EquationSystem::scalar([0.0, 0.0], 0.1).unwrap()).unwrap();
        let (mut a, mut b) = ([0.0], [0.0]);
        s.state([0.1, 0.2], 0.0, &mut a);
        s.state([0.1, 0.2], 1.0, &mut b);
        assert!((b[0] - a[0] * (-0.1 * 8.0 * PI * PI).exp()).abs() < 1e-15);
    }
}
