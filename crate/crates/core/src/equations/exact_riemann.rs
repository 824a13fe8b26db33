//! Exact solution of the 1D Euler Riemann problem (Toro, ch. 4).
//!
//! Used as a reference for shock-tube tests. Tangential velocity is carried
//! passively across the contact.

use super::Prim;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct ExactRiemann {
    gamma: f64,
    left: Prim,
    right: Prim,
    p_star: f64,
    u_star: f64,
}

impl ExactRiemann {
    /// `left`/`right` use `u` as the velocity normal to the initial discontinuity.
    pub fn new(gamma: f64, left: Prim, right: Prim) -> Result<Self> {
        for q in [&left, &right] {
            if !(q.rho > 0.0 && q.p > 0.0) {
                return Err(Error::non_physical(&[q.rho, q.u, q.v, q.p]));
            }
        }
        let (al, ar) = (left.sound_speed(gamma), right.sound_speed(gamma));
        if 2.0 * (al + ar) / (gamma - 1.0) <= right.u - left.u {
            return Err(Error::VacuumGenerated);
        }
        let mut s = Self { gamma, left, right, p_star: 0.0, u_star: 0.0 };
        let du = right.u - left.u;
        // two-rarefaction guess, robust for all non-vacuum data
        let z = (gamma - 1.0) / (2.0 * gamma);
        let guess = ((al + ar - 0.5 * (gamma - 1.0) * du) / (al / left.p.powf(z) + ar / right.p.powf(z))).powf(1.0 / z);
        let mut p = guess.max(1e-12);
        for _ in 0..100 {
            let (fl, dl) = s.pressure_function(p, &left);
            let (fr, dr) = s.pressure_function(p, &right);
            let step = (fl + fr + du) / (dl + dr);
            let mut next = p - step;
            if next <= 0.0 {
                next = 0.5 * p;
            }
            let change = 2.0 * (next - p).abs() / (next + p);
            p = next;
            if change < 1e-15 {
                break;
            }
        }
        let (fl, _) = s.pressure_function(p, &left);
        let (fr, _) = s.pressure_function(p, &right);
        s.p_star = p;
        s.u_star = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);
        Ok(s)
    }

    pub fn p_star(&self) -> f64 {
        self.p_star
    }

    pub fn u_star(&self) -> f64 {
        self.u_star
    }

    /// `f_L(p) + f_R(p) + u_R - u_L`; zero at the star pressure.
    pub fn pressure_residual(&self, p: f64) -> f64 {
        self.pressure_function(p, &self.left).0 + self.pressure_function(p, &self.right).0 + self.right.u - self.left.u
    }

    fn pressure_function(&self, p: f64, q: &Prim) -> (f64, f64) {
        let g = self.gamma;
        let a = q.sound_speed(g);
        if p > q.p {
            let ak = 2.0 / ((g + 1.0) * q.rho);
            let bk = (g - 1.0) / (g + 1.0) * q.p;
            let root = (ak / (p + bk)).sqrt();
            ((p - q.p) * root, root * (1.0 - 0.5 * (p - q.p) / (bk + p)))
        } else {
            let r = p / q.p;
            let e = (g - 1.0) / (2.0 * g);
            (2.0 * a / (g - 1.0) * (r.powf(e) - 1.0), r.powf(-(g + 1.0) / (2.0 * g)) / (q.rho * a))
        }
    }

    /// State at similarity coordinate `s = x / t`.
    pub fn sample(&self, s: f64) -> Prim {
        let g = self.gamma;
        let (ps, us) = (self.p_star, self.u_star);
        let gm = (g - 1.0) / (g + 1.0);
        if s <= us {
            let q = self.left;
            let a = q.sound_speed(g);
            if ps > q.p {
                let pr = ps / q.p;
                let shock = q.u - a * ((g + 1.0) / (2.0 * g) * pr + (g - 1.0) / (2.0 * g)).sqrt();
                if s <= shock {
                    q
                } else {
                    Prim::new(q.rho * (pr + gm) / (gm * pr + 1.0), us, q.v, ps)
                }
            } else {
                let a_star = a * (ps / q.p).powf((g - 1.0) / (2.0 * g));
                if s <= q.u - a {
                    q
                } else if s >= us - a_star {
                    Prim::new(q.rho * (ps / q.p).powf(1.0 / g), us, q.v, ps)
                } else {
                    let c = 2.0 / (g + 1.0) + gm / a * (q.u - s);
                    Prim::new(
                        q.rho * c.powf(2.0 / (g - 1.0)),
                        2.0 / (g + 1.0) * (a + 0.5 * (g - 1.0) * q.u + s),
                        q.v,
                        q.p * c.powf(2.0 * g / (g - 1.0)),
                    )
                }
            }
        } else {
            let q = self.right;
            let a = q.sound_speed(g);
            if ps > q.p {
                let pr = ps / q.p;
                let shock = q.u + a * ((g + 1.0) / (2.0 * g) * pr + (g - 1.0) / (2.0 * g)).sqrt();
                if s >= shock {
                    q
                } else {
                    Prim::new(q.rho * (pr + gm) / (gm * pr + 1.0), us, q.v, ps)
                }
            } else {
                let a_star = a * (ps / q.p).powf((g - 1.0) / (2.0 * g));
                if s >= q.u + a {
                    q
                } else if s <= us + a_star {
                    Prim::new(q.rho * (ps / q.p).powf(1.0 / g), us, q.v, ps)
                } else {
                    let c = 2.0 / (g + 1.0) - gm / a * (q.u - s);
                    Prim::new(
                        q.rho * c.powf(2.0 / (g - 1.0)),
                        2.0 / (g + 1.0) * (-a + 0.5 * (g - 1.0) * q.u + s),
                        q.v,
                        q.p * c.powf(2.0 * g / (g - 1.0)),
                    )
                }
            }
        }
    }
}
