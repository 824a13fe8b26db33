//! Low-storage explicit Runge-Kutta schemes and stable time-step estimates.

use crate::basis::{NodalBasis, NodeFamily};
use crate::dg::{Operator, Settings};
use crate::equations::EquationSystem;
use crate::error::{Error, Location, Result};
use crate::field::{ElementField, ElementKind};
use crate::mesh::{Bounds, Mesh};
use nalgebra::{Complex, DMatrix};
use std::fmt;
use std::str::FromStr;

/// Williamson two-register scheme: per stage `R <- A_i R + dt L(U)`, `U <- U + B_i R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RkScheme {
    pub name: &'static str,
    pub a: &'static [f64],
    pub b: &'static [f64],
    pub c: &'static [f64],
    pub order: usize,
}

/// Williamson's three-stage, third-order scheme.
pub const RK3: RkScheme = RkScheme {
    name: "rk3",
    a: &[0.0, -5.0 / 9.0, -153.0 / 128.0],
    b: &[1.0 / 3.0, 15.0 / 16.0, 8.0 / 15.0],
    c: &[0.0, 1.0 / 3.0, 3.0 / 4.0],
    order: 3,
};

/// Carpenter and Kennedy's five-stage, fourth-order scheme (solution 3).
pub const RK4: RkScheme = RkScheme {
    name: "rk4",
    a: &[
        0.0,
        -567301805773.0 / 1357537059087.0,
        -2404267990393.0 / 2016746695238.0,
        -3550918686646.0 / 2091501179385.0,
        -1275806237668.0 / 842570457699.0,
    ],
    b: &[
        1432997174477.0 / 9575080441755.0,
        5161836677717.0 / 13612068292357.0,
        1720146321549.0 / 2090206949498.0,
        3134564353537.0 / 4481467310338.0,
        2277821191437.0 / 14882151754819.0,
    ],
    c: &[
        0.0,
        1432997174477.0 / 9575080441755.0,
        2526269341429.0 / 6820363962896.0,
        2006345519317.0 / 3224310063776.0,
        2802321613138.0 / 2924317926251.0,
    ],
    order: 4,
};

impl RkScheme {
    pub fn stages(&self) -> usize {
        self.a.len()
    }

    /// Amplification factor for `y' = lambda y` with `z = lambda dt`.
    pub fn amplification(&self, z: Complex<f64>) -> Complex<f64> {
        let mut y = Complex::new(1.0, 0.0);
        let mut r = Complex::new(0.0, 0.0);
        for i in 0..self.stages() {
            r = r * self.a[i] + z * y;
            y += r * self.b[i];
        }
        y
    }
}

impl fmt::Display for RkScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

impl FromStr for RkScheme {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "rk3" | "williamson" | "rk3-williamson" => Ok(RK3),
            "rk4" | "carpenter-kennedy" | "rk4-ck" => Ok(RK4),
            _ => Err(format!("unknown time integrator '{s}' (rk3, rk4)")),
        }
    }
}

/// Advances `u` from `t` to `t + dt`. `r` is the second register and `ut`
/// the stage derivative; their contents on entry are ignored.
pub fn rk_step<F>(
    scheme: &RkScheme,
    u: &mut ElementField,
    r: &mut ElementField,
    ut: &mut ElementField,
    t: f64,
    dt: f64,
    mut rhs: F,
) -> Result<()>
where
    F: FnMut(&ElementField, f64, &mut ElementField) -> Result<()>,
{
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    for i in 0..scheme.stages() {
        rhs(u, t + scheme.c[i] * dt, ut).map_err(|e| Error::Stage { stage: i + 1, source: Box::new(e) })?;
        let (a, b) = (scheme.a[i], scheme.b[i]);
        if i == 0 {
            for (rv, &d) in r.data.iter_mut().zip(&ut.data) {
                *rv = dt * d;
            }
        } else {
            for (rv, &d) in r.data.iter_mut().zip(&ut.data) {
                *rv = a * *rv + dt * d;
            }
        }
        for (uv, &rv) in u.data.iter_mut().zip(&r.data) {
            *uv += b * rv;
        }
    }
    Ok(())
}

/// CFL numbers and per-degree correction factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimestepFactors {
    pub cfl: f64,
    pub cfld: f64,
    /// Convective correction for the run's degree N.
    pub gamma1: f64,
    /// Convective correction for FV subcells (degree 0).
    pub gamma1_fv: f64,
    /// Diffusive correction for the run's degree N.
    pub gamma2: f64,
}

impl Default for TimestepFactors {
    fn default() -> Self {
        Self { cfl: 0.9, cfld: 0.4, gamma1: 1.0, gamma1_fv: 1.0, gamma2: 1.0 }
    }
}

impl TimestepFactors {
    pub fn check(&self) -> Result<()> {
        for (name, v) in [("CFL", self.cfl), ("CFLd", self.cfld), ("gamma1", self.gamma1), ("gamma1_fv", self.gamma1_fv), ("gamma2", self.gamma2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtLimit {
    Convective,
    Viscous,
    Subcell,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtEstimate {
    pub dt: f64,
    pub element: usize,
    pub limit: DtLimit,
}

pub const DT_UNDERFLOW: f64 = 1e-14;

/// `2 min J / |Ja^i|` over the nodes of element `e`, for both reference directions.
pub fn directional_sizes(op: &Operator, e: usize) -> [f64; 2] {
    let n2 = op.np() * op.np();
    let mut dx = [f64::INFINITY; 2];
    for k in e * n2..(e + 1) * n2 {
        for (d, size) in dx.iter_mut().enumerate() {
            let m = op.geo.ja[k][d];
            *size = size.min(2.0 * op.geo.jac[k] / m[0].hypot(m[1]));
        }
    }
    dx
}

/// Convective and viscous bounds of element `e`; the smaller one and what limited it.
pub fn element_timestep(op: &Operator, u: &ElementField, factors: &TimestepFactors, e: usize) -> Result<(f64, DtLimit)> {
    let np = op.np();
    let n2 = np * np;
    let n = op.basis.degree as f64;
    let dx = directional_sizes(op, e);
    let mut lam = [0.0f64; 2];
    let mut lam_v = 0.0f64;
    for k in 0..n2 {
        let state = u.node(e, k % np, k / np);
        for (d, l) in lam.iter_mut().enumerate() {
            let m = op.geo.ja[e * n2 + k][d];
            let norm = m[0].hypot(m[1]);
            let s = op
                .eq
                .max_wavespeed(state, [m[0] / norm, m[1] / norm])
                .map_err(|err| err.at(Location::Node { element: e, i: k % np, j: k / np }))?;
            *l = l.max(s);
        }
        lam_v = lam_v.max(op.eq.viscous_scale(state)?);
    }
    let mut best = (f64::INFINITY, DtLimit::Convective);
    for d in 0..2 {
        if lam[d] > 0.0 {
            let (dt, limit) = match op.kinds[e] {
                ElementKind::Dg => (factors.cfl * factors.gamma1 * dx[d] / (lam[d] * (2.0 * n + 1.0)), DtLimit::Convective),
                ElementKind::Fv => (factors.cfl * factors.gamma1_fv * (dx[d] / (n + 1.0)) / lam[d], DtLimit::Subcell),
            };
            if dt < best.0 {
                best = (dt, limit);
            }
        }
        if lam_v > 0.0 {
            let dt = factors.cfld * factors.gamma2 * dx[d] * dx[d] / (lam_v * (2.0 * n + 1.0));
            if dt < best.0 {
                best = (dt, DtLimit::Viscous);
            }
        }
    }
    Ok(best)
}

/// Smallest candidate; NaN-free input assumed.
pub fn global_min_reduce(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Stable global time step: minimum over partitions, elements, directions and bounds.
pub fn compute_dt(op: &Operator, u: &ElementField, factors: &TimestepFactors) -> Result<DtEstimate> {
    factors.check()?;
    let mut per_part = Vec::with_capacity(op.part.count());
    for r in &op.part.ranges {
        let mut best = DtEstimate { dt: f64::INFINITY, element: r.start, limit: DtLimit::Convective };
        for e in r.clone() {
            let (dt, limit) = element_timestep(op, u, factors, e)?;
            if dt < best.dt {
                best = DtEstimate { dt, element: e, limit };
            }
        }
        per_part.push(best);
    }
    let dts: Vec<f64> = per_part.iter().map(|p| p.dt).collect();
    let dt = global_min_reduce(&dts);
    let best = *per_part.iter().find(|p| p.dt == dt).expect("at least one partition");
    if !(dt >= DT_UNDERFLOW) || !dt.is_finite() {
        return Err(Error::TimestepUnderflow { dt, element: best.element });
    }
    Ok(best)
}

/// Result of [`calibrate_gamma1`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub degree: usize,
    pub dt_critical: f64,
    /// Largest `gamma1` for which `CFL = 1` is linearly stable.
    pub gamma1: f64,
    pub spectral_radius: f64,
}

/// Bisects the linear stability limit of `scheme` on periodic 1D advection
/// (`a = 1`, four elements of width 1/4) using the spectrum of the
/// assembled DG operator, and expresses it as a correction factor.
pub fn calibrate_gamma1(degree: usize, family: NodeFamily, settings: Settings, scheme: &RkScheme) -> Result<Calibration> {
    let cells = 4;
    let h = 1.0 / cells as f64;
    let mesh = Mesh::generate_cartesian(cells, 1, Bounds::new(0.0, 1.0, 0.0, h), ["x0", "x1", "y0", "y1"], [true, true])?;
    let eq = EquationSystem::scalar([1.0, 0.0], 0.0)?;
    let mut op = Operator::new(eq, mesh, NodalBasis::new(degree, family)?, settings, vec![], 1)?;
    let mut u = op.new_field();
    let mut ut = op.new_field();
    // with a = (1, 0) the node rows j are decoupled and identical, so the
    // spectrum is that of the j = 0 rows; the full matrix would repeat every
    // eigenvalue N+1 times and stall the Schur iteration
    let np = op.np();
    let dofs: Vec<usize> = (0..cells).flat_map(|e| (0..np).map(move |i| (e, i))).map(|(e, i)| u.offset(e, i, 0)).collect();
    let ndof = dofs.len();
    let mut l = DMatrix::<f64>::zeros(ndof, ndof);
    for (col, &c) in dofs.iter().enumerate() {
        u.data.fill(0.0);
        u.data[c] = 1.0;
        op.time_derivative(&u, 0.0, &mut ut)?;
        for (row, &r) in dofs.iter().enumerate() {
            l[(row, col)] = ut.data[r];
        }
    }
    let eig = nalgebra::linalg::Schur::try_new(l, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::InvalidArgument(format!("eigenvalue iteration did not converge for N = {degree}")))?
        .complex_eigenvalues();
    let radius = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let stable = |dt: f64| eig.iter().all(|&z| scheme.amplification(z * dt).norm() <= 1.0 + 1e-9);
    let (mut lo, mut hi) = (0.0, 1.0 / radius);
    while stable(hi) {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if stable(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let dx = directional_sizes(&op, 0)[0];
    let gamma1 = lo * (2.0 * degree as f64 + 1.0) / dx;
    Ok(Calibration { degree, dt_critical: lo, gamma1, spectral_radius: radius })
}

#[cfg(test)]
mod tests;
