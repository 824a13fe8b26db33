//! Run configuration: `key = value` lines, `#` comments, case-insensitive keys.
//!
//! Every key has a default, so an empty file is a complete configuration.
//! Unknown and repeated keys are errors. Boundary conditions are given per
//! mesh tag as `bc_<tag> = exact | slipwall | adiabaticwall`.

use crate::basis::NodeFamily;
use crate::dg::VolumeForm;
use crate::equations::{RiemannSolver, TwoPointFlux};
use crate::error::{Error, Result};
use crate::fv::indicator::IndicatorKind;
use crate::fv::Limiter;
use crate::mesh::Bounds;
use crate::time::RkScheme;
use std::collections::BTreeMap;
use std::fmt::{self, Display, Write as _};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationKind {
    Scalar,
    Euler,
    NavierStokes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshKind {
    Cartesian,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvingKind {
    None,
    /// `x += a sin(pi y)`, `y += a sin(pi x)` scaled to the domain.
    Sine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    Constant,
    Sine,
    Vortex,
    Sod,
    ShockVortex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcKind {
    /// Dirichlet data from the exact (or initial) solution.
    Exact,
    SlipWall,
    AdiabaticWall,
}

macro_rules! named_enum {
    ($t:ty { $($v:ident => $name:literal $(| $alias:literal)*),+ $(,)? }) => {
        impl Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $(<$t>::$v => $name),+ })
            }
        }
        impl FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s.to_ascii_lowercase().as_str() {
                    $($name $(| $alias)* => Ok(<$t>::$v),)+
                    _ => Err(format!("unknown value '{s}' (expected one of: {})", [$($name),+].join(", "))),
                }
            }
        }
    };
}

named_enum!(EquationKind { Scalar => "scalar" | "advection", Euler => "euler", NavierStokes => "navierstokes" | "navier-stokes" | "ns" });
named_enum!(MeshKind { Cartesian => "cartesian", File => "file" });
named_enum!(CurvingKind { None => "none", Sine => "sine" });
named_enum!(InitialKind { Constant => "constant", Sine => "sine", Vortex => "vortex" | "isentropic-vortex", Sod => "sod", ShockVortex => "shock-vortex" | "shockvortex" });
named_enum!(BcKind { Exact => "exact" | "dirichlet", SlipWall => "slipwall" | "slip", AdiabaticWall => "adiabaticwall" | "wall" });

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub project: String,
    pub output_dir: String,

    pub equation: EquationKind,
    pub advection_velocity: [f64; 2],
    pub diffusivity: f64,
    pub gamma: f64,
    pub mu: f64,
    pub prandtl: f64,

    pub mesh: MeshKind,
    pub mesh_file: String,
    pub nx: usize,
    pub ny: usize,
    pub domain: Bounds,
    pub periodic: [bool; 2],
    pub curving: CurvingKind,
    pub curving_amplitude: f64,
    pub ngeo: usize,
    /// Elements whose centroid lies inside are split 2x2 (mortars on the box edge).
    pub refine_box: Option<Bounds>,
    pub partitions: usize,

    pub degree: usize,
    pub nodes: NodeFamily,
    pub form: VolumeForm,
    pub riemann: RiemannSolver,
    pub lifting: bool,

    pub shock_capturing: bool,
    pub indicator: IndicatorKind,
    pub indicator_upper: Option<f64>,
    pub indicator_lower: Option<f64>,
    pub limiter: Limiter,
    pub fv_initial: bool,

    pub scheme: RkScheme,
    pub cfl: f64,
    pub cfld: f64,
    pub gamma1: f64,
    pub gamma1_fv: f64,
    pub gamma2: f64,
    /// Fixed step; zero means CFL-controlled.
    pub dt: f64,
    pub t_end: f64,
    /// Zero: analyse only at the start and the end.
    pub analysis_dt: f64,
    /// Zero: checkpoint only at the end.
    pub output_dt: f64,

    pub initial: InitialKind,
    /// Scalar value, or `rho u v p` for gases.
    pub initial_state: Vec<f64>,
    pub vortex_strength: f64,
    pub vortex_radius: f64,
    pub shock_mach: f64,

    pub bcs: BTreeMap<String, BcKind>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            project: "run".into(),
            output_dir: ".".into(),
            equation: EquationKind::Scalar,
            advection_velocity: [1.0, 0.5],
            diffusivity: 0.0,
            gamma: 1.4,
            mu: 0.0,
            prandtl: 0.72,
            mesh: MeshKind::Cartesian,
            mesh_file: String::new(),
            nx: 8,
            ny: 8,
            domain: Bounds::unit(),
            periodic: [true, true],
            curving: CurvingKind::None,
            curving_amplitude: 0.05,
            ngeo: 1,
            refine_box: None,
            partitions: 1,
            degree: 3,
            nodes: NodeFamily::LegendreGaussLobatto,
            form: VolumeForm::Weak,
            riemann: RiemannSolver::Rusanov,
            lifting: true,
            shock_capturing: false,
            indicator: IndicatorKind::PerssonModal,
            indicator_upper: None,
            indicator_lower: None,
            limiter: Limiter::MinMod,
            fv_initial: false,
            scheme: crate::time::RK4,
            cfl: 0.9,
            cfld: 0.4,
            gamma1: 1.0,
            gamma1_fv: 1.0,
            gamma2: 1.0,
            dt: 0.0,
            t_end: 1.0,
            analysis_dt: 0.0,
            output_dt: 0.0,
            initial: InitialKind::Sine,
            initial_state: vec![],
            vortex_strength: 5.0,
            vortex_radius: 0.1,
            shock_mach: 1.5,
            bcs: BTreeMap::new(),
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config { line, message: message.into() }
}

fn value<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T>
where
    T::Err: Display,
{
    v.parse::<T>().map_err(|e| err(line, format!("{key}: {e}")))
}

fn floats(line: usize, key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).map(|s| value::<f64>(line, key, s)).collect()
}

fn fixed<const K: usize>(line: usize, key: &str, v: &str) -> Result<[f64; K]> {
    let xs = floats(line, key, v)?;
    xs.try_into().map_err(|xs: Vec<f64>| err(line, format!("{key}: expected {K} numbers, got {}", xs.len())))
}

fn boolean(line: usize, key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" | "t" => Ok(true),
        "false" | "off" | "no" | "0" | "f" => Ok(false),
        _ => Err(err(line, format!("{key}: expected a boolean, got '{v}'"))),
    }
}

fn bounds(b: [f64; 4]) -> Bounds {
    Bounds::new(b[0], b[1], b[2], b[3])
}

fn write_bounds(b: &Bounds) -> String {
    format!("{} {} {} {}", b.x0, b.x1, b.y0, b.y1)
}

impl RunConfig {
    /// Parses and validates a configuration.
    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut c = RunConfig::default();
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        let mut split_flux: Option<TwoPointFlux> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, v)) = body.split_once('=') else {
                return Err(err(line, format!("expected 'key = value', got '{body}'")));
            };
            let key = key.trim().to_ascii_lowercase();
            let v = v.trim();
            if key.is_empty() {
                return Err(err(line, "missing key"));
            }
            if let Some(first) = seen.insert(key.clone(), line) {
                return Err(err(line, format!("duplicate key '{key}' (first set on line {first})")));
            }
            match key.as_str() {
                "project" => c.project = v.to_string(),
                "output_dir" => c.output_dir = v.to_string(),
                "equation" => c.equation = value(line, &key, v)?,
                "advection_velocity" => c.advection_velocity = fixed(line, &key, v)?,
                "diffusivity" => c.diffusivity = value(line, &key, v)?,
                "gamma" => c.gamma = value(line, &key, v)?,
                "mu" => c.mu = value(line, &key, v)?,
                "prandtl" => c.prandtl = value(line, &key, v)?,
                "mesh" => c.mesh = value(line, &key, v)?,
                "mesh_file" => c.mesh_file = v.to_string(),
                "nx" => c.nx = value(line, &key, v)?,
                "ny" => c.ny = value(line, &key, v)?,
                "domain" => c.domain = bounds(fixed(line, &key, v)?),
                "periodic_x" => c.periodic[0] = boolean(line, &key, v)?,
                "periodic_y" => c.periodic[1] = boolean(line, &key, v)?,
                "curving" => c.curving = value(line, &key, v)?,
                "curving_amplitude" => c.curving_amplitude = value(line, &key, v)?,
                "ngeo" => c.ngeo = value(line, &key, v)?,
                "refine_box" => {
                    c.refine_box = match v.to_ascii_lowercase().as_str() {
                        "" | "none" => None,
                        _ => Some(bounds(fixed(line, &key, v)?)),
                    }
                }
                "partitions" => c.partitions = value(line, &key, v)?,
                "n" | "degree" => c.degree = value(line, &key, v)?,
                "nodes" => c.nodes = value(line, &key, v)?,
                "form" => c.form = value(line, &key, v)?,
                "split_flux" => split_flux = Some(value(line, &key, v)?),
                "riemann" => c.riemann = value(line, &key, v)?,
                "lifting" => c.lifting = boolean(line, &key, v)?,
                "shock_capturing" => c.shock_capturing = boolean(line, &key, v)?,
                "indicator" => c.indicator = value(line, &key, v)?,
                "indicator_upper" => c.indicator_upper = Some(value(line, &key, v)?),
                "indicator_lower" => c.indicator_lower = Some(value(line, &key, v)?),
                "limiter" => c.limiter = value(line, &key, v)?,
                "fv_initial" => c.fv_initial = boolean(line, &key, v)?,
                "scheme" => c.scheme = value(line, &key, v)?,
                "cfl" => c.cfl = value(line, &key, v)?,
                "cfld" => c.cfld = value(line, &key, v)?,
                "gamma1" => c.gamma1 = value(line, &key, v)?,
                "gamma1_fv" => c.gamma1_fv = value(line, &key, v)?,
                "gamma2" => c.gamma2 = value(line, &key, v)?,
                "dt" => c.dt = value(line, &key, v)?,
                "t_end" => c.t_end = value(line, &key, v)?,
                "analysis_dt" => c.analysis_dt = value(line, &key, v)?,
                "output_dt" => c.output_dt = value(line, &key, v)?,
                "initial" => c.initial = value(line, &key, v)?,
                "initial_state" => c.initial_state = floats(line, &key, v)?,
                "vortex_strength" => c.vortex_strength = value(line, &key, v)?,
                "vortex_radius" => c.vortex_radius = value(line, &key, v)?,
                "shock_mach" => c.shock_mach = value(line, &key, v)?,
                other => match other.strip_prefix("bc_") {
                    Some(tag) if !tag.is_empty() => {
                        c.bcs.insert(tag.to_string(), value(line, &key, v)?);
                    }
                    _ => return Err(err(line, format!("unknown key '{other}'"))),
                },
            }
        }
        if let Some(f) = split_flux {
            match c.form {
                VolumeForm::Split(_) => c.form = VolumeForm::Split(f),
                _ => return Err(err(seen["split_flux"], "split_flux is only used with form = split")),
            }
        }
        c.validate(&seen)?;
        Ok(c)
    }

    fn validate(&self, seen: &BTreeMap<String, usize>) -> Result<()> {
        let at = |keys: &[&str]| keys.iter().filter_map(|k| seen.get(*k).copied()).max().unwrap_or(0);
        if matches!(self.form, VolumeForm::Split(_)) && self.nodes == NodeFamily::LegendreGauss {
            return Err(err(
                at(&["form", "nodes"]),
                "form = split needs the summation-by-parts property, which only LGL nodes provide; set nodes = LGL",
            ));
        }
        if self.degree == 0 || self.degree > 15 {
            return Err(err(at(&["n", "degree"]), format!("N must be in 1..=15, got {}", self.degree)));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(err(at(&["nx", "ny"]), "nx and ny must be positive"));
        }
        if self.ngeo == 0 {
            return Err(err(at(&["ngeo"]), "ngeo must be positive"));
        }
        if self.partitions == 0 {
            return Err(err(at(&["partitions"]), "partitions must be positive"));
        }
        if !(self.domain.x1 > self.domain.x0 && self.domain.y1 > self.domain.y0) {
            return Err(err(at(&["domain"]), "domain must be 'x0 x1 y0 y1' with x1 > x0 and y1 > y0"));
        }
        if !(self.t_end > 0.0) {
            return Err(err(at(&["t_end"]), "t_end must be positive"));
        }
        for (k, v) in [("dt", self.dt), ("analysis_dt", self.analysis_dt), ("output_dt", self.output_dt)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(err(at(&[k]), format!("{k} must be non-negative")));
            }
        }
        let parabolic = match self.equation {
            EquationKind::Scalar => self.diffusivity != 0.0,
            EquationKind::NavierStokes => true,
            EquationKind::Euler => false,
        };
        if parabolic && !self.lifting {
            return Err(err(at(&["lifting", "diffusivity", "equation"]), "viscous terms need lifting = on"));
        }
        if parabolic && (self.shock_capturing || self.fv_initial) {
            return Err(err(
                at(&["shock_capturing", "fv_initial", "equation", "diffusivity"]),
                "FV subcells are not combined with viscous terms",
            ));
        }
        if self.mesh == MeshKind::File && self.mesh_file.is_empty() {
            return Err(err(at(&["mesh"]), "mesh = file needs mesh_file"));
        }
        if let (Some(u), Some(l)) = (self.indicator_upper, self.indicator_lower) {
            if !(u > l) {
                return Err(err(at(&["indicator_upper", "indicator_lower"]), "indicator_upper must exceed indicator_lower"));
            }
        }
        let gas = self.equation != EquationKind::Scalar;
        if matches!(self.initial, InitialKind::Vortex | InitialKind::Sod | InitialKind::ShockVortex) && !gas {
            return Err(err(at(&["initial", "equation"]), format!("initial = {} needs a gas (euler or navierstokes)", self.initial)));
        }
        if self.initial == InitialKind::Constant {
            let want = if gas { 4 } else { 1 };
            if self.initial_state.len() != want {
                return Err(err(at(&["initial_state", "initial"]), format!("initial = constant needs initial_state with {want} values")));
            }
        }
        Ok(())
    }

    /// Canonical text form; `parse(to_text(c)) == c`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("project", self.project.clone());
        kv("output_dir", self.output_dir.clone());
        kv("equation", self.equation.to_string());
        kv("advection_velocity", format!("{} {}", self.advection_velocity[0], self.advection_velocity[1]));
        kv("diffusivity", self.diffusivity.to_string());
        kv("gamma", self.gamma.to_string());
        kv("mu", self.mu.to_string());
        kv("prandtl", self.prandtl.to_string());
        kv("mesh", self.mesh.to_string());
        if self.mesh == MeshKind::File {
            kv("mesh_file", self.mesh_file.clone());
        }
        kv("nx", self.nx.to_string());
        kv("ny", self.ny.to_string());
        kv("domain", write_bounds(&self.domain));
        kv("periodic_x", self.periodic[0].to_string());
        kv("periodic_y", self.periodic[1].to_string());
        kv("curving", self.curving.to_string());
        kv("curving_amplitude", self.curving_amplitude.to_string());
        kv("ngeo", self.ngeo.to_string());
        kv("refine_box", self.refine_box.as_ref().map(write_bounds).unwrap_or_else(|| "none".into()));
        kv("partitions", self.partitions.to_string());
        kv("N", self.degree.to_string());
        kv("nodes", self.nodes.to_string());
        kv("form", self.form.to_string());
        if let VolumeForm::Split(f) = self.form {
            kv("split_flux", f.to_string());
        }
        kv("riemann", self.riemann.to_string());
        kv("lifting", self.lifting.to_string());
        kv("shock_capturing", self.shock_capturing.to_string());
        kv("indicator", self.indicator.to_string());
        if let Some(u) = self.indicator_upper {
            kv("indicator_upper", u.to_string());
        }
        if let Some(l) = self.indicator_lower {
            kv("indicator_lower", l.to_string());
        }
        kv("limiter", self.limiter.to_string());
        kv("fv_initial", self.fv_initial.to_string());
        kv("scheme", self.scheme.to_string());
        kv("cfl", self.cfl.to_string());
        kv("cfld", self.cfld.to_string());
        kv("gamma1", self.gamma1.to_string());
        kv("gamma1_fv", self.gamma1_fv.to_string());
        kv("gamma2", self.gamma2.to_string());
        kv("dt", self.dt.to_string());
        kv("t_end", self.t_end.to_string());
        kv("analysis_dt", self.analysis_dt.to_string());
        kv("output_dt", self.output_dt.to_string());
        kv("initial", self.initial.to_string());
        if !self.initial_state.is_empty() {
            kv("initial_state", self.initial_state.iter().map(f64::to_string).collect::<Vec<_>>().join(" "));
        }
        kv("vortex_strength", self.vortex_strength.to_string());
        kv("vortex_radius", self.vortex_radius.to_string());
        kv("shock_mach", self.shock_mach.to_string());
        for (tag, bc) in &self.bcs {
            kv(&format!("bc_{tag}"), bc.to_string());
        }
        s
    }
}
