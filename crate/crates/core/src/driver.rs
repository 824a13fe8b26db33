//! Run orchestration: building the discretization from a configuration,
//! the time loop with landing on analysis/output times, analysis, and
//! checkpoint/restart.

use crate::basis::{build_interpolation_matrix, build_nodes, NodalBasis, NodeFamily};
use crate::checkpoint::{build_id, Checkpoint, CODE_VERSION};
use crate::config::{BcKind, CurvingKind, EquationKind, MeshKind, RunConfig};
use crate::dg::{BoundaryCondition, Operator, Settings};
use crate::equations::{entropy, EquationSystem};
use crate::error::{Error, Location, Result};
use crate::field::{ElementField, ElementKind};
use crate::fv::IndicatorConfig;
use crate::mesh::{read_mesh, Mesh};
use crate::setups::Setup;
use crate::time::{compute_dt, rk_step, TimestepFactors};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub fn equation_system(cfg: &RunConfig) -> Result<EquationSystem> {
    match cfg.equation {
        EquationKind::Scalar => EquationSystem::scalar(cfg.advection_velocity, cfg.diffusivity),
        EquationKind::Euler => EquationSystem::euler(cfg.gamma),
        EquationKind::NavierStokes => EquationSystem::navier_stokes(cfg.gamma, cfg.mu, cfg.prandtl),
    }
}

/// The mesh described by `cfg`: generated (and optionally curved and
/// locally refined) or read from a mesh file.
pub fn build_mesh(cfg: &RunConfig) -> Result<Mesh> {
    let mut mesh = match cfg.mesh {
        MeshKind::Cartesian => Mesh::generate_cartesian(cfg.nx, cfg.ny, cfg.domain, ["x0", "x1", "y0", "y1"], cfg.periodic)?,
        MeshKind::File => read_mesh(Path::new(&cfg.mesh_file))?,
    };
    if cfg.curving == CurvingKind::Sine {
        let b = cfg.domain;
        let (lx, ly, a) = (b.x1 - b.x0, b.y1 - b.y0, cfg.curving_amplitude);
        let map = move |p: [f64; 2]| {
            let s = (2.0 * PI * (p[0] - b.x0) / lx).sin() * (2.0 * PI * (p[1] - b.y0) / ly).sin();
            [p[0] + a * lx * s, p[1] + a * ly * s]
        };
        mesh = mesh.apply_curving(&map, cfg.ngeo)?;
    }
    if let Some(b) = cfg.refine_box {
        mesh = mesh.build_mortar_interfaces(&|c| c[0] > b.x0 && c[0] < b.x1 && c[1] > b.y0 && c[1] < b.y1)?;
    }
    Ok(mesh)
}

/// One analysis sample.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRecord {
    pub step: u64,
    pub t: f64,
    pub dt: f64,
    /// Per-variable L2 / Linf errors against the exact solution, when one exists.
    pub l2: Option<Vec<f64>>,
    pub linf: Option<Vec<f64>>,
    pub integrals: Vec<f64>,
    pub entropy: f64,
    pub fv_fraction: f64,
}

impl AnalysisRecord {
    pub fn csv_header(nvar: usize) -> String {
        let mut s = String::from("step,t,dt,fv_fraction,entropy");
        for v in 0..nvar {
            let _ = write!(s, ",int{v},l2_{v},linf_{v}");
        }
        s
    }

    pub fn csv_row(&self) -> String {
        let mut s = format!("{},{:e},{:e},{},{:e}", self.step, self.t, self.dt, self.fv_fraction, self.entropy);
        for v in 0..self.integrals.len() {
            let l2 = self.l2.as_ref().map(|e| format!("{:e}", e[v])).unwrap_or_default();
            let li = self.linf.as_ref().map(|e| format!("{:e}", e[v])).unwrap_or_default();
            let _ = write!(s, ",{:e},{l2},{li}", self.integrals[v]);
        }
        s
    }
}

/// Next multiple of `period` strictly after `t`.
fn next_time(t: f64, period: f64) -> f64 {
    if period <= 0.0 {
        return f64::INFINITY;
    }
    let mut k = (t / period).floor() + 1.0;
    if k * period <= t {
        k += 1.0;
    }
    k * period
}

pub struct Simulation {
    pub config: RunConfig,
    /// The configuration text exactly as given; stored in checkpoints.
    pub config_text: String,
    pub setup: Arc<Setup>,
    pub op: Operator,
    pub u: ElementField,
    r: ElementField,
    ut: ElementField,
    pub t: f64,
    pub step: u64,
    pub last_dt: f64,
    pub factors: TimestepFactors,
    pub indicator: Option<IndicatorConfig>,
}

impl Simulation {
    pub fn from_text(text: &str) -> Result<Simulation> {
        let cfg = RunConfig::parse(text)?;
        Simulation::new(cfg, text.to_string())
    }

    pub fn new(config: RunConfig, config_text: String) -> Result<Simulation> {
        let eq = equation_system(&config)?;
        let setup = Arc::new(Setup::new(&config, eq)?);
        let mesh = build_mesh(&config)?;
        let mut bcs = Vec::with_capacity(mesh.bc_names.len());
        for tag in &mesh.bc_names {
            bcs.push(match config.bcs.get(tag).copied().unwrap_or(BcKind::Exact) {
                BcKind::Exact => {
                    let s = setup.clone();
                    BoundaryCondition::Dirichlet(Arc::new(move |x, t, out: &mut [f64]| s.state(x, t, out)))
                }
                BcKind::SlipWall => BoundaryCondition::SlipWall,
                BcKind::AdiabaticWall => BoundaryCondition::AdiabaticWall,
            });
        }
        let settings = Settings { form: config.form, riemann: config.riemann, limiter: config.limiter };
        let basis = NodalBasis::new(config.degree, config.nodes)?;
        let mut op = Operator::new(eq, mesh, basis, settings, bcs, config.partitions)?;
        if config.fv_initial {
            op.kinds.fill(ElementKind::Fv);
        }
        let s = setup.clone();
        let u = op.project(&move |x, t, out| s.state(x, t, out), 0.0);
        let indicator = if config.shock_capturing {
            let d = IndicatorConfig::with_defaults(config.indicator);
            Some(IndicatorConfig::new(config.indicator, config.indicator_upper.unwrap_or(d.upper), config.indicator_lower.unwrap_or(d.lower))?)
        } else {
            None
        };
        let factors = TimestepFactors {
            cfl: config.cfl,
            cfld: config.cfld,
            gamma1: config.gamma1,
            gamma1_fv: config.gamma1_fv,
            gamma2: config.gamma2,
        };
        factors.check()?;
        let (r, ut) = (u.same_shape(), u.same_shape());
        Ok(Simulation { config, config_text, setup, op, u, r, ut, t: 0.0, step: 0, last_dt: 0.0, factors, indicator })
    }

    /// Rebuilds a run from a checkpoint alone.
    pub fn from_checkpoint(ckpt: &Checkpoint) -> Result<Simulation> {
        let mut sim = Simulation::from_text(&ckpt.config_text)?;
        if sim.op.mesh.fingerprint() != ckpt.mesh_fingerprint {
            return Err(Error::Format("checkpoint was written for a different mesh".into()));
        }
        if ckpt.solution.nvar != sim.u.nvar || ckpt.solution.np != sim.u.np || ckpt.solution.n_elems != sim.u.n_elems {
            return Err(Error::Format("checkpoint solution does not match the configured discretization".into()));
        }
        sim.u.data.copy_from_slice(&ckpt.solution.data);
        sim.op.kinds.copy_from_slice(&ckpt.kinds);
        sim.t = ckpt.time;
        sim.step = ckpt.step;
        Ok(sim)
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            time: self.t,
            step: self.step,
            degree: self.config.degree,
            mesh_fingerprint: self.op.mesh.fingerprint(),
            kinds: self.op.kinds.clone(),
            solution: self.u.clone(),
            config_text: self.config_text.clone(),
            code_version: CODE_VERSION.into(),
            build: build_id(),
        }
    }

    /// One time step that does not pass `t_target`; returns the step size.
    pub fn step_towards(&mut self, t_target: f64) -> Result<f64> {
        if let Some(ind) = self.indicator {
            self.op.update_kinds(&mut self.u, &ind)?;
        }
        let mut dt = if self.config.dt > 0.0 { self.config.dt } else { compute_dt(&self.op, &self.u, &self.factors)?.dt };
        let land = self.t + dt * (1.0 + 1e-10) >= t_target;
        if land {
            dt = t_target - self.t;
        }
        let op = &mut self.op;
        rk_step(&self.config.scheme, &mut self.u, &mut self.r, &mut self.ut, self.t, dt, |u, t, out| op.time_derivative(u, t, out))?;
        self.t = if land { t_target } else { self.t + dt };
        self.step += 1;
        self.last_dt = dt;
        Ok(dt)
    }

    /// Nodal L2/Linf errors against the setup's exact solution; FV
    /// elements compare subcell means with the centre value.
    pub fn errors(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if !self.setup.is_exact() {
            return None;
        }
        let op = &self.op;
        let np = op.np();
        let n2 = np * np;
        let nv = op.eq.nvar();
        let w2 = op.subcells.width * op.subcells.width;
        let (mut l2, mut linf) = (vec![0.0; nv], vec![0.0f64; nv]);
        let mut exact = vec![0.0; nv];
        for e in 0..op.n_elems() {
            for k in 0..n2 {
                let (i, j) = (k % np, k / np);
                let (x, vol) = match op.kinds[e] {
                    ElementKind::Dg => (op.geo.x[e * n2 + k], op.basis.weights[i] * op.basis.weights[j] * op.geo.jac[e * n2 + k]),
                    ElementKind::Fv => {
                        let c = [op.subcells.corner(e, i, j), op.subcells.corner(e, i + 1, j), op.subcells.corner(e, i, j + 1), op.subcells.corner(e, i + 1, j + 1)];
                        let x = [0.25 * c.iter().map(|p| p[0]).sum::<f64>(), 0.25 * c.iter().map(|p| p[1]).sum::<f64>()];
                        (x, w2 * op.subcells.jfv[e * n2 + k])
                    }
                };
                self.setup.state(x, self.t, &mut exact);
                for v in 0..nv {
                    let d = self.u.elem(e)[k * nv + v] - exact[v];
                    l2[v] += vol * d * d;
                    linf[v] = linf[v].max(d.abs());
                }
            }
        }
        Some((l2.iter().map(|s| s.sqrt()).collect(), linf))
    }

    /// Total mathematical entropy `sum J w S(U)`.
    pub fn total_entropy(&self) -> Result<f64> {
        let op = &self.op;
        let np = op.np();
        let n2 = np * np;
        let w2 = op.subcells.width * op.subcells.width;
        let mut total = 0.0;
        for e in 0..op.n_elems() {
            for k in 0..n2 {
                let (i, j) = (k % np, k / np);
                let vol = match op.kinds[e] {
                    ElementKind::Dg => op.basis.weights[i] * op.basis.weights[j] * op.geo.jac[e * n2 + k],
                    ElementKind::Fv => w2 * op.subcells.jfv[e * n2 + k],
                };
                total += vol * entropy(&op.eq, self.u.node(e, i, j)).map_err(|err| err.at(Location::Node { element: e, i, j }))?;
            }
        }
        Ok(total)
    }

    pub fn analyze(&self) -> Result<AnalysisRecord> {
        let errs = self.errors();
        Ok(AnalysisRecord {
            step: self.step,
            t: self.t,
            dt: self.last_dt,
            l2: errs.as_ref().map(|e| e.0.clone()),
            linf: errs.map(|e| e.1),
            integrals: self.op.integrals(&self.u),
            entropy: self.total_entropy()?,
            fv_fraction: self.op.fv_fraction(),
        })
    }

    fn checkpoint_path(&self, dir: &Path) -> PathBuf {
        dir.join(format!("{}_{:015.9}.ckpt", self.config.project, self.t))
    }

    /// Runs to `t_end`. With `out`, checkpoints are written at every output
    /// time and at the end, and the analysis log goes to `<project>_analysis.csv`.
    /// On failure the current state is dumped to `<project>_crash.ckpt`.
    pub fn run(&mut self, out: Option<&Path>) -> Result<RunSummary> {
        let mut records = vec![self.analyze()?];
        log_record(&records[0]);
        let t_end = self.config.t_end;
        let mut next_analysis = next_time(self.t, self.config.analysis_dt);
        let mut next_output = next_time(self.t, self.config.output_dt);
        let mut written = Vec::new();
        while self.t < t_end {
            let target = next_analysis.min(next_output).min(t_end);
            if let Err(e) = self.step_towards(target) {
                if let Some(dir) = out {
                    let path = dir.join(format!("{}_crash.ckpt", self.config.project));
                    if self.checkpoint().write(&path).is_ok() {
                        log::error!("state at failure written to {}", path.display());
                    }
                }
                return Err(e);
            }
            if self.t >= next_analysis || self.t >= t_end {
                let rec = self.analyze()?;
                log_record(&rec);
                records.push(rec);
                next_analysis = next_time(self.t, self.config.analysis_dt);
            }
            if let Some(dir) = out {
                if self.t >= next_output || self.t >= t_end {
                    let path = self.checkpoint_path(dir);
                    self.checkpoint().write(&path)?;
                    written.push(path);
                }
            }
            if self.t >= next_output {
                next_output = next_time(self.t, self.config.output_dt);
            }
        }
        if let Some(dir) = out {
            let mut csv = AnalysisRecord::csv_header(self.op.eq.nvar());
            csv.push('\n');
            for r in &records {
                csv.push_str(&r.csv_row());
                csv.push('\n');
            }
            std::fs::write(dir.join(format!("{}_analysis.csv", self.config.project)), csv)?;
        }
        Ok(RunSummary { records, checkpoints: written })
    }
}

fn log_record(r: &AnalysisRecord) {
    let err = r.l2.as_ref().map(|e| format!(" L2 {:.4e}", e[0])).unwrap_or_default();
    log::info!("step {:7} t {:.6e} dt {:.3e}{err} FV {:.1}%", r.step, r.t, r.dt, 100.0 * r.fv_fraction);
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub records: Vec<AnalysisRecord>,
    pub checkpoints: Vec<PathBuf>,
}

/// L2 error of the DG solution against `exact`, integrated with
/// `m`-point Gauss quadrature per direction (solution interpolated,
/// Jacobian interpolated). FV elements are not supported.
pub fn l2_error_overintegrated(op: &Operator, u: &ElementField, exact: &dyn Fn([f64; 2], f64, &mut [f64]), t: f64, m: usize) -> Result<Vec<f64>> {
    if op.kinds.contains(&ElementKind::Fv) {
        return Err(Error::InvalidArgument("overintegration needs an all-DG state".into()));
    }
    let (pts, w) = build_nodes(m - 1, NodeFamily::LegendreGauss)?;
    let vm = build_interpolation_matrix(&op.basis.nodes, &pts)?;
    let np = op.np();
    let n2 = np * np;
    let nv = op.eq.nvar();
    let mut out = vec![0.0; nv];
    let mut ex = vec![0.0; nv];
    for e in 0..op.n_elems() {
        for b in 0..m {
            for a in 0..m {
                let mut val = vec![0.0; nv];
                let (mut x, mut jac) = ([0.0; 2], 0.0);
                for j in 0..np {
                    for i in 0..np {
                        let l = vm.get(a, i) * vm.get(b, j);
                        let k = e * n2 + j * np + i;
                        x[0] += l * op.geo.x[k][0];
                        x[1] += l * op.geo.x[k][1];
                        jac += l * op.geo.jac[k];
                        for v in 0..nv {
                            val[v] += l * u.node(e, i, j)[v];
                        }
                    }
                }
                exact(x, t, &mut ex);
                for v in 0..nv {
                    out[v] += w[a] * w[b] * jac * (val[v] - ex[v]).powi(2);
                }
            }
        }
    }
    Ok(out.iter().map(|s| s.sqrt()).collect())
}

#[cfg(test)]
mod tests;
