use clap::{Parser, Subcommand};
use dgflux::checkpoint::Checkpoint;
use dgflux::config::RunConfig;
use dgflux::dg::Settings;
use dgflux::driver::{build_mesh, Simulation};
use dgflux::export::{sample, Derived};
use dgflux::mesh::write_mesh;
use dgflux::time::calibrate_gamma1;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dgflux", version, about = "High-order DG solver for 2D conservation laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation; checkpoints and the analysis log go to `output_dir`.
    Run {
        config: PathBuf,
        /// Resume from this checkpoint instead of the initial condition.
        #[arg(long)]
        restart: Option<PathBuf>,
    },
    /// Build the mesh of a configuration, write it and print its statistics.
    Mesh {
        config: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Supersample a checkpoint to VTK and CSV.
    Export {
        checkpoint: PathBuf,
        #[arg(long, default_value_t = 6)]
        nvis: usize,
        /// Derived quantities: p, s, omega.
        #[arg(long, default_value = "")]
        vars: String,
        /// Output stem; defaults to the checkpoint path.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Print the configuration stored in a checkpoint, byte for byte.
    ConfigExtract { checkpoint: PathBuf },
    /// Measure the largest stable convective step factor for the configured N, nodes, form and scheme.
    CalibrateCfl { config: PathBuf },
}

fn read_config(path: &Path) -> dgflux::Result<(RunConfig, String)> {
    let text = std::fs::read_to_string(path)?;
    Ok((RunConfig::parse(&text)?, text))
}

fn run(cmd: Command) -> dgflux::Result<()> {
    match cmd {
        Command::Run { config, restart } => {
            let (cfg, text) = read_config(&config)?;
            let out = PathBuf::from(&cfg.output_dir);
            std::fs::create_dir_all(&out)?;
            let mut sim = match restart {
                Some(path) => {
                    let ckpt = Checkpoint::read(&path)?;
                    if ckpt.config_text != text {
                        log::warn!("configuration differs from the one stored in {}; using the stored one", path.display());
                    }
                    Simulation::from_checkpoint(&ckpt)?
                }
                None => Simulation::new(cfg, text)?,
            };
            let summary = sim.run(Some(&out))?;
            let last = summary.records.last().expect("at least the initial record");
            println!("finished: t = {} after {} steps", sim.t, sim.step);
            if let Some(l2) = &last.l2 {
                println!("L2 error: {l2:?}");
            }
            for p in &summary.checkpoints {
                println!("wrote {}", p.display());
            }
        }
        Command::Mesh { config, out } => {
            let (cfg, _) = read_config(&config)?;
            let mesh = build_mesh(&cfg)?;
            let path = out.unwrap_or_else(|| PathBuf::from(&cfg.output_dir).join(format!("{}.mesh", cfg.project)));
            write_mesh(&mesh, &path)?;
            println!("elements: {}", mesh.n_elems());
            println!("mortars: {}", mesh.n_mortars());
            println!("fingerprint: {:08x}", mesh.fingerprint());
            let h = mesh.scaled_jacobian_histogram();
            println!("scaled Jacobian histogram [<0, 0-0.1, 0.1-0.2, 0.2-0.3, >=0.3]: {h:?}");
            println!("wrote {}", path.display());
        }
        Command::Export { checkpoint, nvis, vars, out } => {
            let derived = Derived::parse_list(&vars)?;
            let ckpt = Checkpoint::read(&checkpoint)?;
            let mut sim = Simulation::from_checkpoint(&ckpt)?;
            let vis = sample(&mut sim.op, &sim.u, nvis, &derived)?;
            let stem = out.unwrap_or(checkpoint);
            vis.write(&stem, &format!("{} t={}", sim.config.project, sim.t))?;
            println!("wrote {} and {}", stem.with_extension("vtk").display(), stem.with_extension("csv").display());
        }
        Command::ConfigExtract { checkpoint } => {
            let ckpt = Checkpoint::read(&checkpoint)?;
            std::io::stdout().write_all(ckpt.config_text.as_bytes())?;
        }
        Command::CalibrateCfl { config } => {
            let (cfg, _) = read_config(&config)?;
            let settings = Settings { form: cfg.form, riemann: cfg.riemann, limiter: cfg.limiter };
            let c = calibrate_gamma1(cfg.degree, cfg.nodes, settings, &cfg.scheme)?;
            println!("N = {} nodes = {} scheme = {}", c.degree, cfg.nodes, cfg.scheme);
            println!("critical dt (h = 1/4, |a| = 1): {:.6e}", c.dt_critical);
            println!("spectral radius: {:.6e}", c.spectral_radius);
            println!("gamma1 = {:.6}", c.gamma1);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
