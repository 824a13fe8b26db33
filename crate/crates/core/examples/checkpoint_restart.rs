//! Checkpoint, restart and export.
//!
//! `cargo run --release --example checkpoint_restart -- [dir]`
//! runs a vortex to t = 0.1 with an intermediate checkpoint, restarts from it,
//! checks that the final states agree bit for bit, recovers the configuration
//! from the checkpoint and exports the result with derived quantities.

use dgflux::checkpoint::Checkpoint;
use dgflux::driver::Simulation;
use dgflux::export::{sample, Derived};
use std::path::PathBuf;

fn main() -> dgflux::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "restart_out".into()));
    std::fs::create_dir_all(&dir)?;
    let text = "project = vortex\nequation = euler\ninitial = vortex\nvortex_radius = 0.2\nnx = 6\nny = 6\ncurving = sine\nngeo = 3\n\
                N = 4\nt_end = 0.1\noutput_dt = 0.05\nanalysis_dt = 0.025";
    let mut full = Simulation::from_text(text)?;
    let summary = full.run(Some(&dir))?;
    for p in &summary.checkpoints {
        println!("wrote {}", p.display());
    }

    let mid = Checkpoint::read(&summary.checkpoints[0])?;
    let mut resumed = Simulation::from_checkpoint(&mid)?;
    println!("restarting from t = {}", resumed.t);
    resumed.run(None)?;
    println!("restart reproduces the uninterrupted run: {}", resumed.u.data == full.u.data);

    let last = Checkpoint::read(summary.checkpoints.last().expect("final checkpoint"))?;
    println!("stored configuration matches: {}", last.config_text == text);

    let vis = sample(&mut full.op, &full.u, 6, &[Derived::Pressure, Derived::Entropy, Derived::Vorticity])?;
    let stem = dir.join("vortex_final");
    vis.write(&stem, "vortex t=0.1")?;
    println!("exported {} points to {}", vis.points.len(), stem.with_extension("vtk").display());
    Ok(())
}
