//! Convergence study for linear advection of a sine wave on periodic meshes.
//!
//! `cargo run --release --example advection_convergence -- [N] [diffusivity]`
//! prints the L2 error and observed order for h = 1/4 .. 1/32. A positive
//! diffusivity switches on BR1 lifting (advection-diffusion).

use dgflux::driver::{l2_error_overintegrated, Simulation};

fn main() -> dgflux::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|a| a.parse().expect("N must be an integer")).unwrap_or(3);
    let kappa: f64 = args.next().map(|a| a.parse().expect("diffusivity must be a number")).unwrap_or(0.0);
    println!("N = {n}, diffusivity = {kappa}");
    println!("{:>6} {:>14} {:>7}", "cells", "L2 error", "order");
    let mut prev: Option<f64> = None;
    for cells in [4, 8, 16, 32] {
        let mut sim = Simulation::from_text(&format!("nx = {cells}\nny = {cells}\nN = {n}\ndiffusivity = {kappa}\nt_end = 0.2\ncfl = 0.5"))?;
        sim.run(None)?;
        let setup = sim.setup.clone();
        let err = l2_error_overintegrated(&sim.op, &sim.u, &|x, t, o| setup.state(x, t, o), sim.t, n + 4)?[0];
        let order = prev.map(|p| format!("{:7.2}", (p / err).log2())).unwrap_or_default();
        println!("{cells:>6} {err:>14.6e} {order}");
        prev = Some(err);
    }
    Ok(())
}
