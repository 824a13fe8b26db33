//! Sod shock tube on an all-FV strip compared with the exact Riemann solution.
//!
//! `cargo run --release --example sod_shock_tube -- [minmod|central|zero] [out.csv]`
//! writes `x, rho, rho_exact` at the subcell centres at t = 0.2.

use dgflux::driver::Simulation;
use dgflux::equations::exact_riemann::ExactRiemann;
use dgflux::equations::Prim;
use std::fmt::Write;

fn main() -> dgflux::Result<()> {
    let mut args = std::env::args().skip(1);
    let limiter = args.next().unwrap_or_else(|| "minmod".into());
    let out = args.next().unwrap_or_else(|| "sod.csv".into());
    let mut sim = Simulation::from_text(&format!(
        "equation = euler\ninitial = sod\nnx = 64\nny = 1\ndomain = 0 1 0 0.015625\nperiodic_x = off\nN = 3\n\
         fv_initial = on\nlimiter = {limiter}\nt_end = 0.2"
    ))?;
    sim.run(None)?;
    let exact = ExactRiemann::new(1.4, Prim::new(1.0, 0.0, 0.0, 1.0), Prim::new(0.125, 0.0, 0.0, 0.1))?;
    let np = sim.op.np();
    let mut csv = String::from("x,rho,rho_exact\n");
    let mut l1 = 0.0;
    let mut count = 0;
    for e in 0..sim.op.n_elems() {
        for i in 0..np {
            let (a, b) = (sim.op.subcells.corner(e, i, 0), sim.op.subcells.corner(e, i + 1, 0));
            let x = 0.5 * (a[0] + b[0]);
            let rho = sim.u.node(e, i, 0)[0];
            let rho_exact = exact.sample((x - 0.5) / sim.t).rho;
            l1 += (rho - rho_exact).abs();
            count += 1;
            let _ = writeln!(csv, "{x},{rho},{rho_exact}");
        }
    }
    std::fs::write(&out, csv)?;
    println!("limiter {limiter}: {} steps, pointwise density L1 {:.3e}, wrote {out}", sim.step, l1 / count as f64);
    Ok(())
}
