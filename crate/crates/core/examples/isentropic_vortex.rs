//! Isentropic Euler vortex convected through a periodic box.
//!
//! `cargo run --release --example isentropic_vortex -- [N] [LG|LGL] [weak|strong|split]`
//! runs h = 1/4, 1/8, 1/16 on [-4,4]^2 and reports density errors and orders.
//! The split form uses the entropy-conserving two-point flux and needs LGL.

use dgflux::driver::{l2_error_overintegrated, Simulation};

fn main() -> dgflux::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|a| a.parse().expect("N must be an integer")).unwrap_or(3);
    let nodes = args.next().unwrap_or_else(|| "LG".into());
    let form = args.next().unwrap_or_else(|| "weak".into());
    let split = if form == "split" { "split_flux = ec\n" } else { "" };
    println!("N = {n}, nodes = {nodes}, form = {form}");
    let mut prev: Option<f64> = None;
    for cells in [32, 64, 128] {
        let text = format!(
            "equation = euler\ninitial = vortex\nvortex_radius = 0.5\ndomain = -4 4 -4 4\nnx = {cells}\nny = {cells}\n\
             N = {n}\nnodes = {nodes}\nform = {form}\n{split}riemann = roe\nt_end = 0.1"
        );
        let mut sim = Simulation::from_text(&text)?;
        let start = std::time::Instant::now();
        sim.run(None)?;
        let setup = sim.setup.clone();
        let err = l2_error_overintegrated(&sim.op, &sim.u, &|x, t, o| setup.state(x, t, o), sim.t, n + 4)?[0];
        let order = prev.map(|p| format!("order {:.2}", (p / err).log2())).unwrap_or_default();
        println!("h = 1/{:<3} steps {:>4}  rho L2 {err:.4e}  {order}  ({:.1} s)", cells / 8, sim.step, start.elapsed().as_secs_f64());
        prev = Some(err);
    }
    Ok(())
}
