//! Non-conforming mesh with 2:1 mortar interfaces.
//!
//! `cargo run --release --example mortar_mesh -- [out.mesh]`
//! refines a box of a curved periodic mesh, prints mesh statistics, checks
//! free-stream preservation and conservation across the mortars and writes
//! the mesh file.

use dgflux::basis::{NodalBasis, NodeFamily};
use dgflux::config::RunConfig;
use dgflux::dg::{Operator, Settings};
use dgflux::driver::build_mesh;
use dgflux::equations::{prim_to_cons, EquationSystem, Prim, RiemannSolver};
use dgflux::mesh::write_mesh;

fn main() -> dgflux::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "mortar.mesh".into());
    let cfg = RunConfig::parse("equation = euler\nnx = 6\nny = 6\ncurving = sine\nngeo = 3\nrefine_box = 0.2 0.7 0.3 0.8")?;
    let mesh = build_mesh(&cfg)?;
    println!("{} elements, {} mortars, scaled Jacobian histogram {:?}", mesh.n_elems(), mesh.n_mortars(), mesh.scaled_jacobian_histogram());
    write_mesh(&mesh, std::path::Path::new(&out))?;
    println!("wrote {out}");

    let eq = EquationSystem::euler(1.4)?;
    let settings = Settings { riemann: RiemannSolver::Roe, ..Default::default() };
    let mut op = Operator::new(eq, mesh, NodalBasis::new(4, NodeFamily::LegendreGaussLobatto)?, settings, vec![], 1)?;
    let c = prim_to_cons(1.4, Prim::new(1.0, 0.4, -0.3, 1.0))?;
    let u = op.project(&|_, _, s| s.copy_from_slice(&c), 0.0);
    let mut ut = op.new_field();
    op.time_derivative(&u, 0.0, &mut ut)?;
    println!("free stream: max |U_t| = {:.2e}", ut.max_abs());

    let wave = |x: [f64; 2], _t: f64, s: &mut [f64]| {
        let rho = 1.0 + 0.2 * (2.0 * std::f64::consts::PI * (x[0] + x[1])).sin();
        s.copy_from_slice(&prim_to_cons(1.4, Prim::new(rho, 0.4, -0.3, 1.0)).expect("positive state"));
    };
    let u = op.project(&wave, 0.0);
    op.time_derivative(&u, 0.0, &mut ut)?;
    println!("d/dt of the conserved integrals: {:?}", op.integrals(&ut));
    Ok(())
}
