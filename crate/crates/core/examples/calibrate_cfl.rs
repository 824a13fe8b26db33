//! Time-step correction factors from the linear stability limit.
//!
//! `cargo run --release --example calibrate_cfl` prints gamma1(N) of both
//! node families for the weak form with the four-stage scheme and for the
//! three-stage scheme with LGL nodes.

use dgflux::basis::NodeFamily;
use dgflux::dg::Settings;
use dgflux::time::{calibrate_gamma1, RK3, RK4};

fn main() -> dgflux::Result<()> {
    println!("{:>3} {:>10} {:>10} {:>10}", "N", "LGL rk4", "LG rk4", "LGL rk3");
    for n in 1..=8 {
        let a = calibrate_gamma1(n, NodeFamily::LegendreGaussLobatto, Settings::default(), &RK4)?;
        let b = calibrate_gamma1(n, NodeFamily::LegendreGauss, Settings::default(), &RK4)?;
        let c = calibrate_gamma1(n, NodeFamily::LegendreGaussLobatto, Settings::default(), &RK3)?;
        println!("{n:>3} {:>10.4} {:>10.4} {:>10.4}", a.gamma1, b.gamma1, c.gamma1);
    }
    Ok(())
}
