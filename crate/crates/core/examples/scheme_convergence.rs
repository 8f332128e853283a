// The lattice as a finite-difference scheme: order of convergence under
// refinement and norm conservation of the rescaled fields.

use entwine::dirac::{scheme_convergence, u_norm_drift, Profile};

pub fn run(a: f64, horizon: f64) -> entwine::Result<()> {
    let smooth = scheme_convergence(a, horizon, &[8, 16, 32, 64], Profile::Gaussian { width_sites: 4.0 })?;
    println!("gaussian: successive differences {:?}", smooth.successive_differences);
    println!("gaussian: order {:?}, from finest {:?}", smooth.order, smooth.order_vs_finest);
    let point = scheme_convergence(a, horizon, &[8, 16, 32], Profile::Point)?;
    println!("point source: smooth={} order {:?}", point.smooth, point.order);
    let drift = u_norm_drift(a, horizon, 0.01, 0.5 * a / 0.01)?;
    println!("u norm drift at alpha=0.01: {:.3}%", 100.0 * drift);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run(1.0, 1.0) {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
