// Monte Carlo estimate of the propagator against the exact fields.
//
// Prints the relative distance of phi3 at the last slice as the ensemble
// grows, for both decision modes.

use entwine::analysis::relative_distance;
use entwine::evolver::evolve;
use entwine::lattice::normalize;
use entwine::sampler::EnsembleSampler;
use entwine::{Mode, SimConfig};

pub fn run(t_ret: usize, n_max: u64) -> entwine::Result<()> {
    let exact = evolve(0.5, t_ret);
    for mode in [Mode::Iid, Mode::Balanced] {
        let cfg = SimConfig::new(0.5, t_ret, n_max).with_mode(mode).with_seed(7);
        let mut sampler = EnsembleSampler::new(&cfg)?;
        let mut n = 1_000;
        while n <= n_max {
            let sample = normalize(&sampler.advance_to(n)?)?;
            let d = relative_distance(&sample, &exact, t_ret, 3)?;
            println!("{mode:?} n={n:<8} |phi3 - exact| / |exact| = {d:.4}");
            n *= 10;
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    let n_max = std::env::args().nth(1).map_or(100_000, |s| s.parse().expect("pairs"));
    if let Err(e) = run(12, n_max) {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
