// Log-log slope of the sampling error for balanced and iid decisions.

use entwine::analysis::{convergence_study, default_checkpoints, fit_slope};
use entwine::{Mode, SimConfig};

pub fn run(t: usize, n_max: u64) -> entwine::Result<()> {
    let checkpoints: Vec<u64> = default_checkpoints().into_iter().filter(|&n| n <= n_max).collect();
    for mode in [Mode::Balanced, Mode::Iid] {
        let cfg = SimConfig::new(0.5, t, n_max).with_mode(mode);
        let series = convergence_study(&cfg, &checkpoints, &[t], &[4])?;
        for e in series.select(t, 4) {
            println!("{mode:?} n={:<8} E={:.3e}", e.n_pairs, e.e);
        }
        match fit_slope(&series, t, 4) {
            Ok(fit) => println!("{mode:?} slope {:.3} over {} points", fit.slope, fit.points),
            // Balanced runs can be exact at every checkpoint for small t.
            Err(e) => println!("{mode:?} no slope: {e}"),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    let n_max = std::env::args().nth(1).map_or(1 << 14, |s| s.parse().expect("pairs"));
    if let Err(e) = run(10, n_max) {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
