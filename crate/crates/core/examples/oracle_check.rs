// Brute-force enumeration against the recursion.

use entwine::evolver::evolve;
use entwine::oracle::{enumerate_exact, max_abs_diff, total_weight};

pub fn run(t_max: usize) -> entwine::Result<()> {
    for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let oracle = enumerate_exact(alpha, t_max)?;
        let d = max_abs_diff(&oracle, &evolve(alpha, t_max))?;
        let w = total_weight(alpha, t_max)?;
        println!("alpha={alpha:<5} max diff {d:.1e}, path weight at t_max {:.12}", w[t_max]);
    }
    let f = enumerate_exact(0.5, 2)?;
    println!("phi4(2,0) = {}, phi3(1,1) = {}", f.get(4, 2, 0), f.get(3, 1, 1));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    let t_max = std::env::args().nth(1).map_or(10, |s| s.parse().expect("t_max"));
    if let Err(e) = run(t_max) {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
