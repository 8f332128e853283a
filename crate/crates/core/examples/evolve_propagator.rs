// Exact ensemble from a point source, printed as small tables.
//
// `cargo run --example evolve_propagator -- 0.5 8`

use entwine::evolver::{evolve, zeroth_moment};
use entwine::FieldView;

pub fn run(alpha: f64, t_max: usize) -> entwine::Result<()> {
    entwine::config::validate_alpha(alpha)?;
    let fields = evolve(alpha, t_max);
    for i in 1..=4 {
        println!("phi{i}");
        for t in 0..=t_max {
            let row: Vec<String> = (-(t as i64)..=t as i64)
                .step_by(2)
                .map(|z| format!("{:+.4}", fields.value(i, t, z)))
                .collect();
            println!("  t={t:<3} {}", row.join(" "));
        }
    }
    let m: Vec<String> = (0..=t_max).map(|t| format!("{:.4}", zeroth_moment(&fields, 4, t))).collect();
    println!("sum of phi4 per slice: {}", m.join(" "));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    let mut args = std::env::args().skip(1);
    let alpha = args.next().map_or(0.5, |s| s.parse().expect("alpha"));
    let t_max = args.next().map_or(8, |s| s.parse().expect("t_max"));
    if let Err(e) = run(alpha, t_max) {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
