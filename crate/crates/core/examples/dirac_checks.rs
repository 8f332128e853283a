// Matrix identities and dispersion of the continuum operator.

use entwine::dirac::{dirac_matrix_checks, dispersion_check, energies};

pub fn run(m: f64) -> entwine::Result<bool> {
    let mut report = dirac_matrix_checks(m);
    report.extend(dispersion_check(m, &[-2.0, -0.5, 0.0, 0.5, 2.0]));
    for c in &report.checks {
        let flag = if c.pass { "ok " } else { "BAD" };
        println!("{flag} {:<40} {:.1e}", c.name, c.measured);
    }
    for k in [0.0, 1.0, 3.0] {
        let e = energies(m, k);
        println!("k={k}: E = {:+.4} {:+.4} {:+.4} {:+.4}", e[0], e[1], e[2], e[3]);
    }
    Ok(report.all_pass())
}

#[allow(dead_code)]
fn main() {
    let m = std::env::args().nth(1).map_or(1.0, |s| s.parse().expect("mass"));
    match run(m) {
        Ok(true) => {}
        Ok(false) => std::process::exit(4),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    }
}
