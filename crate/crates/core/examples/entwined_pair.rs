// Builds a few entwined pairs and splits them into their two envelopes.

use entwine::sampler::rng::worker_stream;
use entwine::sampler::{build_entwined_pair, extract_envelopes, follows_corner_rule, DecisionEngine};
use entwine::Mode;

pub fn run(seed: u64, t_ret: usize, count: usize) -> entwine::Result<()> {
    let mut engine = DecisionEngine::new(Mode::Iid, 0.5, worker_stream(seed, 0));
    for k in 0..count {
        let pair = build_entwined_pair(&mut engine, t_ret)?;
        let env = extract_envelopes(&pair)?;
        let path = |links: &[entwine::sampler::EnvelopeLink]| {
            links.iter().map(|l| format!("{:+}", l.to.z)).collect::<Vec<_>>().join(" ")
        };
        println!(
            "pair {k}: reversal at t={}, {} markers, closed={}",
            pair.reversal_time(),
            pair.markers.len(),
            pair.is_closed()
        );
        println!("  left  {}", path(&env.left));
        println!("  right {}", path(&env.right));
        println!(
            "  valid={} corner rule={}/{} touching at {:?}",
            env.is_valid(),
            follows_corner_rule(&env.left),
            follows_corner_rule(&env.right),
            env.touching_times()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    let seed = std::env::args().nth(1).map_or(1, |s| s.parse().expect("seed"));
    if let Err(e) = run(seed, 8, 3) {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
