//! Scatter decisions: the random process emitting `U` (unmarked) or `M`
//! (marked) symbols.

use std::collections::HashMap;

use rand::Rng;
use serde::Serialize;

use super::rng::StreamRng;
use crate::config::Mode;
use crate::lattice::Dir;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Symbol {
    U,
    M,
}

/// A sequence of symbols.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tape(pub Vec<Symbol>);

impl Tape {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn marks(&self) -> usize {
        self.0.iter().filter(|&&s| s == Symbol::M).count()
    }
}

/// Which walker a decision belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum System {
    LeftPair,
    RightPair,
    Eve,
    Tape,
}

/// Where a decision is made: the site `(t, z)` the walker is leaving, its
/// direction, and a walker-specific class (the current charge for envelope
/// walkers, the parity of marks so far for Eve).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CounterKey {
    pub system: System,
    pub t: i64,
    pub z: i64,
    pub dir: Dir,
    pub class: i8,
}

impl CounterKey {
    pub fn new(system: System, t: i64, z: i64, dir: Dir, class: i8) -> Self {
        CounterKey {
            system,
            t,
            z,
            dir,
            class,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counter {
    pub n_scatter: u64,
    pub n_total: u64,
}

/// Picks the symbol that brings the local scatter frequency closest to
/// `alpha`; an exact tie is broken uniformly at random. Updates the counter.
pub fn balanced_decide(counter: &mut Counter, alpha: f64, rng: &mut impl Rng) -> Symbol {
    let target = alpha * (counter.n_total + 1) as f64;
    let miss_u = (counter.n_scatter as f64 - target).abs();
    let miss_m = (counter.n_scatter as f64 + 1.0 - target).abs();
    let symbol = if miss_m < miss_u {
        Symbol::M
    } else if miss_u < miss_m {
        Symbol::U
    } else if rng.gen::<bool>() {
        Symbol::M
    } else {
        Symbol::U
    };
    counter.n_total += 1;
    if symbol == Symbol::M {
        counter.n_scatter += 1;
    }
    symbol
}

/// Source of scatter decisions for one worker.
#[derive(Clone, Debug)]
pub struct DecisionEngine {
    mode: Mode,
    alpha: f64,
    rng: StreamRng,
    counters: HashMap<CounterKey, Counter>,
}

impl DecisionEngine {
    pub fn new(mode: Mode, alpha: f64, rng: StreamRng) -> Self {
        DecisionEngine {
            mode,
            alpha,
            rng,
            counters: HashMap::new(),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn decide(&mut self, key: CounterKey) -> Symbol {
        match self.mode {
            // gen::<f64>() is in [0, 1): alpha = 0 never marks, alpha = 1 always does.
            Mode::Iid => {
                if self.rng.gen::<f64>() < self.alpha {
                    Symbol::M
                } else {
                    Symbol::U
                }
            }
            Mode::Balanced => {
                let counter = self.counters.entry(key).or_default();
                balanced_decide(counter, self.alpha, &mut self.rng)
            }
        }
    }

    pub fn counters(&self) -> &HashMap<CounterKey, Counter> {
        &self.counters
    }
}

/// A standalone tape. In balanced mode the whole tape shares one counter.
pub fn generate_tape(engine: &mut DecisionEngine, length: usize) -> Tape {
    let key = CounterKey::new(System::Tape, 0, 0, Dir::Right, 0);
    Tape((0..length).map(|_| engine.decide(key)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::rng::worker_stream;

    fn engine(mode: Mode, alpha: f64) -> DecisionEngine {
        DecisionEngine::new(mode, alpha, worker_stream(42, 0))
    }

    #[test]
    fn extreme_alphas() {
        for mode in [Mode::Iid, Mode::Balanced] {
            assert_eq!(generate_tape(&mut engine(mode, 0.0), 500).marks(), 0);
            assert_eq!(generate_tape(&mut engine(mode, 1.0), 500).marks(), 500);
        }
    }

    #[test]
    fn iid_fraction_concentrates() {
        let tape = generate_tape(&mut engine(Mode::Iid, 0.5), 1_000_000);
        let frac = tape.marks() as f64 / tape.len() as f64;
        assert!((0.499..=0.501).contains(&frac), "fraction {frac}");
    }

    #[test]
    fn iid_tape_is_seed_stable() {
        let a = generate_tape(&mut engine(Mode::Iid, 0.5), 64);
        let b = generate_tape(&mut engine(Mode::Iid, 0.5), 64);
        assert_eq!(a, b);
    }

    #[test]
    fn balanced_rule_cases() {
        let mut rng = worker_stream(1, 0);
        let mut c = Counter { n_scatter: 0, n_total: 1 };
        assert_eq!(balanced_decide(&mut c, 0.5, &mut rng), Symbol::M);
        assert_eq!(c, Counter { n_scatter: 1, n_total: 2 });

        let mut c = Counter { n_scatter: 1, n_total: 1 };
        assert_eq!(balanced_decide(&mut c, 0.5, &mut rng), Symbol::U);
        assert_eq!(c, Counter { n_scatter: 1, n_total: 2 });
    }

    #[test]
    fn balanced_tie_is_random() {
        let mut rng = worker_stream(3, 0);
        let mut seen = [0usize; 2];
        for _ in 0..200 {
            let mut c = Counter::default();
            match balanced_decide(&mut c, 0.5, &mut rng) {
                Symbol::U => seen[0] += 1,
                Symbol::M => seen[1] += 1,
            }
        }
        assert!(seen[0] > 50 && seen[1] > 50, "{seen:?}");
    }

    #[test]
    fn balanced_counters_stay_within_one() {
        for &alpha in &[0.1, 0.25, 1.0 / 3.0, 0.5, 0.9] {
            let mut rng = worker_stream(9, 0);
            let mut c = Counter::default();
            for _ in 0..10_000 {
                balanced_decide(&mut c, alpha, &mut rng);
                let freq = c.n_scatter as f64 / c.n_total as f64;
                assert!((freq - alpha).abs() <= 1.0 / c.n_total as f64 + 1e-15);
            }
        }
    }

    #[test]
    fn balanced_tape_fraction() {
        let tape = generate_tape(&mut engine(Mode::Balanced, 0.3), 1000);
        assert!((tape.marks() as i64 - 300).abs() <= 1);
    }
}
