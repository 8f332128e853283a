//! Envelope walkers that read one symbol per step.
//!
//! A walker moves one site, then reads a symbol at its new site: it turns at
//! every mark and changes colour at every second turn. A link is recorded at
//! the site it leaves from, with the direction it leaves in. The right
//! envelope leaves the origin moving right with charge +1, the left
//! envelope moving left with charge -1.

use serde::Serialize;

use super::engine::{CounterKey, DecisionEngine, Symbol, System};
use crate::lattice::{Dir, SampleFieldSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum EnvelopeKind {
    Left,
    Right,
}

impl EnvelopeKind {
    pub fn seed_dir(self) -> Dir {
        match self {
            EnvelopeKind::Left => Dir::Left,
            EnvelopeKind::Right => Dir::Right,
        }
    }

    pub fn seed_charge(self) -> i8 {
        match self {
            EnvelopeKind::Left => -1,
            EnvelopeKind::Right => 1,
        }
    }

    pub fn system(self) -> System {
        match self {
            EnvelopeKind::Left => System::LeftPair,
            EnvelopeKind::Right => System::RightPair,
        }
    }

    /// Field a link of this envelope moving in `dir` contributes to.
    pub fn field_index(self, dir: Dir) -> usize {
        match (self, dir) {
            (EnvelopeKind::Left, Dir::Left) => 1,
            (EnvelopeKind::Left, Dir::Right) => 2,
            (EnvelopeKind::Right, Dir::Left) => 3,
            (EnvelopeKind::Right, Dir::Right) => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnvelopeState {
    pub z: i64,
    pub dir: Dir,
    pub charge: i8,
    /// Number of turns so far, mod 2.
    pub turn_parity: u8,
}

impl EnvelopeState {
    pub fn seed(kind: EnvelopeKind) -> Self {
        EnvelopeState {
            z: 0,
            dir: kind.seed_dir(),
            charge: kind.seed_charge(),
            turn_parity: 0,
        }
    }

    /// Moves one site with the current direction.
    pub fn advance(&mut self) {
        self.z += self.dir.dz();
    }

    /// Applies the symbol read at the current site.
    pub fn apply(&mut self, symbol: Symbol) {
        if symbol == Symbol::M {
            self.dir = self.dir.flipped();
            self.turn_parity ^= 1;
            if self.turn_parity == 0 {
                self.charge = -self.charge;
            }
        }
    }
}

/// Walks one envelope for `t_max` steps, adding its charge at every arrival
/// site (the seed link counts at `t = 0`). Does not touch
/// `pairs_accumulated`.
pub fn walk_envelope(
    kind: EnvelopeKind,
    engine: &mut DecisionEngine,
    t_max: usize,
    sample: &mut SampleFieldSet,
) {
    let mut s = EnvelopeState::seed(kind);
    sample
        .counts
        .add(kind.field_index(s.dir), 0, s.z, s.charge as i64);
    for t in 1..=t_max {
        s.advance();
        let key = CounterKey::new(kind.system(), t as i64, s.z, s.dir, s.charge);
        s.apply(engine.decide(key));
        sample
            .counts
            .add(kind.field_index(s.dir), t, s.z, s.charge as i64);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(kind: EnvelopeKind, tape: &[Symbol]) -> Vec<(usize, i64, Dir, i8)> {
        let mut s = EnvelopeState::seed(kind);
        let mut out = vec![(0, s.z, s.dir, s.charge)];
        for (k, &sym) in tape.iter().enumerate() {
            s.advance();
            s.apply(sym);
            out.push((k + 1, s.z, s.dir, s.charge));
        }
        out
    }

    use Symbol::{M, U};

    #[test]
    fn free_streaming_right() {
        let links = run(EnvelopeKind::Right, &[U, U, U]);
        assert_eq!(
            links,
            vec![
                (0, 0, Dir::Right, 1),
                (1, 1, Dir::Right, 1),
                (2, 2, Dir::Right, 1),
                (3, 3, Dir::Right, 1)
            ]
        );
    }

    #[test]
    fn first_turn_keeps_charge() {
        let links = run(EnvelopeKind::Right, &[M, U, U]);
        assert_eq!(&links[1..], &[(1, 1, Dir::Left, 1), (2, 0, Dir::Left, 1), (3, -1, Dir::Left, 1)]);
    }

    #[test]
    fn second_turn_flips_charge() {
        let links = run(EnvelopeKind::Right, &[M, M]);
        assert_eq!(links[2], (2, 0, Dir::Right, -1));
        let links = run(EnvelopeKind::Left, &[M, M]);
        assert_eq!(links[1], (1, -1, Dir::Right, -1));
        assert_eq!(links[2], (2, 0, Dir::Left, 1));
    }

    #[test]
    fn walk_deposits_into_sample() {
        use crate::config::Mode;
        use crate::sampler::rng::worker_stream;
        let mut engine = DecisionEngine::new(Mode::Iid, 0.0, worker_stream(0, 0));
        let mut sample = SampleFieldSet::new(3);
        walk_envelope(EnvelopeKind::Right, &mut engine, 3, &mut sample);
        for t in 0..=3usize {
            assert_eq!(sample.counts.get(4, t, t as i64), 1);
        }
        walk_envelope(EnvelopeKind::Left, &mut engine, 3, &mut sample);
        for t in 0..=3usize {
            assert_eq!(sample.counts.get(1, t, -(t as i64)), -1);
        }
    }
}
