//! The classical stochastic process behind the ensemble densities.
//!
//! Decisions come from a [`DecisionEngine`]. They drive either envelope
//! walkers, which read one symbol per step and apply the corner rule, or full
//! entwined pairs, which are built forward, closed through their markers and
//! then split into left and right envelopes.

pub mod engine;
pub mod ensemble;
pub mod pair;
pub mod rng;
pub mod walker;

pub use engine::{balanced_decide, generate_tape, Counter, CounterKey, DecisionEngine, Symbol, System, Tape};
pub use ensemble::{sample_ensemble, EnsembleSampler};
pub use pair::{build_entwined_pair, extract_envelopes, follows_corner_rule, EntwinedPair, EnvelopeLink, Envelopes, Site};
pub use walker::{walk_envelope, EnvelopeKind, EnvelopeState};
