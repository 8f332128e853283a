//! Entwined space-time paths on a discrete 1+1D lattice.
//!
//! The crate evolves the four coupled ensemble densities exactly, samples the
//! classical stochastic process that generates them (either envelope by
//! envelope or as full entwined pairs), and measures how sample averages
//! approach the ensemble and how the ensemble approaches the continuum Dirac
//! system.
//!
//! Lattice units throughout: `c = Δt = Δz = 1`, so the single scattering
//! parameter is `alpha = aΔt`.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod dirac;
pub mod error;
pub mod evolver;
pub mod io;
pub mod lattice;
pub mod oracle;
pub mod sampler;

pub use config::{Mode, SamplerKind, SimConfig};
pub use error::{Error, Result};
pub use lattice::{Dir, FieldSet, FieldView, SampleFieldSet};
