use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How scatter decisions are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Independent draws with probability `alpha`.
    Iid,
    /// Each decision steers the local scatter frequency toward `alpha`.
    Balanced,
}

/// Which construction produces the sample paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    /// One left and one right envelope walker per pair, read one symbol at a time.
    Envelope,
    /// Full forward/marker/return construction, split into envelopes afterwards.
    Eve,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Iid => "iid",
            Mode::Balanced => "balanced",
        })
    }
}

impl std::fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SamplerKind::Envelope => "envelope",
            SamplerKind::Eve => "eve",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Scatter probability per step, `aΔt`.
    pub alpha: f64,
    /// Return time in lattice steps; statistics cover `0..=t_ret`.
    pub t_ret: usize,
    pub n_pairs: u64,
    pub mode: Mode,
    pub sampler: SamplerKind,
    pub seed: u64,
    pub workers: usize,
}

impl SimConfig {
    pub fn new(alpha: f64, t_ret: usize, n_pairs: u64) -> Self {
        SimConfig {
            alpha,
            t_ret,
            n_pairs,
            mode: Mode::Iid,
            sampler: SamplerKind::Envelope,
            seed: 0,
            workers: 1,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_sampler(mut self, sampler: SamplerKind) -> Self {
        self.sampler = sampler;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_alpha(self.alpha)?;
        if self.t_ret < 1 {
            return Err(Error::Config("t_ret must be at least 1".into()));
        }
        if self.n_pairs < 1 {
            return Err(Error::Config("n_pairs must be at least 1".into()));
        }
        if self.workers < 1 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if self.sampler == SamplerKind::Eve && self.alpha == 0.0 {
            return Err(Error::Config(
                "the eve sampler needs alpha > 0: without marks no return marker is ever dropped"
                    .into(),
            ));
        }
        Ok(())
    }
}

pub fn validate_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Config(format!("alpha = {alpha} is not in [0, 1]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(SimConfig::new(0.5, 24, 10).validate().is_ok());
        assert!(SimConfig::new(1.5, 24, 10).validate().is_err());
        assert!(SimConfig::new(-0.1, 24, 10).validate().is_err());
        assert!(SimConfig::new(f64::NAN, 24, 10).validate().is_err());
        assert!(SimConfig::new(0.5, 0, 10).validate().is_err());
        assert!(SimConfig::new(0.5, 4, 0).validate().is_err());
        assert!(SimConfig::new(0.5, 4, 1).with_workers(0).validate().is_err());
        assert!(SimConfig::new(0.0, 4, 1)
            .with_sampler(SamplerKind::Eve)
            .validate()
            .is_err());
        assert!(SimConfig::new(0.0, 4, 1).validate().is_ok());
    }
}
