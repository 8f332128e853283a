//! Accumulating many pairs into a [`SampleFieldSet`], split across workers.
//!
//! In `iid` mode worker `w` of `W` owns stream `w` of the seed, its own
//! decision engine and its own sample, and processes a fixed share of the
//! pairs. Shares depend only on the total, so the result is identical for a
//! given `(seed, workers)` no matter how the run is checkpointed.
//!
//! `balanced` mode is one sequential process: every decision consults all
//! earlier decisions at its key. Splitting it into worker-local processes
//! adds their imbalances (at 4 workers the distance to the exact ensemble
//! roughly doubles), so balanced runs use a single worker on stream 0 and give
//! the same result for any worker count.
//!
//! In `eve` mode each pair is built in its own coordinates and every envelope
//! link is recorded at the site it leaves, which is how the walkers record
//! theirs. Both envelopes leave the origin, so no shift is needed. Pairs are
//! built with return threshold `t_ret + 1` so their envelopes cover lattice
//! times `0..=t_ret`.

use std::thread;

use super::engine::DecisionEngine;
use super::pair::{build_entwined_pair, extract_envelopes, EnvelopeLink};
use super::rng::worker_stream;
use super::walker::{walk_envelope, EnvelopeKind};
use crate::config::{Mode, SamplerKind, SimConfig};
use crate::error::Result;
use crate::lattice::SampleFieldSet;

struct Worker {
    engine: DecisionEngine,
    sample: SampleFieldSet,
    done: u64,
    traces: Option<Vec<String>>,
}

/// Pairs owned by worker `w` of `workers` when `total` pairs are requested.
fn share(total: u64, w: usize, workers: usize) -> u64 {
    let hi = total as u128 * (w as u128 + 1) / workers as u128;
    let lo = total as u128 * w as u128 / workers as u128;
    (hi - lo) as u64
}

fn deposit(sample: &mut SampleFieldSet, kind: EnvelopeKind, links: &[EnvelopeLink], t_max: usize) {
    for l in links.iter().take(t_max + 1) {
        sample.counts.add(
            kind.field_index(l.dir),
            l.from.t as usize,
            l.from.z,
            l.colour as i64,
        );
    }
}

impl Worker {
    fn run(&mut self, config: &SimConfig, count: u64) -> Result<()> {
        let t_max = config.t_ret;
        for _ in 0..count {
            match config.sampler {
                SamplerKind::Envelope => {
                    walk_envelope(EnvelopeKind::Left, &mut self.engine, t_max, &mut self.sample);
                    walk_envelope(EnvelopeKind::Right, &mut self.engine, t_max, &mut self.sample);
                }
                SamplerKind::Eve => {
                    let pair = build_entwined_pair(&mut self.engine, t_max + 1)?;
                    let env = extract_envelopes(&pair)?;
                    deposit(&mut self.sample, EnvelopeKind::Left, &env.left, t_max);
                    deposit(&mut self.sample, EnvelopeKind::Right, &env.right, t_max);
                    if let Some(traces) = &mut self.traces {
                        traces.push(serde_json::to_string(&pair)?);
                    }
                }
            }
            self.sample.pairs_accumulated += 1;
        }
        self.done += count;
        Ok(())
    }
}

/// Incremental sampler: call [`EnsembleSampler::advance_to`] with increasing
/// totals to get snapshots along the way.
pub struct EnsembleSampler {
    config: SimConfig,
    workers: Vec<Worker>,
}

impl EnsembleSampler {
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let n_workers = match config.mode {
            Mode::Iid => config.workers,
            Mode::Balanced => 1,
        };
        let workers = (0..n_workers)
            .map(|w| Worker {
                engine: DecisionEngine::new(
                    config.mode,
                    config.alpha,
                    worker_stream(config.seed, w as u64),
                ),
                sample: SampleFieldSet::new(config.t_ret),
                done: 0,
                traces: None,
            })
            .collect();
        Ok(EnsembleSampler {
            config: config.clone(),
            workers,
        })
    }

    /// Keep a JSON line per entwined pair (eve sampler only).
    pub fn record_traces(&mut self) {
        for w in &mut self.workers {
            w.traces.get_or_insert_with(Vec::new);
        }
    }

    /// Trace lines so far, in worker order.
    pub fn take_traces(&mut self) -> Vec<String> {
        self.workers
            .iter_mut()
            .flat_map(|w| w.traces.as_mut().map(std::mem::take).unwrap_or_default())
            .collect()
    }

    pub fn pairs_done(&self) -> u64 {
        self.workers.iter().map(|w| w.done).sum()
    }

    pub fn engines(&self) -> impl Iterator<Item = &DecisionEngine> {
        self.workers.iter().map(|w| &w.engine)
    }

    /// Samples until `total` pairs are accumulated and returns the merged
    /// sample. Totals below what is already done leave the state unchanged.
    pub fn advance_to(&mut self, total: u64) -> Result<SampleFieldSet> {
        let n = self.workers.len();
        let config = &self.config;
        let todo: Vec<u64> = self
            .workers
            .iter()
            .enumerate()
            .map(|(w, worker)| share(total, w, n).saturating_sub(worker.done))
            .collect();
        if n == 1 {
            self.workers[0].run(config, todo[0])?;
        } else {
            thread::scope(|scope| -> Result<()> {
                let handles: Vec<_> = self
                    .workers
                    .iter_mut()
                    .zip(&todo)
                    .map(|(worker, &count)| scope.spawn(move || worker.run(config, count)))
                    .collect();
                for h in handles {
                    h.join().expect("sampler worker panicked")?;
                }
                Ok(())
            })?;
        }
        Ok(self.merged())
    }

    pub fn merged(&self) -> SampleFieldSet {
        let mut out = SampleFieldSet::new(self.config.t_ret);
        for w in &self.workers {
            out.merge(&w.sample);
        }
        out
    }
}

/// Samples `config.n_pairs` pairs.
pub fn sample_ensemble(config: &SimConfig) -> Result<SampleFieldSet> {
    EnsembleSampler::new(config)?.advance_to(config.n_pairs)
}
