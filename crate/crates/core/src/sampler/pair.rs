//! Entwined pairs built the way a single walker traverses them.
//!
//! The walker leaves the origin and takes a fixed first step to `(1, 1)`.
//! From then on she reads one symbol before every step. Odd-numbered marks
//! turn her around; even-numbered marks drop a marker at the site she is
//! leaving and she carries straight on. The first marker dropped at
//! `t >= t_ret` ends the forward path. From there she walks back down in `t`,
//! still moving the same way in `z`, along the light-cone lines through every
//! marker until she is back at the origin. The forward path is blue (+1), the
//! return path red (-1).
//!
//! Coordinates here are the pair's own: the origin is the apex where both
//! paths start.

use serde::Serialize;

use super::engine::{CounterKey, DecisionEngine, Symbol, System, Tape};
use crate::error::{Error, Result};
use crate::lattice::Dir;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Site {
    pub t: i64,
    pub z: i64,
}

impl Site {
    pub const ORIGIN: Site = Site { t: 0, z: 0 };

    pub fn new(t: i64, z: i64) -> Self {
        Site { t, z }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntwinedPair {
    /// Origin to reversal marker, one site per time step.
    pub forward: Vec<Site>,
    /// Every marker in the order dropped; the last one is the reversal point.
    pub markers: Vec<Site>,
    /// Reversal marker back to the origin, one site per time step.
    pub ret: Vec<Site>,
    /// Symbols read while walking forward.
    #[serde(skip)]
    pub tape: Tape,
}

/// One unit link of an envelope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EnvelopeLink {
    pub from: Site,
    pub to: Site,
    pub dir: Dir,
    /// +1 where the link came from the forward path, -1 from the return path.
    pub colour: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Envelopes {
    pub left: Vec<EnvelopeLink>,
    pub right: Vec<EnvelopeLink>,
}

/// Walks forward until the reversal marker at or after `t_ret`, then closes
/// the pair.
pub fn build_entwined_pair(engine: &mut DecisionEngine, t_ret: usize) -> Result<EntwinedPair> {
    if t_ret < 1 {
        return Err(Error::Config("t_ret must be at least 1".into()));
    }
    if engine.alpha() <= 0.0 {
        return Err(Error::Config(
            "alpha = 0 never marks, so the pair can never reverse".into(),
        ));
    }
    let t_ret = t_ret as i64;
    let mut dir = Dir::Right;
    let mut site = Site::new(1, 1);
    let mut forward = vec![Site::ORIGIN, site];
    let mut markers = Vec::new();
    let mut tape = Vec::new();
    let mut marks = 0u64;
    loop {
        let key = CounterKey::new(System::Eve, site.t, site.z, dir, (marks % 2) as i8);
        let symbol = engine.decide(key);
        tape.push(symbol);
        if symbol == Symbol::M {
            marks += 1;
            if marks % 2 == 1 {
                dir = dir.flipped();
            } else {
                markers.push(site);
                if site.t >= t_ret {
                    break;
                }
            }
        }
        site = Site::new(site.t + 1, site.z + dir.dz());
        forward.push(site);
    }
    let ret = return_path(&forward, &markers)?;
    Ok(EntwinedPair {
        forward,
        markers,
        ret,
        tape: Tape(tape),
    })
}

/// Descends from the last marker, keeping the `z` direction of arrival and
/// turning only when the next target (previous marker, finally the origin)
/// would otherwise fall outside the backward light cone.
fn return_path(forward: &[Site], markers: &[Site]) -> Result<Vec<Site>> {
    let (&last, earlier) = markers
        .split_last()
        .ok_or_else(|| Error::MalformedPair("no reversal marker".into()))?;
    let arriving = forward[forward.len() - 1].z - forward[forward.len() - 2].z;
    // Moving back in t while continuing in z.
    let mut dz = arriving;
    let mut at = last;
    let mut ret = vec![at];
    let targets = earlier.iter().rev().copied().chain(std::iter::once(Site::ORIGIN));
    for target in targets {
        while at.t > target.t {
            let reachable = |z: i64| (z - target.z).abs() <= at.t - 1 - target.t;
            if !reachable(at.z + dz) {
                dz = -dz;
                if !reachable(at.z + dz) {
                    return Err(Error::MalformedPair(format!(
                        "marker at (t={}, z={}) is outside the light cone of (t={}, z={})",
                        target.t, target.z, at.t, at.z
                    )));
                }
            }
            at = Site::new(at.t - 1, at.z + dz);
            ret.push(at);
        }
        if at != target {
            return Err(Error::MalformedPair(format!(
                "return path misses (t={}, z={})",
                target.t, target.z
            )));
        }
    }
    Ok(ret)
}

fn check_path(path: &[Site], what: &str) -> Result<()> {
    for w in path.windows(2) {
        if (w[1].t - w[0].t).abs() != 1 || (w[1].z - w[0].z).abs() != 1 {
            return Err(Error::MalformedPair(format!("{what} has a non light-cone step")));
        }
    }
    Ok(())
}

impl EntwinedPair {
    /// Time of the reversal marker.
    pub fn reversal_time(&self) -> i64 {
        self.forward.last().map_or(0, |s| s.t)
    }

    /// The return path indexed by increasing `t`.
    pub fn ret_forward_order(&self) -> Vec<Site> {
        self.ret.iter().rev().copied().collect()
    }

    /// Return path ends at the origin.
    pub fn is_closed(&self) -> bool {
        self.ret.last() == Some(&Site::ORIGIN) && self.ret.first() == self.forward.last()
    }

    /// Return path passes through every marker.
    pub fn visits_markers(&self) -> bool {
        self.markers.iter().all(|m| self.ret.contains(m))
    }

    fn validate(&self) -> Result<()> {
        let t_end = self.reversal_time();
        if self.forward.first() != Some(&Site::ORIGIN) {
            return Err(Error::MalformedPair("forward path does not start at the origin".into()));
        }
        if self.forward.iter().enumerate().any(|(k, s)| s.t != k as i64) {
            return Err(Error::MalformedPair("forward path is not one site per step".into()));
        }
        if self.ret.len() != self.forward.len() {
            return Err(Error::MalformedPair("paths have different lengths".into()));
        }
        if self.ret.iter().enumerate().any(|(k, s)| s.t != t_end - k as i64) {
            return Err(Error::MalformedPair("return path is not one site per step".into()));
        }
        if !self.is_closed() {
            return Err(Error::MalformedPair("return path is not closed".into()));
        }
        check_path(&self.forward, "forward path")?;
        check_path(&self.ret, "return path")
    }
}

/// Splits a closed pair into its right and left envelopes: per time slice
/// the right envelope is the larger `z` of the two paths, the left the
/// smaller. Each link keeps the colour of the path it lies on.
pub fn extract_envelopes(pair: &EntwinedPair) -> Result<Envelopes> {
    pair.validate()?;
    let fwd = &pair.forward;
    let back = pair.ret_forward_order();
    let pick = |choose: fn(i64, i64) -> i64| -> Result<Vec<EnvelopeLink>> {
        let mut links = Vec::with_capacity(fwd.len() - 1);
        for t in 1..fwd.len() {
            let from = Site::new(t as i64 - 1, choose(fwd[t - 1].z, back[t - 1].z));
            let to = Site::new(t as i64, choose(fwd[t].z, back[t].z));
            let colour = if (fwd[t - 1], fwd[t]) == (from, to) {
                1
            } else if (back[t - 1], back[t]) == (from, to) {
                -1
            } else {
                return Err(Error::MalformedPair(format!(
                    "envelope link into (t={}, z={}) lies on neither path",
                    to.t, to.z
                )));
            };
            let dir = Dir::from_dz(to.z - from.z).ok_or_else(|| {
                Error::MalformedPair("envelope step is not a light-cone link".into())
            })?;
            links.push(EnvelopeLink { from, to, dir, colour });
        }
        Ok(links)
    };
    Ok(Envelopes {
        left: pick(i64::min)?,
        right: pick(i64::max)?,
    })
}

/// Colour changes only at corners, at every second corner.
pub fn follows_corner_rule(links: &[EnvelopeLink]) -> bool {
    let Some(first) = links.first() else {
        return true;
    };
    let mut corners = 0usize;
    let mut expected = first.colour;
    for w in links.windows(2) {
        if w[1].dir != w[0].dir {
            corners += 1;
            if corners % 2 == 0 {
                expected = -expected;
            }
        }
        if w[1].colour != expected {
            return false;
        }
    }
    true
}

impl Envelopes {
    /// Both envelopes are continuous light-cone paths from the origin, the
    /// right never left of the left, and they start with opposite colours
    /// (right blue, left red).
    pub fn is_valid(&self) -> bool {
        let continuous = |links: &[EnvelopeLink]| {
            links.first().is_some_and(|l| l.from == Site::ORIGIN)
                && links.windows(2).all(|w| w[0].to == w[1].from)
                && links
                    .iter()
                    .all(|l| l.to.t == l.from.t + 1 && (l.to.z - l.from.z).abs() == 1)
        };
        continuous(&self.left)
            && continuous(&self.right)
            && self.left.len() == self.right.len()
            && self.left.iter().zip(&self.right).all(|(l, r)| r.to.z >= l.to.z)
            && self.right[0].colour == 1
            && self.left[0].colour == -1
            && self.right[0].dir == Dir::Right
            && self.left[0].dir == Dir::Left
    }

    /// Times (after the origin) where the two envelopes share a site.
    pub fn touching_times(&self) -> Vec<i64> {
        self.left
            .iter()
            .zip(&self.right)
            .filter(|(l, r)| l.to == r.to)
            .map(|(l, _)| l.to.t)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Mode;
    use crate::sampler::rng::worker_stream;
    use proptest::prelude::*;

    fn engine(alpha: f64, seed: u64) -> DecisionEngine {
        DecisionEngine::new(Mode::Iid, alpha, worker_stream(seed, 0))
    }

    #[test]
    fn all_marks_minimal_pair() {
        let pair = build_entwined_pair(&mut engine(1.0, 0), 2).unwrap();
        // Fixed first step, turn at t = 1, marker at t = 2, reverse.
        assert_eq!(
            pair.forward,
            vec![Site::new(0, 0), Site::new(1, 1), Site::new(2, 0)]
        );
        assert_eq!(pair.markers, vec![Site::new(2, 0)]);
        assert_eq!(
            pair.ret,
            vec![Site::new(2, 0), Site::new(1, -1), Site::new(0, 0)]
        );
        let env = extract_envelopes(&pair).unwrap();
        assert!(env.is_valid());
        assert!(env.right.iter().all(|l| l.colour == 1));
        assert!(env.left.iter().all(|l| l.colour == -1));
    }

    #[test]
    fn no_interior_marker_gives_single_coloured_envelopes() {
        // t_ret = 1 reverses at the first marker, so no marker precedes it.
        for seed in 0..50 {
            let pair = build_entwined_pair(&mut engine(0.3, seed), 1).unwrap();
            assert_eq!(pair.markers.len(), 1);
            let env = extract_envelopes(&pair).unwrap();
            assert!(env.right.iter().all(|l| l.colour == 1));
            assert!(env.left.iter().all(|l| l.colour == -1));
            let fwd_links: Vec<_> = pair.forward.windows(2).map(|w| (w[0], w[1])).collect();
            let right_links: Vec<_> = env.right.iter().map(|l| (l.from, l.to)).collect();
            assert_eq!(fwd_links, right_links);
        }
    }

    #[test]
    fn zero_alpha_is_refused() {
        assert!(build_entwined_pair(&mut engine(0.0, 0), 4).is_err());
    }

    #[test]
    fn malformed_pair_is_rejected() {
        let mut pair = build_entwined_pair(&mut engine(0.5, 1), 6).unwrap();
        let k = pair.ret.len() / 2;
        pair.ret[k].z += 2;
        assert!(matches!(extract_envelopes(&pair), Err(Error::MalformedPair(_))));

        let mut pair = build_entwined_pair(&mut engine(0.5, 1), 6).unwrap();
        pair.ret.pop();
        assert!(extract_envelopes(&pair).is_err());
    }

    #[test]
    fn corner_rule_detects_violations() {
        let pair = build_entwined_pair(&mut engine(0.5, 11), 30).unwrap();
        let env = extract_envelopes(&pair).unwrap();
        assert!(follows_corner_rule(&env.right));
        let mut broken = env.right.clone();
        let k = broken.len() / 2;
        broken[k].colour = -broken[k].colour;
        assert!(!follows_corner_rule(&broken));
    }

    /// Independent description of the return path: between consecutive
    /// markers A and B with forward corner C, the return path takes the other
    /// two sides of the light-cone rectangle spanned by A and B.
    fn rectangle_return(pair: &EntwinedPair) -> Vec<i64> {
        let f: Vec<i64> = pair.forward.iter().map(|s| s.z).collect();
        let mut r = vec![0i64; f.len()];
        let mut bounds: Vec<i64> = vec![0];
        bounds.extend(pair.markers.iter().map(|m| m.t));
        for w in bounds.windows(2) {
            let (ta, tb) = (w[0] as usize, w[1] as usize);
            let d1 = f[ta + 1] - f[ta];
            let tc = (ta + 1..tb).find(|&s| f[s + 1] - f[s] != d1).unwrap();
            r[ta] = f[ta];
            for s in ta + 1..=tb {
                r[s] = if s - ta <= tb - tc { r[s - 1] - d1 } else { r[s - 1] + d1 };
            }
        }
        r
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn pair_invariants(seed in any::<u64>(), alpha in 0.05f64..=1.0, t_ret in 1usize..40) {
            let pair = build_entwined_pair(&mut engine(alpha, seed), t_ret).unwrap();
            prop_assert!(pair.is_closed());
            prop_assert!(pair.visits_markers());
            prop_assert!(pair.reversal_time() >= t_ret as i64);
            prop_assert_eq!(pair.markers.last().copied(), pair.forward.last().copied());
            let rz: Vec<i64> = pair.ret_forward_order().iter().map(|s| s.z).collect();
            prop_assert_eq!(rz, rectangle_return(&pair));

            let env = extract_envelopes(&pair).unwrap();
            prop_assert!(env.is_valid());
            prop_assert!(follows_corner_rule(&env.left));
            prop_assert!(follows_corner_rule(&env.right));
            let marker_times: Vec<i64> = pair.markers.iter().map(|m| m.t).collect();
            prop_assert_eq!(env.touching_times(), marker_times);
            for m in &pair.markers {
                let k = m.t as usize - 1;
                prop_assert_eq!(env.left[k].to, *m);
                prop_assert_eq!(env.right[k].to, *m);
            }
        }
    }
}
