//! Lattice conventions and field containers.
//!
//! A site is `(t, z)` with `0 <= t <= t_max` and `|z| <= t_max`. Paths start
//! at the origin and move one site left or right per step, so only sites with
//! `t + z` even and `|z| <= t` can ever hold a value.
//!
//! Field indices follow the envelope and the light cone a link runs along:
//!
//! | index | envelope | link direction |
//! |-------|----------|----------------|
//! | 1     | left     | left-moving    |
//! | 2     | left     | right-moving   |
//! | 3     | right    | left-moving    |
//! | 4     | right    | right-moving   |

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FIELDS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    Left,
    Right,
}

impl Dir {
    /// Change in `z` per step.
    pub fn dz(self) -> i64 {
        match self {
            Dir::Left => -1,
            Dir::Right => 1,
        }
    }

    pub fn flipped(self) -> Dir {
        match self {
            Dir::Left => Dir::Right,
            Dir::Right => Dir::Left,
        }
    }

    pub fn from_dz(dz: i64) -> Option<Dir> {
        match dz {
            -1 => Some(Dir::Left),
            1 => Some(Dir::Right),
            _ => None,
        }
    }
}

/// Whether `(t, z)` can carry a value: on parity and inside the light cone.
pub fn on_lattice(t: usize, z: i64) -> bool {
    z.unsigned_abs() as usize <= t && (t as i64 + z).rem_euclid(2) == 0
}

pub(crate) fn check_field(i: usize) -> Result<()> {
    if (1..=FIELDS).contains(&i) {
        Ok(())
    } else {
        Err(Error::FieldIndex(i))
    }
}

/// Dense storage of four fields over `t in 0..=t_max`, `z in -t_max..=t_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice<T> {
    t_max: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> Lattice<T> {
    pub fn new(t_max: usize) -> Self {
        let width = 2 * t_max + 1;
        Lattice {
            t_max,
            data: vec![T::default(); FIELDS * (t_max + 1) * width],
        }
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    fn width(&self) -> usize {
        2 * self.t_max + 1
    }

    fn index(&self, i: usize, t: usize, z: i64) -> Option<usize> {
        debug_assert!((1..=FIELDS).contains(&i), "field index {i}");
        if t > self.t_max || z.unsigned_abs() as usize > self.t_max {
            return None;
        }
        let col = (z + self.t_max as i64) as usize;
        Some(((i - 1) * (self.t_max + 1) + t) * self.width() + col)
    }

    /// Value at a site; anything outside the stored window reads as zero.
    pub fn get(&self, i: usize, t: usize, z: i64) -> T {
        self.index(i, t, z)
            .map(|k| self.data[k])
            .unwrap_or_default()
    }

    /// Panics when the site is outside the stored window.
    pub fn set(&mut self, i: usize, t: usize, z: i64, value: T) {
        let k = self
            .index(i, t, z)
            .unwrap_or_else(|| panic!("site (t={t}, z={z}) outside lattice of t_max={}", self.t_max));
        self.data[k] = value;
    }

    /// Row of field `i` at time `t`, indexed by `z + t_max`.
    pub fn row(&self, i: usize, t: usize) -> &[T] {
        let start = self.index(i, t, -(self.t_max as i64)).expect("row in range");
        &self.data[start..start + self.width()]
    }

    pub fn map<U: Copy + Default>(&self, f: impl Fn(T) -> U) -> Lattice<U> {
        Lattice {
            t_max: self.t_max,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl<T: Copy + Default + std::ops::AddAssign> Lattice<T> {
    pub fn add(&mut self, i: usize, t: usize, z: i64, value: T) {
        let k = self
            .index(i, t, z)
            .unwrap_or_else(|| panic!("site (t={t}, z={z}) outside lattice of t_max={}", self.t_max));
        self.data[k] += value;
    }

    /// Entrywise sum. Both lattices must have the same extent.
    pub fn accumulate(&mut self, other: &Lattice<T>) {
        assert_eq!(self.t_max, other.t_max, "lattice extents differ");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }
}

/// Ensemble densities `phi^1..phi^4`.
pub type FieldSet = Lattice<f64>;

/// Signed link counts accumulated over a number of sampled pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleFieldSet {
    pub counts: Lattice<i64>,
    pub pairs_accumulated: u64,
}

impl SampleFieldSet {
    pub fn new(t_max: usize) -> Self {
        SampleFieldSet {
            counts: Lattice::new(t_max),
            pairs_accumulated: 0,
        }
    }

    pub fn t_max(&self) -> usize {
        self.counts.t_max()
    }

    pub fn merge(&mut self, other: &SampleFieldSet) {
        self.counts.accumulate(&other.counts);
        self.pairs_accumulated += other.pairs_accumulated;
    }
}

/// Read access to a field set as real numbers, shared by ensemble fields and
/// raw sample counts.
pub trait FieldView {
    fn t_max(&self) -> usize;
    fn value(&self, i: usize, t: usize, z: i64) -> f64;
}

impl FieldView for FieldSet {
    fn t_max(&self) -> usize {
        Lattice::t_max(self)
    }

    fn value(&self, i: usize, t: usize, z: i64) -> f64 {
        self.get(i, t, z)
    }
}

impl FieldView for SampleFieldSet {
    fn t_max(&self) -> usize {
        self.counts.t_max()
    }

    fn value(&self, i: usize, t: usize, z: i64) -> f64 {
        self.counts.get(i, t, z) as f64
    }
}

/// Source at the origin: the right envelope leaves blue (+1) moving right and
/// the left envelope leaves red (-1) moving left.
pub fn initial_condition(t_max: usize) -> FieldSet {
    let mut f = FieldSet::new(t_max);
    f.set(4, 0, 0, 1.0);
    f.set(1, 0, 0, -1.0);
    f
}

/// Euclidean norm of field `i` over `z` at time `t`.
pub fn slice_norm(field: &impl FieldView, i: usize, t: usize) -> Result<f64> {
    check_field(i)?;
    let t_max = field.t_max();
    if t > t_max {
        return Err(Error::TimeRange { t, t_max });
    }
    let r = t_max as i64;
    Ok((-r..=r)
        .map(|z| field.value(i, t, z).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Per-pair averages of a sample.
pub fn normalize(sample: &SampleFieldSet) -> Result<FieldSet> {
    if sample.pairs_accumulated == 0 {
        return Err(Error::EmptySample);
    }
    let n = sample.pairs_accumulated as f64;
    Ok(sample.counts.map(|c| c as f64 / n))
}
