//! Brute-force ensemble by enumerating every scatter-decision sequence.
//!
//! Each envelope kind is expanded separately over all `2^t_max` sequences.
//! A sequence's weight is the product of `alpha` per scatter and `1 - alpha`
//! per straight step, and its links deposit `charge * weight`. This walks the
//! corner rule directly and shares no code with the evolver, so agreement
//! between the two checks both.

use crate::error::{Error, Result};
use crate::lattice::{Dir, FieldSet};

/// Largest `t_max` the enumeration accepts.
pub const ENUMERATION_GUARD: usize = 20;

/// One decision sequence and what it deposits.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPath {
    /// `true` where the walker scatters on arriving at `t = k + 1`.
    pub scatters: Vec<bool>,
    pub weight: f64,
    /// `(t, z, dir, charge)` for every link arrival, including the seed at `t = 0`.
    pub links: Vec<(usize, i64, Dir, i8)>,
}

impl WeightedPath {
    /// Expands the path of one envelope given its seed direction and charge.
    pub fn trace(seed_dir: Dir, seed_charge: i8, scatters: &[bool], alpha: f64) -> Self {
        let mut z = 0i64;
        let mut dir = seed_dir;
        let mut charge = seed_charge;
        let mut weight = 1.0;
        let mut links = vec![(0, 0, dir, charge)];
        for (k, &scatter) in scatters.iter().enumerate() {
            // Move with the current direction, then decide at the new site.
            z += dir.dz();
            if scatter {
                weight *= alpha;
                dir = dir.flipped();
                // Turning back onto the seed direction completes a second corner.
                if dir == seed_dir {
                    charge = -charge;
                }
            } else {
                weight *= 1.0 - alpha;
            }
            links.push((k + 1, z, dir, charge));
        }
        WeightedPath {
            scatters: scatters.to_vec(),
            weight,
            links,
        }
    }
}

fn field_index(seed_dir: Dir, dir: Dir) -> usize {
    match (seed_dir, dir) {
        (Dir::Left, Dir::Left) => 1,
        (Dir::Left, Dir::Right) => 2,
        (Dir::Right, Dir::Left) => 3,
        (Dir::Right, Dir::Right) => 4,
    }
}

fn sequences(t_max: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << t_max).map(move |bits| (0..t_max).map(|k| bits >> k & 1 == 1).collect())
}

/// Total weight over all sequences at each `t` (should be exactly 1).
pub fn total_weight(alpha: f64, t_max: usize) -> Result<Vec<f64>> {
    guard(t_max)?;
    let mut totals = vec![0.0; t_max + 1];
    for len in 0..=t_max {
        totals[len] = sequences(len)
            .map(|s| WeightedPath::trace(Dir::Right, 1, &s, alpha).weight)
            .sum();
    }
    Ok(totals)
}

fn guard(t_max: usize) -> Result<()> {
    if t_max > ENUMERATION_GUARD {
        return Err(Error::EnumerationGuard {
            steps: t_max,
            guard: ENUMERATION_GUARD,
        });
    }
    Ok(())
}

/// Exact fields over `0..=t_max` from the source at the origin.
pub fn enumerate_exact(alpha: f64, t_max: usize) -> Result<FieldSet> {
    guard(t_max)?;
    let mut fields = FieldSet::new(t_max);
    for (seed_dir, seed_charge) in [(Dir::Left, -1i8), (Dir::Right, 1i8)] {
        for s in sequences(t_max) {
            let path = WeightedPath::trace(seed_dir, seed_charge, &s, alpha);
            if path.weight == 0.0 {
                continue;
            }
            for &(t, z, dir, charge) in &path.links {
                fields.add(field_index(seed_dir, dir), t, z, charge as f64 * path.weight);
            }
        }
    }
    // Every prefix was counted once per completion of the remaining steps;
    // those completions carry total weight 1, so no rescaling is needed.
    Ok(fields)
}

/// Largest entrywise difference between two field sets of equal extent.
pub fn max_abs_diff(a: &FieldSet, b: &FieldSet) -> Result<f64> {
    if a.t_max() != b.t_max() {
        return Err(Error::ShapeMismatch(a.t_max(), b.t_max()));
    }
    let r = a.t_max() as i64;
    let mut m: f64 = 0.0;
    for i in 1..=4 {
        for t in 0..=a.t_max() {
            for z in -r..=r {
                m = m.max((a.get(i, t, z) - b.get(i, t, z)).abs());
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_recursion_value() {
        let f = enumerate_exact(0.5, 2).unwrap();
        assert_eq!(f.get(4, 2, 0), -0.25);
        assert_eq!(f.get(3, 1, 1), 0.5);
    }

    #[test]
    fn free_streaming() {
        let f = enumerate_exact(0.0, 6).unwrap();
        for t in 0..=6usize {
            assert_eq!(f.get(4, t, t as i64), 1.0);
            assert_eq!(f.get(1, t, -(t as i64)), -1.0);
        }
        let r = 6;
        for t in 0..=6 {
            for z in -r..=r {
                assert_eq!(f.get(2, t, z), 0.0);
                assert_eq!(f.get(3, t, z), 0.0);
            }
        }
    }

    #[test]
    fn weights_sum_to_one() {
        for &alpha in &[0.0, 0.25, 0.5, 0.75, 1.0, 0.3] {
            for w in total_weight(alpha, 10).unwrap() {
                assert!((w - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn guard_refuses() {
        assert!(matches!(
            enumerate_exact(0.5, 21),
            Err(Error::EnumerationGuard { steps: 21, guard: 20 })
        ));
    }

    #[test]
    fn second_corner_flips_charge() {
        let p = WeightedPath::trace(Dir::Right, 1, &[true, true], 0.5);
        assert_eq!(p.links[1], (1, 1, Dir::Left, 1));
        assert_eq!(p.links[2], (2, 0, Dir::Right, -1));
        assert_eq!(p.weight, 0.25);
    }
}
