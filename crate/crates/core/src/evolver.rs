//! Exact evolution of the ensemble densities.
//!
//! With `keep = 1 - alpha` the four update rules are
//!
//! ```text
//! phi1_n(z) = keep * phi1_{n-1}(z+1) - alpha * phi2_{n-1}(z-1)
//! phi2_n(z) = keep * phi2_{n-1}(z-1) + alpha * phi1_{n-1}(z+1)
//! phi3_n(z) = keep * phi3_{n-1}(z+1) + alpha * phi4_{n-1}(z-1)
//! phi4_n(z) = keep * phi4_{n-1}(z-1) - alpha * phi3_{n-1}(z+1)
//! ```
//!
//! The `(phi1, phi2)` and `(phi3, phi4)` systems do not couple to each other.

use crate::lattice::{initial_condition, FieldSet, FIELDS};

/// Right-hand side of update rule `i` at site `z`, reading the previous slice
/// through `prev(field, z)`.
pub fn update_rule(prev: impl Fn(usize, i64) -> f64, i: usize, z: i64, alpha: f64) -> f64 {
    let keep = 1.0 - alpha;
    match i {
        1 => keep * prev(1, z + 1) - alpha * prev(2, z - 1),
        2 => keep * prev(2, z - 1) + alpha * prev(1, z + 1),
        3 => keep * prev(3, z + 1) + alpha * prev(4, z - 1),
        4 => keep * prev(4, z - 1) - alpha * prev(3, z + 1),
        _ => panic!("field index {i} is not in 1..=4"),
    }
}

/// One time slice of all four fields over a contiguous `z` window.
#[derive(Clone, Debug, PartialEq)]
pub struct Slice {
    z_min: i64,
    values: [Vec<f64>; FIELDS],
}

impl Slice {
    pub fn zeros(z_min: i64, len: usize) -> Self {
        Slice {
            z_min,
            values: std::array::from_fn(|_| vec![0.0; len]),
        }
    }

    pub fn z_min(&self) -> i64 {
        self.z_min
    }

    pub fn z_max(&self) -> i64 {
        self.z_min + self.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.values[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize, z: i64) -> f64 {
        let k = z - self.z_min;
        if k < 0 {
            return 0.0;
        }
        self.values[i - 1].get(k as usize).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, i: usize, z: i64, v: f64) {
        let k = (z - self.z_min) as usize;
        self.values[i - 1][k] = v;
    }

    /// Values of field `i`, indexed by `z - z_min`.
    pub fn field(&self, i: usize) -> &[f64] {
        &self.values[i - 1]
    }

    pub fn field_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i - 1]
    }
}

/// Advances a slice one step. The window grows by one site on each side.
pub fn step_slice(prev: &Slice, alpha: f64) -> Slice {
    let mut next = Slice::zeros(prev.z_min - 1, prev.len() + 2);
    for i in 1..=FIELDS {
        for z in next.z_min..=next.z_max() {
            let v = update_rule(|j, y| prev.get(j, y), i, z, alpha);
            next.set(i, z, v);
        }
    }
    next
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolverState {
    pub slice: Slice,
    pub n: usize,
    pub alpha: f64,
}

impl EvolverState {
    /// Source at the origin at step 0.
    pub fn origin(alpha: f64) -> Self {
        let mut slice = Slice::zeros(0, 1);
        slice.set(4, 0, 1.0);
        slice.set(1, 0, -1.0);
        EvolverState { slice, n: 0, alpha }
    }

    pub fn step(self) -> Self {
        EvolverState {
            slice: step_slice(&self.slice, self.alpha),
            n: self.n + 1,
            alpha: self.alpha,
        }
    }
}

/// Full history `0..=n_steps` from the source at the origin.
pub fn evolve(alpha: f64, n_steps: usize) -> FieldSet {
    evolve_from(initial_condition(n_steps), alpha)
}

/// Evolves the `t = 0` row of `fields` forward, overwriting every later row.
pub fn evolve_from(mut fields: FieldSet, alpha: f64) -> FieldSet {
    let t_max = fields.t_max();
    let r = t_max as i64;
    for t in 1..=t_max {
        for i in 1..=FIELDS {
            for z in -r..=r {
                let v = update_rule(|j, y| fields.get(j, t - 1, y), i, z, alpha);
                fields.set(i, t, z, v);
            }
        }
    }
    fields
}

/// Sum over `z` of field `i` at time `t`.
pub fn zeroth_moment(fields: &FieldSet, i: usize, t: usize) -> f64 {
    fields.row(i, t).iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{on_lattice, slice_norm};
    use proptest::prelude::*;

    #[test]
    fn one_step_at_half() {
        let f = evolve(0.5, 1);
        assert_eq!(f.get(4, 1, 1), 0.5);
        assert_eq!(f.get(3, 1, 1), 0.5);
        assert_eq!(f.get(1, 1, -1), -0.5);
        assert_eq!(f.get(2, 1, -1), -0.5);
        let nonzero = (1..=4)
            .flat_map(|i| (-1..=1).map(move |z| (i, z)))
            .filter(|&(i, z)| f.get(i, 1, z) != 0.0)
            .count();
        assert_eq!(nonzero, 4);
        assert_eq!(slice_norm(&f, 4, 1).unwrap(), 0.5);
    }

    #[test]
    fn two_steps_at_half_interfere() {
        let f = evolve(0.5, 2);
        assert_eq!(f.get(4, 2, 0), -0.25);
    }

    #[test]
    fn free_streaming() {
        let n = 7;
        let f = evolve(0.0, n);
        for t in 0..=n {
            let t_i = t as i64;
            assert_eq!(f.get(4, t, t_i), 1.0);
            assert_eq!(f.get(1, t, -t_i), -1.0);
            assert_eq!(slice_norm(&f, 2, t).unwrap(), 0.0);
            assert_eq!(slice_norm(&f, 3, t).unwrap(), 0.0);
            assert_eq!(slice_norm(&f, 4, t).unwrap(), 1.0);
        }
    }

    #[test]
    fn zero_steps_is_initial_condition() {
        assert_eq!(evolve(0.3, 0), initial_condition(0));
    }

    #[test]
    fn state_stepping_matches_history() {
        let alpha = 0.3;
        let f = evolve(alpha, 6);
        let mut s = EvolverState::origin(alpha);
        for _ in 0..6 {
            s = s.step();
        }
        assert_eq!(s.n, 6);
        for i in 1..=4 {
            for z in -6..=6 {
                assert_eq!(s.slice.get(i, z), f.get(i, 6, z));
            }
        }
    }

    #[test]
    fn moment_contraction() {
        for &alpha in &[0.25, 0.5, 0.75, 0.1] {
            let f = evolve(alpha, 64);
            let rate = (1.0 - alpha) * (1.0 - alpha) + alpha * alpha;
            for (a, b) in [(1, 2), (3, 4)] {
                let m0 = zeroth_moment(&f, a, 0).powi(2) + zeroth_moment(&f, b, 0).powi(2);
                for n in 0..=64 {
                    let mn = zeroth_moment(&f, a, n).powi(2) + zeroth_moment(&f, b, n).powi(2);
                    assert!((mn - rate.powi(n as i32) * m0).abs() <= 1e-12);
                }
            }
        }
    }

    fn mirror(s: &Slice) -> Slice {
        let mut m = Slice::zeros(-s.z_max(), s.len());
        for z in s.z_min()..=s.z_max() {
            m.set(1, -z, -s.get(4, z));
            m.set(2, -z, -s.get(3, z));
            m.set(3, -z, -s.get(2, z));
            m.set(4, -z, -s.get(1, z));
        }
        m
    }

    fn slice_strategy() -> impl Strategy<Value = Slice> {
        (-5i64..5, prop::collection::vec(prop::array::uniform4(-1.0f64..1.0), 1..12)).prop_map(
            |(z_min, cols)| {
                let mut s = Slice::zeros(z_min, cols.len());
                for (k, c) in cols.iter().enumerate() {
                    for i in 1..=4 {
                        s.set(i, z_min + k as i64, c[i - 1]);
                    }
                }
                s
            },
        )
    }

    proptest! {
        #[test]
        fn mirror_commutes_with_step(s in slice_strategy(), alpha in 0.0f64..=1.0) {
            let a = step_slice(&mirror(&s), alpha);
            let b = mirror(&step_slice(&s, alpha));
            for i in 1..=4 {
                for z in a.z_min().min(b.z_min())..=a.z_max().max(b.z_max()) {
                    prop_assert!((a.get(i, z) - b.get(i, z)).abs() <= 1e-15);
                }
            }
        }

        #[test]
        fn step_is_linear(f in slice_strategy(), g in slice_strategy(), c in -2.0f64..2.0, alpha in 0.0f64..=1.0) {
            let lo = f.z_min().min(g.z_min());
            let hi = f.z_max().max(g.z_max());
            let mut h = Slice::zeros(lo, (hi - lo + 1) as usize);
            for i in 1..=4 {
                for z in lo..=hi {
                    h.set(i, z, f.get(i, z) + c * g.get(i, z));
                }
            }
            let (sf, sg, sh) = (step_slice(&f, alpha), step_slice(&g, alpha), step_slice(&h, alpha));
            for i in 1..=4 {
                for z in lo - 1..=hi + 1 {
                    let expect = sf.get(i, z) + c * sg.get(i, z);
                    prop_assert!((sh.get(i, z) - expect).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn support_and_parity_preserved(alpha in 0.0f64..=1.0, n in 0usize..20) {
            let f = evolve(alpha, n);
            let r = n as i64;
            for i in 1..=4 {
                for t in 0..=n {
                    for z in -r..=r {
                        if !on_lattice(t, z) {
                            prop_assert_eq!(f.get(i, t, z), 0.0);
                        }
                    }
                }
            }
        }
    }
}
