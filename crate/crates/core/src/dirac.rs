//! Continuum limit of the lattice equations.
//!
//! To first order in `Δt` the update rules become (with `c = 1`)
//!
//! ```text
//! d/dt phi1 =  d/dz phi1 - a phi1 - a phi2
//! d/dt phi2 = -d/dz phi2 - a phi2 + a phi1
//! d/dt phi3 =  d/dz phi3 - a phi3 + a phi4
//! d/dt phi4 = -d/dz phi4 - a phi4 - a phi3
//! ```
//!
//! and `u = e^{a t} phi` removes the common decay, leaving
//! `du/dt = -alpha_z du/dz + a B u` with `B` real antisymmetric. Writing
//! `beta = i B` and `p = -i d/dz` gives the matrix form
//! `i du/dt = (alpha_z p + beta m) u` with `m = a`; `u` stays real.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolver::{step_slice, Slice};
use crate::lattice::FIELDS;

/// Real antisymmetric mass coupling of the rescaled system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealCoupling {
    pub b: Matrix4<f64>,
}

impl RealCoupling {
    pub fn new() -> Self {
        #[rustfmt::skip]
        let b = Matrix4::new(
            0.0, -1.0, 0.0, 0.0,
            1.0,  0.0, 0.0, 0.0,
            0.0,  0.0, 0.0, 1.0,
            0.0,  0.0, -1.0, 0.0,
        );
        RealCoupling { b }
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.b == -self.b.transpose()
    }
}

impl Default for RealCoupling {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiracOperator {
    /// `-diag(sigma_z, sigma_z)`.
    pub alpha_z: Matrix4<f64>,
    pub coupling: RealCoupling,
    pub mass: f64,
}

fn complex(m: &Matrix4<f64>) -> Matrix4<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

impl DiracOperator {
    pub fn new(mass: f64) -> Self {
        DiracOperator {
            alpha_z: Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, -1.0, 1.0)),
            coupling: RealCoupling::new(),
            mass,
        }
    }

    /// Coefficients of `d/dz` in the real system: `-alpha_z`.
    pub fn transport(&self) -> Matrix4<f64> {
        -self.alpha_z
    }

    /// `beta = i B = diag(sigma_y, -sigma_y)`.
    pub fn beta(&self) -> Matrix4<Complex64> {
        self.coupling.b.map(|x| Complex64::new(0.0, x))
    }

    /// `alpha_z k + beta m`.
    pub fn hamiltonian(&self, k: f64) -> Matrix4<Complex64> {
        complex(&(self.alpha_z * k)) + self.beta() * Complex64::new(self.mass, 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            tolerance,
            pass: measured <= tolerance,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }
}

fn max_abs(m: &Matrix4<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn central_diff(v: &[f64], dz: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|k| match k {
            0 => (v[1] - v[0]) / dz,
            k if k == n - 1 => (v[n - 1] - v[n - 2]) / dz,
            k => (v[k + 1] - v[k - 1]) / (2.0 * dz),
        })
        .collect()
}

fn gradients(phi: &Slice, dz: f64) -> Result<[Vec<f64>; FIELDS]> {
    if phi.len() < 3 {
        return Err(Error::GridTooSmall(phi.len()));
    }
    Ok(std::array::from_fn(|k| central_diff(phi.field(k + 1), dz)))
}

/// Right-hand side of the first-order system for `phi` on a uniform grid of
/// spacing `dz` (central differences inside, one-sided at the two ends).
pub fn pde_rhs(phi: &Slice, a: f64, dz: f64) -> Result<Slice> {
    let d = gradients(phi, dz)?;
    let mut out = Slice::zeros(phi.z_min(), phi.len());
    for k in 0..phi.len() {
        let p: [f64; 4] = std::array::from_fn(|i| phi.field(i + 1)[k]);
        out.field_mut(1)[k] = d[0][k] - a * p[0] - a * p[1];
        out.field_mut(2)[k] = -d[1][k] - a * p[1] + a * p[0];
        out.field_mut(3)[k] = d[2][k] - a * p[2] + a * p[3];
        out.field_mut(4)[k] = -d[3][k] - a * p[3] - a * p[2];
    }
    Ok(out)
}

/// Right-hand side of the rescaled system `du/dt = -alpha_z du/dz + a B u`.
pub fn u_rhs(u: &Slice, a: f64, dz: f64) -> Result<Slice> {
    let d = gradients(u, dz)?;
    let op = DiracOperator::new(a);
    let t = op.transport();
    let b = op.coupling.b;
    let mut out = Slice::zeros(u.z_min(), u.len());
    for k in 0..u.len() {
        let uk = Vector4::from_fn(|i, _| u.field(i + 1)[k]);
        let dk = Vector4::from_fn(|i, _| d[i][k]);
        let r = t * dk + b * uk * a;
        for i in 0..4 {
            out.field_mut(i + 1)[k] = r[i];
        }
    }
    Ok(out)
}

/// `u = e^{a t} phi`.
pub fn rescale(phi: &Slice, a: f64, t: f64) -> Slice {
    let f = (a * t).exp();
    let mut u = phi.clone();
    for i in 1..=FIELDS {
        u.field_mut(i).iter_mut().for_each(|v| *v *= f);
    }
    u
}

/// Right-hand side of the matrix form, expanded with complex arithmetic:
/// `du/dt = -i (alpha_z (-i du/dz) + beta m u)`. Returns real and imaginary
/// parts.
pub fn matrix_form_rhs(u: &Slice, m: f64, dz: f64) -> Result<(Slice, Slice)> {
    let d = gradients(u, dz)?;
    let op = DiracOperator::new(m);
    let alpha = complex(&op.alpha_z);
    let beta = op.beta();
    let i = Complex64::new(0.0, 1.0);
    let mut re = Slice::zeros(u.z_min(), u.len());
    let mut im = Slice::zeros(u.z_min(), u.len());
    for k in 0..u.len() {
        let uk = Vector4::from_fn(|r, _| Complex64::new(u.field(r + 1)[k], 0.0));
        let pk = Vector4::from_fn(|r, _| -i * d[r][k]);
        let v = alpha * pk + beta * uk * Complex64::new(m, 0.0);
        let rhs = v * (-i);
        for r in 0..4 {
            re.field_mut(r + 1)[k] = rhs[r].re;
            im.field_mut(r + 1)[k] = rhs[r].im;
        }
    }
    Ok((re, im))
}

fn max_slice_diff(a: &Slice, b: &Slice) -> f64 {
    (1..=FIELDS)
        .flat_map(|i| a.field(i).iter().zip(b.field(i)).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

fn random_slice(len: usize, seed: u64) -> Slice {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Slice::zeros(-(len as i64 / 2), len);
    for i in 1..=FIELDS {
        s.field_mut(i).iter_mut().for_each(|v| *v = rng.gen_range(-1.0..1.0));
    }
    s
}

/// Involution and anticommutation identities, hermiticity, and agreement of
/// the expanded matrix form with the real rescaled system on a random field.
pub fn dirac_matrix_checks(m: f64) -> Report {
    const TOL: f64 = 1e-12;
    let op = DiracOperator::new(m);
    let id = Matrix4::<Complex64>::identity();
    let alpha = complex(&op.alpha_z);
    let beta = op.beta();
    let mut checks = vec![
        Check::at_most("alpha_z^2 = I", max_abs(&(alpha * alpha - id)), TOL),
        Check::at_most("beta^2 = I", max_abs(&(beta * beta - id)), TOL),
        Check::at_most("{alpha_z, beta} = 0", max_abs(&(alpha * beta + beta * alpha)), TOL),
        Check::at_most("alpha_z hermitian", max_abs(&(alpha - alpha.adjoint())), TOL),
        Check::at_most("beta hermitian", max_abs(&(beta - beta.adjoint())), TOL),
        Check::at_most(
            "B antisymmetric",
            if op.coupling.is_antisymmetric() { 0.0 } else { 1.0 },
            0.0,
        ),
    ];
    let u = random_slice(64, 0x5eed);
    let dz = 0.1;
    match (matrix_form_rhs(&u, m, dz), u_rhs(&u, m, dz)) {
        (Ok((re, im)), Ok(real)) => {
            checks.push(Check::at_most(
                "matrix form equals real system",
                max_slice_diff(&re, &real),
                TOL,
            ));
            checks.push(Check::at_most(
                "matrix form stays real",
                max_slice_diff(&im, &Slice::zeros(im.z_min(), im.len())),
                TOL,
            ));
        }
        _ => checks.push(Check::at_most("matrix form evaluation", 1.0, 0.0)),
    }
    Report { checks }
}

/// Sorted eigenvalues of the Hermitian matrix `alpha_z k + beta m`.
pub fn energies(m: f64, k: f64) -> [f64; 4] {
    let eig = SymmetricEigen::new(DiracOperator::new(m).hamiltonian(k));
    let mut e: [f64; 4] = std::array::from_fn(|i| eig.eigenvalues[i]);
    e.sort_by(f64::total_cmp);
    e
}

/// Eigenvalues are `±sqrt(k^2 + m^2)`, each twice, and `H^2 = (k^2 + m^2) I`.
pub fn dispersion_check(m: f64, ks: &[f64]) -> Report {
    const TOL: f64 = 1e-10;
    let mut checks = Vec::new();
    for &k in ks {
        let energy = (k * k + m * m).sqrt();
        let expected = [-energy, -energy, energy, energy];
        let got = energies(m, k);
        let dev = got
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        checks.push(Check::at_most(format!("eigenvalues k={k} m={m}"), dev, TOL));
        let h = DiracOperator::new(m).hamiltonian(k);
        let sq = h * h - Matrix4::<Complex64>::identity() * Complex64::new(energy * energy, 0.0);
        checks.push(Check::at_most(format!("H^2 = E^2 I k={k} m={m}"), max_abs(&sq), TOL));
    }
    Report { checks }
}

/// Initial data for the continuum runs, placed in `phi4` (or `phi1` for the
/// norm-drift check).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Profile {
    /// Gaussian whose standard deviation spans `width_sites` sites of the
    /// coarsest grid.
    Gaussian { width_sites: f64 },
    /// Unit mass at `z = 0`. Has no continuum order of accuracy.
    Point,
}

impl Profile {
    pub fn is_smooth(&self) -> bool {
        matches!(self, Profile::Gaussian { .. })
    }
}

fn initial_slice(profile: Profile, field: usize, coarse_h: f64, h: f64, half_width: f64) -> Slice {
    let j = (half_width / h).round() as i64;
    let mut s = Slice::zeros(-j, (2 * j + 1) as usize);
    match profile {
        Profile::Gaussian { width_sites } => {
            let sigma = width_sites * coarse_h;
            for z in -j..=j {
                let x = z as f64 * h;
                s.set(field, z, (-x * x / (2.0 * sigma * sigma)).exp());
            }
        }
        Profile::Point => s.set(field, 0, 1.0 / h),
    }
    s
}

/// Runs the lattice with `Δt = Δz = 1/steps_per_unit` and `alpha = a Δt`.
pub fn lattice_run(a: f64, horizon: f64, steps_per_unit: u32, profile: Profile, field: usize, coarse_h: f64) -> Result<Slice> {
    let h = 1.0 / steps_per_unit as f64;
    let steps = horizon * steps_per_unit as f64;
    if (steps - steps.round()).abs() > 1e-9 || steps < 1.0 {
        return Err(Error::Config(format!(
            "horizon {horizon} is not a whole number of steps at Δt = 1/{steps_per_unit}"
        )));
    }
    let half_width = match profile {
        Profile::Gaussian { width_sites } => 10.0 * width_sites * coarse_h,
        Profile::Point => 0.0,
    };
    let mut s = initial_slice(profile, field, coarse_h, h, half_width);
    for _ in 0..steps.round() as usize {
        s = step_slice(&s, a * h);
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub a: f64,
    pub horizon: f64,
    pub steps_per_unit: Vec<u32>,
    pub profile: Profile,
    /// False for initial data without a continuum limit; the order may degrade.
    pub smooth: bool,
    /// L2 distance of each level from the finest, on the coarsest grid points.
    pub errors_vs_finest: Vec<f64>,
    /// L2 distance between consecutive levels.
    pub successive_differences: Vec<f64>,
    /// `log2` of the last ratio of successive differences.
    pub order: Option<f64>,
    /// Same estimate from the errors against the finest level.
    pub order_vs_finest: Option<f64>,
}

fn coarse_l2(a: &Slice, ra: i64, b: &Slice, rb: i64, coarse: &Slice, h0: f64) -> f64 {
    let mut sum = 0.0;
    for j in coarse.z_min()..=coarse.z_max() {
        for i in 1..=FIELDS {
            sum += (a.get(i, j * ra) - b.get(i, j * rb)).powi(2);
        }
    }
    (sum * h0).sqrt()
}

/// Self-convergence of the lattice scheme under refinement by factors of
/// two, with `a` and the horizon held fixed in physical units.
pub fn scheme_convergence(a: f64, horizon: f64, steps_per_unit: &[u32], profile: Profile) -> Result<ConvergenceReport> {
    if steps_per_unit.len() < 3 {
        return Err(Error::Config("need at least three refinement levels".into()));
    }
    if steps_per_unit.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::Config("each level must halve Δt".into()));
    }
    let h0 = 1.0 / steps_per_unit[0] as f64;
    let runs: Vec<Slice> = steps_per_unit
        .iter()
        .map(|&s| lattice_run(a, horizon, s, profile, 4, h0))
        .collect::<Result<_>>()?;
    let ratio = |k: usize| (steps_per_unit[k] / steps_per_unit[0]) as i64;
    let last = runs.len() - 1;
    let coarse = &runs[0];
    let errors_vs_finest: Vec<f64> = (0..last)
        .map(|k| coarse_l2(&runs[k], ratio(k), &runs[last], ratio(last), coarse, h0))
        .collect();
    let successive_differences: Vec<f64> = (0..last)
        .map(|k| coarse_l2(&runs[k], ratio(k), &runs[k + 1], ratio(k + 1), coarse, h0))
        .collect();
    let log2_ratio = |x: f64, y: f64| {
        if x > 0.0 && y > 0.0 {
            Some((x / y).log2())
        } else {
            None
        }
    };
    let n = successive_differences.len();
    let order = log2_ratio(successive_differences[n - 2], successive_differences[n - 1]);
    // With the finest level as reference, e_h / e_{h/2} = 2^p + 1 for refinement by 2.
    let m = errors_vs_finest.len();
    let order_vs_finest = if m >= 2 && errors_vs_finest[m - 1] > 0.0 {
        let r = errors_vs_finest[m - 2] / errors_vs_finest[m - 1] - 1.0;
        (r > 0.0).then(|| r.log2())
    } else {
        None
    };
    Ok(ConvergenceReport {
        a,
        horizon,
        steps_per_unit: steps_per_unit.to_vec(),
        profile,
        smooth: profile.is_smooth(),
        errors_vs_finest,
        successive_differences,
        order,
        order_vs_finest,
    })
}

/// Relative change of `sum_z (u1^2 + u2^2) Δz` between `t = 0` and the
/// horizon for the lattice at `alpha = a Δt`, with Gaussian data in `phi1`.
pub fn u_norm_drift(a: f64, horizon: f64, alpha: f64, width_sites: f64) -> Result<f64> {
    if a <= 0.0 || alpha <= 0.0 {
        return Err(Error::Config("norm drift needs a > 0 and alpha > 0".into()));
    }
    let steps_per_unit = (a / alpha).round() as u32;
    let h = 1.0 / steps_per_unit as f64;
    let profile = Profile::Gaussian { width_sites };
    let norm = |s: &Slice| -> f64 {
        (s.field(1).iter().map(|v| v * v).sum::<f64>() + s.field(2).iter().map(|v| v * v).sum::<f64>()) * h
    };
    let start = initial_slice(profile, 1, h, h, 10.0 * width_sites * h);
    let end = lattice_run(a, horizon, steps_per_unit, profile, 1, h)?;
    let u_end = rescale(&end, a, horizon);
    let n0 = norm(&start);
    Ok((norm(&u_end) - n0).abs() / n0)
}

/// Method-of-lines integration of the rescaled system (central differences,
/// classical RK4), used as an independent continuum reference.
pub fn integrate_u_system(u0: &Slice, a: f64, dz: f64, dt: f64, steps: usize) -> Result<Slice> {
    let axpy = |x: &Slice, y: &Slice, c: f64| {
        let mut out = x.clone();
        for i in 1..=FIELDS {
            for (o, v) in out.field_mut(i).iter_mut().zip(y.field(i)) {
                *o += c * v;
            }
        }
        out
    };
    let mut u = u0.clone();
    for _ in 0..steps {
        let k1 = u_rhs(&u, a, dz)?;
        let k2 = u_rhs(&axpy(&u, &k1, dt / 2.0), a, dz)?;
        let k3 = u_rhs(&axpy(&u, &k2, dt / 2.0), a, dz)?;
        let k4 = u_rhs(&axpy(&u, &k3, dt), a, dz)?;
        u = axpy(&u, &k1, dt / 6.0);
        u = axpy(&u, &k2, dt / 3.0);
        u = axpy(&u, &k3, dt / 3.0);
        u = axpy(&u, &k4, dt / 6.0);
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smooth_slice(len: usize, dz: f64, f: impl Fn(usize, f64) -> f64) -> Slice {
        let mut s = Slice::zeros(-(len as i64 / 2), len);
        for i in 1..=4 {
            for z in s.z_min()..=s.z_max() {
                s.set(i, z, f(i, z as f64 * dz));
            }
        }
        s
    }

    #[test]
    fn matrix_identities() {
        for m in [0.0, 1.0, 4.0] {
            let r = dirac_matrix_checks(m);
            assert!(r.all_pass(), "{r:?}");
        }
        let op = DiracOperator::new(1.0);
        let beta = op.beta();
        let i = Complex64::new(0.0, 1.0);
        assert_eq!(beta[(0, 1)], -i);
        assert_eq!(beta[(1, 0)], i);
        assert_eq!(beta[(2, 3)], i);
        assert_eq!(beta[(3, 2)], -i);
    }

    #[test]
    fn dispersion_cases() {
        assert_eq!(energies(2.0, 0.0).map(|e| (e * 1e9).round() / 1e9), [-2.0, -2.0, 2.0, 2.0]);
        let e = energies(0.0, 1.5);
        assert!((e[0] + 1.5).abs() < 1e-12 && (e[3] - 1.5).abs() < 1e-12);
        let e = energies(4.0, 3.0);
        for (got, want) in e.iter().zip([-5.0, -5.0, 5.0, 5.0]) {
            assert!((got - want).abs() < 1e-10);
        }
        assert!(dispersion_check(1.0, &[0.0, 1.0, 3.0, 0.37]).all_pass());
    }

    #[test]
    fn constant_fields_only_mix() {
        let phi = smooth_slice(9, 0.1, |i, _| i as f64);
        let r = pde_rhs(&phi, 0.7, 0.1).unwrap();
        for k in 0..9 {
            assert!((r.field(1)[k] - (-0.7 * (1.0 + 2.0))).abs() < 1e-12);
            assert!((r.field(2)[k] - (-0.7 * 2.0 + 0.7 * 1.0)).abs() < 1e-12);
            assert!((r.field(3)[k] - (-0.7 * 3.0 + 0.7 * 4.0)).abs() < 1e-12);
            assert!((r.field(4)[k] - (-0.7 * 4.0 - 0.7 * 3.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn massless_is_pure_transport() {
        let dz = 0.01;
        let phi = smooth_slice(201, dz, |i, x| (x + i as f64).sin());
        let r = pde_rhs(&phi, 0.0, dz).unwrap();
        for k in 1..200 {
            let x = (k as i64 + phi.z_min()) as f64 * dz;
            for i in 1..=4 {
                let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
                assert!((r.field(i)[k] - sign * (x + i as f64).cos()).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn grid_too_small() {
        assert!(matches!(pde_rhs(&Slice::zeros(0, 2), 1.0, 0.1), Err(Error::GridTooSmall(2))));
        assert!(matches!(u_rhs(&Slice::zeros(0, 1), 1.0, 0.1), Err(Error::GridTooSmall(1))));
    }

    #[test]
    fn rescaling_removes_decay() {
        let (a, t, dz) = (0.8, 0.6, 0.05);
        let phi = random_slice(40, 17);
        let lhs = {
            // e^{a t} (phi_t + a phi) is the time derivative of u.
            let mut r = pde_rhs(&phi, a, dz).unwrap();
            for i in 1..=4 {
                for (x, p) in r.field_mut(i).iter_mut().zip(phi.field(i)) {
                    *x = (a * t).exp() * (*x + a * p);
                }
            }
            r
        };
        let rhs = u_rhs(&rescale(&phi, a, t), a, dz).unwrap();
        assert!(max_slice_diff(&lhs, &rhs) < 1e-12);
        assert_eq!(rescale(&phi, 0.0, t), phi);
        assert_eq!(rescale(&phi, a, 0.0), phi);
    }

    #[test]
    fn first_order_expansion_matches_pde() {
        // (step(phi) - phi) / h must approach pde_rhs(phi) linearly in h.
        let a = 1.0;
        let mut errs = Vec::new();
        for n in [64u32, 128, 256] {
            let h = 1.0 / n as f64;
            let phi = smooth_slice(8 * n as usize + 1, h, |i, x| (-(x * x) * (1.0 + i as f64)).exp());
            let next = step_slice(&phi, a * h);
            let rhs = pde_rhs(&phi, a, h).unwrap();
            let mut err: f64 = 0.0;
            for i in 1..=4 {
                for z in phi.z_min() + 2..=phi.z_max() - 2 {
                    let fd = (next.get(i, z) - phi.get(i, z)) / h;
                    err = err.max((fd - rhs.get(i, z)).abs());
                }
            }
            errs.push(err);
        }
        let p1 = (errs[0] / errs[1]).log2();
        let p2 = (errs[1] / errs[2]).log2();
        assert!((p1 - 1.0).abs() < 0.1 && (p2 - 1.0).abs() < 0.1, "{errs:?}");
    }

    #[test]
    fn rescaled_bounded() {
        let s = lattice_run(1.0, 2.0, 32, Profile::Gaussian { width_sites: 8.0 }, 4, 1.0 / 32.0).unwrap();
        let u = rescale(&s, 1.0, 2.0);
        let peak = (1..=4).flat_map(|i| u.field(i).iter()).fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(peak < 2.0, "peak {peak}");
        let raw_peak = (1..=4).flat_map(|i| s.field(i).iter()).fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(raw_peak < 0.5 * peak);
    }

    #[test]
    fn self_convergence() {
        let r = scheme_convergence(1.0, 1.0, &[16, 32, 64], Profile::Gaussian { width_sites: 8.0 }).unwrap();
        let p = r.order.unwrap();
        assert!((0.7..=1.3).contains(&p), "{r:?}");
        let q = r.order_vs_finest.unwrap();
        assert!((0.7..=1.3).contains(&q), "{r:?}");
        assert!(r.smooth);
    }

    #[test]
    fn massless_transport_is_exact() {
        let r = scheme_convergence(0.0, 1.0, &[16, 32, 64], Profile::Gaussian { width_sites: 8.0 }).unwrap();
        assert!(r.errors_vs_finest.iter().all(|&e| e == 0.0));
        assert_eq!(r.order, None);
    }

    #[test]
    fn point_source_is_flagged() {
        let r = scheme_convergence(1.0, 1.0, &[16, 32, 64], Profile::Point).unwrap();
        assert!(!r.smooth);
    }

    #[test]
    fn bad_levels() {
        let g = Profile::Gaussian { width_sites: 8.0 };
        assert!(scheme_convergence(1.0, 1.0, &[16, 32], g).is_err());
        assert!(scheme_convergence(1.0, 1.0, &[16, 48, 64], g).is_err());
        assert!(scheme_convergence(1.0, 0.01, &[16, 32, 64], g).is_err());
    }

    #[test]
    fn norm_drift_small() {
        let d = u_norm_drift(1.0, 1.0, 0.01, 50.0).unwrap();
        assert!(d <= 0.02, "drift {d}");
    }

    #[test]
    fn lattice_approaches_continuum() {
        let a = 1.0;
        let sigma = 0.5;
        let fine = 256u32;
        let dz = 1.0 / fine as f64;
        let j = (5.0 / dz) as i64;
        let mut u0 = Slice::zeros(-j, (2 * j + 1) as usize);
        for z in -j..=j {
            let x = z as f64 * dz;
            u0.set(4, z, (-x * x / (2.0 * sigma * sigma)).exp());
        }
        let reference = integrate_u_system(&u0, a, dz, dz / 2.0, 2 * fine as usize).unwrap();
        let mut errs = Vec::new();
        for n in [16u32, 32, 64] {
            let s = lattice_run(a, 1.0, n, Profile::Gaussian { width_sites: sigma * n as f64 }, 4, 1.0 / n as f64).unwrap();
            let u = rescale(&s, a, 1.0);
            let r = (fine / n) as i64;
            let mut e: f64 = 0.0;
            for z in -(2 * n as i64)..=(2 * n as i64) {
                for i in 1..=4 {
                    e = e.max((u.get(i, z) - reference.get(i, z * r)).abs());
                }
            }
            errs.push(e);
        }
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
        let p = (errs[1] / errs[2]).log2();
        assert!((0.7..=1.3).contains(&p), "{errs:?}");
    }
}
