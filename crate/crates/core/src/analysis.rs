//! Residuals of the difference equations on sample data, convergence rates,
//! distances to the exact ensemble, and contour grids.

use std::io::Write;

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::evolver::update_rule;
use crate::io::GridPoint;
use crate::lattice::{check_field, normalize, slice_norm, FieldSet, FieldView, SampleFieldSet, FIELDS};
use crate::sampler::EnsembleSampler;

/// Relative defect of update rule `i` between slices `t - 1` and `t`:
///
/// `|| f^i(., t) - rule_i(f(., t - 1)) || / || f^i(., t) ||`
///
/// using the ensemble `alpha`, not the frequencies realised in the sample.
/// A zero denominator is reported as [`Error::ZeroNorm`].
pub fn residual(field: &impl FieldView, t: usize, i: usize, alpha: f64) -> Result<f64> {
    check_field(i)?;
    let t_max = field.t_max();
    if t == 0 || t > t_max {
        return Err(Error::TimeRange { t, t_max });
    }
    let denom = slice_norm(field, i, t)?;
    if denom == 0.0 {
        return Err(Error::ZeroNorm { t, i });
    }
    let r = t_max as i64;
    let defect: f64 = (-r..=r)
        .map(|z| {
            let predicted = update_rule(|j, y| field.value(j, t - 1, y), i, z, alpha);
            (field.value(i, t, z) - predicted).powi(2)
        })
        .sum();
    Ok(defect.sqrt() / denom)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorEntry {
    pub n_pairs: u64,
    pub t: usize,
    pub i: usize,
    pub e: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ErrorSeries {
    pub entries: Vec<ErrorEntry>,
}

impl ErrorSeries {
    /// Entries for one `(t, i)` in checkpoint order.
    pub fn select(&self, t: usize, i: usize) -> impl Iterator<Item = &ErrorEntry> {
        self.entries.iter().filter(move |e| e.t == t && e.i == i)
    }

    pub fn get(&self, n_pairs: u64, t: usize, i: usize) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.n_pairs == n_pairs && e.t == t && e.i == i)
            .map(|e| e.e)
    }

    /// `n,t,i,E` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,t,i,E")?;
        for e in &self.entries {
            writeln!(w, "{},{},{},{}", e.n_pairs, e.t, e.i, e.e)?;
        }
        Ok(())
    }

    pub fn read_csv(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::Config(format!("series csv: {msg}"));
        let mut lines = text.lines();
        if lines.next() != Some("n,t,i,E") {
            return Err(bad("missing `n,t,i,E` header".into()));
        }
        let mut entries = Vec::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let c: Vec<&str> = line.split(',').collect();
            if c.len() != 4 {
                return Err(bad(format!("bad row `{line}`")));
            }
            let err = |e: &dyn std::fmt::Display| bad(format!("row `{line}`: {e}"));
            entries.push(ErrorEntry {
                n_pairs: c[0].parse().map_err(|e| err(&e))?,
                t: c[1].parse().map_err(|e| err(&e))?,
                i: c[2].parse().map_err(|e| err(&e))?,
                e: c[3].parse().map_err(|e| err(&e))?,
            });
        }
        Ok(ErrorSeries { entries })
    }
}

/// Powers of two from 2^4 to 2^17.
pub fn default_checkpoints() -> Vec<u64> {
    (4..=17).map(|k| 1u64 << k).collect()
}

pub const DEFAULT_TIMES: [usize; 3] = [2, 8, 16];

/// Residuals at every checkpoint for the requested times and field indices.
/// Undefined residuals (empty slices) are left out.
pub fn convergence_study(
    config: &SimConfig,
    checkpoints: &[u64],
    times: &[usize],
    fields: &[usize],
) -> Result<ErrorSeries> {
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("checkpoints must be strictly increasing".into()));
    }
    for &t in times {
        if t == 0 || t > config.t_ret {
            return Err(Error::TimeRange { t, t_max: config.t_ret });
        }
    }
    for &i in fields {
        check_field(i)?;
    }
    let mut sampler = EnsembleSampler::new(config)?;
    let mut series = ErrorSeries::default();
    for &n in checkpoints {
        let sample = sampler.advance_to(n)?;
        for &t in times {
            for &i in fields {
                match residual(&sample, t, i, config.alpha) {
                    Ok(e) => series.entries.push(ErrorEntry { n_pairs: n, t, i, e }),
                    Err(Error::ZeroNorm { .. }) => {}
                    Err(other) => return Err(other),
                }
            }
        }
    }
    Ok(series)
}

/// Least-squares line through `(log n, log E)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    pub points: usize,
}

/// Ordinary least squares in log-log coordinates over points with `n > 0`
/// and `E > 0`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<SlopeFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(n, e)| n > 0.0 && e > 0.0)
        .map(|&(n, e)| (n.ln(), e.ln()))
        .collect();
    let k = logs.len();
    if k < 3 {
        return Err(Error::TooFewPoints(k));
    }
    let kf = k as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / kf;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / kf;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::TooFewPoints(1));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms_residual = (logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / kf)
        .sqrt();
    Ok(SlopeFit {
        slope,
        intercept,
        rms_residual,
        points: k,
    })
}

/// Log-log slope of `E` against `n` for one `(t, i)`.
pub fn fit_slope(series: &ErrorSeries, t: usize, i: usize) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = series
        .select(t, i)
        .map(|e| (e.n_pairs as f64, e.e))
        .collect();
    fit_power_law(&pts)
}

fn checked_slice(a: &impl FieldView, b: &impl FieldView, t: usize, i: usize) -> Result<()> {
    check_field(i)?;
    if a.t_max() != b.t_max() {
        return Err(Error::ShapeMismatch(a.t_max(), b.t_max()));
    }
    if t > a.t_max() {
        return Err(Error::TimeRange { t, t_max: a.t_max() });
    }
    Ok(())
}

/// `||a - b|| / ||b||` over field `i` at time `t`.
pub fn relative_distance(a: &FieldSet, b: &FieldSet, t: usize, i: usize) -> Result<f64> {
    checked_slice(a, b, t, i)?;
    let denom = slice_norm(b, i, t)?;
    if denom == 0.0 {
        return Err(Error::ZeroNorm { t, i });
    }
    let diff: f64 = a
        .row(i, t)
        .iter()
        .zip(b.row(i, t))
        .map(|(x, y)| (x - y).powi(2))
        .sum();
    Ok(diff.sqrt() / denom)
}

/// Like [`relative_distance`] but over all four fields of the slice at once.
pub fn slice_distance(a: &FieldSet, b: &FieldSet, t: usize) -> Result<f64> {
    checked_slice(a, b, t, 1)?;
    let (mut diff, mut norm) = (0.0, 0.0);
    for i in 1..=FIELDS {
        for (x, y) in a.row(i, t).iter().zip(b.row(i, t)) {
            diff += (x - y).powi(2);
            norm += y * y;
        }
    }
    if norm == 0.0 {
        return Err(Error::ZeroNorm { t, i: 0 });
    }
    Ok((diff / norm).sqrt())
}

/// Relative L2 distance of the normalized sample from the exact fields.
pub fn compare_to_exact(sample: &SampleFieldSet, exact: &FieldSet, t: usize, i: usize) -> Result<f64> {
    relative_distance(&normalize(sample)?, exact, t, i)
}

/// Every `(t, z)` of field `i`, `t` outer and `z` ascending, including the
/// structural zeros, so any contour plotter can take it as a full grid.
pub fn contour_grid(field: &FieldSet, i: usize) -> Result<Vec<GridPoint>> {
    check_field(i)?;
    let r = field.t_max() as i64;
    Ok((0..=field.t_max())
        .flat_map(|t| {
            (-r..=r).map(move |z| GridPoint {
                t,
                z,
                value: field.get(i, t, z),
            })
        })
        .collect())
}

/// Entrywise `a - b`.
pub fn difference(a: &FieldSet, b: &FieldSet) -> Result<FieldSet> {
    if a.t_max() != b.t_max() {
        return Err(Error::ShapeMismatch(a.t_max(), b.t_max()));
    }
    let mut out = a.clone();
    let r = a.t_max() as i64;
    for i in 1..=FIELDS {
        for t in 0..=a.t_max() {
            for z in -r..=r {
                out.set(i, t, z, a.get(i, t, z) - b.get(i, t, z));
            }
        }
    }
    Ok(out)
}
