//! Empirical-versus-limit comparisons: Kolmogorov-Smirnov statistics,
//! histograms, convergence sweeps over matrix size, and local statistics of
//! balls around uniformly chosen roots.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{EnsembleKind, EnsembleParams};
use crate::error::{param_err, Result};
use crate::graph::RootedBall;
use crate::limits::{ContinuousLaw, DEFAULT_QUAD_TOL};
use crate::sampling::RngStream;
use crate::spectral::eigenvalues;

/// `sup |F_emp - F|` over sorted `samples`, checking both one-sided limits of
/// the empirical cdf at each sample.
pub fn ks_statistic_with<F>(samples: &[f64], mut cdf: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if samples.is_empty() {
        return param_err("KS statistic needs at least one sample");
    }
    if samples.iter().any(|x| x.is_nan()) || samples.windows(2).any(|w| w[0] > w[1]) {
        return param_err("KS samples must be sorted ascending and free of NaN");
    }
    let m = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x)?;
        d = d.max(f - i as f64 / m).max((i + 1) as f64 / m - f);
    }
    Ok(d.clamp(0.0, 1.0))
}

/// KS distance between sorted `samples` and `law`.
pub fn ks_statistic(samples: &[f64], law: &ContinuousLaw) -> Result<f64> {
    ks_statistic_with(samples, |x| law.cdf(x, DEFAULT_QUAD_TOL))
}

/// Two-sample KS distance; inputs need not be sorted.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return param_err("two-sample KS needs nonempty samples");
    }
    let sorted = |xs: &[f64]| {
        let mut v = xs.to_vec();
        v.sort_by(f64::total_cmp);
        v
    };
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// `count / (total * width)` where `total` includes out-of-range samples.
    pub density: Vec<f64>,
}

/// Bin `samples` on `[e_i, e_{i+1})`, the last bin closed on the right.
pub fn histogram(samples: &[f64], edges: &[f64]) -> Result<Histogram> {
    if edges.len() < 2 {
        return param_err("a histogram needs at least two bin edges");
    }
    if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
        return param_err("bin edges must be finite and strictly increasing");
    }
    let k = edges.len() - 1;
    let mut counts = vec![0u64; k];
    let (first, last) = (edges[0], edges[k]);
    for &x in samples {
        if !(x >= first && x <= last) {
            continue;
        }
        let bin = (edges.partition_point(|&e| e <= x) - 1).min(k - 1);
        counts[bin] += 1;
    }
    let total = samples.len() as f64;
    let density = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| {
            if total > 0.0 {
                c as f64 / (total * (w[1] - w[0]))
            } else {
                0.0
            }
        })
        .collect();
    Ok(Histogram {
        bin_edges: edges.to_vec(),
        counts,
        density,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub trials: usize,
    pub ks_mean: f64,
    pub ks_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
}

/// KS distance between the eigenvalues of one sampled matrix and the limit law.
pub fn eigenvalue_ks(params: &EnsembleParams, n: usize, stream: &mut RngStream) -> Result<f64> {
    let t = params.sample(n, stream)?;
    ks_statistic(&eigenvalues(&t), &params.limit_law())
}

/// For each size, the mean and sample standard deviation of the eigenvalue
/// KS distance over `trials` matrices. Trial `t` at size index `i` draws from
/// `stream.substream(i).substream(t)`, so the report does not depend on
/// thread scheduling.
pub fn convergence_sweep(
    params: &EnsembleParams,
    sizes: &[usize],
    trials: usize,
    stream: &RngStream,
) -> Result<ConvergenceReport> {
    if trials == 0 {
        return param_err("a convergence sweep needs at least one trial");
    }
    if sizes.is_empty() {
        return param_err("a convergence sweep needs at least one size");
    }
    if sizes.iter().any(|&n| n < 2) || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return param_err("sizes must be at least 2 and strictly increasing");
    }
    let rows = sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let per_size = stream.substream(i as u64);
            let ks = (0..trials)
                .into_par_iter()
                .map(|t| eigenvalue_ks(params, n, &mut per_size.substream(t as u64)))
                .collect::<Result<Vec<f64>>>()?;
            let mean = ks.iter().sum::<f64>() / trials as f64;
            let std = if trials > 1 {
                (ks.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / (trials - 1) as f64).sqrt()
            } else {
                0.0
            };
            Ok(ConvergenceRow {
                n,
                trials,
                ks_mean: mean,
                ks_std: std,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport { rows })
}

/// One ball drawn around a uniformly chosen root.
#[derive(Debug, Clone, PartialEq)]
pub struct BallDraw {
    /// Root position, `0..n`.
    pub root: usize,
    pub ball: RootedBall,
}

impl BallDraw {
    /// Weight of the edge from the root to its right neighbour, or to its
    /// left neighbour when the root is the last vertex.
    pub fn root_edge(&self) -> Option<f64> {
        let b = &self.ball;
        b.edges
            .get(b.root_pos)
            .or_else(|| b.root_pos.checked_sub(1).and_then(|i| b.edges.get(i)))
            .copied()
    }

    pub fn root_loop(&self) -> f64 {
        self.ball.loops[self.ball.root_pos]
    }

    /// `|right - left|` for the two edges at the root, when both exist.
    pub fn root_edge_gap(&self) -> Option<f64> {
        let b = &self.ball;
        let left = b.root_pos.checked_sub(1).and_then(|i| b.edges.get(i))?;
        let right = b.edges.get(b.root_pos)?;
        Some((right - left).abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallStatistics {
    pub params: EnsembleParams,
    pub n: usize,
    pub radius: usize,
    pub draws: Vec<BallDraw>,
}

impl BallStatistics {
    /// The root statistic whose limit law is `Unif[0, 1]` (Hermite:
    /// `edge^2 / beta`) or `Unif[beta (gamma - 1), beta (gamma + 1)]`
    /// (Laguerre: the root loop weight), sorted ascending.
    pub fn root_statistic(&self) -> Vec<f64> {
        let beta = self.params.beta();
        let mut v: Vec<f64> = match self.params.kind() {
            EnsembleKind::Hermite => self
                .draws
                .iter()
                .filter_map(|d| d.root_edge().map(|w| w * w / beta))
                .collect(),
            EnsembleKind::Laguerre => self.draws.iter().map(BallDraw::root_loop).collect(),
        };
        v.sort_by(f64::total_cmp);
        v
    }

    /// Cdf of the limit law of [`Self::root_statistic`].
    pub fn root_statistic_limit_cdf(&self, y: f64) -> f64 {
        let (lo, hi) = match self.params {
            EnsembleParams::Hermite { .. } => (0.0, 1.0),
            EnsembleParams::Laguerre { beta, gamma } => {
                (beta * (gamma - 1.0), beta * (gamma + 1.0))
            }
        };
        ((y - lo) / (hi - lo)).clamp(0.0, 1.0)
    }

    /// KS distance between the root statistic and its limit law.
    pub fn root_ks(&self) -> Result<f64> {
        ks_statistic_with(&self.root_statistic(), |y| {
            Ok(self.root_statistic_limit_cdf(y))
        })
    }

    /// Empirical `q`-quantile of the gap between the two root edges.
    pub fn root_edge_gap_quantile(&self, q: f64) -> Option<f64> {
        let mut gaps: Vec<f64> = self
            .draws
            .iter()
            .filter_map(BallDraw::root_edge_gap)
            .collect();
        if gaps.is_empty() || !(0.0..=1.0).contains(&q) {
            return None;
        }
        gaps.sort_by(f64::total_cmp);
        let idx = ((q * gaps.len() as f64).ceil() as usize).clamp(1, gaps.len()) - 1;
        Some(gaps[idx])
    }

    /// Empirical `q`-quantile of `|loop - beta (gamma + 1 - 2 root / n)|`
    /// (Laguerre only).
    pub fn loop_deviation_quantile(&self, q: f64) -> Option<f64> {
        let EnsembleParams::Laguerre { beta, gamma } = self.params else {
            return None;
        };
        let mut dev: Vec<f64> = self
            .draws
            .iter()
            .map(|d| {
                let u = d.root as f64 / self.n as f64;
                (d.root_loop() - beta * (gamma + 1.0 - 2.0 * u)).abs()
            })
            .collect();
        dev.sort_by(f64::total_cmp);
        let idx = ((q * dev.len() as f64).ceil() as usize).clamp(1, dev.len()) - 1;
        dev.get(idx).copied()
    }
}

/// Draw `draws` balls of radius `r` around uniform roots of an implicit
/// `n x n` matrix, sampling only the `O(r)` entries inside each ball. Draw
/// `d` uses `stream.substream(d)`.
pub fn ball_statistics(
    params: &EnsembleParams,
    n: usize,
    r: usize,
    draws: usize,
    stream: &RngStream,
) -> Result<BallStatistics> {
    if n < params.min_size() {
        return param_err(format!("n = {n} is too small for this ensemble"));
    }
    if 2 * r >= n {
        return param_err(format!("radius {r} must be below n / 2 = {}", n / 2));
    }
    let draws = (0..draws)
        .into_par_iter()
        .map(|d| {
            let mut s = stream.substream(d as u64);
            let root = s.uniform_index(n);
            let lo = root.saturating_sub(r);
            let hi = (root + r).min(n - 1);
            let loops = (lo..=hi)
                .map(|i| params.sample_diag_entry(n, i, &mut s))
                .collect::<Result<Vec<_>>>()?;
            let edges = (lo..hi)
                .map(|i| params.sample_offdiag_entry(n, i, &mut s))
                .collect::<Result<Vec<_>>>()?;
            Ok(BallDraw {
                root,
                ball: RootedBall {
                    radius: r,
                    loops,
                    edges,
                    root_pos: root - lo,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BallStatistics {
        params: *params,
        n,
        radius: r,
        draws,
    })
}
