//! Estimation helpers for threshold scans: Wilson intervals, isotonic
//! smoothing and half-point location.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::events::{SampleSeed, TrialRunner};

pub const DEFAULT_Z: f64 = 1.96;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Weighted least-squares nondecreasing fit by pool-adjacent-violators.
pub fn isotonic(values: &[f64], weights: &[f64]) -> Vec<f64> {
    assert_eq!(values.len(), weights.len());
    // Blocks of (mean, weight, length).
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((v, w, 1));
        while blocks.len() >= 2 {
            let (m2, w2, l2) = blocks[blocks.len() - 1];
            let (m1, w1, l1) = blocks[blocks.len() - 2];
            if m1 <= m2 {
                break;
            }
            let w = w1 + w2;
            let m = if w > 0.0 { (m1 * w1 + m2 * w2) / w } else { (m1 + m2) / 2.0 };
            blocks.truncate(blocks.len() - 2);
            blocks.push((m, w, l1 + l2));
        }
    }
    blocks
        .into_iter()
        .flat_map(|(m, _, l)| std::iter::repeat_n(m, l))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum HalfPoint {
    Crossed { theta: f64 },
    /// The curve never reaches 1/2 on the grid.
    NeverReached,
    /// The curve is already above 1/2 at the first grid point.
    StartsAbove,
}

impl HalfPoint {
    pub fn theta(&self) -> Option<f64> {
        match *self {
            HalfPoint::Crossed { theta } => Some(theta),
            _ => None,
        }
    }
}

/// Where a nondecreasing curve crosses 1/2, by linear interpolation in θ.
pub fn half_point(thetas: &[f64], curve: &[f64]) -> HalfPoint {
    let Some(&first) = curve.first() else {
        return HalfPoint::NeverReached;
    };
    if first > 0.5 {
        return HalfPoint::StartsAbove;
    }
    if first == 0.5 {
        return HalfPoint::Crossed { theta: thetas[0] };
    }
    match curve.iter().position(|&p| p >= 0.5) {
        None => HalfPoint::NeverReached,
        Some(i) => {
            let (t0, t1) = (thetas[i - 1], thetas[i]);
            let (p0, p1) = (curve[i - 1], curve[i]);
            HalfPoint::Crossed {
                theta: t0 + (0.5 - p0) / (p1 - p0) * (t1 - t0),
            }
        }
    }
}

/// `points` geometrically spaced values from `lo` to `hi`, clamped to (0, 1]
/// and deduplicated, so the grid is strictly increasing.
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(invalid(format!("grid needs 0 < lo <= hi (got {lo}, {hi})")));
    }
    if points == 0 {
        return Err(invalid("grid needs at least one point"));
    }
    let mut out: Vec<f64> = Vec::with_capacity(points);
    for i in 0..points {
        let t = if points == 1 {
            lo
        } else {
            (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (points - 1) as f64).exp()
        };
        let t = t.min(1.0);
        if out.last().is_none_or(|&l| t > l) {
            out.push(t);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub theta: f64,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Isotonic fit of `p_hat` across the grid.
    pub smoothed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    pub points: Vec<ScanPoint>,
    pub half_point: HalfPoint,
    /// θ̂_half / t, when the curve crossed.
    pub ratio: Option<f64>,
}

/// Builds the per-point statistics, smoothing and half-point from raw counts.
pub fn summarize(thetas: &[f64], successes: &[u64], trials: u64, z: f64, predicted: f64) -> ScanSummary {
    let p_hat: Vec<f64> = successes.iter().map(|&s| s as f64 / trials.max(1) as f64).collect();
    let smoothed = isotonic(&p_hat, &vec![trials as f64; p_hat.len()]);
    let points = thetas
        .iter()
        .zip(successes)
        .zip(p_hat.iter().zip(&smoothed))
        .map(|((&theta, &s), (&p, &sm))| {
            let (ci_lo, ci_hi) = wilson_interval(s, trials, z);
            ScanPoint {
                theta,
                trials,
                successes: s,
                p_hat: p,
                ci_lo,
                ci_hi,
                smoothed: sm,
            }
        })
        .collect();
    let half = half_point(thetas, &smoothed);
    ScanSummary {
        points,
        half_point: half,
        ratio: half.theta().map(|h| h / predicted),
    }
}

/// Successes among trials `start..end` at density θ, trial t using stream t.
pub fn count_successes(runner: &TrialRunner, theta: f64, base_seed: u64, start: u64, end: u64) -> Result<u64> {
    let mut hits = 0;
    for t in start..end {
        hits += runner.run(theta, SampleSeed::new(base_seed, t))? as u64;
    }
    Ok(hits)
}
