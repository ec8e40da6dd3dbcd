//! Retardation diagnostics: the mode-summed memory kernel, predicted
//! recurrence times, and detection of collapse, revival and sudden death in
//! sampled concurrence curves.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::model::{retardation_time, ModeGrid, SystemConfig};
use crate::records::Record;

/// Concurrence at or below this level counts as zero.
pub const DEFAULT_FLOOR: f64 = 1e-6;

/// A local minimum splits two revivals when it is at most this fraction of
/// the peaks on both sides: the curve touches zero between samples.
pub const TOUCH_RATIO: f64 = 0.01;

/// `K(τ) = Σ_k g_k² e^{-iΔ_k τ}`.
pub fn memory_kernel(grid: &ModeGrid, tau: f64) -> Complex64 {
    grid.couplings
        .iter()
        .zip(&grid.detunings)
        .map(|(g, d)| g * g * Complex64::from_polar(1.0, -d * tau))
        .sum()
}

/// Kernel on `τ = 0, dτ, 2dτ, …` up to and including `tau_max`.
pub fn kernel_samples(grid: &ModeGrid, tau_max: f64, dtau: f64) -> Result<Vec<(f64, Complex64)>> {
    if !(dtau.is_finite() && dtau > 0.0) {
        return Err(Error::config(
            "dt",
            format!("kernel sample step must be positive, got {dtau}"),
        ));
    }
    if !(tau_max.is_finite() && tau_max >= 0.0) {
        return Err(Error::config(
            "t_max",
            format!("must be finite and ≥ 0, got {tau_max}"),
        ));
    }
    let count = (tau_max / dtau + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .into_par_iter()
        .map(|i| {
            let tau = i as f64 * dtau;
            (tau, memory_kernel(grid, tau))
        })
        .collect())
}

/// Rephasing peaks of `|K|`: local maxima with `τ > 0` reaching at least half
/// of `|K(0)|`. Dirichlet-type side lobes stay well below that level.
pub fn kernel_peaks(samples: &[(f64, Complex64)]) -> Vec<(f64, f64)> {
    let Some(&(_, k0)) = samples.first() else {
        return Vec::new();
    };
    let level = 0.5 * k0.norm();
    let mags: Vec<f64> = samples.iter().map(|(_, k)| k.norm()).collect();
    (1..mags.len().saturating_sub(1))
        .filter(|&i| mags[i] >= level && mags[i] > mags[i - 1] && mags[i] >= mags[i + 1])
        .map(|i| (samples[i].0, mags[i]))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevivalPrediction {
    pub times: Vec<f64>,
    /// False for a single mode, where the dynamics are Rabi-periodic and the
    /// recurrence times carry no meaning.
    pub applicable: bool,
}

/// `m · t_r` for `m = 1..=count`.
pub fn predict_revival_times(config: &SystemConfig, count: usize) -> Result<RevivalPrediction> {
    if count == 0 {
        return Err(Error::config("count", "must be at least 1"));
    }
    let tr = retardation_time(config)?;
    Ok(RevivalPrediction {
        times: (1..=count).map(|m| m as f64 * tr).collect(),
        applicable: config.n_modes > 1,
    })
}

/// Shortest dead stretch reported as sudden death: a fiftieth of the
/// retardation time, or of the Rabi half-period `π` for a single mode.
pub fn default_min_gap(config: &SystemConfig) -> Result<f64> {
    let period = if config.n_modes > 1 {
        retardation_time(config)?
    } else {
        config.validate()?;
        std::f64::consts::PI
    };
    Ok(period / 50.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Revival {
    pub onset: f64,
    pub peak_time: f64,
    pub peak: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RevivalReport {
    pub predicted_period: Option<f64>,
    /// Every stretch of nonzero concurrence, the initial one included.
    pub revivals: Vec<Revival>,
    pub dead_intervals: Vec<(f64, f64)>,
}

impl RevivalReport {
    pub fn with_predicted_period(mut self, period: f64) -> Self {
        self.predicted_period = Some(period);
        self
    }

    /// Revivals that begin after the start of the trajectory.
    pub fn later_revivals(&self) -> impl Iterator<Item = &Revival> {
        self.revivals.iter().filter(|r| r.onset > 0.0)
    }

    pub fn first_revival(&self) -> Option<&Revival> {
        self.later_revivals().next()
    }

    /// Later revivals grouped by the nearest multiple of the predicted
    /// period, keeping the strongest of each group. A distorted revival often
    /// arrives as several bursts separated by near-zero touches. Without a
    /// predicted period every revival is its own group.
    pub fn bursts(&self) -> Vec<Revival> {
        let Some(period) = self.predicted_period.filter(|p| *p > 0.0) else {
            return self.later_revivals().copied().collect();
        };
        let mut out: Vec<(i64, Revival)> = Vec::new();
        for r in self.later_revivals() {
            let m = (r.onset / period).round() as i64;
            match out.last_mut() {
                Some((k, best)) if *k == m => {
                    if r.peak > best.peak {
                        *best = Revival {
                            onset: best.onset,
                            ..*r
                        };
                    }
                }
                _ => out.push((m, *r)),
            }
        }
        out.into_iter().map(|(_, r)| r).collect()
    }
}

pub fn detect_revivals<R: Record>(
    traj: &Trajectory<R>,
    floor: f64,
    min_gap: f64,
) -> Result<RevivalReport> {
    let values = traj.map(|r| r.concurrence());
    detect_revivals_in(&traj.times, &values, floor, min_gap)
}

/// Segments a sampled nonnegative curve into revivals.
///
/// Samples at or below `floor` are dead. A nonzero excursion shorter than
/// `min_gap` between dead samples is jitter and counts as dead. Dead runs
/// lasting at least `min_gap` are reported as dead intervals; every dead
/// run, and every local minimum that falls to [`TOUCH_RATIO`] of the peaks
/// on both sides, separates one revival from the next. A revival's onset is
/// its first sample above the floor (or the touching minimum).
pub fn detect_revivals_in(
    times: &[f64],
    values: &[f64],
    floor: f64,
    min_gap: f64,
) -> Result<RevivalReport> {
    if times.is_empty() || values.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let len = times.len().min(values.len());
    let mut alive: Vec<bool> = values[..len].iter().map(|&v| v > floor).collect();

    for (s, e) in runs(&alive, true) {
        let enclosed = s > 0 && e + 1 < len;
        if enclosed && times[e] - times[s] < min_gap {
            alive[s..=e].iter_mut().for_each(|a| *a = false);
        }
    }

    let dead_intervals = runs(&alive, false)
        .into_iter()
        .filter(|&(s, e)| times[e] - times[s] >= min_gap && e > s)
        .map(|(s, e)| (times[s], times[e]))
        .collect();

    let mut revivals = Vec::new();
    for (s, e) in runs(&alive, true) {
        let seg = &values[s..=e];
        let mut start = 0;
        for cut in touch_points(seg) {
            revivals.push(summarise(times, values, s + start, s + cut));
            start = cut;
        }
        revivals.push(summarise(times, values, s + start, e));
    }

    Ok(RevivalReport {
        predicted_period: None,
        revivals,
        dead_intervals,
    })
}

/// Inclusive index ranges of maximal runs where `flags[i] == want`.
fn runs(flags: &[bool], want: bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &f) in flags.iter().enumerate() {
        match (f == want, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, flags.len() - 1));
    }
    out
}

/// Interior local minima of `seg` that dip to `TOUCH_RATIO` of the maxima on
/// either side (measured from the previous cut and to the end of `seg`).
fn touch_points(seg: &[f64]) -> Vec<usize> {
    let n = seg.len();
    if n < 3 {
        return Vec::new();
    }
    let mut max_after = vec![0.0_f64; n];
    let mut m = 0.0_f64;
    for i in (0..n).rev() {
        m = m.max(seg[i]);
        max_after[i] = m;
    }
    let mut cuts = Vec::new();
    let mut max_before = seg[0];
    for i in 1..n - 1 {
        let v = seg[i];
        let is_min = seg[i - 1] > v && v <= seg[i + 1];
        if is_min && v <= TOUCH_RATIO * max_before && v <= TOUCH_RATIO * max_after[i + 1] {
            cuts.push(i);
            max_before = v;
        } else {
            max_before = max_before.max(v);
        }
    }
    cuts
}

fn summarise(times: &[f64], values: &[f64], s: usize, e: usize) -> Revival {
    let (k, peak) = values[s..=e].iter().copied().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |(bk, bv), (k, v)| if v > bv { (k, v) } else { (bk, bv) },
    );
    Revival {
        onset: times[s],
        peak_time: times[s + k],
        peak,
    }
}
