use num_complex::Complex64;
use rayon::prelude::*;

use super::field::synthesize_delayed_pair;
use super::{fringe_pattern_from_moments, fringe_spacing, BeamMoments, DelayedPair, DoubleSlitGeometry, PathConfig};
use crate::error::{Error, Result};
use crate::spectral_model::ModeComb;

/// Ensemble mean of the long-time fringe visibility.
#[derive(Clone, Debug, PartialEq)]
pub struct VisibilityEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub per_seed: Vec<f64>,
    /// Arm delay difference used (s).
    pub delay: f64,
}

/// Monte-Carlo settings for [`visibility_statistics`].
#[derive(Clone, Debug, PartialEq)]
pub struct StatsRequest {
    /// Visibility a window must reach to count as showing fringes.
    pub threshold: f64,
    /// Length of each sliding detection window (s).
    pub window: f64,
    /// Length of the two-beam record analysed per trial (s).
    pub duration: f64,
    pub dt: f64,
    pub n_seeds: usize,
    pub seed: u64,
}

/// Occurrence statistics of transient fringes.
#[derive(Clone, Debug, PartialEq)]
pub struct VisibilityStats {
    pub n_modes: usize,
    pub threshold: f64,
    /// Fraction of windows with `V_inst ≥ threshold`, averaged over trials.
    pub occurrence_probability: f64,
    /// Standard error of `occurrence_probability` across trials.
    pub occurrence_stderr: f64,
    /// Mean length of a contiguous above-threshold run (s).
    pub mean_duration: f64,
    pub n_trials: usize,
    pub window: f64,
}

fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn carrier(comb: &ModeComb, paths: &PathConfig) -> Complex64 {
    let turns = (comb.center_frequency() * paths.delay_difference()).fract();
    Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * turns)
}

/// Slit fields of one trial from a delayed pair: the short arm sees the
/// later grid, the long arm the earlier one.
fn arm_moments(pair: &DelayedPair, paths: &PathConfig, carrier: Complex64, range: std::ops::Range<usize>) -> BeamMoments {
    let r = paths.split_ratio;
    let n = range.len().max(1) as f64;
    let mut late2 = 0.0;
    let mut early2 = 0.0;
    let mut cross = Complex64::new(0.0, 0.0);
    for i in range {
        let (l, e) = (pair.late[i], pair.early[i]);
        late2 += l.norm_sqr();
        early2 += e.norm_sqr();
        cross += l * e.conj();
    }
    BeamMoments {
        i1: r * late2 / n,
        i2: (1.0 - r) * early2 / n,
        cross: cross / n * (r * (1.0 - r)).sqrt() * carrier.conj(),
    }
}

/// Long-time visibility of the double-slit pattern, averaged over
/// `n_seeds` independent realisations of the source.
///
/// Each trial records `duration` of two-beam overlap; the delay
/// `n(p₂−p₁)/c` is applied exactly, independent of `dt`.
#[allow(clippy::too_many_arguments)]
pub fn time_averaged_visibility(
    comb: &ModeComb,
    paths: &PathConfig,
    geometry: &DoubleSlitGeometry,
    duration: f64,
    dt: f64,
    n_seeds: usize,
    seed: u64,
) -> Result<VisibilityEstimate> {
    paths.validate()?;
    geometry.validate()?;
    if n_seeds == 0 {
        return Err(Error::invalid("need at least one seed"));
    }
    let delay = paths.delay_difference();
    let phase = carrier(comb, paths);
    let per_seed = (0..n_seeds as u64)
        .into_par_iter()
        .map(|stream| {
            let pair = synthesize_delayed_pair(comb, delay, duration, dt, seed, stream)?;
            let moments = arm_moments(&pair, paths, phase, 0..pair.late.len());
            let pattern = fringe_pattern_from_moments(geometry, &moments, (0.0, duration), paths.polarization_overlap)?;
            Ok(pattern.visibility)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, stderr) = mean_stderr(&per_seed);
    Ok(VisibilityEstimate {
        mean,
        stderr,
        per_seed,
        delay,
    })
}

struct TrialCounts {
    windows: usize,
    above: usize,
    runs: usize,
}

fn count_windows(pair: &DelayedPair, paths: &PathConfig, width: usize, threshold: f64) -> TrialCounts {
    let r = paths.split_ratio;
    let gain = 2.0 * paths.polarization_overlap * (r * (1.0 - r)).sqrt();
    let n = pair.late.len();
    let mut p_late = vec![0.0; n + 1];
    let mut p_early = vec![0.0; n + 1];
    let mut p_cross = vec![Complex64::new(0.0, 0.0); n + 1];
    for i in 0..n {
        let (l, e) = (pair.late[i], pair.early[i]);
        p_late[i + 1] = p_late[i] + l.norm_sqr();
        p_early[i + 1] = p_early[i] + e.norm_sqr();
        p_cross[i + 1] = p_cross[i] + l * e.conj();
    }
    let windows = n + 1 - width;
    let mut above = 0;
    let mut runs = 0;
    let mut in_run = false;
    for s in 0..windows {
        let e = s + width;
        let total = r * (p_late[e] - p_late[s]) + (1.0 - r) * (p_early[e] - p_early[s]);
        let v = if total > 0.0 {
            gain * (p_cross[e] - p_cross[s]).norm() / total
        } else {
            0.0
        };
        if v >= threshold {
            above += 1;
            if !in_run {
                runs += 1;
            }
            in_run = true;
        } else {
            in_run = false;
        }
    }
    TrialCounts { windows, above, runs }
}

/// Fraction of time and mean duration for which the instantaneous fringe
/// visibility exceeds `request.threshold`.
///
/// Windows of length `request.window` slide one sample at a time across
/// `request.duration` of two-beam overlap. The per-window visibility is the
/// contrast of the envelope-normalised screen pattern, which for a screen
/// spanning at least one fringe equals `2η|⟨e1e2*⟩|/(⟨|e1|²⟩+⟨|e2|²⟩)`.
pub fn visibility_statistics(
    comb: &ModeComb,
    paths: &PathConfig,
    geometry: &DoubleSlitGeometry,
    request: &StatsRequest,
) -> Result<VisibilityStats> {
    paths.validate()?;
    let period = fringe_spacing(geometry)?;
    let visible = geometry.central_half_width().min(0.5 * geometry.screen_extent_m);
    if 2.0 * visible < period {
        return Err(Error::invalid("screen must show at least one full fringe in the central lobe"));
    }
    if !(request.threshold > 0.0 && request.threshold < 1.0) {
        return Err(Error::invalid(format!(
            "threshold must lie in (0, 1), got {}",
            request.threshold
        )));
    }
    if !(request.window >= 10.0 * request.dt) {
        return Err(Error::invalid("window must span at least 10 time steps"));
    }
    if request.window > request.duration {
        return Err(Error::invalid("window is longer than the analysed duration"));
    }
    if request.n_seeds == 0 {
        return Err(Error::invalid("need at least one seed"));
    }
    let width = (request.window / request.dt).round() as usize;
    let delay = paths.delay_difference();

    let counts = (0..request.n_seeds as u64)
        .into_par_iter()
        .map(|stream| {
            let pair = synthesize_delayed_pair(comb, delay, request.duration, request.dt, request.seed, stream)?;
            Ok(count_windows(&pair, paths, width, request.threshold))
        })
        .collect::<Result<Vec<TrialCounts>>>()?;

    let fractions: Vec<f64> = counts.iter().map(|c| c.above as f64 / c.windows as f64).collect();
    let (occurrence_probability, occurrence_stderr) = mean_stderr(&fractions);
    let above: usize = counts.iter().map(|c| c.above).sum();
    let runs: usize = counts.iter().map(|c| c.runs).sum();
    let mean_duration = if runs > 0 {
        above as f64 * request.dt / runs as f64
    } else {
        0.0
    };
    Ok(VisibilityStats {
        n_modes: comb.n_modes(),
        threshold: request.threshold,
        occurrence_probability,
        occurrence_stderr,
        mean_duration,
        n_trials: request.n_seeds,
        window: request.window,
    })
}
