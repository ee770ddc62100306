use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::spectral_model::ModeComb;

/// Sampled complex envelope `E(t)` of a multi-mode source, relative to the
/// comb centre frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldTrace {
    pub dt: f64,
    pub samples: Vec<Complex64>,
    pub comb: ModeComb,
    pub seed: u64,
}

impl FieldTrace {
    pub fn duration(&self) -> f64 {
        self.dt * self.samples.len() as f64
    }
}

/// Field samples of one realisation at two interleaved time grids:
/// `late[i] = E(iΔt + delay)` and `early[i] = E(iΔt)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DelayedPair {
    pub dt: f64,
    pub delay: f64,
    pub early: Vec<Complex64>,
    pub late: Vec<Complex64>,
}

pub(crate) fn check_sampling(comb: &ModeComb, duration: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    if !(duration >= 10.0 * dt) || !duration.is_finite() {
        return Err(Error::invalid(format!(
            "duration {duration} s must cover at least 10 time steps of {dt} s"
        )));
    }
    let span = comb.span();
    if span > 0.0 && dt >= 1.0 / (2.0 * span) {
        return Err(Error::invalid(format!(
            "time step {dt} s violates the Nyquist limit 1/(2*{span} Hz)"
        )));
    }
    Ok((duration / dt).round() as usize)
}

pub(crate) fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Per-mode state of the phase-diffusion model.
struct ModeState {
    amplitude: f64,
    offset: f64,
    phase: f64,
}

/// Draws the field at the sorted instants `times`.
///
/// Each mode carries an independent Wiener phase whose increment over a gap
/// `h` is normal with variance `2π·δν·h`, giving a Lorentzian line of FWHM
/// `δν`. Initial phases are uniform on `[0, 2π)`. Sampling at arbitrary
/// instants is exact for this process, so widely separated grids need no
/// intermediate samples.
fn sample_at(comb: &ModeComb, times: impl Iterator<Item = f64>, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let diffusion = 2.0 * PI * comb.mode_linewidth();
    let mut modes: Vec<ModeState> = comb
        .amplitudes()
        .iter()
        .zip(comb.mode_offsets())
        .map(|(&a, offset)| ModeState {
            amplitude: a.sqrt(),
            offset,
            phase: rng.random::<f64>() * 2.0 * PI,
        })
        .collect();

    let mut previous: Option<f64> = None;
    times
        .map(|t| {
            if let Some(prev) = previous {
                let gap = t - prev;
                if diffusion > 0.0 && gap > 0.0 {
                    let sigma = (diffusion * gap).sqrt();
                    for m in modes.iter_mut() {
                        let step: f64 = rng.sample(StandardNormal);
                        m.phase += sigma * step;
                    }
                }
            }
            previous = Some(t);
            modes
                .iter()
                .map(|m| {
                    let carrier = 2.0 * PI * (m.offset * t).fract();
                    Complex64::from_polar(m.amplitude, carrier + m.phase)
                })
                .sum()
        })
        .collect()
}

pub(crate) fn synthesize_with_stream(
    comb: &ModeComb,
    duration: f64,
    dt: f64,
    seed: u64,
    stream: u64,
) -> Result<FieldTrace> {
    let n = check_sampling(comb, duration, dt)?;
    let mut rng = trial_rng(seed, stream);
    let samples = sample_at(comb, (0..n).map(|i| i as f64 * dt), &mut rng);
    Ok(FieldTrace {
        dt,
        samples,
        comb: comb.clone(),
        seed,
    })
}

/// Synthesises `E(t) = Σₙ √aₙ·exp(i2πfₙt + iφₙ(t))` on `[0, duration)` with
/// step `dt`, where `fₙ` are the comb offsets from `ν₀` and `φₙ` independent
/// Wiener phases. Deterministic in `seed`.
pub fn synthesize_field(comb: &ModeComb, duration: f64, dt: f64, seed: u64) -> Result<FieldTrace> {
    synthesize_with_stream(comb, duration, dt, seed, 0)
}

/// Samples one realisation on two grids of `round(duration/dt)` points,
/// the second shifted by exactly `delay`. Only the two grids are drawn, so
/// the cost is independent of the delay.
pub fn synthesize_delayed_pair(
    comb: &ModeComb,
    delay: f64,
    duration: f64,
    dt: f64,
    seed: u64,
    stream: u64,
) -> Result<DelayedPair> {
    if !(delay >= 0.0) || !delay.is_finite() {
        return Err(Error::invalid(format!("delay must be >= 0, got {delay}")));
    }
    let n = check_sampling(comb, duration, dt)?;
    let mut rng = trial_rng(seed, stream);

    // merge the two grids in time order; label true = late grid
    let mut instants: Vec<(f64, bool, usize)> = Vec::with_capacity(2 * n);
    let (mut i, mut j) = (0usize, 0usize);
    while i < n || j < n {
        let te = i as f64 * dt;
        let tl = delay + j as f64 * dt;
        if j >= n || (i < n && te <= tl) {
            instants.push((te, false, i));
            i += 1;
        } else {
            instants.push((tl, true, j));
            j += 1;
        }
    }
    let values = sample_at(comb, instants.iter().map(|x| x.0), &mut rng);

    let mut early = vec![Complex64::new(0.0, 0.0); n];
    let mut late = vec![Complex64::new(0.0, 0.0); n];
    for ((_, is_late, idx), v) in instants.into_iter().zip(values) {
        if is_late {
            late[idx] = v;
        } else {
            early[idx] = v;
        }
    }
    Ok(DelayedPair {
        dt,
        delay,
        early,
        late,
    })
}
