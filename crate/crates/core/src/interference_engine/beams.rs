use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;

use super::{BeamMoments, FieldTrace, PathConfig};
use crate::error::{Error, Result};

/// The two slit fields produced by splitting one [`FieldTrace`] into the
/// short and long fiber arms.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoBeamTrace {
    pub dt: f64,
    /// Short-arm field at slit 1.
    pub e1: Vec<Complex64>,
    /// Long-arm field at slit 2.
    pub e2: Vec<Complex64>,
    /// Arm transit times rounded to whole steps.
    pub delay_steps: (usize, usize),
    /// Rounded minus exact transit time for each arm (s).
    pub rounding_s: (f64, f64),
    /// Carrier phase `−2πν₀Δτ` (rad, reduced) applied to the long arm.
    pub carrier_phase: f64,
}

impl TwoBeamTrace {
    /// `(t, e1(t), e2(t))` for every sample.
    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64, Complex64)> + '_ {
        self.e1
            .iter()
            .zip(&self.e2)
            .enumerate()
            .map(|(i, (a, b))| (i as f64 * self.dt, *a, *b))
    }

    /// Sample range during which both beams reach the slits.
    pub fn overlap(&self) -> Range<usize> {
        self.delay_steps.1.max(self.delay_steps.0)..self.e1.len()
    }

    pub fn moments(&self, range: Range<usize>) -> BeamMoments {
        BeamMoments::accumulate(&self.e1[range.clone()], &self.e2[range])
    }
}

/// Splits `trace` into the two arms of `paths`.
///
/// `e1(t) = √r·E(t − n·p₁/c)` and `e2(t) = √(1−r)·E(t − n·p₂/c)·e^{−i2πν₀Δτ}`,
/// both zero before their light arrives. Transit times are rounded to whole
/// samples (the rounding is reported); the carrier phase uses the exact
/// `Δτ = n(p₂−p₁)/c`.
pub fn delayed_two_beam(trace: &FieldTrace, paths: &PathConfig) -> Result<TwoBeamTrace> {
    paths.validate()?;
    let dt = trace.dt;
    let exact = (paths.short_delay(), paths.long_delay());
    let steps = ((exact.0 / dt).round() as usize, (exact.1 / dt).round() as usize);
    let n = trace.samples.len();
    if steps.1 >= n {
        return Err(Error::EmptyOverlap {
            duration_s: trace.duration(),
            delay_s: exact.1,
        });
    }
    let rounding_s = (steps.0 as f64 * dt - exact.0, steps.1 as f64 * dt - exact.1);

    let nu0 = trace.comb.center_frequency();
    let carrier_phase = -2.0 * PI * (nu0 * paths.delay_difference()).fract();
    let carrier = Complex64::from_polar(1.0, carrier_phase);
    let a1 = paths.split_ratio.sqrt();
    let a2 = (1.0 - paths.split_ratio).sqrt() * carrier;

    let zero = Complex64::new(0.0, 0.0);
    let delayed = |steps: usize, gain: Complex64| -> Vec<Complex64> {
        (0..n)
            .map(|i| if i >= steps { trace.samples[i - steps] * gain } else { zero })
            .collect()
    };
    Ok(TwoBeamTrace {
        dt,
        e1: delayed(steps.0, Complex64::new(a1, 0.0)),
        e2: delayed(steps.1, a2),
        delay_steps: steps,
        rounding_s,
        carrier_phase,
    })
}
