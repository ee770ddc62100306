//! First-order coherence, fringe visibility and coherence length.
//!
//! The degree of coherence of a stationary field is the normalised inverse
//! Fourier transform of its power spectrum,
//! `γ(τ) = ∫P(ν)e^{+i2πντ}dν / ∫P(ν)dν`, so `γ(0) = 1`. Line spectra are
//! transformed as finite sums, sampled spectra by trapezoid quadrature.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral_model::{LineSpectrum, PowerSpectrum, SampledSpectrum};
use crate::SPEED_OF_LIGHT;

/// Prefactor of the conventional Gaussian coherence length `0.624·c/δν`.
pub const COHERENCE_LENGTH_PREFACTOR: f64 = 0.624;

/// Denominators of the comb modulus below this are treated as the removable
/// singularity.
const COMB_SINGULAR_EPS: f64 = 1e-12;

/// Complex degree of coherence sampled on a uniform delay grid from 0.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceFunction {
    pub tau: Vec<f64>,
    pub gamma: Vec<Complex64>,
    pub source: String,
}

impl CoherenceFunction {
    pub fn modulus(&self) -> Vec<f64> {
        self.gamma.iter().map(|g| g.norm()).collect()
    }

    /// `(Δl, |γ|)` pairs with `Δl = c·τ`.
    pub fn visibility_table(&self) -> Vec<(f64, f64)> {
        self.tau
            .iter()
            .zip(&self.gamma)
            .map(|(t, g)| (SPEED_OF_LIGHT * t, g.norm()))
            .collect()
    }
}

#[inline]
fn cis_turns(turns: f64) -> Complex64 {
    let (s, c) = (2.0 * PI * turns.fract()).sin_cos();
    Complex64::new(c, s)
}

fn sampled_gamma(s: &SampledSpectrum, taus: &[f64]) -> Vec<Complex64> {
    let weights: Vec<f64> = s
        .trapezoid_weights()
        .iter()
        .zip(s.density())
        .map(|(w, p)| w * p)
        .collect();
    let total: f64 = weights.iter().sum();
    let reference = s.centroid();
    let offsets: Vec<f64> = s.frequency().iter().map(|f| f - reference).collect();
    taus.iter()
        .map(|&tau| {
            if tau == 0.0 {
                return Complex64::new(1.0, 0.0);
            }
            let sum: Complex64 = weights
                .iter()
                .zip(&offsets)
                .filter(|(w, _)| **w != 0.0)
                .map(|(w, d)| cis_turns(d * tau) * *w)
                .sum();
            sum / total * cis_turns(reference * tau)
        })
        .collect()
}

fn line_gamma(l: &LineSpectrum, taus: &[f64]) -> Vec<Complex64> {
    let total = l.total_power();
    let reference = l.centroid();
    let shape = l.shape();
    taus.iter()
        .map(|&tau| {
            if tau == 0.0 {
                return Complex64::new(1.0, 0.0);
            }
            let sum: Complex64 = l
                .lines()
                .iter()
                .filter(|line| line.power != 0.0)
                .map(|line| {
                    let envelope = shape.coherence_factor(line.fwhm.unwrap_or(0.0), tau);
                    cis_turns((line.frequency - reference) * tau) * (line.power * envelope)
                })
                .sum();
            sum / total * cis_turns(reference * tau)
        })
        .collect()
}

/// Degree of coherence of `spectrum` at arbitrary delays.
pub fn coherence_at(spectrum: &PowerSpectrum, taus: &[f64]) -> Result<Vec<Complex64>> {
    let total = spectrum.total_power();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::invalid("spectrum has zero total power"));
    }
    Ok(match spectrum {
        PowerSpectrum::Sampled(s) => sampled_gamma(s, taus),
        PowerSpectrum::Lines(l) => line_gamma(l, taus),
    })
}

/// Degree of coherence on `n_tau` uniform delays in `[0, tau_max]`.
pub fn coherence_from_spectrum(
    spectrum: &PowerSpectrum,
    tau_max: f64,
    n_tau: usize,
) -> Result<CoherenceFunction> {
    if !(tau_max > 0.0) || !tau_max.is_finite() {
        return Err(Error::invalid(format!("tau_max must be positive, got {tau_max}")));
    }
    if n_tau < 2 {
        return Err(Error::invalid("n_tau must be >= 2"));
    }
    let tau = crate::spectral_model::linspace(0.0, tau_max, n_tau);
    let gamma = coherence_at(spectrum, &tau)?;
    let source = match spectrum {
        PowerSpectrum::Sampled(s) => format!("sampled spectrum, {} points", s.len()),
        PowerSpectrum::Lines(l) => {
            format!("line spectrum, {} lines, {:?} profile", l.lines().len(), l.shape())
        }
    };
    Ok(CoherenceFunction { tau, gamma, source })
}

/// Fringe visibility of a Gaussian line, `exp[−(πτδν)²/(4 ln2)]`.
pub fn gaussian_visibility(tau: f64, fwhm: f64) -> Result<f64> {
    if !(fwhm > 0.0) || !fwhm.is_finite() {
        return Err(Error::invalid(format!("FWHM must be positive, got {fwhm}")));
    }
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::invalid(format!("delay must be >= 0, got {tau}")));
    }
    let x = PI * tau * fwhm;
    Ok((-(x * x) / (4.0 * LN_2)).exp())
}

/// Coherence length of a Gaussian line in two conventions.
///
/// `prefactored_m` is `0.624·c/δν`; `unprefactored_m` is `c/δν = λ²/δλ`.
/// At `Δl = prefactored_m` the Gaussian visibility is 1/4. Neither value is
/// preferred; both are always reported.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherenceLength {
    pub prefactored_m: f64,
    pub unprefactored_m: f64,
}

/// Coherence length from a frequency FWHM.
pub fn coherence_length_gaussian(fwhm_hz: f64) -> Result<CoherenceLength> {
    if !(fwhm_hz > 0.0) || !fwhm_hz.is_finite() {
        return Err(Error::invalid(format!("FWHM must be positive, got {fwhm_hz}")));
    }
    let base = SPEED_OF_LIGHT / fwhm_hz;
    Ok(CoherenceLength {
        prefactored_m: COHERENCE_LENGTH_PREFACTOR * base,
        unprefactored_m: base,
    })
}

/// Coherence length from centre wavelength and wavelength FWHM (both m).
pub fn coherence_length_from_wavelength(lambda: f64, dlambda: f64) -> Result<CoherenceLength> {
    if !(lambda > 0.0) || !(dlambda > 0.0) || !lambda.is_finite() || !dlambda.is_finite() {
        return Err(Error::invalid(format!(
            "wavelength and linewidth must be positive, got {lambda}, {dlambda}"
        )));
    }
    let base = lambda * lambda / dlambda;
    Ok(CoherenceLength {
        prefactored_m: COHERENCE_LENGTH_PREFACTOR * base,
        unprefactored_m: base,
    })
}

/// `|sin(πx)|` after reducing `x` to `[-1/2, 1/2]`.
#[inline]
fn abs_sin_pi(x: f64) -> f64 {
    (PI * (x - x.round())).sin().abs()
}

/// Modulus of the equal-amplitude N-mode comb coherence,
/// `|sin(kNπΔl/2L) / (N·sin(kπΔl/2L))|`.
///
/// Arguments are reduced modulo the comb period before evaluation, and the
/// removable singularity at the revivals `Δl = m·2L/k` evaluates to 1.
pub fn comb_coherence_modulus(delta_l: f64, n_modes: usize, order: u32, cavity_length: f64) -> Result<f64> {
    if n_modes < 1 {
        return Err(Error::invalid("mode count N must be >= 1"));
    }
    if order < 1 {
        return Err(Error::invalid("mode order multiplier k must be >= 1"));
    }
    if !(cavity_length > 0.0) || !cavity_length.is_finite() {
        return Err(Error::invalid("cavity length must be positive"));
    }
    if !(delta_l >= 0.0) || !delta_l.is_finite() {
        return Err(Error::invalid(format!("path difference must be >= 0, got {delta_l}")));
    }
    if n_modes == 1 {
        return Ok(1.0);
    }
    // argument in units of π
    let u = f64::from(order) * delta_l / (2.0 * cavity_length);
    let frac = u - u.round();
    let den = abs_sin_pi(frac);
    if den < COMB_SINGULAR_EPS {
        return Ok(1.0);
    }
    let n = n_modes as f64;
    let num = abs_sin_pi(n * frac);
    Ok((num / (n * den)).min(1.0))
}

/// Source model for [`visibility_curve`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VisibilityModel {
    /// Single Gaussian line of the given FWHM (Hz).
    Gaussian { fwhm_hz: f64 },
    /// Equal-amplitude comb.
    Comb {
        n_modes: usize,
        order: u32,
        cavity_length: f64,
    },
}

impl VisibilityModel {
    pub fn visibility(&self, delta_l: f64) -> Result<f64> {
        match *self {
            VisibilityModel::Gaussian { fwhm_hz } => gaussian_visibility(delta_l / SPEED_OF_LIGHT, fwhm_hz),
            VisibilityModel::Comb {
                n_modes,
                order,
                cavity_length,
            } => comb_coherence_modulus(delta_l, n_modes, order, cavity_length),
        }
    }
}

/// Tabulates visibility against path difference on `n_points` uniform
/// samples of `[start, end]`.
pub fn visibility_curve(
    model: VisibilityModel,
    start: f64,
    end: f64,
    n_points: usize,
) -> Result<Vec<(f64, f64)>> {
    if !(end > start) || !start.is_finite() || !end.is_finite() {
        return Err(Error::invalid(format!("empty path-difference range [{start}, {end}]")));
    }
    if start < 0.0 {
        return Err(Error::invalid("path differences must be >= 0"));
    }
    if n_points < 2 {
        return Err(Error::invalid("visibility curve needs at least 2 points"));
    }
    crate::spectral_model::linspace(start, end, n_points)
        .into_iter()
        .map(|dl| Ok((dl, model.visibility(dl)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_model::{comb_spectrum, gaussian_spectrum, linspace, ModeComb};

    #[test]
    fn gaussian_visibility_values() {
        let fwhm = 1e12;
        assert_eq!(gaussian_visibility(0.0, fwhm).unwrap(), 1.0);
        let half = gaussian_visibility(2.0 * LN_2 / PI / fwhm, fwhm).unwrap();
        assert!((half - 0.5).abs() < 1e-12);
        let quarter = gaussian_visibility(0.624 / fwhm, fwhm).unwrap();
        assert!((quarter - 0.25).abs() < 1e-3, "{quarter}");
        assert!(gaussian_visibility(1e-12, -1.0).is_err());
        assert!(gaussian_visibility(-1e-12, 1.0).is_err());
    }

    #[test]
    fn coherence_lengths_for_measured_linewidths() {
        let envelope = coherence_length_from_wavelength(660e-9, 1.5e-9).unwrap();
        assert!((envelope.prefactored_m - 181.2e-6).abs() < 0.05e-6);
        assert!((envelope.unprefactored_m - 290.4e-6).abs() < 0.05e-6);
        let mode = coherence_length_from_wavelength(660e-9, 0.23e-9).unwrap();
        assert!((mode.prefactored_m - 1.182e-3).abs() < 0.5e-6);
        assert!((mode.unprefactored_m - 1.894e-3).abs() < 0.5e-6);
        assert!(coherence_length_from_wavelength(0.0, 1e-9).is_err());
        assert!(coherence_length_gaussian(-1.0).is_err());
    }

    #[test]
    fn coherence_length_vanishes_for_broad_lines() {
        let a = coherence_length_gaussian(1e12).unwrap();
        let b = coherence_length_gaussian(1e18).unwrap();
        assert!(b.unprefactored_m < a.unprefactored_m * 1e-5);
    }

    #[test]
    fn frequency_and_wavelength_forms_agree() {
        let lambda = 660e-9;
        let dlambda = 1.5e-9;
        let dnu = SPEED_OF_LIGHT * dlambda / (lambda * lambda);
        let a = coherence_length_gaussian(dnu).unwrap();
        let b = coherence_length_from_wavelength(lambda, dlambda).unwrap();
        assert!((a.unprefactored_m / b.unprefactored_m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn comb_modulus_special_points() {
        let l = 300e-6;
        assert_eq!(comb_coherence_modulus(0.0, 7, 1, l).unwrap(), 1.0);
        assert!(comb_coherence_modulus(l, 2, 1, l).unwrap() < 1e-12);
        for m in 1..20 {
            for k in 1..4u32 {
                let dl = m as f64 * 2.0 * l / f64::from(k);
                assert!((comb_coherence_modulus(dl, 5, k, l).unwrap() - 1.0).abs() < 1e-9);
            }
        }
        // first zero at 2L/(kN)
        assert!(comb_coherence_modulus(2.0 * l / 6.0, 6, 1, l).unwrap() < 1e-12);
        assert!(comb_coherence_modulus(-1.0, 2, 1, l).is_err());
        assert!(comb_coherence_modulus(1.0, 0, 1, l).is_err());
    }

    #[test]
    fn comb_transform_equals_closed_form() {
        let l = 300e-6;
        let comb = ModeComb::uniform(454e12, l, 1, 4, 1.0, 0.0).unwrap();
        let s = comb_spectrum(&comb);
        let taus: Vec<f64> = linspace(0.0, 3.0 * 2.0 * l / SPEED_OF_LIGHT, 301);
        let gamma = coherence_at(&s, &taus).unwrap();
        for (t, g) in taus.iter().zip(gamma) {
            let expected = comb_coherence_modulus(SPEED_OF_LIGHT * t, 4, 1, l).unwrap();
            assert!((g.norm() - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn gamma_is_one_at_zero_delay() {
        let grid = linspace(450e12, 460e12, 1001);
        let s = gaussian_spectrum(455e12, 1e12, 1.0, &grid).unwrap();
        let c = coherence_from_spectrum(&s, 1e-12, 5).unwrap();
        assert_eq!(c.gamma[0], Complex64::new(1.0, 0.0));
        assert!(c.modulus().iter().all(|m| *m <= 1.0 + 1e-9));
    }

    #[test]
    fn zero_power_spectrum_is_rejected() {
        let s = SampledSpectrum::new(vec![1.0, 2.0, 3.0], vec![0.0; 3]).unwrap();
        assert!(coherence_from_spectrum(&s.into(), 1.0, 4).is_err());
    }

    #[test]
    fn sampled_comb_with_envelope_factorises() {
        // Broadened lines rendered onto a grid, transformed numerically.
        let l = 3e-3;
        let fwhm = 2e9;
        let comb = ModeComb::uniform(454e12, l, 1, 3, 1.0, fwhm).unwrap();
        let lines = comb_spectrum(&comb);
        let spacing = comb.line_spacing();
        let grid = linspace(454e12 - 2.0 * spacing, 454e12 + 2.0 * spacing, 1 << 14);
        let sampled: PowerSpectrum = lines.as_lines().unwrap().render(&grid).unwrap().into();
        let taus = linspace(0.0, 4.0 * 2.0 * l / SPEED_OF_LIGHT, 101);
        let gamma = coherence_at(&sampled, &taus).unwrap();
        for (t, g) in taus.iter().zip(gamma) {
            let expected = comb_coherence_modulus(SPEED_OF_LIGHT * t, 3, 1, l).unwrap()
                * gaussian_visibility(*t, fwhm).unwrap();
            assert!((g.norm() - expected).abs() < 1e-4, "tau {t}: {} vs {expected}", g.norm());
        }
    }

    #[test]
    fn visibility_curve_properties() {
        let g = visibility_curve(VisibilityModel::Gaussian { fwhm_hz: 1e12 }, 0.0, 1e-3, 200).unwrap();
        assert!(g.windows(2).all(|w| w[1].1 <= w[0].1));
        assert_eq!(g[0].1, 1.0);

        let l = 300e-6;
        let model = VisibilityModel::Comb {
            n_modes: 5,
            order: 1,
            cavity_length: l,
        };
        // grid hits every multiple of 2L/k
        let c = visibility_curve(model, 0.0, 10.0 * 2.0 * l, 1001).unwrap();
        for (i, (_, v)) in c.iter().enumerate() {
            if i % 100 == 0 {
                assert!((v - 1.0).abs() < 1e-9, "{i}");
            }
        }
        assert!(visibility_curve(model, 1.0, 1.0, 10).is_err());
        assert!(visibility_curve(model, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn larger_comb_has_narrower_peaks() {
        let l = 300e-6;
        for n in [2usize, 3, 5, 9] {
            let first_zero = 2.0 * l / n as f64;
            assert!(comb_coherence_modulus(first_zero, n, 1, l).unwrap() < 1e-12);
            // monotone decay before the first zero
            let a = comb_coherence_modulus(0.25 * first_zero, n, 1, l).unwrap();
            let b = comb_coherence_modulus(0.75 * first_zero, n, 1, l).unwrap();
            assert!(a > b);
        }
    }
}
