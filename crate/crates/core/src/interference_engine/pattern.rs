use std::f64::consts::PI;

use num_complex::Complex64;

use super::DoubleSlitGeometry;
use crate::error::{Error, Result};

/// Second moments of the two slit fields over an averaging window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamMoments {
    /// `⟨|e1|²⟩`
    pub i1: f64,
    /// `⟨|e2|²⟩`
    pub i2: f64,
    /// `⟨e1·e2*⟩`
    pub cross: Complex64,
}

impl BeamMoments {
    pub fn accumulate(e1: &[Complex64], e2: &[Complex64]) -> Self {
        assert_eq!(e1.len(), e2.len(), "beam traces differ in length");
        let n = e1.len().max(1) as f64;
        let mut i1 = 0.0;
        let mut i2 = 0.0;
        let mut cross = Complex64::new(0.0, 0.0);
        for (a, b) in e1.iter().zip(e2) {
            i1 += a.norm_sqr();
            i2 += b.norm_sqr();
            cross += a * b.conj();
        }
        Self {
            i1: i1 / n,
            i2: i2 / n,
            cross: cross / n,
        }
    }

    /// Fringe contrast `2η|⟨e1e2*⟩| / (⟨|e1|²⟩ + ⟨|e2|²⟩)` of an ideal,
    /// continuously sampled screen.
    pub fn visibility(&self, overlap: f64) -> f64 {
        let total = self.i1 + self.i2;
        if total > 0.0 {
            2.0 * overlap * self.cross.norm() / total
        } else {
            0.0
        }
    }
}

/// Screen intensity over an averaging window.
#[derive(Clone, Debug, PartialEq)]
pub struct FringePattern {
    pub x: Vec<f64>,
    pub intensity: Vec<f64>,
    /// `(I_max − I_min)/(I_max + I_min)` of the envelope-normalised pattern
    /// within `|x| < λd/(2a)`.
    pub visibility: f64,
    pub window: (f64, f64),
}

impl FringePattern {
    /// Positions of the local intensity maxima inside `|x| < limit`.
    pub fn peaks(&self, limit: f64) -> Vec<f64> {
        let v = &self.intensity;
        (1..v.len().saturating_sub(1))
            .filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1] && self.x[i].abs() < limit)
            .map(|i| self.x[i])
            .collect()
    }

    /// Mean distance between neighbouring intensity maxima in the central
    /// region; `None` with fewer than two maxima.
    pub fn peak_spacing(&self, geometry: &DoubleSlitGeometry) -> Option<f64> {
        let peaks = self.peaks(geometry.central_half_width());
        if peaks.len() < 2 {
            return None;
        }
        Some((peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64)
    }

    /// Trapezoid integral of the intensity across the screen.
    pub fn integrated_intensity(&self) -> f64 {
        self.x
            .windows(2)
            .zip(self.intensity.windows(2))
            .map(|(x, i)| 0.5 * (x[1] - x[0]) * (i[0] + i[1]))
            .sum()
    }
}

/// Builds the screen pattern from window-averaged beam moments.
///
/// `I(x) = u(x)²·[⟨|e1|²⟩ + ⟨|e2|²⟩ + 2η·Re(⟨e1e2*⟩·e^{i2πwx/(λd)})]` in the
/// Fraunhofer limit, with `u` the single-slit envelope. Visibility is taken
/// on `I/u²` so that the slit envelope does not masquerade as fringe
/// contrast.
pub fn fringe_pattern_from_moments(
    geometry: &DoubleSlitGeometry,
    moments: &BeamMoments,
    window: (f64, f64),
    overlap: f64,
) -> Result<FringePattern> {
    geometry.validate()?;
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::invalid("polarization overlap must lie in [0, 1]"));
    }
    let x = geometry.x_grid();
    let k = 2.0 * PI * geometry.slit_spacing_m / (geometry.wavelength_m * geometry.screen_distance_m);
    let base = moments.i1 + moments.i2;
    let normalised: Vec<f64> = x
        .iter()
        .map(|&xi| {
            let (s, c) = (k * xi).sin_cos();
            let interference = moments.cross.re * c - moments.cross.im * s;
            (base + 2.0 * overlap * interference).max(0.0)
        })
        .collect();
    let intensity = x
        .iter()
        .zip(&normalised)
        .map(|(&xi, n)| {
            let u = geometry.slit_envelope(xi);
            u * u * n
        })
        .collect();

    let limit = geometry.central_half_width();
    let central: Vec<f64> = x
        .iter()
        .zip(&normalised)
        .filter(|(xi, _)| xi.abs() < limit)
        .map(|(_, n)| *n)
        .collect();
    if central.len() < 2 {
        return Err(Error::invalid("screen grid does not resolve the central lobe"));
    }
    let max = central.iter().cloned().fold(f64::MIN, f64::max);
    let min = central.iter().cloned().fold(f64::MAX, f64::min);
    let visibility = if max + min > 0.0 { (max - min) / (max + min) } else { 0.0 };

    Ok(FringePattern {
        x,
        intensity,
        visibility,
        window,
    })
}

/// Time-averaged pattern of the slit fields `e1`, `e2` over `window`.
pub fn fringe_pattern(
    geometry: &DoubleSlitGeometry,
    e1: &[Complex64],
    e2: &[Complex64],
    window: (f64, f64),
    overlap: f64,
) -> Result<FringePattern> {
    if e1.is_empty() || e1.len() != e2.len() {
        return Err(Error::invalid("beam traces must be non-empty and of equal length"));
    }
    if !(window.1 > window.0) {
        return Err(Error::invalid("averaging window is empty"));
    }
    let moments = BeamMoments::accumulate(e1, e2);
    fringe_pattern_from_moments(geometry, &moments, window, overlap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interference_engine::fringe_spacing;

    fn single(e1: Complex64, e2: Complex64) -> FringePattern {
        let g = DoubleSlitGeometry::reference();
        fringe_pattern(&g, &[e1], &[e2], (0.0, 1.0), 1.0).unwrap()
    }

    #[test]
    fn equal_beams_give_full_visibility() {
        let g = DoubleSlitGeometry::reference();
        let p = single(Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, 0.7));
        // the sampled minimum misses the true zero by at most half a grid step
        let miss = PI * g.grid_step() / fringe_spacing(&g).unwrap();
        assert!(p.visibility <= 1.0 && 1.0 - p.visibility <= 0.5 * miss * miss, "{}", p.visibility);
    }

    #[test]
    fn unequal_split_visibility() {
        let p = single(Complex64::new(0.4_f64.sqrt(), 0.0), Complex64::new(0.6_f64.sqrt(), 0.0));
        let expected = 2.0 * (0.4_f64 * 0.6).sqrt();
        assert!((p.visibility - expected).abs() < 1e-5, "{}", p.visibility);
        assert!((expected - 0.9798).abs() < 1e-4);
    }

    #[test]
    fn single_beam_has_no_fringes() {
        let p = single(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        assert!(p.visibility < 0.01);
        assert!(p.intensity.iter().all(|i| *i >= 0.0));
    }

    #[test]
    fn incoherent_beams_have_no_fringes() {
        // two orthogonal tones average to zero cross term
        let n = 1000;
        let e1: Vec<Complex64> = (0..n).map(|i| Complex64::from_polar(1.0, 0.1 * i as f64)).collect();
        let e2: Vec<Complex64> = (0..n)
            .map(|i| Complex64::from_polar(1.0, -2.0 * PI * i as f64 / n as f64 * 3.0))
            .collect();
        let g = DoubleSlitGeometry::reference();
        let p = fringe_pattern(&g, &e1, &e2, (0.0, 1.0), 1.0).unwrap();
        assert!(p.visibility < 0.05, "{}", p.visibility);
    }

    #[test]
    fn peak_spacing_matches_formula() {
        let g = DoubleSlitGeometry::reference();
        let p = single(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        let measured = p.peak_spacing(&g).unwrap();
        let expected = fringe_spacing(&g).unwrap();
        assert!((measured - expected).abs() <= g.grid_step(), "{measured} vs {expected}");
    }

    #[test]
    fn polarization_overlap_scales_visibility() {
        let g = DoubleSlitGeometry::reference();
        let one = Complex64::new(1.0, 0.0);
        let p = fringe_pattern(&g, &[one], &[one], (0.0, 1.0), 0.5).unwrap();
        assert!((p.visibility - 0.5).abs() < 1e-6);
        assert!(fringe_pattern(&g, &[one], &[one], (0.0, 1.0), 1.5).is_err());
    }

    #[test]
    fn empty_window_rejected() {
        let g = DoubleSlitGeometry::reference();
        let one = Complex64::new(1.0, 0.0);
        assert!(fringe_pattern(&g, &[one], &[one], (1.0, 1.0), 1.0).is_err());
        assert!(fringe_pattern(&g, &[], &[], (0.0, 1.0), 1.0).is_err());
    }
}
