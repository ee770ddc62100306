//! Laser power spectra on a common frequency-domain representation.
//!
//! Two representations coexist:
//!
//! - [`SampledSpectrum`]: a power density tabulated on a strictly increasing
//!   frequency grid (analytic Gaussian lines, measured spectra).
//! - [`LineSpectrum`]: a finite list of discrete lines, each optionally
//!   broadened with a Gaussian or Lorentzian profile (multi-mode combs).
//!
//! Measured spectra come in as `wavelength_nm,power` CSV and are mapped to
//! frequency sample-by-sample via `ν = c/λ`. Powers are taken as relative
//! line powers, so no Jacobian reweighting is applied.

use std::f64::consts::{LN_2, PI};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{frequency_to_wavelength, SPEED_OF_LIGHT};

/// Header of the spectrum CSV format.
pub const SPECTRUM_CSV_HEADER: &str = "wavelength_nm,power";

/// Profile used to broaden each line of a [`LineSpectrum`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineShape {
    /// Inhomogeneous profile; coherence factor `exp[-(πτδν)²/(4 ln2)]`.
    #[default]
    Gaussian,
    /// Phase-diffusion profile; coherence factor `exp(-πδν|τ|)`.
    Lorentzian,
}

impl LineShape {
    /// Modulus of the normalised coherence of a single line of FWHM `fwhm`
    /// at delay `tau`.
    pub fn coherence_factor(self, fwhm: f64, tau: f64) -> f64 {
        if fwhm == 0.0 {
            return 1.0;
        }
        match self {
            LineShape::Gaussian => {
                let x = PI * tau * fwhm;
                (-(x * x) / (4.0 * LN_2)).exp()
            }
            LineShape::Lorentzian => (-PI * fwhm * tau.abs()).exp(),
        }
    }

    /// Unit-area profile of FWHM `fwhm` evaluated at detuning `detuning`.
    pub fn profile(self, fwhm: f64, detuning: f64) -> f64 {
        match self {
            LineShape::Gaussian => {
                let sigma = fwhm / (2.0 * (2.0 * LN_2).sqrt());
                (-(detuning * detuning) / (2.0 * sigma * sigma)).exp()
                    / (sigma * (2.0 * PI).sqrt())
            }
            LineShape::Lorentzian => {
                let half = 0.5 * fwhm;
                half / (PI * (detuning * detuning + half * half))
            }
        }
    }
}

/// One discrete spectral line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralLine {
    pub frequency: f64,
    pub power: f64,
    pub fwhm: Option<f64>,
}

/// Power density sampled on a strictly increasing frequency grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSpectrum {
    frequency: Vec<f64>,
    density: Vec<f64>,
}

impl SampledSpectrum {
    pub fn new(frequency: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        if frequency.len() != density.len() {
            return Err(Error::invalid(format!(
                "frequency grid has {} samples but density has {}",
                frequency.len(),
                density.len()
            )));
        }
        if frequency.len() < 2 {
            return Err(Error::invalid("sampled spectrum needs at least 2 samples"));
        }
        if frequency.iter().any(|f| !f.is_finite()) {
            return Err(Error::invalid("frequency grid contains non-finite values"));
        }
        if frequency.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("frequency grid must be strictly increasing"));
        }
        if let Some(p) = density.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::invalid(format!("power density must be finite and >= 0, got {p}")));
        }
        Ok(Self { frequency, density })
    }

    pub fn frequency(&self) -> &[f64] {
        &self.frequency
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn len(&self) -> usize {
        self.frequency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequency.is_empty()
    }

    /// Trapezoid quadrature weights of the (possibly non-uniform) grid.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let f = &self.frequency;
        let n = f.len();
        let mut w = vec![0.0; n];
        for i in 0..n - 1 {
            let h = 0.5 * (f[i + 1] - f[i]);
            w[i] += h;
            w[i + 1] += h;
        }
        w
    }

    /// Trapezoid integral of the density.
    pub fn total_power(&self) -> f64 {
        self.trapezoid_weights()
            .iter()
            .zip(&self.density)
            .map(|(w, p)| w * p)
            .sum()
    }

    /// Power-weighted mean frequency.
    pub fn centroid(&self) -> f64 {
        let w = self.trapezoid_weights();
        let total: f64 = w.iter().zip(&self.density).map(|(w, p)| w * p).sum();
        let first: f64 = w
            .iter()
            .zip(&self.density)
            .zip(&self.frequency)
            .map(|((w, p), f)| w * p * f)
            .sum();
        first / total
    }
}

/// A finite list of spectral lines with pairwise distinct frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct LineSpectrum {
    lines: Vec<SpectralLine>,
    shape: LineShape,
}

impl LineSpectrum {
    pub fn new(mut lines: Vec<SpectralLine>, shape: LineShape) -> Result<Self> {
        if lines.is_empty() {
            return Err(Error::invalid("line spectrum needs at least one line"));
        }
        for line in &lines {
            if !line.frequency.is_finite() {
                return Err(Error::invalid("line frequency must be finite"));
            }
            if !(line.power >= 0.0) || !line.power.is_finite() {
                return Err(Error::invalid(format!(
                    "line power must be finite and >= 0, got {}",
                    line.power
                )));
            }
            if let Some(fwhm) = line.fwhm {
                if !(fwhm >= 0.0) || !fwhm.is_finite() {
                    return Err(Error::invalid(format!("line FWHM must be >= 0, got {fwhm}")));
                }
            }
        }
        lines.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        if lines.windows(2).any(|w| w[0].frequency == w[1].frequency) {
            return Err(Error::invalid("line frequencies must be pairwise distinct"));
        }
        Ok(Self { lines, shape })
    }

    /// Lines in ascending frequency order.
    pub fn lines(&self) -> &[SpectralLine] {
        &self.lines
    }

    pub fn shape(&self) -> LineShape {
        self.shape
    }

    pub fn with_shape(mut self, shape: LineShape) -> Self {
        self.shape = shape;
        self
    }

    pub fn total_power(&self) -> f64 {
        self.lines.iter().map(|l| l.power).sum()
    }

    pub fn centroid(&self) -> f64 {
        let total = self.total_power();
        self.lines.iter().map(|l| l.power * l.frequency).sum::<f64>() / total
    }

    /// Renders the broadened lines as a density on `grid`. Every line must
    /// carry a positive FWHM.
    pub fn render(&self, grid: &[f64]) -> Result<SampledSpectrum> {
        if self.lines.iter().any(|l| !matches!(l.fwhm, Some(w) if w > 0.0)) {
            return Err(Error::invalid("rendering needs a positive FWHM on every line"));
        }
        let density = grid
            .iter()
            .map(|&nu| {
                self.lines
                    .iter()
                    .map(|l| l.power * self.shape.profile(l.fwhm.unwrap(), nu - l.frequency))
                    .sum()
            })
            .collect();
        SampledSpectrum::new(grid.to_vec(), density)
    }
}

/// Optical power spectrum, either sampled or as a line list.
#[derive(Clone, Debug, PartialEq)]
pub enum PowerSpectrum {
    Sampled(SampledSpectrum),
    Lines(LineSpectrum),
}

impl PowerSpectrum {
    pub fn total_power(&self) -> f64 {
        match self {
            PowerSpectrum::Sampled(s) => s.total_power(),
            PowerSpectrum::Lines(l) => l.total_power(),
        }
    }

    pub fn centroid(&self) -> f64 {
        match self {
            PowerSpectrum::Sampled(s) => s.centroid(),
            PowerSpectrum::Lines(l) => l.centroid(),
        }
    }

    pub fn as_sampled(&self) -> Option<&SampledSpectrum> {
        match self {
            PowerSpectrum::Sampled(s) => Some(s),
            PowerSpectrum::Lines(_) => None,
        }
    }

    pub fn as_lines(&self) -> Option<&LineSpectrum> {
        match self {
            PowerSpectrum::Lines(l) => Some(l),
            PowerSpectrum::Sampled(_) => None,
        }
    }
}

impl From<SampledSpectrum> for PowerSpectrum {
    fn from(s: SampledSpectrum) -> Self {
        PowerSpectrum::Sampled(s)
    }
}

impl From<LineSpectrum> for PowerSpectrum {
    fn from(l: LineSpectrum) -> Self {
        PowerSpectrum::Lines(l)
    }
}

/// Parametric N-mode Fabry-Pérot laser.
///
/// Mode `j` (0-based) sits at `ν₀ + (j − (N−1)/2)·k·Δν_q` with
/// `Δν_q = c/2L`, so odd `N` uses integer offsets and even `N` half-integer
/// offsets, symmetric about `ν₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeComb {
    center_frequency: f64,
    cavity_length: f64,
    order: u32,
    amplitudes: Vec<f64>,
    mode_linewidth: f64,
}

impl ModeComb {
    pub fn new(
        center_frequency: f64,
        cavity_length: f64,
        order: u32,
        amplitudes: Vec<f64>,
        mode_linewidth: f64,
    ) -> Result<Self> {
        if !(center_frequency > 0.0) || !center_frequency.is_finite() {
            return Err(Error::invalid("center frequency must be positive"));
        }
        if !(cavity_length > 0.0) || !cavity_length.is_finite() {
            return Err(Error::invalid("cavity length must be positive"));
        }
        if order < 1 {
            return Err(Error::invalid("mode order multiplier k must be >= 1"));
        }
        if amplitudes.is_empty() {
            return Err(Error::invalid("mode count N must be >= 1"));
        }
        if amplitudes.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) {
            return Err(Error::invalid("mode amplitudes must be finite and >= 0"));
        }
        if amplitudes.iter().all(|a| *a == 0.0) {
            return Err(Error::invalid("mode amplitudes must not all be zero"));
        }
        if !(mode_linewidth >= 0.0) || !mode_linewidth.is_finite() {
            return Err(Error::invalid("mode linewidth must be finite and >= 0"));
        }
        Ok(Self {
            center_frequency,
            cavity_length,
            order,
            amplitudes,
            mode_linewidth,
        })
    }

    /// Comb of `n_modes` lines of equal power `p0`.
    pub fn uniform(
        center_frequency: f64,
        cavity_length: f64,
        order: u32,
        n_modes: usize,
        p0: f64,
        mode_linewidth: f64,
    ) -> Result<Self> {
        Self::new(
            center_frequency,
            cavity_length,
            order,
            vec![p0; n_modes],
            mode_linewidth,
        )
    }

    pub fn center_frequency(&self) -> f64 {
        self.center_frequency
    }

    pub fn cavity_length(&self) -> f64 {
        self.cavity_length
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn n_modes(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn mode_linewidth(&self) -> f64 {
        self.mode_linewidth
    }

    /// Frequency step between neighbouring lines, `k·c/2L`.
    pub fn line_spacing(&self) -> f64 {
        f64::from(self.order) * SPEED_OF_LIGHT / (2.0 * self.cavity_length)
    }

    /// Signed mode indices `n`: integers for odd N, half-integers for even N.
    pub fn mode_indices(&self) -> impl Iterator<Item = f64> + '_ {
        let half = (self.n_modes() as f64 - 1.0) / 2.0;
        (0..self.n_modes()).map(move |j| j as f64 - half)
    }

    /// Offsets of each mode from the centre frequency (Hz).
    pub fn mode_offsets(&self) -> Vec<f64> {
        let spacing = self.line_spacing();
        self.mode_indices().map(|n| n * spacing).collect()
    }

    pub fn mode_frequencies(&self) -> Vec<f64> {
        self.mode_offsets()
            .into_iter()
            .map(|d| self.center_frequency + d)
            .collect()
    }

    /// Distance between outermost lines, `(N−1)·k·Δν_q`.
    pub fn span(&self) -> f64 {
        (self.n_modes() as f64 - 1.0) * self.line_spacing()
    }
}

/// Longitudinal mode spacing `k·c/(2L)`.
pub fn mode_spacing(cavity_length: f64, order: u32) -> Result<f64> {
    if !(cavity_length > 0.0) || !cavity_length.is_finite() {
        return Err(Error::invalid(format!(
            "cavity length must be positive, got {cavity_length}"
        )));
    }
    if order < 1 {
        return Err(Error::invalid("mode order multiplier k must be >= 1"));
    }
    Ok(f64::from(order) * SPEED_OF_LIGHT / (2.0 * cavity_length))
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { stop } else { start + step * i as f64 })
                .collect()
        }
    }
}

/// Single-mode Gaussian line `p₀·exp{−[2√(ln2)(ν−ν₀)/δν]²}` sampled on `grid`.
///
/// The grid must bracket `ν₀ ± 3δν`.
pub fn gaussian_spectrum(nu0: f64, fwhm: f64, p0: f64, grid: &[f64]) -> Result<PowerSpectrum> {
    if !(fwhm > 0.0) || !fwhm.is_finite() {
        return Err(Error::invalid(format!("FWHM must be positive, got {fwhm}")));
    }
    if !(p0 >= 0.0) || !p0.is_finite() {
        return Err(Error::invalid(format!("peak power must be >= 0, got {p0}")));
    }
    let (Some(&lo), Some(&hi)) = (grid.first(), grid.last()) else {
        return Err(Error::invalid("frequency grid is empty"));
    };
    if nu0 < lo || nu0 > hi {
        return Err(Error::invalid(format!(
            "grid [{lo}, {hi}] Hz does not contain the centre frequency {nu0} Hz"
        )));
    }
    if lo > nu0 - 3.0 * fwhm || hi < nu0 + 3.0 * fwhm {
        return Err(Error::invalid(
            "grid must cover at least nu0 +/- 3 FWHM",
        ));
    }
    let scale = 2.0 * LN_2.sqrt() / fwhm;
    let density = grid
        .iter()
        .map(|&nu| {
            let x = scale * (nu - nu0);
            p0 * (-(x * x)).exp()
        })
        .collect();
    Ok(SampledSpectrum::new(grid.to_vec(), density)?.into())
}

/// Line list of a [`ModeComb`], one line per mode, broadened with `shape`.
pub fn comb_spectrum_with_shape(comb: &ModeComb, shape: LineShape) -> PowerSpectrum {
    let fwhm = (comb.mode_linewidth() > 0.0).then_some(comb.mode_linewidth());
    let lines = comb
        .mode_frequencies()
        .into_iter()
        .zip(comb.amplitudes())
        .map(|(frequency, &power)| SpectralLine {
            frequency,
            power,
            fwhm,
        })
        .collect();
    // mode frequencies are distinct and powers validated by ModeComb
    LineSpectrum::new(lines, shape)
        .expect("valid comb yields a valid line list")
        .into()
}

/// Line list of a [`ModeComb`] with Gaussian per-mode profiles.
pub fn comb_spectrum(comb: &ModeComb) -> PowerSpectrum {
    comb_spectrum_with_shape(comb, LineShape::Gaussian)
}

/// Result of [`envelope_linewidth`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinewidthEstimate {
    /// Envelope FWHM in frequency (Hz).
    pub fwhm_hz: f64,
    /// Power centroid (Hz).
    pub centroid_hz: f64,
    /// Wavelength-equivalent FWHM `λ²·δν/c` at the centroid (m).
    pub fwhm_wavelength_m: f64,
}

/// FWHM of a sampled spectrum's envelope.
///
/// The outermost samples at or above half the peak density bound the
/// envelope; each edge is refined by linear interpolation against its
/// outer neighbour. A multi-mode spectrum therefore yields the width of its
/// envelope rather than of a single mode.
pub fn envelope_linewidth(spectrum: &PowerSpectrum) -> Result<LinewidthEstimate> {
    let s = spectrum.as_sampled().ok_or_else(|| {
        Error::EstimationFailed("envelope linewidth needs a sampled spectrum".into())
    })?;
    let f = s.frequency();
    let p = s.density();
    let peak = p.iter().cloned().fold(0.0_f64, f64::max);
    if peak <= 0.0 {
        return Err(Error::EstimationFailed("spectrum has no power".into()));
    }
    let half = 0.5 * peak;
    let first = p.iter().position(|&v| v >= half).unwrap();
    let last = p.iter().rposition(|&v| v >= half).unwrap();
    if first == 0 || last == p.len() - 1 {
        return Err(Error::EstimationFailed(
            "no half-power crossing on one side (flat or monotone spectrum)".into(),
        ));
    }
    if first == last {
        return Err(Error::EstimationFailed(
            "peak is a single sample; envelope is unresolved".into(),
        ));
    }
    let cross = |inner: usize, outer: usize| {
        let t = (p[inner] - half) / (p[inner] - p[outer]);
        f[inner] + t * (f[outer] - f[inner])
    };
    let lo = cross(first, first - 1);
    let hi = cross(last, last + 1);
    let fwhm_hz = hi - lo;
    let centroid_hz = s.centroid();
    let lambda = frequency_to_wavelength(centroid_hz);
    Ok(LinewidthEstimate {
        fwhm_hz,
        centroid_hz,
        fwhm_wavelength_m: lambda * lambda * fwhm_hz / SPEED_OF_LIGHT,
    })
}

/// `c` in nm·Hz; exact in binary64.
const NM_HZ: f64 = SPEED_OF_LIGHT * 1e9;

/// Wavelength in nm that the CSV loader maps back to exactly `nu`, when one
/// lies within a few ulps of `c/nu`.
fn wavelength_nm_for(nu: f64) -> f64 {
    let guess = NM_HZ / nu;
    (0..=16i64)
        .flat_map(|k| [k, -k])
        .map(|k| f64::from_bits((guess.to_bits() as i64 + k) as u64))
        .find(|lambda| NM_HZ / lambda == nu)
        .unwrap_or(guess)
}

/// Reads a `wavelength_nm,power` CSV into a sampled spectrum on an ascending
/// frequency grid.
pub fn load_spectrum_csv(path: impl AsRef<Path>) -> Result<PowerSpectrum> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    let headers = reader.headers().map_err(|e| Error::Malformed {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if headers.len() != 2 || &headers[0] != "wavelength_nm" || &headers[1] != "power" {
        return Err(Error::Malformed {
            path: path.to_path_buf(),
            message: format!("expected header `{SPECTRUM_CSV_HEADER}`"),
        });
    }

    let mut samples = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let parse = |col: usize, name: &str| -> Result<f64> {
            let raw = record.get(col).unwrap_or("");
            raw.parse::<f64>().map_err(|_| Error::NonNumeric {
                path: path.to_path_buf(),
                row,
                column: name.into(),
                value: raw.into(),
            })
        };
        let lambda_nm = parse(0, "wavelength_nm")?;
        let power = parse(1, "power")?;
        if !(lambda_nm > 0.0) || !lambda_nm.is_finite() {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                message: format!("row {row}: wavelength must be positive, got {lambda_nm}"),
            });
        }
        if power < 0.0 {
            return Err(Error::NegativePower {
                path: path.to_path_buf(),
                row,
                power,
            });
        }
        if !power.is_finite() {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                message: format!("row {row}: power is not finite"),
            });
        }
        samples.push((NM_HZ / lambda_nm, power));
    }
    if samples.len() < 2 {
        return Err(Error::TooFewRows {
            path: path.to_path_buf(),
            found: samples.len(),
        });
    }
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    if samples.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::Malformed {
            path: path.to_path_buf(),
            message: "duplicate wavelength".into(),
        });
    }
    let (frequency, density) = samples.into_iter().unzip();
    Ok(SampledSpectrum::new(frequency, density)?.into())
}

/// Writes a spectrum in the `wavelength_nm,power` format, one row per sample
/// (or per line for a line list), ascending in frequency.
pub fn write_spectrum_csv(spectrum: &PowerSpectrum, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{SPECTRUM_CSV_HEADER}")?;
    let rows: Vec<(f64, f64)> = match spectrum {
        PowerSpectrum::Sampled(s) => s
            .frequency()
            .iter()
            .copied()
            .zip(s.density().iter().copied())
            .collect(),
        PowerSpectrum::Lines(l) => l.lines().iter().map(|l| (l.frequency, l.power)).collect(),
    };
    for (nu, p) in rows {
        writeln!(out, "{},{}", wavelength_nm_for(nu), p)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const NU0: f64 = 454.231e12;

    fn fine_grid(nu0: f64, fwhm: f64, n: usize) -> Vec<f64> {
        linspace(nu0 - 6.0 * fwhm, nu0 + 6.0 * fwhm, n)
    }

    #[test]
    fn gaussian_peak_and_half_power_points() {
        let fwhm = 1.0e12;
        let p0 = 2.5;
        let grid = vec![NU0 - 3.0 * fwhm, NU0 - 0.5 * fwhm, NU0, NU0 + 0.5 * fwhm, NU0 + 3.0 * fwhm];
        let s = gaussian_spectrum(NU0, fwhm, p0, &grid).unwrap();
        let d = s.as_sampled().unwrap().density();
        assert_eq!(d[2], p0);
        assert!((d[1] - p0 / 2.0).abs() < 1e-12);
        assert!((d[3] - p0 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_is_even_about_center() {
        let fwhm = 3.0e11;
        let grid = fine_grid(NU0, fwhm, 2001);
        let s = gaussian_spectrum(NU0, fwhm, 1.0, &grid).unwrap();
        let d = s.as_sampled().unwrap().density();
        for i in 0..d.len() / 2 {
            let j = d.len() - 1 - i;
            assert!((d[i] - d[j]).abs() <= 1e-9 * d[i].max(1e-300), "{i}");
        }
    }

    #[test]
    fn gaussian_rejects_bad_arguments() {
        let grid = fine_grid(NU0, 1e12, 101);
        assert!(matches!(
            gaussian_spectrum(NU0, 0.0, 1.0, &grid),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            gaussian_spectrum(NU0, -1e12, 1.0, &grid),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            gaussian_spectrum(NU0 + 1e14, 1e12, 1.0, &grid),
            Err(Error::InvalidArgument(_))
        ));
        // too narrow a grid
        let narrow = linspace(NU0 - 1e12, NU0 + 1e12, 101);
        assert!(gaussian_spectrum(NU0, 1e12, 1.0, &narrow).is_err());
    }

    #[test]
    fn gaussian_area_matches_closed_form() {
        let fwhm = 7.0e11;
        let p0 = 1.3;
        let grid = fine_grid(NU0, fwhm, 4096);
        let s = gaussian_spectrum(NU0, fwhm, p0, &grid).unwrap();
        let expected = p0 * fwhm * (PI / (4.0 * LN_2)).sqrt();
        let area = s.total_power();
        assert!((area / expected - 1.0).abs() < 1e-3, "{area} vs {expected}");
    }

    #[test]
    fn mode_spacing_values() {
        let s = mode_spacing(300e-6, 1).unwrap();
        assert!((s - 499.654e9).abs() < 0.001e9, "{s}");
        let s1 = mode_spacing(1.0, 2).unwrap();
        assert!((s1 - 299.792e6).abs() < 0.001e6);
        assert_eq!(mode_spacing(0.6, 1).unwrap(), 0.5 * mode_spacing(0.3, 1).unwrap());
        assert!(mode_spacing(0.0, 1).is_err());
        assert!(mode_spacing(-1.0, 1).is_err());
        assert!(mode_spacing(1.0, 0).is_err());
    }

    #[test]
    fn comb_line_positions() {
        let l = 300e-6;
        let dq = SPEED_OF_LIGHT / (2.0 * l);

        let one = comb_spectrum(&ModeComb::uniform(NU0, l, 1, 1, 1.0, 0.0).unwrap());
        let lines = one.as_lines().unwrap().lines();
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].frequency, NU0);

        let three = comb_spectrum(&ModeComb::uniform(NU0, l, 1, 3, 1.0, 0.0).unwrap());
        let f: Vec<f64> = three.as_lines().unwrap().lines().iter().map(|l| l.frequency).collect();
        assert_eq!(f, vec![NU0 - dq, NU0, NU0 + dq]);

        let two = comb_spectrum(&ModeComb::uniform(NU0, l, 1, 2, 1.0, 0.0).unwrap());
        let f: Vec<f64> = two.as_lines().unwrap().lines().iter().map(|l| l.frequency).collect();
        let c4l = SPEED_OF_LIGHT / (4.0 * l);
        assert!((f[0] - (NU0 - c4l)).abs() < 1e-3);
        assert!((f[1] - (NU0 + c4l)).abs() < 1e-3);
    }

    #[test]
    fn comb_copies_linewidth_and_amplitudes() {
        let comb = ModeComb::new(NU0, 1e-3, 2, vec![1.0, 0.0, 3.0], 5e6).unwrap();
        let s = comb_spectrum(&comb);
        let lines = s.as_lines().unwrap().lines();
        assert_eq!(lines.iter().map(|l| l.power).collect::<Vec<_>>(), vec![1.0, 0.0, 3.0]);
        assert!(lines.iter().all(|l| l.fwhm == Some(5e6)));
        assert!((lines[1].frequency - lines[0].frequency - comb.line_spacing()).abs() < 1e-3);
    }

    #[test]
    fn comb_rejects_invalid() {
        assert!(ModeComb::new(NU0, 0.0, 1, vec![1.0], 0.0).is_err());
        assert!(ModeComb::new(NU0, 1e-3, 0, vec![1.0], 0.0).is_err());
        assert!(ModeComb::new(NU0, 1e-3, 1, vec![], 0.0).is_err());
        assert!(ModeComb::new(NU0, 1e-3, 1, vec![0.0, 0.0], 0.0).is_err());
        assert!(ModeComb::new(NU0, 1e-3, 1, vec![-1.0, 1.0], 0.0).is_err());
        assert!(ModeComb::new(NU0, 1e-3, 1, vec![1.0], -1.0).is_err());
    }

    #[test]
    fn line_spectrum_rejects_duplicates() {
        let line = SpectralLine {
            frequency: NU0,
            power: 1.0,
            fwhm: None,
        };
        assert!(LineSpectrum::new(vec![line, line], LineShape::Gaussian).is_err());
    }

    #[test]
    fn envelope_of_gaussian_recovers_fwhm() {
        let fwhm = 1.0e12;
        let grid = fine_grid(NU0, fwhm, 1201);
        let step = grid[1] - grid[0];
        let s = gaussian_spectrum(NU0, fwhm, 1.0, &grid).unwrap();
        let est = envelope_linewidth(&s).unwrap();
        assert!((est.fwhm_hz - fwhm).abs() <= step, "{} vs {fwhm}", est.fwhm_hz);
        assert!((est.centroid_hz - NU0).abs() < 1e-3 * fwhm);
    }

    #[test]
    fn envelope_failures() {
        let single = SampledSpectrum::new(
            vec![1.0, 2.0, 3.0, 4.0, 5.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0],
        )
        .unwrap();
        assert!(matches!(
            envelope_linewidth(&single.into()),
            Err(Error::EstimationFailed(_))
        ));
        let flat = SampledSpectrum::new(vec![1.0, 2.0, 3.0], vec![1.0, 1.0, 1.0]).unwrap();
        assert!(envelope_linewidth(&flat.into()).is_err());
        let mono = SampledSpectrum::new(vec![1.0, 2.0, 3.0, 4.0], vec![0.1, 0.2, 0.5, 1.0]).unwrap();
        assert!(envelope_linewidth(&mono.into()).is_err());
    }

    #[test]
    fn rendered_comb_preserves_line_power() {
        let comb = ModeComb::new(NU0, 1e-3, 1, vec![1.0, 2.0], 1e9).unwrap();
        let lines = comb_spectrum(&comb);
        let spacing = comb.line_spacing();
        let grid = linspace(NU0 - 2.0 * spacing, NU0 + 2.0 * spacing, 40001);
        let rendered = lines.as_lines().unwrap().render(&grid).unwrap();
        assert!((rendered.total_power() / 3.0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn spectrum_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let first = dir.path().join("a.csv");
        let second = dir.path().join("b.csv");
        let grid = fine_grid(NU0, 1e12, 4001);
        let s = gaussian_spectrum(NU0, 1e12, 1.0, &grid).unwrap();
        write_spectrum_csv(&s, &first).unwrap();
        let a = load_spectrum_csv(&first).unwrap();
        // not every frequency has an exact decimal wavelength: at most one ulp off
        for (x, y) in a.as_sampled().unwrap().frequency().iter().zip(grid.iter()) {
            assert!((x - y).abs() <= y * f64::EPSILON, "{x} vs {y}");
        }
        assert_eq!(a.as_sampled().unwrap().density(), s.as_sampled().unwrap().density());
        // once emitted, the table is a fixed point
        write_spectrum_csv(&a, &second).unwrap();
        let b = load_spectrum_csv(&second).unwrap();
        assert_eq!(a, b);
    }
}
