//! TOML run configuration.
//!
//! Every key carries its SI unit as a suffix. All sections are optional and
//! default to the reference setup; `RunConfig::default()` serialised with
//! [`RunConfig::to_toml`] is the full documented key set.
//!
//! ```toml
//! [source]
//! kind = "comb"                 # comb | gaussian | csv
//! center_wavelength_nm = 660.0
//! cavity_length_m = 0.0003
//! mode_order = 1
//! mode_count = 5
//! amplitudes = []               # empty: uniform, mode_power each
//! mode_power = 1.0
//! mode_linewidth_hz = 10000000.0
//! gaussian_fwhm_nm = 1.5
//! # spectrum_csv = "spectrum.csv"
//!
//! [geometry]
//! wavelength_m = 6.6e-7
//! slit_spacing_m = 0.000125
//! slit_width_m = 4e-6
//! screen_distance_m = 0.315
//! screen_extent_m = 0.01
//! screen_samples = 4001
//!
//! [paths]
//! short_path_m = 2.0
//! long_path_m = 602.0
//! refractive_index = 1.4677
//! split_ratio = 0.4
//! polarization_overlap = 1.0
//!
//! [schedule]
//! t_on_s = 0.0
//! t_off_s = 0.001
//! t0_s = 0.0
//!
//! [simulation]
//! duration_s = 2e-8
//! dt_s = 0.0                    # 0: a quarter of the Nyquist step
//! n_seeds = 16
//! seed = 0
//! window_s = 1e-9
//! threshold = 0.5
//! mode_counts = [1, 2, 3, 5, 9]
//!
//! [output]
//! directory = "out"
//! svg = false
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interference_engine::{DoubleSlitGeometry, PathConfig};
use crate::spectral_model::{gaussian_spectrum, linspace, load_spectrum_csv, ModeComb, PowerSpectrum};
use crate::timing_logic::RunSchedule;
use crate::SPEED_OF_LIGHT;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    #[default]
    Comb,
    Gaussian,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceSection {
    pub kind: SourceKind,
    pub center_wavelength_nm: f64,
    pub cavity_length_m: f64,
    pub mode_order: u32,
    pub mode_count: usize,
    pub amplitudes: Vec<f64>,
    pub mode_power: f64,
    pub mode_linewidth_hz: f64,
    pub gaussian_fwhm_nm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum_csv: Option<PathBuf>,
}

impl Default for SourceSection {
    fn default() -> Self {
        Self {
            kind: SourceKind::Comb,
            center_wavelength_nm: 660.0,
            cavity_length_m: 300e-6,
            mode_order: 1,
            mode_count: 5,
            amplitudes: Vec::new(),
            mode_power: 1.0,
            mode_linewidth_hz: 10e6,
            gaussian_fwhm_nm: 1.5,
            spectrum_csv: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleSection {
    pub t_on_s: f64,
    pub t_off_s: f64,
    pub t0_s: f64,
}

impl Default for ScheduleSection {
    fn default() -> Self {
        Self {
            t_on_s: 0.0,
            t_off_s: 1e-3,
            t0_s: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    pub duration_s: f64,
    pub dt_s: f64,
    pub n_seeds: usize,
    pub seed: u64,
    pub window_s: f64,
    pub threshold: f64,
    pub mode_counts: Vec<usize>,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            duration_s: 20e-9,
            dt_s: 0.0,
            n_seeds: 16,
            seed: 0,
            window_s: 1e-9,
            threshold: 0.5,
            mode_counts: vec![1, 2, 3, 5, 9],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub svg: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            svg: false,
        }
    }
}

/// Complete, validated run configuration.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub source: SourceSection,
    pub geometry: DoubleSlitGeometry,
    pub paths: PathConfig,
    pub schedule: ScheduleSection,
    pub simulation: SimulationSection,
    pub output: OutputSection,
}

fn key_error(key: &str, message: impl std::fmt::Display) -> Error {
    Error::Config {
        key: key.into(),
        message: message.to_string(),
    }
}

fn require(ok: bool, key: &str, domain: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(key_error(key, format!("expected {domain}")))
    }
}

/// Dotted key at byte offset `at` of a TOML document, best effort.
fn locate_key(text: &str, at: usize) -> String {
    let mut section = String::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if trimmed.starts_with('[') && trimmed.ends_with(']') {
            section = trimmed.trim_matches(|c| c == '[' || c == ']').trim().to_string();
        }
        if at < offset + line.len() {
            if let Some((key, _)) = trimmed.split_once('=') {
                let key = key.trim();
                return if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
            }
            return section;
        }
        offset += line.len();
    }
    section
}

impl RunConfig {
    /// Parses and validates a TOML document; relative paths resolve against
    /// `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let key = e
                .span()
                .map(|s| locate_key(text, s.start))
                .filter(|k| !k.is_empty())
                .unwrap_or_else(|| "<document>".into());
            key_error(&key, e.message())
        })?;
        if let (Some(base), Some(csv)) = (base_dir, cfg.source.spectrum_csv.as_mut()) {
            if csv.is_relative() {
                *csv = base.join(&*csv);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.source;
        require(
            s.center_wavelength_nm > 0.0 && s.center_wavelength_nm.is_finite(),
            "source.center_wavelength_nm",
            "a positive wavelength in nm",
        )?;
        match s.kind {
            SourceKind::Comb => {
                require(s.cavity_length_m > 0.0 && s.cavity_length_m.is_finite(), "source.cavity_length_m", "a positive length in m")?;
                require(s.mode_order >= 1, "source.mode_order", "an integer >= 1")?;
                require(s.mode_count >= 1, "source.mode_count", "an integer >= 1")?;
                require(
                    s.amplitudes.is_empty() || s.amplitudes.len() == s.mode_count,
                    "source.amplitudes",
                    "either empty or exactly mode_count entries",
                )?;
                require(s.mode_power > 0.0 && s.mode_power.is_finite(), "source.mode_power", "a positive power")?;
                require(
                    s.mode_linewidth_hz >= 0.0 && s.mode_linewidth_hz.is_finite(),
                    "source.mode_linewidth_hz",
                    "a linewidth >= 0 in Hz",
                )?;
                self.comb_with_modes(s.mode_count)
                    .map_err(|e| key_error("source.amplitudes", e))?;
            }
            SourceKind::Gaussian => {
                require(
                    s.gaussian_fwhm_nm > 0.0 && s.gaussian_fwhm_nm.is_finite(),
                    "source.gaussian_fwhm_nm",
                    "a positive linewidth in nm",
                )?;
            }
            SourceKind::Csv => match &s.spectrum_csv {
                None => return Err(key_error("source.spectrum_csv", "required when kind = \"csv\"")),
                Some(p) if !p.exists() => {
                    return Err(key_error("source.spectrum_csv", format!("file {} does not exist", p.display())))
                }
                Some(_) => {}
            },
        }

        let g = &self.geometry;
        if g.slit_width_m >= g.slit_spacing_m {
            return Err(key_error(
                "geometry.slit_width_m, geometry.slit_spacing_m",
                format!(
                    "slit width {} m must be smaller than slit spacing {} m",
                    g.slit_width_m, g.slit_spacing_m
                ),
            ));
        }
        g.validate().map_err(|e| key_error("geometry", e))?;

        let p = &self.paths;
        require(p.short_path_m >= 0.0, "paths.short_path_m", "a length >= 0 in m")?;
        require(p.long_path_m >= p.short_path_m, "paths.long_path_m", "a length >= paths.short_path_m")?;
        require(p.refractive_index >= 1.0, "paths.refractive_index", "a value >= 1")?;
        require(p.split_ratio > 0.0 && p.split_ratio < 1.0, "paths.split_ratio", "a fraction in (0, 1)")?;
        require(
            (0.0..=1.0).contains(&p.polarization_overlap),
            "paths.polarization_overlap",
            "a value in [0, 1]",
        )?;

        let t = &self.schedule;
        require(t.t_on_s >= 0.0, "schedule.t_on_s", "a time >= 0 in s")?;
        require(t.t_off_s > t.t_on_s, "schedule.t_off_s", "a time later than schedule.t_on_s")?;
        require(t.t0_s >= 0.0, "schedule.t0_s", "a time >= 0 in s")?;

        let m = &self.simulation;
        require(m.duration_s > 0.0 && m.duration_s.is_finite(), "simulation.duration_s", "a positive time in s")?;
        require(m.dt_s >= 0.0 && m.dt_s.is_finite(), "simulation.dt_s", "a time step >= 0 (0 = automatic)")?;
        require(m.n_seeds >= 1, "simulation.n_seeds", "an integer >= 1")?;
        require(m.window_s > 0.0 && m.window_s <= m.duration_s, "simulation.window_s", "a positive time no longer than duration_s")?;
        require(m.threshold > 0.0 && m.threshold < 1.0, "simulation.threshold", "a value in (0, 1)")?;
        require(
            !m.mode_counts.is_empty() && m.mode_counts.iter().all(|n| *n >= 1),
            "simulation.mode_counts",
            "a non-empty list of integers >= 1",
        )?;
        Ok(())
    }

    pub fn center_frequency(&self) -> f64 {
        SPEED_OF_LIGHT / (self.source.center_wavelength_nm * 1e-9)
    }

    /// Source comb with `n_modes` modes; explicit amplitudes are used only
    /// when their count matches.
    pub fn comb_with_modes(&self, n_modes: usize) -> Result<ModeComb> {
        let s = &self.source;
        let amplitudes = if s.amplitudes.len() == n_modes {
            s.amplitudes.clone()
        } else {
            vec![s.mode_power; n_modes]
        };
        ModeComb::new(
            self.center_frequency(),
            s.cavity_length_m,
            s.mode_order,
            amplitudes,
            s.mode_linewidth_hz,
        )
    }

    pub fn comb(&self) -> Result<ModeComb> {
        self.comb_with_modes(self.source.mode_count)
    }

    /// The configured source as a power spectrum.
    pub fn spectrum(&self) -> Result<PowerSpectrum> {
        let s = &self.source;
        match s.kind {
            SourceKind::Comb => Ok(crate::spectral_model::comb_spectrum(&self.comb()?)),
            SourceKind::Gaussian => {
                let nu0 = self.center_frequency();
                let lambda = s.center_wavelength_nm * 1e-9;
                let fwhm = SPEED_OF_LIGHT * s.gaussian_fwhm_nm * 1e-9 / (lambda * lambda);
                let grid = linspace(nu0 - 6.0 * fwhm, nu0 + 6.0 * fwhm, 1 << 14);
                gaussian_spectrum(nu0, fwhm, 1.0, &grid)
            }
            SourceKind::Csv => load_spectrum_csv(s.spectrum_csv.as_ref().expect("validated")),
        }
    }

    pub fn schedule(&self) -> RunSchedule {
        RunSchedule {
            t_on: self.schedule.t_on_s,
            t_off: self.schedule.t_off_s,
            t0: self.schedule.t0_s,
            paths: self.paths.clone(),
        }
    }

    /// Time step: the configured one, or a quarter of the Nyquist step of the
    /// widest comb in the mode-count sweep.
    pub fn time_step(&self) -> Result<f64> {
        if self.simulation.dt_s > 0.0 {
            return Ok(self.simulation.dt_s);
        }
        let widest = self
            .simulation
            .mode_counts
            .iter()
            .copied()
            .chain([self.source.mode_count])
            .max()
            .unwrap_or(1);
        let span = self.comb_with_modes(widest)?.span();
        Ok(if span > 0.0 {
            1.0 / (4.0 * span)
        } else {
            self.simulation.window_s / 100.0
        })
    }
}

/// Reads and validates a configuration file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let text = fs::read_to_string(path)?;
    RunConfig::from_toml_str(&text, path.parent())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::from_toml_str(
            "[source]\nmode_count = 3\n[geometry]\nwavelength_m = 6.6e-7\nslit_spacing_m = 1.25e-4\nslit_width_m = 4e-6\nscreen_distance_m = 0.315\nscreen_extent_m = 0.01\nscreen_samples = 2001\n",
            None,
        )
        .unwrap();
        assert_eq!(cfg.source.mode_count, 3);
        assert_eq!(cfg.paths, PathConfig::reference());
        assert_eq!(cfg.simulation, SimulationSection::default());
    }

    #[test]
    fn slit_width_error_names_both_keys() {
        let err = RunConfig::from_toml_str(
            "[geometry]\nwavelength_m = 6.6e-7\nslit_spacing_m = 1e-5\nslit_width_m = 2e-5\nscreen_distance_m = 0.315\nscreen_extent_m = 0.01\nscreen_samples = 2001\n",
            None,
        )
        .unwrap_err();
        match err {
            Error::Config { key, .. } => {
                assert!(key.contains("slit_width_m") && key.contains("slit_spacing_m"), "{key}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_named() {
        let err = RunConfig::from_toml_str("[paths]\nbogus_key = 1.0\n", None).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus_key"), "{msg}");
    }

    #[test]
    fn type_mismatch_names_key() {
        let err = RunConfig::from_toml_str("[simulation]\nn_seeds = \"many\"\n", None).unwrap_err();
        match err {
            Error::Config { key, .. } => assert_eq!(key, "simulation.n_seeds"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_csv_is_rejected() {
        let err = RunConfig::from_toml_str("[source]\nkind = \"csv\"\nspectrum_csv = \"/nonexistent/x.csv\"\n", None)
            .unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "source.spectrum_csv"));
    }

    #[test]
    fn reference_values_accepted() {
        let cfg = RunConfig::from_toml_str(
            "[geometry]\nwavelength_m = 660e-9\nslit_spacing_m = 125e-6\nslit_width_m = 4e-6\nscreen_distance_m = 0.315\nscreen_extent_m = 0.01\nscreen_samples = 4001\n[paths]\nshort_path_m = 2.0\nlong_path_m = 1002.0\nrefractive_index = 1.4677\nsplit_ratio = 0.4\n",
            None,
        )
        .unwrap();
        assert_eq!(cfg.paths.refractive_index, 1.4677);
    }

    #[test]
    fn printed_config_reparses_equal() {
        let cfg = RunConfig::default();
        let again = RunConfig::from_toml_str(&cfg.to_toml(), None).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn auto_time_step_respects_nyquist() {
        let cfg = RunConfig::default();
        let dt = cfg.time_step().unwrap();
        let span = cfg.comb_with_modes(9).unwrap().span();
        assert!(dt < 1.0 / (2.0 * span));
    }
}
