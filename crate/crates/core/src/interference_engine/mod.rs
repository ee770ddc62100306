//! Time-domain multi-mode fields, two-arm fiber delay and double-slit
//! fringe formation.
//!
//! Each fiber arm feeds exactly one slit of the fiber double-slit. The field
//! is a complex envelope relative to the comb centre frequency `ν₀`; the
//! optical carrier only enters as the exact phase factor `e^{−i2πν₀Δτ}` on
//! the delayed arm.

mod beams;
mod field;
mod pattern;
mod stats;

pub use beams::{delayed_two_beam, TwoBeamTrace};
pub use field::{synthesize_delayed_pair, synthesize_field, DelayedPair, FieldTrace};
pub use pattern::{fringe_pattern, fringe_pattern_from_moments, BeamMoments, FringePattern};
pub use stats::{
    time_averaged_visibility, visibility_statistics, StatsRequest, VisibilityEstimate,
    VisibilityStats,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral_model::linspace;
use crate::SPEED_OF_LIGHT;

/// Fiber double-slit and observation screen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DoubleSlitGeometry {
    /// Vacuum wavelength (m).
    pub wavelength_m: f64,
    /// Centre-to-centre slit separation `w` (m).
    pub slit_spacing_m: f64,
    /// Width `a` of each slit (m).
    pub slit_width_m: f64,
    /// Slit-to-screen distance `d` (m).
    pub screen_distance_m: f64,
    /// Full width of the sampled screen, centred on the axis (m).
    pub screen_extent_m: f64,
    pub screen_samples: usize,
}

impl Default for DoubleSlitGeometry {
    fn default() -> Self {
        Self::reference()
    }
}

impl DoubleSlitGeometry {
    /// Setup of the reference experiment: 660 nm, 125 µm spacing, 4 µm
    /// slits, screen at 31.5 cm.
    pub fn reference() -> Self {
        Self {
            wavelength_m: 660e-9,
            slit_spacing_m: 125e-6,
            slit_width_m: 4e-6,
            screen_distance_m: 0.315,
            screen_extent_m: 10e-3,
            screen_samples: 4001,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be positive, got {v}")))
            }
        };
        positive(self.wavelength_m, "wavelength")?;
        positive(self.slit_spacing_m, "slit spacing")?;
        positive(self.slit_width_m, "slit width")?;
        positive(self.screen_distance_m, "screen distance")?;
        positive(self.screen_extent_m, "screen extent")?;
        if self.slit_width_m >= self.slit_spacing_m {
            return Err(Error::invalid(format!(
                "slit width {} must be smaller than slit spacing {}",
                self.slit_width_m, self.slit_spacing_m
            )));
        }
        if self.screen_distance_m / self.slit_spacing_m < 100.0 {
            return Err(Error::invalid(
                "screen distance must be at least 100x the slit spacing (far field)",
            ));
        }
        if self.screen_samples < 16 {
            return Err(Error::invalid("screen needs at least 16 samples"));
        }
        Ok(())
    }

    /// Screen sample positions (m).
    pub fn x_grid(&self) -> Vec<f64> {
        let half = 0.5 * self.screen_extent_m;
        linspace(-half, half, self.screen_samples)
    }

    pub fn grid_step(&self) -> f64 {
        self.screen_extent_m / (self.screen_samples - 1) as f64
    }

    /// Half-width `λd/(2a)` of the region used for visibility estimates.
    pub fn central_half_width(&self) -> f64 {
        self.wavelength_m * self.screen_distance_m / (2.0 * self.slit_width_m)
    }

    /// Single-slit far-field amplitude `sinc(πa·x/(λd))`.
    pub fn slit_envelope(&self, x: f64) -> f64 {
        let z = std::f64::consts::PI * self.slit_width_m * x
            / (self.wavelength_m * self.screen_distance_m);
        if z == 0.0 {
            1.0
        } else {
            z.sin() / z
        }
    }
}

/// Expected fringe period `λd/w` (m).
pub fn fringe_spacing(geometry: &DoubleSlitGeometry) -> Result<f64> {
    geometry.validate()?;
    Ok(geometry.wavelength_m * geometry.screen_distance_m / geometry.slit_spacing_m)
}

/// Short and long fiber arms between the splitter and the double slit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathConfig {
    pub short_path_m: f64,
    pub long_path_m: f64,
    pub refractive_index: f64,
    /// Fraction of the power coupled into the short arm.
    pub split_ratio: f64,
    /// Polarisation overlap `η ∈ [0, 1]` multiplying the interference term.
    pub polarization_overlap: f64,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self::reference()
    }
}

impl PathConfig {
    /// Equal-index arms with unit polarisation overlap.
    pub fn new(short_path_m: f64, long_path_m: f64, refractive_index: f64, split_ratio: f64) -> Result<Self> {
        let p = Self {
            short_path_m,
            long_path_m,
            refractive_index,
            split_ratio,
            polarization_overlap: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// 2 m short arm, 600 m delay line, n = 1.4677, 40 % into the short arm.
    pub fn reference() -> Self {
        Self {
            short_path_m: 2.0,
            long_path_m: 602.0,
            refractive_index: 1.4677,
            split_ratio: 0.4,
            polarization_overlap: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.short_path_m >= 0.0) || !self.short_path_m.is_finite() {
            return Err(Error::invalid("short path must be >= 0"));
        }
        if !(self.long_path_m >= self.short_path_m) || !self.long_path_m.is_finite() {
            return Err(Error::invalid(format!(
                "long path {} must be >= short path {}",
                self.long_path_m, self.short_path_m
            )));
        }
        if !(self.refractive_index >= 1.0) || !self.refractive_index.is_finite() {
            return Err(Error::invalid("refractive index must be >= 1"));
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(Error::invalid(format!(
                "split ratio must lie in (0, 1), got {}",
                self.split_ratio
            )));
        }
        if !(0.0..=1.0).contains(&self.polarization_overlap) {
            return Err(Error::invalid("polarization overlap must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Transit time of the short arm `n·p₁/c`.
    pub fn short_delay(&self) -> f64 {
        self.refractive_index * self.short_path_m / SPEED_OF_LIGHT
    }

    /// Transit time of the long arm `n·p₂/c`.
    pub fn long_delay(&self) -> f64 {
        self.refractive_index * self.long_path_m / SPEED_OF_LIGHT
    }

    /// Arm delay difference `n·(p₂−p₁)/c`.
    pub fn delay_difference(&self) -> f64 {
        self.refractive_index * (self.long_path_m - self.short_path_m) / SPEED_OF_LIGHT
    }

    /// Optical path difference `n·(p₂−p₁)` (m).
    pub fn optical_path_difference(&self) -> f64 {
        self.refractive_index * (self.long_path_m - self.short_path_m)
    }

    /// Largest visibility two beams with this split can reach, `2√(r(1−r))`.
    pub fn max_visibility(&self) -> f64 {
        2.0 * (self.split_ratio * (1.0 - self.split_ratio)).sqrt()
    }
}
