//! Physical slit geometry, presets and the dimensionless (k-rescaled) form.
//!
//! All lengths are SI metres. The three slits are labelled A, B and C with
//! centres at `+d`, `0` and `-d` along y; each has width `w` and height `h`
//! (along z). The point source sits a distance `L` before the slit plane and
//! the detector screen a distance `D` after it.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fresnel number above which [`Geometry::validate`] flags the geometry as
/// being outside the far field.
pub const FAR_FIELD_FRESNEL_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub slit_width: f64,
    /// Centre-to-centre distance between neighbouring slits.
    pub slit_separation: f64,
    pub source_distance: f64,
    pub screen_distance: f64,
    pub thickness: f64,
    /// Extent along z; only the exact-propagator integration uses it.
    pub slit_height: f64,
    pub wavelength: f64,
}

/// Soft regime diagnostics. None of these stop a computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// λ ≥ w: the short-wavelength asymptotics are unreliable.
    WavelengthNotSmall { wavelength_over_width: f64 },
    OutsideFarField { fresnel_number: f64, limit: f64 },
    /// The bound formula assumes kw ≫ 1 and d ≫ w.
    BoundRegime { kw: f64, d_over_w: f64 },
    /// Slit gap too small (in units of 1/k) for the integration-by-parts series.
    SmallSlitGap { scaled_gap: f64 },
    /// Thick-slit phase argument needs t of a few wavelengths at most.
    ThickSlit { thickness_over_wavelength: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::WavelengthNotSmall {
                wavelength_over_width,
            } => write!(f, "wavelength is not small compared to the slit width (λ/w = {wavelength_over_width:.3})"),
            Warning::OutsideFarField {
                fresnel_number,
                limit,
            } => write!(f, "Fresnel number {fresnel_number:.3e} exceeds the far-field limit {limit:.1e}"),
            Warning::BoundRegime { kw, d_over_w } => write!(
                f,
                "bound assumes kw >> 1 and d >> w (kw = {kw:.2}, d/w = {d_over_w:.2})"
            ),
            Warning::SmallSlitGap { scaled_gap } => {
                write!(f, "scaled slit gap k(d-w) = {scaled_gap:.2} is below 10")
            }
            Warning::ThickSlit {
                thickness_over_wavelength,
            } => write!(f, "slit thickness t/λ = {thickness_over_wavelength:.2} exceeds 10"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// 810 nm photons through 30 µm slits 100 µm apart.
    Photon,
    /// 50 pm electrons through 62 nm slits 272 nm apart.
    Electron,
    /// d = 3λ, w = λ, t = 4λ, far field.
    Fdtd,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Photon, Preset::Electron, Preset::Fdtd];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Photon => "photon",
            Preset::Electron => "electron",
            Preset::Fdtd => "fdtd",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "photon" => Ok(Preset::Photon),
            "electron" => Ok(Preset::Electron),
            "fdtd" => Ok(Preset::Fdtd),
            _ => Err(Error::UnknownPreset(s.to_string())),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Geometry {
    pub fn preset(preset: Preset) -> Self {
        match preset {
            Preset::Photon => Geometry {
                slit_width: 30e-6,
                slit_separation: 100e-6,
                source_distance: 0.181,
                screen_distance: 0.181,
                thickness: 0.0,
                slit_height: 300e-6,
                wavelength: 810e-9,
            },
            Preset::Electron => Geometry {
                slit_width: 62e-9,
                slit_separation: 272e-9,
                source_distance: 0.305,
                screen_distance: 0.24,
                thickness: 0.0,
                slit_height: 4e-6,
                wavelength: 50e-12,
            },
            Preset::Fdtd => Geometry::fdtd(1.0),
        }
    }

    /// The thick-slit comparison geometry with wavelength `wavelength`.
    pub fn fdtd(wavelength: f64) -> Self {
        Geometry {
            slit_width: wavelength,
            slit_separation: 3.0 * wavelength,
            source_distance: 1e4 * wavelength,
            screen_distance: 1e4 * wavelength,
            thickness: 4.0 * wavelength,
            slit_height: 100.0 * wavelength,
            wavelength,
        }
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// `w² / (λ D)`.
    pub fn fresnel_number(&self) -> f64 {
        self.slit_width * self.slit_width / (self.wavelength * self.screen_distance)
    }

    /// Checks the hard invariants and returns the regime warnings that apply.
    pub fn validate(&self) -> Result<Vec<Warning>> {
        let positive = [
            ("slit_width", self.slit_width),
            ("slit_separation", self.slit_separation),
            ("source_distance", self.source_distance),
            ("screen_distance", self.screen_distance),
            ("slit_height", self.slit_height),
            ("wavelength", self.wavelength),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidGeometry {
                    field,
                    reason: format!("must be a positive length, got {value}"),
                });
            }
        }
        if !(self.thickness.is_finite() && self.thickness >= 0.0) {
            return Err(Error::InvalidGeometry {
                field: "thickness",
                reason: format!("must be non-negative, got {}", self.thickness),
            });
        }
        if self.slit_separation <= self.slit_width {
            return Err(Error::InvalidGeometry {
                field: "slit_separation",
                reason: format!(
                    "must exceed the slit width ({} <= {})",
                    self.slit_separation, self.slit_width
                ),
            });
        }

        let mut warnings = Vec::new();
        if self.wavelength >= self.slit_width {
            warnings.push(Warning::WavelengthNotSmall {
                wavelength_over_width: self.wavelength / self.slit_width,
            });
        }
        let fresnel = self.fresnel_number();
        if fresnel > FAR_FIELD_FRESNEL_LIMIT {
            warnings.push(Warning::OutsideFarField {
                fresnel_number: fresnel,
                limit: FAR_FIELD_FRESNEL_LIMIT,
            });
        }
        Ok(warnings)
    }

    pub fn rescaled(&self) -> ScaledGeometry {
        rescale_to_dimensionless(self)
    }

    /// Same geometry with source and screen moved so that the Fresnel number
    /// becomes `fresnel_number` (L = D).
    pub fn with_fresnel_number(&self, fresnel_number: f64) -> Self {
        let distance = self.slit_width * self.slit_width / (self.wavelength * fresnel_number);
        Geometry {
            source_distance: distance,
            screen_distance: distance,
            ..*self
        }
    }
}

/// Lengths multiplied by k = 2π/λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledGeometry {
    pub slit_width: f64,
    pub slit_separation: f64,
    pub source_distance: f64,
    pub screen_distance: f64,
    pub thickness: f64,
}

pub fn rescale_to_dimensionless(g: &Geometry) -> ScaledGeometry {
    let k = g.wavenumber();
    ScaledGeometry {
        slit_width: k * g.slit_width,
        slit_separation: k * g.slit_separation,
        source_distance: k * g.source_distance,
        screen_distance: k * g.screen_distance,
        thickness: k * g.thickness,
    }
}

impl ScaledGeometry {
    /// Inverse of [`rescale_to_dimensionless`]; the height is not rescaled and
    /// is passed through.
    pub fn to_physical(&self, wavelength: f64, slit_height: f64) -> Geometry {
        let k = 2.0 * PI / wavelength;
        Geometry {
            slit_width: self.slit_width / k,
            slit_separation: self.slit_separation / k,
            source_distance: self.source_distance / k,
            screen_distance: self.screen_distance / k,
            thickness: self.thickness / k,
            slit_height,
            wavelength,
        }
    }

    /// Scaled gap between facing edges of neighbouring slits.
    pub fn gap(&self) -> f64 {
        self.slit_separation - self.slit_width
    }
}
