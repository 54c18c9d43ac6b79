//! Closed-form κ(θ) in the thin-slit Fraunhofer limit, its magnitude bound,
//! and the effective-width adjustment for thick lossy slits.
//!
//! Lengths passed as `d`, `w` here are dimensionless (multiplied by k).

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Geometry, ScaledGeometry, Warning};
use crate::grid::{DetectorGrid, MAX_THETA};
use crate::profile::{Abscissa, KappaProfile, Method, ThickSlitSubstitution};

/// The closed form is trusted up to this Fresnel number (≲10% at the centre).
pub const ANALYTIC_FRESNEL_LIMIT: f64 = 1e-3;

/// Thickness (in wavelengths) beyond which the thick-slit argument fails.
pub const THICK_SLIT_LIMIT: f64 = 10.0;

fn check_scaled(d: f64, w: f64, theta: f64) -> Result<()> {
    if !(w > 0.0 && d > w) {
        return Err(Error::Domain(format!("need d > w > 0, got d = {d}, w = {w}")));
    }
    if !(theta.abs() <= MAX_THETA) {
        return Err(Error::Domain(format!("|θ| = {} exceeds {MAX_THETA}", theta.abs())));
    }
    Ok(())
}

/// The envelope f(d, w, θ) exactly as printed: the three-term bracket minus
/// the four square-root weighted terms, each divided by cos(wθ/2).
///
/// Requires |wθ| < π so that cos(wθ/2) stays positive.
pub fn f_envelope(d: f64, w: f64, theta: f64) -> Result<f64> {
    check_scaled(d, w, theta)?;
    if (w * theta).abs() >= PI {
        return Err(Error::Domain(format!(
            "cos(wθ/2) vanishes within the range: |wθ| = {} >= π",
            (w * theta).abs()
        )));
    }
    let c = f64::cos;
    let t = theta;
    let cw = c(w * t / 2.0);
    let bracket = 2.0 * c(2.0 * d * t) * c(d - FRAC_PI_4)
        + SQRT_2 * c(d * t) * c(2.0 * d - FRAC_PI_4)
        + 2.0 * c(d * t) * c(d - FRAC_PI_4);
    let near = 2.0 * (d / (d - w)).sqrt() * c((d - w) * t / 2.0) / cw
        * c(1.5 * d * t)
        * c(d - w - FRAC_PI_4)
        + 2.0 * (d / (d + w)).sqrt() * c((d + w) * t / 2.0) / cw
            * c(1.5 * d * t)
            * c(d + w - FRAC_PI_4);
    let far = (d / (2.0 * d - w)).sqrt() * c((2.0 * d - w) * t / 2.0) / cw * c(2.0 * d - w - FRAC_PI_4)
        + (d / (2.0 * d + w)).sqrt() * c((2.0 * d + w) * t / 2.0) / cw * c(2.0 * d + w - FRAC_PI_4);
    Ok(bracket - near - far)
}

/// cos(wθ/2)·f(d, w, θ), which has no poles.
fn envelope_times_cos(d: f64, w: f64, t: f64) -> f64 {
    let c = f64::cos;
    let bracket = 2.0 * c(2.0 * d * t) * c(d - FRAC_PI_4)
        + SQRT_2 * c(d * t) * c(2.0 * d - FRAC_PI_4)
        + 2.0 * c(d * t) * c(d - FRAC_PI_4);
    let c3 = c(1.5 * d * t);
    let near = 2.0 * (d / (d - w)).sqrt() * c((d - w) * t / 2.0) * c3 * c(d - w - FRAC_PI_4)
        + 2.0 * (d / (d + w)).sqrt() * c((d + w) * t / 2.0) * c3 * c(d + w - FRAC_PI_4);
    let far = (d / (2.0 * d - w)).sqrt() * c((2.0 * d - w) * t / 2.0) * c(2.0 * d - w - FRAC_PI_4)
        + (d / (2.0 * d + w)).sqrt() * c((2.0 * d + w) * t / 2.0) * c(2.0 * d + w - FRAC_PI_4);
    c(w * t / 2.0) * bracket - near - far
}

/// κ(θ) = sin(wθ) / (9 √(2πd) w² θ) · f(d, w, θ) in scaled variables.
///
/// Evaluated as [2 sin(wθ/2)/θ] · cos(wθ/2) f / (9 √(2πd) w²), which is
/// regular wherever cos(wθ/2) = 0; at θ = 0 the first factor is its limit w.
pub fn kappa_scaled(d: f64, w: f64, theta: f64) -> Result<f64> {
    check_scaled(d, w, theta)?;
    let aperture = if theta == 0.0 {
        w
    } else {
        2.0 * (0.5 * w * theta).sin() / theta
    };
    Ok(aperture * envelope_times_cos(d, w, theta) / (9.0 * (2.0 * PI * d).sqrt() * w * w))
}

pub fn kappa_at(geometry: &ScaledGeometry, theta: f64) -> Result<f64> {
    kappa_scaled(geometry.slit_separation, geometry.slit_width, theta)
}

/// Closed-form κ over a detector grid.
pub fn kappa_analytic(g: &Geometry, grid: &DetectorGrid) -> Result<KappaProfile> {
    let mut warnings = g.validate()?;
    let fresnel = g.fresnel_number();
    if fresnel > ANALYTIC_FRESNEL_LIMIT {
        warnings.push(Warning::OutsideFarField {
            fresnel_number: fresnel,
            limit: ANALYTIC_FRESNEL_LIMIT,
        });
    }
    let scaled = g.rescaled();
    let kappa = grid
        .positions()
        .par_iter()
        .map(|&t| kappa_at(&scaled, t))
        .collect::<Result<Vec<f64>>>()?;
    let mut profile = KappaProfile::new(
        Method::Analytic,
        *g,
        Abscissa::Theta,
        grid.positions().to_vec(),
        kappa,
    )?;
    profile.warnings = warnings;
    Ok(profile)
}

/// |κ_max| ≈ 0.03 λ^{3/2} / (d^{1/2} w).
pub fn kappa_bound(g: &Geometry) -> f64 {
    0.03 * g.wavelength.powf(1.5) / (g.slit_separation.sqrt() * g.slit_width)
}

/// Warnings when the geometry is outside the kw ≫ 1, d ≫ w regime of the bound.
pub fn kappa_bound_warnings(g: &Geometry) -> Vec<Warning> {
    let kw = g.wavenumber() * g.slit_width;
    let d_over_w = g.slit_separation / g.slit_width;
    if kw < 10.0 || d_over_w < 3.0 {
        vec![Warning::BoundRegime { kw, d_over_w }]
    } else {
        Vec::new()
    }
}

/// Lossy slit walls described by a complex refractive index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThickSlitModel {
    pub refractive_index_imag: f64,
    /// Recorded only; the adjustment depends on the imaginary part.
    pub refractive_index_real: f64,
    /// Transmitted fraction that defines the penetration depth.
    pub attenuation_threshold: f64,
    /// Multiplier on κ for a thick slit relative to a thin one.
    pub amplitude_factor: f64,
}

impl Default for ThickSlitModel {
    /// Steel, n = 2.29 + 2.61i, 30% threshold, factor 4.
    fn default() -> Self {
        Self {
            refractive_index_imag: 2.61,
            refractive_index_real: 2.29,
            attenuation_threshold: 0.30,
            amplitude_factor: 4.0,
        }
    }
}

impl ThickSlitModel {
    pub fn with_imag_index(refractive_index_imag: f64) -> Self {
        Self {
            refractive_index_imag,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.refractive_index_imag > 0.0) {
            return Err(Error::InvalidModel {
                field: "refractive_index_imag",
                reason: format!("must be positive, got {}", self.refractive_index_imag),
            });
        }
        if !(self.attenuation_threshold > 0.0 && self.attenuation_threshold < 1.0) {
            return Err(Error::InvalidModel {
                field: "attenuation_threshold",
                reason: format!("must lie in (0, 1), got {}", self.attenuation_threshold),
            });
        }
        if !(self.amplitude_factor > 0.0 && self.amplitude_factor.is_finite()) {
            return Err(Error::InvalidModel {
                field: "amplitude_factor",
                reason: format!("must be positive, got {}", self.amplitude_factor),
            });
        }
        Ok(())
    }

    /// Depth x with exp(−2π n_I x / λ) equal to the threshold.
    pub fn penetration_depth(&self, wavelength: f64) -> f64 {
        -self.attenuation_threshold.ln() * wavelength / (2.0 * PI * self.refractive_index_imag)
    }
}

/// w + 2x, where x is the penetration depth on each wall.
pub fn effective_width(width: f64, wavelength: f64, model: &ThickSlitModel) -> Result<f64> {
    model.validate()?;
    Ok(width + 2.0 * model.penetration_depth(wavelength))
}

/// Closed-form κ for a thick slit: evaluated at the effective width and
/// multiplied by the model's amplitude factor.
pub fn thick_slit_profile(
    g: &Geometry,
    model: &ThickSlitModel,
    grid: &DetectorGrid,
) -> Result<KappaProfile> {
    g.validate()?;
    model.validate()?;
    if g.thickness <= 0.0 {
        return Err(Error::InvalidGeometry {
            field: "thickness",
            reason: "thick-slit profile needs t > 0".into(),
        });
    }
    let widened = Geometry {
        slit_width: effective_width(g.slit_width, g.wavelength, model)?,
        ..*g
    };
    let mut profile = kappa_analytic(&widened, grid)?.scaled(model.amplitude_factor);
    if g.thickness > THICK_SLIT_LIMIT * g.wavelength {
        profile.warnings.push(Warning::ThickSlit {
            thickness_over_wavelength: g.thickness / g.wavelength,
        });
    }
    profile.thick_slit = Some(ThickSlitSubstitution {
        original_width: g.slit_width,
        effective_width: widened.slit_width,
        penetration_depth: model.penetration_depth(g.wavelength),
        amplitude_factor: model.amplitude_factor,
    });
    Ok(profile)
}
