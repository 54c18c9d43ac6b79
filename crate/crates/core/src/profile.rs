use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fraunhofer::EpsilonMode;
use crate::fresnel::RiemannGrid;
use crate::geometry::{Geometry, Warning};
use crate::grid::QuadratureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Fraunhofer,
    Fresnel,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Fraunhofer => "fraunhofer",
            Method::Fresnel => "fresnel",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "analytic" => Ok(Method::Analytic),
            "fraunhofer" => Ok(Method::Fraunhofer),
            "fresnel" => Ok(Method::Fresnel),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

/// What the abscissa of a profile measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Abscissa {
    /// Detector angle θ in radians.
    Theta,
    /// Slit-to-screen distance D in metres.
    ScreenDistance,
}

/// Substitutions made by the thick-slit adjustment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThickSlitSubstitution {
    pub original_width: f64,
    pub effective_width: f64,
    pub penetration_depth: f64,
    pub amplitude_factor: f64,
}

/// κ sampled along a detector angle or screen distance axis, with the inputs
/// that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaProfile {
    abscissa_kind: Abscissa,
    abscissa: Vec<f64>,
    kappa: Vec<f64>,
    pub method: Method,
    pub geometry: Geometry,
    pub quadrature: Option<QuadratureSpec>,
    pub mode: Option<EpsilonMode>,
    pub riemann_grid: Option<RiemannGrid>,
    pub thick_slit: Option<ThickSlitSubstitution>,
    /// Per-point flag for screen distances where the paraxial treatment is
    /// doubtful. Empty when not applicable.
    pub paraxial_suspect: Vec<bool>,
    pub warnings: Vec<Warning>,
}

impl KappaProfile {
    pub fn new(
        method: Method,
        geometry: Geometry,
        abscissa_kind: Abscissa,
        abscissa: Vec<f64>,
        kappa: Vec<f64>,
    ) -> Result<Self> {
        if abscissa.len() != kappa.len() {
            return Err(Error::InvalidGrid(format!(
                "abscissa has {} points but kappa has {}",
                abscissa.len(),
                kappa.len()
            )));
        }
        Ok(Self {
            abscissa_kind,
            abscissa,
            kappa,
            method,
            geometry,
            quadrature: None,
            mode: None,
            riemann_grid: None,
            thick_slit: None,
            paraxial_suspect: Vec::new(),
            warnings: Vec::new(),
        })
    }

    pub fn abscissa_kind(&self) -> Abscissa {
        self.abscissa_kind
    }

    pub fn abscissa(&self) -> &[f64] {
        &self.abscissa
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.abscissa.iter().copied().zip(self.kappa.iter().copied())
    }

    /// κ at the abscissa closest to `x`.
    pub fn nearest(&self, x: f64) -> Option<(f64, f64)> {
        self.points()
            .min_by(|a, b| (a.0 - x).abs().total_cmp(&(b.0 - x).abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.kappa.iter().fold(0.0, |m, k| m.max(k.abs()))
    }

    /// Multiplies every κ value by `factor`.
    pub fn scaled(mut self, factor: f64) -> Self {
        for k in &mut self.kappa {
            *k *= factor;
        }
        self
    }
}
