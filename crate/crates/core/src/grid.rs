use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest detector angle (radians) accepted anywhere. The small-angle
/// expansions behind the closed form and the asymptotic amplitudes need θ ≪ 1.
pub const MAX_THETA: f64 = 0.2;

/// Detector positions as angles θ = y_D / D, stored in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorGrid {
    positions: Vec<f64>,
    /// Render θ in degrees on output.
    pub degrees: bool,
}

impl DetectorGrid {
    pub fn new(positions: Vec<f64>, degrees: bool) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidGrid("no detector positions".into()));
        }
        for &theta in &positions {
            if !theta.is_finite() || theta.abs() > MAX_THETA {
                return Err(Error::InvalidGrid(format!(
                    "|θ| = {} rad exceeds {MAX_THETA} rad",
                    theta.abs()
                )));
            }
        }
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("positions must be strictly increasing".into()));
        }
        Ok(Self { positions, degrees })
    }

    /// `count` evenly spaced angles from `min` to `max` radians inclusive.
    pub fn linspace(min: f64, max: f64, count: usize) -> Result<Self> {
        Self::new(linspace(min, max, count)?, false)
    }

    /// Like [`DetectorGrid::linspace`] with the bounds in degrees; output is
    /// rendered in degrees as well.
    pub fn linspace_degrees(min_deg: f64, max_deg: f64, count: usize) -> Result<Self> {
        let positions = linspace(min_deg, max_deg, count)?
            .into_iter()
            .map(f64::to_radians)
            .collect();
        Self::new(positions, true)
    }

    pub fn single(theta: f64) -> Result<Self> {
        Self::new(vec![theta], false)
    }

    /// Angles in radians.
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Positions in the unit chosen for output.
    pub fn display_positions(&self) -> Vec<f64> {
        if self.degrees {
            self.positions.iter().map(|t| t.to_degrees()).collect()
        } else {
            self.positions.clone()
        }
    }
}

/// Evenly spaced values. The midpoint of a symmetric range is exactly zero
/// and mirrored entries are exact negatives of each other.
pub fn linspace(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidGrid("point count must be positive".into()));
    }
    if !(min.is_finite() && max.is_finite()) {
        return Err(Error::InvalidGrid("range bounds must be finite".into()));
    }
    if count == 1 {
        if min != max {
            return Err(Error::InvalidGrid(
                "a single point needs min == max".into(),
            ));
        }
        return Ok(vec![min]);
    }
    if max <= min {
        return Err(Error::InvalidGrid(format!(
            "range must be increasing, got {min}:{max}"
        )));
    }
    let n = (count - 1) as f64;
    let mid = 0.5 * (min + max);
    let half = 0.5 * (max - min);
    Ok((0..count)
        .map(|i| {
            // Integer numerator keeps s exactly antisymmetric about the midpoint.
            let s = (2 * i as i64 - (count as i64 - 1)) as f64 / n;
            mid + half * s
        })
        .collect())
}

/// Resolution controls for the oscillatory integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Quadrature nodes per 2π of the fastest phase.
    pub samples_per_oscillation: usize,
    /// Panel-doubling stops here.
    pub max_panels: usize,
    /// Relative change between successive doublings accepted as converged.
    pub tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            samples_per_oscillation: 24,
            max_panels: 1 << 18,
            tolerance: 1e-4,
        }
    }
}

impl QuadratureSpec {
    pub fn with_samples(samples_per_oscillation: usize) -> Self {
        Self {
            samples_per_oscillation,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples_per_oscillation < 8 {
            return Err(Error::InvalidQuadrature(format!(
                "samples_per_oscillation must be at least 8, got {}",
                self.samples_per_oscillation
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidQuadrature(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_panels == 0 {
            return Err(Error::InvalidQuadrature("max_panels must be positive".into()));
        }
        Ok(())
    }
}
