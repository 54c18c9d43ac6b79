//! Composite Gauss–Legendre quadrature for complex oscillatory integrands
//! and order-independent pairwise summation.

use std::f64::consts::PI;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::QuadratureSpec;

/// Nodes per panel.
pub const PANEL_ORDER: usize = 8;

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct PanelRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl PanelRule {
    pub fn gauss_legendre(order: usize) -> Self {
        let rule = GaussLegendre::new(order.max(2)).expect("order >= 2");
        let (nodes, weights) = rule.as_node_weight_pairs().iter().copied().unzip();
        Self { nodes, weights }
    }

    /// The shared default-order rule.
    pub fn standard() -> &'static PanelRule {
        static RULE: OnceLock<PanelRule> = OnceLock::new();
        RULE.get_or_init(|| PanelRule::gauss_legendre(PANEL_ORDER))
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Mapped nodes and weights for the interval [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.mapped(a, b) {
            acc += f(x) * w;
        }
        acc
    }

    /// `panels` equal panels on [a, b], summed pairwise.
    pub fn composite(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: impl FnMut(f64) -> Complex64,
    ) -> Complex64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let parts: Vec<Complex64> = (0..panels)
            .map(|i| {
                let lo = a + h * i as f64;
                let hi = if i + 1 == panels { b } else { lo + h };
                self.integrate(lo, hi, &mut f)
            })
            .collect();
        pairwise_sum(&parts)
    }

    /// Nodes and weights of the composite rule, flattened.
    pub fn composite_nodes(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels)
            .flat_map(|i| {
                let lo = a + h * i as f64;
                let hi = if i + 1 == panels { b } else { lo + h };
                self.mapped(lo, hi).collect::<Vec<_>>()
            })
            .collect()
    }
}

/// Panels needed on an interval of length `length` so that a phase advancing
/// at `phase_rate` radians per unit length gets `samples_per_oscillation`
/// nodes per 2π.
pub fn panels_for(length: f64, phase_rate: f64, samples_per_oscillation: usize, order: usize) -> usize {
    let oscillations = length.abs() * phase_rate.abs() / (2.0 * PI);
    let nodes = oscillations * samples_per_oscillation as f64;
    ((nodes / order as f64).ceil() as usize).max(1)
}

/// Tree summation with a fixed shape determined only by the length.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_sum_real(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_real(&values[..mid]) + pairwise_sum_real(&values[mid..])
}

/// Outcome of an integration refined until successive doublings agree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Converged {
    pub value: Complex64,
    /// Multiplier applied to the initial panel counts.
    pub refinement: usize,
    /// Relative change in the last doubling.
    pub relative_change: f64,
}

/// Evaluates `estimate(refinement)` at refinement 1, 2, 4, … until two
/// successive results agree to `spec.tolerance`. `panels_at(refinement)`
/// reports the largest panel count used, which is capped by `spec.max_panels`.
///
/// `floor` is an absolute scale below which differences are treated as
/// converged; pass 0 for a purely relative test.
pub fn refine_until_converged(
    spec: &QuadratureSpec,
    floor: f64,
    panels_at: impl Fn(usize) -> usize,
    mut estimate: impl FnMut(usize) -> Complex64,
) -> Result<Converged> {
    let mut refinement = 1;
    if panels_at(refinement) > spec.max_panels {
        return Err(Error::NonConvergence {
            achieved: f64::INFINITY,
            tolerance: spec.tolerance,
            panels: panels_at(refinement),
        });
    }
    let mut previous = estimate(refinement);
    loop {
        let next_refinement = refinement * 2;
        if panels_at(next_refinement) > spec.max_panels {
            // Not even one doubling fits under the cap.
            return Err(Error::NonConvergence {
                achieved: f64::INFINITY,
                tolerance: spec.tolerance,
                panels: panels_at(refinement),
            });
        }
        let current = estimate(next_refinement);
        let change = (current - previous).norm() / current.norm().max(floor).max(f64::MIN_POSITIVE);
        if change <= spec.tolerance {
            return Ok(Converged {
                value: current,
                refinement: next_refinement,
                relative_change: change,
            });
        }
        if panels_at(next_refinement * 2) > spec.max_panels {
            return Err(Error::NonConvergence {
                achieved: change,
                tolerance: spec.tolerance,
                panels: panels_at(next_refinement),
            });
        }
        previous = current;
        refinement = next_refinement;
    }
}
