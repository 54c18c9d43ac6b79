//! Path-integral evaluation of κ in the far field.
//!
//! All lengths are k-rescaled. With γ = e^{ik(L+D)}/(LD) the amplitudes are
//!
//! ```text
//! ψ_P     = −γ/(4π²) ∫_P dy e^{−iyθ}
//! ψ_{P,Q} = γ i^{3/2} (2π)^{−5/2} · ¼ ∫_P dy₁ ∫_Q dy₂ |y₂−y₁|^{−1/2} e^{i|y₂−y₁| − iy₂θ}
//! ```
//!
//! where ¼ is the inclination factor of a kinked path. Each further hop
//! multiplies by (2π)^{−1/2} e^{−iπ/4} |Δy|^{−1/2} and another ¼.
//!
//! The double integral is evaluated in the hop length u = y₂ − y₁: for fixed
//! u the y₂ range is the overlap of Q with P + u, so the outer integral runs
//! over u with panels resolving e^{i|u|} and the inner one is either closed
//! form (linear phase) or a short quadrature (quadratic phase).

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::ANALYTIC_FRESNEL_LIMIT;
use crate::error::{Error, Result};
use crate::geometry::{Geometry, ScaledGeometry, Warning};
use crate::grid::{DetectorGrid, QuadratureSpec, MAX_THETA};
use crate::profile::{Abscissa, KappaProfile, Method};
use crate::quadrature::{panels_for, refine_until_converged, PanelRule};
use crate::slits::{PathAmplitudes, Slit, SlitSet};

/// Inclination factor applied once per kink.
pub const INCLINATION: f64 = 0.25;

/// Fraction of an integrand's absolute mass below which a result counts as
/// zero when testing convergence.
const ZERO_FLOOR: f64 = 1e-9;

/// Below this scaled gap the asymptotic amplitudes are flagged.
pub const ASYMPTOTIC_MIN_GAP: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonMode {
    /// All seven intensities from classical plus single-kink amplitudes.
    Full,
    /// Linear in the kink amplitudes.
    FirstOrder,
}

impl std::str::FromStr for EpsilonMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "full" => Ok(EpsilonMode::Full),
            "first-order" | "first_order" => Ok(EpsilonMode::FirstOrder),
            other => Err(format!("unknown epsilon mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FraunhoferContext {
    pub scaled: ScaledGeometry,
    /// e^{ik(L+D)}/(LD) in physical units.
    pub gamma: Complex64,
    /// Keep the y²/2L and y²/2D propagation phases.
    pub keep_quadratic: bool,
}

impl FraunhoferContext {
    pub fn new(g: &Geometry) -> Result<Self> {
        g.validate()?;
        let phase = g.wavenumber() * (g.source_distance + g.screen_distance);
        let gamma = Complex64::from_polar(1.0 / (g.source_distance * g.screen_distance), phase);
        Ok(Self {
            scaled: g.rescaled(),
            gamma,
            keep_quadratic: false,
        })
    }

    /// A context straight from scaled lengths, with γ = 1.
    pub fn from_scaled(scaled: ScaledGeometry) -> Result<Self> {
        if !(scaled.slit_width > 0.0 && scaled.slit_separation > scaled.slit_width) {
            return Err(Error::InvalidGeometry {
                field: "slit_separation",
                reason: "scaled slits must satisfy d > w > 0".into(),
            });
        }
        Ok(Self {
            scaled,
            gamma: Complex64::new(1.0, 0.0),
            keep_quadratic: false,
        })
    }

    pub fn with_quadratic_phase(mut self, keep: bool) -> Self {
        self.keep_quadratic = keep;
        self
    }

    pub fn extent(&self, slit: Slit) -> (f64, f64) {
        slit.extent(self.scaled.slit_separation, self.scaled.slit_width)
    }

    fn source_curvature(&self) -> f64 {
        if self.keep_quadratic {
            0.5 / self.scaled.source_distance
        } else {
            0.0
        }
    }

    fn screen_curvature(&self) -> f64 {
        if self.keep_quadratic {
            0.5 / self.scaled.screen_distance
        } else {
            0.0
        }
    }

    fn classical_prefactor(&self) -> Complex64 {
        -self.gamma / (4.0 * PI * PI)
    }

    /// γ i^{3/2} (2π)^{−5/2} with the inclination factor.
    fn kink_prefactor(&self) -> Complex64 {
        self.gamma * Complex64::from_polar((2.0 * PI).powf(-2.5) * INCLINATION, 3.0 * FRAC_PI_4)
    }

    /// Additional factor for each hop beyond the first.
    fn extra_hop_prefactor() -> Complex64 {
        Complex64::from_polar((2.0 * PI).powf(-0.5) * INCLINATION, -FRAC_PI_4)
    }

    /// Largest |y| over the slits.
    fn reach(&self) -> f64 {
        self.scaled.slit_separation + 0.5 * self.scaled.slit_width
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta.abs() <= MAX_THETA {
        Ok(())
    } else {
        Err(Error::Domain(format!("|θ| = {} exceeds {MAX_THETA}", theta.abs())))
    }
}

fn cis(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

/// ∫_lo^hi e^{−iyθ} dy in closed form.
fn linear_phase_integral(lo: f64, hi: f64, theta: f64) -> Complex64 {
    let len = hi - lo;
    let half = 0.5 * theta * len;
    let sinc = if half.abs() < 1e-8 {
        1.0 - half * half / 6.0
    } else {
        half.sin() / half
    };
    cis(-0.5 * theta * (lo + hi)) * (len * sinc)
}

/// Classical amplitude through one slit.
///
/// Without quadratic phases the integral is taken over slit B's extent and
/// shifted by e^{−i c θ} (c the slit centre), so ψ_A = e^{−idθ}ψ_B and
/// ψ_C = e^{idθ}ψ_B hold to rounding.
pub fn classical_amplitude(
    slit: Slit,
    theta: f64,
    ctx: &FraunhoferContext,
    q: &QuadratureSpec,
) -> Result<Complex64> {
    check_theta(theta)?;
    q.validate()?;
    let rule = PanelRule::standard();
    let half = 0.5 * ctx.scaled.slit_width;
    let curvature = ctx.source_curvature() + ctx.screen_curvature();
    let integral = if ctx.keep_quadratic {
        let (lo, hi) = ctx.extent(slit);
        let rate = theta.abs() + 2.0 * curvature * ctx.reach();
        let base = panels_for(hi - lo, rate, q.samples_per_oscillation, rule.order());
        refine_until_converged(q, ZERO_FLOOR * (hi - lo), |r| base * r, |r| {
            rule.composite(lo, hi, base * r, |y| cis(curvature * y * y - y * theta))
        })?
        .value
    } else {
        let base = panels_for(2.0 * half, theta, q.samples_per_oscillation, rule.order());
        let centred = refine_until_converged(q, ZERO_FLOOR * 2.0 * half, |r| base * r, |r| {
            rule.composite(-half, half, base * r, |y| cis(-y * theta))
        })?
        .value;
        cis(-slit.offset() * ctx.scaled.slit_separation * theta) * centred
    };
    Ok(ctx.classical_prefactor() * integral)
}

/// Breakpoints of the hop-length integral for y₁ ∈ [a, b], y₂ ∈ [p, q].
fn hop_breakpoints(p_ext: (f64, f64), q_ext: (f64, f64)) -> Vec<f64> {
    let (a, b) = p_ext;
    let (p, q) = q_ext;
    let mut pts = vec![p - b, p - a, q - b, q - a];
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * x.abs().max(1.0));
    pts
}

/// ∫_P dy₁ ∫_Q dy₂ |y₂−y₁|^{−1/2} e^{i|y₂−y₁| − iy₂θ} (plus the quadratic
/// phases y₁²/2L + y₂²/2D when enabled).
pub fn kink_integral(
    p: Slit,
    q_slit: Slit,
    theta: f64,
    ctx: &FraunhoferContext,
    q: &QuadratureSpec,
) -> Result<Complex64> {
    if p == q_slit {
        return Err(Error::InvalidSlits(format!("kink from slit {p} to itself")));
    }
    check_theta(theta)?;
    q.validate()?;
    let rule = PanelRule::standard();
    let (a, b) = ctx.extent(p);
    let (lo_q, hi_q) = ctx.extent(q_slit);
    let breaks = hop_breakpoints((a, b), (lo_q, hi_q));
    let src = ctx.source_curvature();
    let scr = ctx.screen_curvature();
    let reach = ctx.reach();
    // Local phase rate of the inner y₂ integrand bounds the inner panel count.
    let inner_rate = theta.abs() + 2.0 * (src + scr) * 2.0 * reach;
    let outer_rate = 1.0 + theta.abs() + 2.0 * src * 2.0 * reach;
    let spo = q.samples_per_oscillation;

    let base: Vec<usize> = breaks
        .windows(2)
        .map(|w| panels_for(w[1] - w[0], outer_rate, spo, rule.order()))
        .collect();
    let max_base = base.iter().copied().max().unwrap_or(1);

    let inner = |u: f64, refinement: usize| -> Complex64 {
        let lo = lo_q.max(a + u);
        let hi = hi_q.min(b + u);
        if hi <= lo {
            return Complex64::new(0.0, 0.0);
        }
        if !ctx.keep_quadratic {
            return linear_phase_integral(lo, hi, theta);
        }
        let n = panels_for(hi - lo, inner_rate, spo, rule.order()) * refinement;
        rule.composite(lo, hi, n, |y2| {
            let y1 = y2 - u;
            cis(src * y1 * y1 + scr * y2 * y2 - y2 * theta)
        })
    };

    let estimate = |refinement: usize| -> Complex64 {
        let parts: Vec<Complex64> = breaks
            .windows(2)
            .zip(&base)
            .map(|(w, &n)| {
                rule.composite(w[0], w[1], n * refinement, |u| {
                    let r = u.abs();
                    cis(r) / r.sqrt() * inner(u, refinement)
                })
            })
            .collect();
        crate::quadrature::pairwise_sum(&parts)
    };
    let width = ctx.scaled.slit_width;
    let mass = width * width / ctx.scaled.gap().sqrt();
    Ok(refine_until_converged(q, ZERO_FLOOR * mass, |r| max_base * r, estimate)?.value)
}

/// ψ_{P,Q} by quadrature.
pub fn nonclassical_amplitude_quadrature(
    p: Slit,
    q_slit: Slit,
    theta: f64,
    ctx: &FraunhoferContext,
    q: &QuadratureSpec,
) -> Result<Complex64> {
    Ok(ctx.kink_prefactor() * kink_integral(p, q_slit, theta, ctx, q)?)
}

/// Leading boundary terms of the integration-by-parts expansion of the kink
/// integral, with a, b the edges of P and p, q those of Q.
pub fn kink_integral_asymptotic(p: Slit, q_slit: Slit, theta: f64, ctx: &FraunhoferContext) -> Complex64 {
    let (a, b) = ctx.extent(p);
    let (lo, hi) = ctx.extent(q_slit);
    // Θ(e − y₂) and Θ(y₂ − e) pick the branch of |y₂ − e|.
    let term = |edge: f64, y2: f64| -> Complex64 {
        if edge > y2 {
            cis((edge - y2) - y2 * theta) / (edge - y2).sqrt()
        } else {
            cis(-(edge - y2) - y2 * theta) / (y2 - edge).sqrt()
        }
    };
    (term(b, hi) - term(b, lo)) - (term(a, hi) - term(a, lo))
}

/// Asymptotic ψ_{P,Q} together with any regime warning.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticAmplitude {
    pub value: Complex64,
    pub warnings: Vec<Warning>,
}

pub fn nonclassical_amplitude_asymptotic(
    p: Slit,
    q_slit: Slit,
    theta: f64,
    ctx: &FraunhoferContext,
) -> Result<AsymptoticAmplitude> {
    if p == q_slit {
        return Err(Error::InvalidSlits(format!("kink from slit {p} to itself")));
    }
    check_theta(theta)?;
    let gap = ctx.scaled.gap();
    let warnings = if gap < ASYMPTOTIC_MIN_GAP {
        vec![Warning::SmallSlitGap { scaled_gap: gap }]
    } else {
        Vec::new()
    };
    Ok(AsymptoticAmplitude {
        value: ctx.kink_prefactor() * kink_integral_asymptotic(p, q_slit, theta, ctx),
        warnings,
    })
}

/// A path through one to three slits in order.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    slits: Vec<Slit>,
    pub quadrature: QuadratureSpec,
}

impl PathSpec {
    pub fn new(slits: Vec<Slit>, quadrature: QuadratureSpec) -> Result<Self> {
        if slits.is_empty() || slits.len() > 3 {
            return Err(Error::InvalidSlits(format!(
                "a path visits one to three slits, got {}",
                slits.len()
            )));
        }
        if slits.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSlits("consecutive slits in a path must differ".into()));
        }
        Ok(Self { slits, quadrature })
    }

    pub fn slits(&self) -> &[Slit] {
        &self.slits
    }

    pub fn kinks(&self) -> usize {
        self.slits.len() - 1
    }
}

/// ∫_P |y−y₁|^{−1/2} e^{i|y−y₁| + i c y₁²} dy₁, the hop into y from slit P.
fn hop_from(
    rule: &PanelRule,
    (a, b): (f64, f64),
    y: f64,
    curvature: f64,
    panels: usize,
) -> Complex64 {
    rule.composite(a, b, panels, |y1| {
        let r = (y - y1).abs();
        cis(r + curvature * y1 * y1) / r.sqrt()
    })
}

/// Two-kink amplitude ψ_{P,Q,R}: source → P → Q → R → detector.
pub fn multi_kink_amplitude(path: &PathSpec, theta: f64, ctx: &FraunhoferContext) -> Result<Complex64> {
    let [p, mid, r] = match path.slits() {
        &[p, m, r] => [p, m, r],
        other => {
            return Err(Error::InvalidSlits(format!(
                "a two-kink path needs three slits, got {}",
                other.len()
            )))
        }
    };
    check_theta(theta)?;
    let q = &path.quadrature;
    q.validate()?;
    let rule = PanelRule::standard();
    let src = ctx.source_curvature();
    let scr = ctx.screen_curvature();
    let reach = ctx.reach();
    let spo = q.samples_per_oscillation;
    let (pa, pb) = ctx.extent(p);
    let (ma, mb) = ctx.extent(mid);
    let (ra, rb) = ctx.extent(r);
    let hop_rate = 1.0 + theta.abs() + 2.0 * (src + scr) * reach;
    let n_first = panels_for(pb - pa, hop_rate, spo, rule.order());
    let n_last = panels_for(rb - ra, hop_rate, spo, rule.order());
    // Product of the two hop factors oscillates at up to twice the hop rate.
    let n_mid = panels_for(mb - ma, 2.0 * hop_rate, spo, rule.order());

    let estimate = |refinement: usize| -> Complex64 {
        rule.composite(ma, mb, n_mid * refinement, |y2| {
            let first = hop_from(rule, (pa, pb), y2, src, n_first * refinement);
            let last = rule.composite(ra, rb, n_last * refinement, |y3| {
                let d = (y3 - y2).abs();
                cis(d + scr * y3 * y3 - y3 * theta) / d.sqrt()
            });
            first * last
        })
    };
    let max_base = n_first.max(n_last).max(n_mid);
    let integral = refine_until_converged(q, 0.0, |k| max_base * k, estimate)?.value;
    Ok(ctx.kink_prefactor() * FraunhoferContext::extra_hop_prefactor() * integral)
}

/// Amplitude along any valid path: classical, single-kink or two-kink.
pub fn path_amplitude(path: &PathSpec, theta: f64, ctx: &FraunhoferContext) -> Result<Complex64> {
    match *path.slits() {
        [s] => classical_amplitude(s, theta, ctx, &path.quadrature),
        [p, q] => nonclassical_amplitude_quadrature(p, q, theta, ctx, &path.quadrature),
        _ => multi_kink_amplitude(path, theta, ctx),
    }
}

/// Classical and (optionally) single-kink amplitudes at one angle.
pub fn path_amplitudes(
    theta: f64,
    ctx: &FraunhoferContext,
    q: &QuadratureSpec,
    include_nonclassical: bool,
) -> Result<PathAmplitudes> {
    let mut amps = PathAmplitudes::default();
    for s in Slit::ALL {
        amps.classical[s.index()] = classical_amplitude(s, theta, ctx, q)?;
    }
    if include_nonclassical {
        for (p, r) in SlitSet::ABC.ordered_pairs() {
            amps.kinked[p.index()][r.index()] = nonclassical_amplitude_quadrature(p, r, theta, ctx, q)?;
        }
    }
    Ok(amps)
}

pub fn epsilon_from(amps: &PathAmplitudes, mode: EpsilonMode) -> f64 {
    match mode {
        EpsilonMode::Full => amps.epsilon_full(),
        EpsilonMode::FirstOrder => amps.epsilon_first_order(),
    }
}

/// Sorkin numerator ε(θ).
pub fn sorkin_epsilon(
    theta: f64,
    ctx: &FraunhoferContext,
    q: &QuadratureSpec,
    mode: EpsilonMode,
) -> Result<f64> {
    Ok(epsilon_from(&path_amplitudes(theta, ctx, q, true)?, mode))
}

/// κ(θ) = ε(θ)/δ with δ = I_ABC(0), for a context built by the caller.
pub fn kappa_profile_with(
    ctx: &FraunhoferContext,
    geometry: &Geometry,
    grid: &DetectorGrid,
    q: &QuadratureSpec,
    mode: EpsilonMode,
) -> Result<KappaProfile> {
    q.validate()?;
    let central = path_amplitudes(0.0, ctx, q, true)?;
    let delta = central.intensity(SlitSet::ABC);
    let kappa = grid
        .positions()
        .par_iter()
        .map(|&t| {
            let amps = if t == 0.0 {
                central
            } else {
                path_amplitudes(t, ctx, q, true)?
            };
            Ok(epsilon_from(&amps, mode) / delta)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut profile = KappaProfile::new(
        Method::Fraunhofer,
        *geometry,
        Abscissa::Theta,
        grid.positions().to_vec(),
        kappa,
    )?;
    profile.quadrature = Some(*q);
    profile.mode = Some(mode);
    let fresnel = geometry.fresnel_number();
    if fresnel > ANALYTIC_FRESNEL_LIMIT {
        profile.warnings.push(Warning::OutsideFarField {
            fresnel_number: fresnel,
            limit: ANALYTIC_FRESNEL_LIMIT,
        });
    }
    Ok(profile)
}

/// κ(θ) by quadrature with linear (far-field) phases.
pub fn kappa_numeric_profile(
    g: &Geometry,
    grid: &DetectorGrid,
    q: &QuadratureSpec,
    mode: EpsilonMode,
) -> Result<KappaProfile> {
    let ctx = FraunhoferContext::new(g)?;
    kappa_profile_with(&ctx, g, grid, q, mode)
}
