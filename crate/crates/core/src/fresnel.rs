//! Exact-propagator Riemann sums over the slit apertures.
//!
//! The source sits at (−L, 0, 0), the slits in the plane x = 0 with height h
//! along z, and the detector at (D, y_D, 0). Each slit is divided into
//! n_y × n_z equal cells sampled at their midpoints.
//!
//! A kink from slit P to slit Q needs the four-dimensional sum
//! Σ_p Σ_q K(s,p)K(p,q)K(q,det). Both slits share the same local grid, so the
//! hop displacement q − p only depends on index differences and the inner sum
//! over p is a 2D linear convolution, evaluated with FFTs. That inner sum does
//! not involve the detector and is reused across detector positions and
//! screen distances.
//!
//! Amplitudes returned here omit the common phase e^{ik(L+D)}.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::grid::DetectorGrid;
use crate::profile::{Abscissa, KappaProfile, Method};
use crate::quadrature::pairwise_sum;
use crate::slits::{PathAmplitudes, Slit, SlitSet};

/// Inclination factor applied once per kink.
pub const INCLINATION: f64 = 0.25;

/// Smallest allowed sample count along either slit axis.
pub const MIN_SAMPLES: usize = 16;

/// Default cell sizes in wavelengths.
pub const DEFAULT_DY_OVER_LAMBDA: f64 = 1.0 / 20.0;
pub const DEFAULT_DZ_OVER_LAMBDA: f64 = 1.0 / 5.0;

/// Largest padded convolution grid, in complex samples.
pub const MAX_FFT_CELLS: usize = 1 << 25;

/// D below this multiple of max(d, h) is flagged as paraxial-suspect.
pub const PARAXIAL_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Plane {
    Source,
    Slit,
    Detector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AperturePoint {
    pub plane: Plane,
    /// Longitudinal station.
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl AperturePoint {
    pub fn source(g: &Geometry) -> Self {
        Self {
            plane: Plane::Source,
            x: -g.source_distance,
            y: 0.0,
            z: 0.0,
        }
    }

    pub fn detector(g: &Geometry, y: f64) -> Self {
        Self {
            plane: Plane::Detector,
            x: g.screen_distance,
            y,
            z: 0.0,
        }
    }

    /// A point of the slit plane. It must lie inside an open slit.
    pub fn on_slit(g: &Geometry, slit: Slit, y: f64, z: f64) -> Result<Self> {
        let (lo, hi) = slit.extent(g.slit_separation, g.slit_width);
        if !(lo..=hi).contains(&y) || z.abs() > 0.5 * g.slit_height {
            return Err(Error::InvalidGeometry {
                field: "aperture_point",
                reason: format!("({y}, {z}) is outside slit {slit}"),
            });
        }
        Ok(Self {
            plane: Plane::Slit,
            x: 0.0,
            y,
            z,
        })
    }

    pub fn distance(&self, other: &AperturePoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// K(r₁, r₂) = (k/2πi) e^{ik|r₁−r₂|}/|r₁−r₂|.
pub fn exact_propagator(r1: &AperturePoint, r2: &AperturePoint, k: f64) -> Result<Complex64> {
    let r = r1.distance(r2);
    if r == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(propagator(k, r, k * r))
}

/// (k/2πi) e^{iφ}/r.
#[inline]
fn propagator(k: f64, r: f64, phase: f64) -> Complex64 {
    let (s, c) = phase.sin_cos();
    // 1/i = −i
    Complex64::new(s, -c) * (k / (2.0 * PI * r))
}

/// Propagator from a point at longitudinal distance `base` and transverse
/// offset² `rho2`, without the phase e^{ik·base}.
#[inline]
fn propagator_excess(k: f64, base: f64, rho2: f64) -> Complex64 {
    let r = (base * base + rho2).sqrt();
    propagator(k, r, k * rho2 / (r + base))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RiemannGrid {
    /// Cells across each slit's width.
    pub n_y: usize,
    /// Cells along the slit height.
    pub n_z: usize,
}

impl RiemannGrid {
    pub fn new(n_y: usize, n_z: usize) -> Result<Self> {
        if n_y < MIN_SAMPLES || n_z < MIN_SAMPLES {
            return Err(Error::InvalidRiemannGrid(format!(
                "n_y = {n_y} and n_z = {n_z} must both be at least {MIN_SAMPLES}"
            )));
        }
        Ok(Self { n_y, n_z })
    }

    /// Default cells of λ/20 across and λ/5 along the slit.
    pub fn for_geometry(g: &Geometry) -> Self {
        let n_y = (g.slit_width / (DEFAULT_DY_OVER_LAMBDA * g.wavelength)).ceil() as usize;
        let n_z = (g.slit_height / (DEFAULT_DZ_OVER_LAMBDA * g.wavelength)).ceil() as usize;
        Self {
            n_y: n_y.max(MIN_SAMPLES),
            n_z: n_z.max(MIN_SAMPLES),
        }
    }

    pub fn refined(&self, factor: usize) -> Self {
        Self {
            n_y: self.n_y * factor,
            n_z: self.n_z * factor,
        }
    }

    /// Cell sides (dy, dz) in metres.
    pub fn cell(&self, g: &Geometry) -> (f64, f64) {
        (g.slit_width / self.n_y as f64, g.slit_height / self.n_z as f64)
    }

    pub fn cell_area(&self, g: &Geometry) -> f64 {
        let (dy, dz) = self.cell(g);
        dy * dz
    }

    /// Padded convolution shape needed for kink sums.
    pub fn fft_shape(&self) -> (usize, usize) {
        (smooth_size(2 * self.n_y - 1), smooth_size(2 * self.n_z - 1))
    }

    pub fn validate_for(&self, g: &Geometry, include_nonclassical: bool) -> Result<()> {
        Self::new(self.n_y, self.n_z)?;
        let (dy, dz) = self.cell(g);
        let diagonal = dy.hypot(dz);
        if diagonal > 0.25 * g.wavelength {
            return Err(Error::InvalidRiemannGrid(format!(
                "cell diagonal {:.3}λ exceeds λ/4",
                diagonal / g.wavelength
            )));
        }
        if include_nonclassical {
            let (ny, nz) = self.fft_shape();
            if ny * nz > MAX_FFT_CELLS {
                return Err(Error::InvalidRiemannGrid(format!(
                    "kink convolution needs {ny}×{nz} samples, above the limit of {MAX_FFT_CELLS}"
                )));
            }
        }
        Ok(())
    }
}

/// Smallest n' ≥ n whose only prime factors are 2, 3, 5 and 7.
fn smooth_size(n: usize) -> usize {
    let is_smooth = |mut m: usize| {
        for p in [2, 3, 5, 7] {
            while m % p == 0 {
                m /= p;
            }
        }
        m == 1
    };
    (n.max(1)..).find(|&m| is_smooth(m)).expect("smooth numbers are unbounded")
}

/// Row-major 2D complex array.
struct Plane2 {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Plane2 {
    fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    fn transposed(&self) -> Self {
        const TILE: usize = 32;
        let mut out = Plane2::zeros(self.cols, self.rows);
        for r0 in (0..self.rows).step_by(TILE) {
            for c0 in (0..self.cols).step_by(TILE) {
                for r in r0..(r0 + TILE).min(self.rows) {
                    for c in c0..(c0 + TILE).min(self.cols) {
                        out.data[c * self.rows + r] = self.data[r * self.cols + c];
                    }
                }
            }
        }
        out
    }
}

struct Fft2 {
    along_rows: Arc<dyn Fft<f64>>,
    along_cols: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(planner: &mut FftPlanner<f64>, rows: usize, cols: usize, inverse: bool) -> Self {
        let plan = |p: &mut FftPlanner<f64>, n| {
            if inverse {
                p.plan_fft_inverse(n)
            } else {
                p.plan_fft_forward(n)
            }
        };
        Self {
            along_rows: plan(planner, cols),
            along_cols: plan(planner, rows),
        }
    }

    fn run_rows(fft: &Arc<dyn Fft<f64>>, plane: &mut Plane2) {
        let len = fft.len();
        plane.data.par_chunks_mut(len * 64).for_each(|chunk| {
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(chunk, &mut scratch);
        });
    }

    fn process(&self, plane: Plane2) -> Plane2 {
        let mut plane = plane;
        Self::run_rows(&self.along_rows, &mut plane);
        let mut t = plane.transposed();
        drop(plane);
        Self::run_rows(&self.along_cols, &mut t);
        t.transposed()
    }
}

/// Per-slit sample positions, shared local grid.
#[derive(Debug, Clone)]
struct SlitSamples {
    /// Local y offsets from the slit centre.
    local_y: Vec<f64>,
    z: Vec<f64>,
}

impl SlitSamples {
    fn new(g: &Geometry, grid: &RiemannGrid) -> Self {
        let (dy, dz) = grid.cell(g);
        let local_y = (0..grid.n_y)
            .map(|i| -0.5 * g.slit_width + (i as f64 + 0.5) * dy)
            .collect();
        let z = (0..grid.n_z)
            .map(|l| -0.5 * g.slit_height + (l as f64 + 0.5) * dz)
            .collect();
        Self { local_y, z }
    }
}

fn centre(g: &Geometry, slit: Slit) -> f64 {
    slit.offset() * g.slit_separation
}

/// Source legs and (optionally) detector-independent kink sums for one
/// geometry and grid. Screen distance and detector position are supplied per
/// evaluation.
pub struct FresnelModel {
    geometry: Geometry,
    grid: RiemannGrid,
    k: f64,
    samples: SlitSamples,
    /// K(s, p) per slit, row-major over (y, z).
    source_leg: [Vec<Complex64>; 3],
    /// Σ_p K(s,p)K(p,q) dA for each ordered pair, indexed [P][Q].
    hops: Option<Vec<Vec<Vec<Complex64>>>>,
}

impl FresnelModel {
    pub fn new(g: &Geometry, grid: RiemannGrid, include_nonclassical: bool) -> Result<Self> {
        g.validate()?;
        grid.validate_for(g, include_nonclassical)?;
        let k = g.wavenumber();
        let samples = SlitSamples::new(g, &grid);
        let source_leg = Slit::ALL.map(|s| {
            let c = centre(g, s);
            samples
                .local_y
                .par_iter()
                .flat_map_iter(|&ly| {
                    let y = c + ly;
                    samples
                        .z
                        .iter()
                        .map(move |&z| propagator_excess(k, g.source_distance, y * y + z * z))
                })
                .collect::<Vec<_>>()
        });
        let mut model = Self {
            geometry: *g,
            grid,
            k,
            samples,
            source_leg,
            hops: None,
        };
        if include_nonclassical {
            model.hops = Some(model.hop_sums());
        }
        Ok(model)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn grid(&self) -> RiemannGrid {
        self.grid
    }

    pub fn includes_nonclassical(&self) -> bool {
        self.hops.is_some()
    }

    /// Hop kernel K(0, Δ) for in-plane displacements
    /// (offset + a·dy, b·dz), wrapped into the padded FFT layout.
    fn hop_kernel(&self, offset: f64, rows: usize, cols: usize) -> Plane2 {
        let (dy, dz) = self.grid.cell(&self.geometry);
        let (ny, nz) = (self.grid.n_y as isize, self.grid.n_z as isize);
        let k = self.k;
        let mut plane = Plane2::zeros(rows, cols);
        let wrap = |i: isize, n: usize| if i < 0 { (i + n as isize) as usize } else { i as usize };
        plane.data.par_chunks_mut(cols).enumerate().for_each(|(r, row)| {
            let a = if r < ny as usize {
                r as isize
            } else if r + ny as usize > rows {
                r as isize - rows as isize
            } else {
                return;
            };
            let ty = offset + a as f64 * dy;
            for b in -(nz - 1)..nz {
                let tz = b as f64 * dz;
                let r = ty.hypot(tz);
                row[wrap(b, cols)] = propagator(k, r, k * r);
            }
        });
        plane
    }

    fn hop_sums(&self) -> Vec<Vec<Vec<Complex64>>> {
        let (rows, cols) = self.grid.fft_shape();
        let (ny, nz) = (self.grid.n_y, self.grid.n_z);
        let area = self.grid.cell_area(&self.geometry);
        let norm = area / (rows * cols) as f64;
        let mut planner = FftPlanner::new();
        let forward = Fft2::new(&mut planner, rows, cols, false);
        let inverse = Fft2::new(&mut planner, rows, cols, true);
        let mut out = vec![vec![Vec::new(); 3]; 3];
        for p in Slit::ALL {
            let mut src = Plane2::zeros(rows, cols);
            for i in 0..ny {
                src.data[i * cols..i * cols + nz].copy_from_slice(&self.source_leg[p.index()][i * nz..(i + 1) * nz]);
            }
            let src = forward.process(src);
            for q in Slit::ALL.into_iter().filter(|&q| q != p) {
                let offset = centre(&self.geometry, q) - centre(&self.geometry, p);
                let mut prod = forward.process(self.hop_kernel(offset, rows, cols));
                prod.data
                    .par_iter_mut()
                    .zip(&src.data)
                    .for_each(|(h, s)| *h *= *s);
                let conv = inverse.process(prod);
                let mut phi = Vec::with_capacity(ny * nz);
                for j in 0..ny {
                    phi.extend(conv.data[j * cols..j * cols + nz].iter().map(|v| v * norm));
                }
                out[p.index()][q.index()] = phi;
            }
        }
        out
    }

    /// K(q, det) over slit Q, without e^{ikD}.
    fn detector_leg(&self, slit: Slit, screen_distance: f64, y_d: f64) -> Vec<Complex64> {
        let c = centre(&self.geometry, slit);
        let k = self.k;
        let z = &self.samples.z;
        self.samples
            .local_y
            .par_iter()
            .flat_map_iter(|&ly| {
                let dy = c + ly - y_d;
                z.iter()
                    .map(move |&z| propagator_excess(k, screen_distance, dy * dy + z * z))
            })
            .collect()
    }

    /// Σ a·b over the grid with a fixed reduction shape.
    fn grid_dot(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let nz = self.grid.n_z;
        let rows: Vec<Complex64> = a
            .par_chunks(nz)
            .zip(b.par_chunks(nz))
            .map(|(ra, rb)| pairwise_sum(&ra.iter().zip(rb).map(|(x, y)| x * y).collect::<Vec<_>>()))
            .collect();
        pairwise_sum(&rows)
    }

    /// Classical and kink amplitudes at a detector point. The screen distance
    /// is the detector's longitudinal station.
    pub fn amplitudes(&self, detector: &AperturePoint) -> Result<PathAmplitudes> {
        if detector.plane != Plane::Detector || !(detector.x > 0.0) {
            return Err(Error::InvalidGeometry {
                field: "detector",
                reason: "detector must lie on a plane at positive x".into(),
            });
        }
        let area = self.grid.cell_area(&self.geometry);
        let mut amps = PathAmplitudes::default();
        for q in Slit::ALL {
            let leg = self.detector_leg(q, detector.x, detector.y);
            amps.classical[q.index()] = self.grid_dot(&self.source_leg[q.index()], &leg) * area;
            if let Some(hops) = &self.hops {
                for p in Slit::ALL.into_iter().filter(|&p| p != q) {
                    amps.kinked[p.index()][q.index()] =
                        self.grid_dot(&hops[p.index()][q.index()], &leg) * (area * INCLINATION);
                }
            }
        }
        Ok(amps)
    }

    pub fn configuration_intensity(&self, set: SlitSet, detector: &AperturePoint) -> Result<f64> {
        Ok(self.amplitudes(detector)?.intensity(set))
    }
}

/// Intensity of one open-slit configuration at a detector point.
pub fn configuration_intensity(
    set: SlitSet,
    detector: &AperturePoint,
    g: &Geometry,
    grid: RiemannGrid,
    include_nonclassical: bool,
) -> Result<f64> {
    FresnelModel::new(g, grid, include_nonclassical)?.configuration_intensity(set, detector)
}

fn require_height(g: &Geometry) -> Result<()> {
    if g.slit_height > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidGeometry {
            field: "slit_height",
            reason: "the Fresnel sum needs a positive slit height".into(),
        })
    }
}

/// κ = ε(y_D)/I_ABC(0) at the geometry's screen distance.
pub fn kappa_fresnel(g: &Geometry, detector_y: f64, grid: RiemannGrid) -> Result<f64> {
    require_height(g)?;
    let model = FresnelModel::new(g, grid, true)?;
    let centre = model.amplitudes(&AperturePoint::detector(g, 0.0))?;
    let here = if detector_y == 0.0 {
        centre
    } else {
        model.amplitudes(&AperturePoint::detector(g, detector_y))?
    };
    Ok(here.epsilon_full() / centre.intensity(SlitSet::ABC))
}

/// κ(θ) with y_D = θD across a detector grid.
pub fn kappa_fresnel_profile(g: &Geometry, detectors: &DetectorGrid, grid: RiemannGrid) -> Result<KappaProfile> {
    require_height(g)?;
    let model = FresnelModel::new(g, grid, true)?;
    let delta = model
        .amplitudes(&AperturePoint::detector(g, 0.0))?
        .intensity(SlitSet::ABC);
    let kappa = detectors
        .positions()
        .iter()
        .map(|&t| {
            let amps = model.amplitudes(&AperturePoint::detector(g, t * g.screen_distance))?;
            Ok(amps.epsilon_full() / delta)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut profile = KappaProfile::new(
        Method::Fresnel,
        *g,
        Abscissa::Theta,
        detectors.positions().to_vec(),
        kappa,
    )?;
    profile.riemann_grid = Some(grid);
    Ok(profile)
}

/// True where the screen is close enough that the paraxial picture is
/// doubtful.
pub fn paraxial_suspect(g: &Geometry, screen_distance: f64) -> bool {
    screen_distance < PARAXIAL_FACTOR * g.slit_separation.max(g.slit_height)
}

/// Central κ as a function of screen distance. The profile stores signed κ;
/// callers wanting |κ| take the modulus.
pub fn kappa_central_vs_d(g: &Geometry, d_values: &[f64], grid: RiemannGrid) -> Result<KappaProfile> {
    require_height(g)?;
    if d_values.is_empty() {
        return Err(Error::InvalidGrid("no screen distances given".into()));
    }
    if d_values.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(Error::InvalidGrid("screen distances must be positive".into()));
    }
    if d_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("screen distances must be strictly increasing".into()));
    }
    let model = FresnelModel::new(g, grid, true)?;
    let kappa = d_values
        .iter()
        .map(|&d| {
            let mut det = AperturePoint::detector(g, 0.0);
            det.x = d;
            let amps = model.amplitudes(&det)?;
            Ok(amps.epsilon_full() / amps.intensity(SlitSet::ABC))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut profile = KappaProfile::new(
        Method::Fresnel,
        *g,
        Abscissa::ScreenDistance,
        d_values.to_vec(),
        kappa,
    )?;
    profile.riemann_grid = Some(grid);
    profile.paraxial_suspect = d_values.iter().map(|&d| paraxial_suspect(g, d)).collect();
    Ok(profile)
}

/// Relative change of κ at the geometry's screen distance when the grid is
/// refined by `factor`.
pub fn refinement_change(g: &Geometry, grid: RiemannGrid, factor: usize) -> Result<(f64, f64, f64)> {
    let coarse = kappa_fresnel(g, 0.0, grid)?;
    let fine = kappa_fresnel(g, 0.0, grid.refined(factor))?;
    Ok((coarse, fine, ((fine - coarse) / fine).abs()))
}
