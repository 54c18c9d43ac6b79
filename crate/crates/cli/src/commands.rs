use std::f64::consts::PI;
use std::io::{self, Write};
use std::time::Instant;

use sorkin_core::analytic::{self, ThickSlitModel};
use sorkin_core::fraunhofer::{self, FraunhoferContext};
use sorkin_core::fresnel::{self, RiemannGrid};
use sorkin_core::grid::linspace;
use sorkin_core::{DetectorGrid, Geometry, KappaProfile, Method, Preset, QuadratureSpec};

use crate::args::{BoundArgs, Common, Format, PresetArgs, ProfileArgs, Range, ScanArgs};
use crate::output::{emit, RunManifest, Table};
use crate::CliError;

/// Default detector window when only `--points` is given.
const DEFAULT_THETA_DEG: (f64, f64) = (-3.0, 3.0);
const DEFAULT_POINTS: usize = 601;

pub struct Run {
    pub args: Vec<String>,
    pub started: Instant,
}

impl Run {
    fn manifest(&self, command: &str, geometry: Geometry, methods: &[Method]) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            args: self.args.clone(),
            geometry,
            methods: methods.iter().map(|m| m.name().to_string()).collect(),
            quadrature: None,
            riemann_grid: None,
            mode: None,
            keep_quadratic: false,
            thick_slit: None,
            paraxial_suspect: None,
            warnings: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: 0.0,
        }
    }

    fn finish(&self, mut manifest: RunManifest) -> RunManifest {
        manifest.wall_time_s = self.started.elapsed().as_secs_f64();
        manifest
    }
}

pub fn geometry(c: &Common) -> Result<Geometry, CliError> {
    let mut g = Geometry::preset(c.preset);
    if let Some(v) = c.w_um {
        g.slit_width = v * 1e-6;
    }
    if let Some(v) = c.d_um {
        g.slit_separation = v * 1e-6;
    }
    if let Some(v) = c.lambda_nm {
        g.wavelength = v * 1e-9;
    }
    if let Some(v) = c.source_m {
        g.source_distance = v;
    }
    if let Some(v) = c.screen_m {
        g.screen_distance = v;
    }
    if let Some(v) = c.t_lambda {
        g.thickness = v * g.wavelength;
    }
    if let Some(v) = c.height_um {
        g.slit_height = v * 1e-6;
    }
    for w in g.validate()? {
        eprintln!("warning: {w}");
    }
    Ok(g)
}

fn quadrature(c: &Common) -> Result<QuadratureSpec, CliError> {
    let q = match c.quad_samples {
        Some(n) => QuadratureSpec::with_samples(n),
        None => QuadratureSpec::default(),
    };
    q.validate()?;
    Ok(q)
}

fn riemann_grid(c: &Common, g: &Geometry) -> Result<RiemannGrid, CliError> {
    let d = RiemannGrid::for_geometry(g);
    let grid = RiemannGrid::new(c.grid_ny.unwrap_or(d.n_y), c.grid_nz.unwrap_or(d.n_z))?;
    grid.validate_for(g, true)?;
    Ok(grid)
}

fn theta_grid(a: &ProfileArgs) -> Result<DetectorGrid, CliError> {
    let range = a.theta_deg.unwrap_or(Range {
        min: DEFAULT_THETA_DEG.0,
        max: DEFAULT_THETA_DEG.1,
        count: DEFAULT_POINTS,
    });
    let count = a.points.unwrap_or(range.count);
    Ok(DetectorGrid::linspace_degrees(range.min, range.max, count)?)
}

fn profile_for(
    method: Method,
    a: &ProfileArgs,
    g: &Geometry,
    grid: &DetectorGrid,
    manifest: &mut RunManifest,
) -> Result<KappaProfile, CliError> {
    let c = &a.common;
    if a.thick && method != Method::Analytic {
        return Err(CliError::Usage("--thick applies to the analytic method only".into()));
    }
    let profile = match method {
        Method::Analytic if a.thick => {
            let model = match a.n_imag {
                Some(n) => ThickSlitModel::with_imag_index(n),
                None => ThickSlitModel::default(),
            };
            let p = analytic::thick_slit_profile(g, &model, grid)?;
            manifest.thick_slit = p.thick_slit;
            p
        }
        Method::Analytic => analytic::kappa_analytic(g, grid)?,
        Method::Fraunhofer => {
            let q = quadrature(c)?;
            let ctx = FraunhoferContext::new(g)?.with_quadratic_phase(a.keep_quadratic);
            manifest.quadrature = Some(q);
            manifest.mode = Some(a.mode);
            manifest.keep_quadratic = a.keep_quadratic;
            fraunhofer::kappa_profile_with(&ctx, g, grid, &q, a.mode)?
        }
        Method::Fresnel => {
            let rg = riemann_grid(c, g)?;
            manifest.riemann_grid = Some(rg);
            fresnel::kappa_fresnel_profile(g, grid, rg)?
        }
    };
    for w in &profile.warnings {
        if !manifest.warnings.contains(w) {
            eprintln!("warning ({}): {w}", method.name());
            manifest.warnings.push(w.clone());
        }
    }
    Ok(profile)
}

pub fn profile(run: &Run, a: &ProfileArgs) -> Result<(), CliError> {
    let c = &a.common;
    let method = match c.method[..] {
        [] => Method::Analytic,
        [m] => m,
        _ => return Err(CliError::Usage("profile takes a single --method; use compare for several".into())),
    };
    let g = geometry(c)?;
    let grid = theta_grid(a)?;
    let mut manifest = run.manifest("profile", g, &[method]);
    let p = profile_for(method, a, &g, &grid, &mut manifest)?;
    let mut table = Table::default();
    table.push("theta_deg", grid.display_positions());
    table.push("kappa", p.kappa().to_vec());
    emit(&table, &run.finish(manifest), c.out.as_deref(), c.format)?;
    Ok(())
}

/// Deviation of `other` from `reference`: at the grid point nearest θ = 0
/// (relative) and the largest pointwise gap over |θ| ≤ 2π/kw, normalised
/// by the reference peak there.
pub fn deviations(grid: &DetectorGrid, g: &Geometry, reference: &[f64], other: &[f64]) -> (f64, f64) {
    let theta = grid.positions();
    let centre = (0..theta.len())
        .min_by(|&i, &j| theta[i].abs().total_cmp(&theta[j].abs()))
        .unwrap_or(0);
    let central = (other[centre] / reference[centre] - 1.0).abs();
    let edge = 2.0 * PI / g.rescaled().slit_width;
    let inside: Vec<usize> = (0..theta.len()).filter(|&i| theta[i].abs() <= edge).collect();
    let peak = inside.iter().map(|&i| reference[i].abs()).fold(0.0, f64::max);
    let worst = inside
        .iter()
        .map(|&i| (other[i] - reference[i]).abs())
        .fold(0.0, f64::max);
    (central, if peak > 0.0 { worst / peak } else { 0.0 })
}

pub fn compare(run: &Run, a: &ProfileArgs) -> Result<(), CliError> {
    let c = &a.common;
    if c.method.len() < 2 {
        return Err(CliError::Usage("compare needs at least two methods, e.g. --method analytic,fraunhofer".into()));
    }
    let g = geometry(c)?;
    let grid = theta_grid(a)?;
    let mut manifest = run.manifest("compare", g, &c.method);
    let mut table = Table::default();
    table.push("theta_deg", grid.display_positions());
    let mut profiles = Vec::new();
    for &m in &c.method {
        let p = profile_for(m, a, &g, &grid, &mut manifest)?;
        table.push(m.name(), p.kappa().to_vec());
        profiles.push(p);
    }
    emit(&table, &run.finish(manifest), c.out.as_deref(), c.format)?;

    let mut summary = format!("Fresnel number w²/(λD) = {:.3e}\n", g.fresnel_number());
    let reference = &profiles[0];
    for (m, p) in c.method.iter().zip(&profiles).skip(1) {
        let (central, worst) = deviations(&grid, &g, reference.kappa(), p.kappa());
        summary += &format!(
            "{} vs {}: central deviation {:.2}%, max deviation over |θ| ≤ 2π/kw {:.2}% of peak\n",
            m.name(),
            c.method[0].name(),
            100.0 * central,
            100.0 * worst
        );
    }
    // Keep standard output clean when it carries the data.
    if c.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(())
}

pub fn scan_d(run: &Run, a: &ScanArgs) -> Result<(), CliError> {
    let c = &a.common;
    if !matches!(c.method[..], [] | [Method::Fresnel]) {
        return Err(CliError::Usage("scan-d uses the fresnel method only".into()));
    }
    let g = geometry(c)?;
    let r = a.d_range;
    let distances = linspace(r.min, r.max, r.count)?;
    let grid = riemann_grid(c, &g)?;
    let p = fresnel::kappa_central_vs_d(&g, &distances, grid)?;
    let mut manifest = run.manifest("scan-d", g, &[Method::Fresnel]);
    manifest.riemann_grid = Some(grid);
    manifest.paraxial_suspect = Some(p.paraxial_suspect.clone());
    let mut table = Table::default();
    table.push("D_m", p.abscissa().to_vec());
    table.push("abs_kappa", p.kappa().iter().map(|k| k.abs()).collect());
    emit(&table, &run.finish(manifest), c.out.as_deref(), c.format)?;
    Ok(())
}

/// Returns whether verification (if requested) passed.
pub fn bound(a: &BoundArgs) -> Result<bool, CliError> {
    let g = geometry(&a.common)?;
    let bound = analytic::kappa_bound(&g);
    let mut report = serde_json::json!({ "bound": bound });
    let mut lines = vec![format!("bound 0.03 λ^(3/2)/(d^(1/2) w) = {bound:.6e}")];
    for w in analytic::kappa_bound_warnings(&g) {
        eprintln!("warning: {w}");
    }
    let mut ok = true;
    if a.verify {
        let grid = DetectorGrid::linspace(-sorkin_core::grid::MAX_THETA, sorkin_core::grid::MAX_THETA, 2001)?;
        let peak = analytic::kappa_analytic(&g, &grid)?.max_abs();
        ok = peak <= bound;
        let verdict = if ok { "PASS" } else { "FAIL" };
        lines.push(format!("max |kappa| over 2001 angles in |θ| ≤ 0.2 rad = {peak:.6e}"));
        lines.push(format!("bound dominance: {verdict}"));
        report["max_abs_kappa"] = serde_json::json!(peak);
        report["verified"] = serde_json::json!(ok);
    }
    let text = match a.common.format {
        Format::Csv => lines.join("\n") + "\n",
        Format::Json => serde_json::to_string_pretty(&report).map_err(io::Error::other)? + "\n",
    };
    match &a.common.out {
        Some(path) => crate::output::write_atomic(path, text.as_bytes())?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(ok)
}

pub fn presets(a: &PresetArgs) -> Result<(), CliError> {
    let text = match a.format {
        Format::Csv => {
            let mut s = String::from("name,w_m,d_m,L_m,D_m,t_m,h_m,lambda_m,fresnel_number\n");
            for p in Preset::ALL {
                let g = Geometry::preset(p);
                s += &format!(
                    "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:.4e}\n",
                    p.name(),
                    g.slit_width,
                    g.slit_separation,
                    g.source_distance,
                    g.screen_distance,
                    g.thickness,
                    g.slit_height,
                    g.wavelength,
                    g.fresnel_number()
                );
            }
            s
        }
        Format::Json => {
            let list: Vec<_> = Preset::ALL
                .iter()
                .map(|&p| serde_json::json!({ "name": p.name(), "geometry": Geometry::preset(p) }))
                .collect();
            serde_json::to_string_pretty(&list).map_err(io::Error::other)? + "\n"
        }
    };
    io::stdout().lock().write_all(text.as_bytes())?;
    Ok(())
}
