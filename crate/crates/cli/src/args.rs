use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sorkin_core::{EpsilonMode, Method, Preset};

#[derive(Debug, Parser)]
#[command(name = "sorkin", version, about = "Normalized Sorkin parameter κ for triple-slit interference")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// κ(θ) for one method.
    Profile(ProfileArgs),
    /// |κ| at the central maximum against screen distance (Riemann sums).
    ScanD(ScanArgs),
    /// κ(θ) from several methods side by side.
    Compare(ProfileArgs),
    /// The closed-form upper bound on |κ|.
    Bound(BoundArgs),
    /// List the built-in geometries.
    Presets(PresetArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Profile(_) => "profile",
            Command::ScanD(_) => "scan-d",
            Command::Compare(_) => "compare",
            Command::Bound(_) => "bound",
            Command::Presets(_) => "presets",
        }
    }

    pub fn common(&self) -> Option<&Common> {
        match self {
            Command::Profile(a) | Command::Compare(a) => Some(&a.common),
            Command::ScanD(a) => Some(&a.common),
            Command::Bound(a) => Some(&a.common),
            Command::Presets(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// `min:max:count`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, count] = parts[..] else {
            return Err(format!("expected min:max:count, got `{s}`"));
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
        Ok(Range {
            min: num(min)?,
            max: num(max)?,
            count: count.trim().parse().map_err(|e| format!("`{count}`: {e}"))?,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Starting geometry; explicit flags override its fields.
    #[arg(long, default_value = "photon", value_parser = parse_preset)]
    pub preset: Preset,
    /// Slit width in µm.
    #[arg(long = "w-um")]
    pub w_um: Option<f64>,
    /// Centre-to-centre slit separation in µm.
    #[arg(long = "d-um")]
    pub d_um: Option<f64>,
    /// Wavelength in nm.
    #[arg(long = "lambda-nm")]
    pub lambda_nm: Option<f64>,
    /// Source-to-slit distance in m.
    #[arg(long = "L-m", visible_alias = "L")]
    pub source_m: Option<f64>,
    /// Slit-to-screen distance in m.
    #[arg(long = "D-m", visible_alias = "D")]
    pub screen_m: Option<f64>,
    /// Screen thickness in wavelengths.
    #[arg(long = "t-lambda")]
    pub t_lambda: Option<f64>,
    /// Slit height in µm (Riemann sums only).
    #[arg(long = "height-um")]
    pub height_um: Option<f64>,
    /// Method, or a comma-separated list for `compare`.
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    pub method: Vec<Method>,
    /// Output file; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Quadrature nodes per 2π of phase.
    #[arg(long = "quad-samples")]
    pub quad_samples: Option<usize>,
    /// Riemann cells across each slit.
    #[arg(long = "grid-ny")]
    pub grid_ny: Option<usize>,
    /// Riemann cells along the slit height.
    #[arg(long = "grid-nz")]
    pub grid_nz: Option<usize>,
    /// Flat key=value file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub common: Common,
    /// Detector angles in degrees as min:max:count.
    #[arg(long = "theta-deg", allow_hyphen_values = true)]
    pub theta_deg: Option<Range>,
    /// Number of angles over the default ±3° window.
    #[arg(long)]
    pub points: Option<usize>,
    /// Use the effective-width substitution for a thick screen.
    #[arg(long)]
    pub thick: bool,
    /// Imaginary refractive index of the screen material.
    #[arg(long = "n-imag")]
    pub n_imag: Option<f64>,
    /// How ε is assembled from the path amplitudes.
    #[arg(long, default_value = "full", value_parser = parse_mode)]
    pub mode: EpsilonMode,
    /// Keep quadratic propagation phases in the far-field quadrature.
    #[arg(long = "keep-quadratic")]
    pub keep_quadratic: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: Common,
    /// Screen distances in m as min:max:count.
    #[arg(long = "d-range", allow_hyphen_values = true)]
    pub d_range: Range,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub common: Common,
    /// Also sweep the closed form and check the bound.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PresetArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse().map_err(|e: sorkin_core::Error| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

fn parse_mode(s: &str) -> Result<EpsilonMode, String> {
    s.parse()
}

/// Inserts `--key value` pairs from a key=value file ahead of the user's
/// arguments, skipping keys the user already gave.
pub fn merge_config(args: &[String], text: &str) -> Result<Vec<String>, String> {
    let given: Vec<&str> = args
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a))
        .collect();
    let mut extra = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("config line {}: expected key=value", lineno + 1));
        };
        let key = key.trim().trim_start_matches("--");
        let value = value.trim();
        if key == "config" {
            return Err(format!("config line {}: nested config files are not supported", lineno + 1));
        }
        if given.contains(&key) {
            continue;
        }
        match value {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            _ => extra.push(format!("--{key}={value}")),
        }
    }
    // Binary name and subcommand stay in front.
    let split = args.len().min(2);
    let mut merged = args[..split].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&args[split..]);
    Ok(merged)
}
