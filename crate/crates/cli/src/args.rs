//! Command-line surface. Every subcommand flag doubles as a config-file key.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "belltime", version, about = "Bell correlations in space and time: batch experiments")]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Root seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<std::path::PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Named parameter set, applied before config files and flags.
    #[arg(long, global = true)]
    pub preset: Option<String>,

    /// key=value file; `#` starts a comment. Flags override file values.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Vec<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Singlet correlations, the four-operator family and the CHSH value.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Chsh(ChshArgs),
    /// Monte Carlo correlations of hidden-variable models.
    #[command(name = "lhv-simulate", args_override_self = true, allow_negative_numbers = true)]
    LhvSimulate(LhvArgs),
    /// LP membership in the local polytope and the critical visibility.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Feasibility(FeasibilityArgs),
    /// Detector visibility g, disentanglement scan and product representation.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Gfactor(GfactorArgs),
    /// Free spreading of a Gaussian packet.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Spreading(SpreadingArgs),
    /// Vacuum two-point function, decay fits and cluster residuals.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Vacuum(VacuumArgs),
    /// Lattice random field: covariance and classical moments.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Randomfield(RandomFieldArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Chsh(_) => "chsh",
            Command::LhvSimulate(_) => "lhv-simulate",
            Command::Feasibility(_) => "feasibility",
            Command::Gfactor(_) => "gfactor",
            Command::Spreading(_) => "spreading",
            Command::Vacuum(_) => "vacuum",
            Command::Randomfield(_) => "randomfield",
        }
    }

    pub fn config_json(&self) -> serde_json::Value {
        match self {
            Command::Chsh(a) => serde_json::to_value(a),
            Command::LhvSimulate(a) => serde_json::to_value(a),
            Command::Feasibility(a) => serde_json::to_value(a),
            Command::Gfactor(a) => serde_json::to_value(a),
            Command::Spreading(a) => serde_json::to_value(a),
            Command::Vacuum(a) => serde_json::to_value(a),
            Command::Randomfield(a) => serde_json::to_value(a),
        }
        .expect("argument structs serialize")
    }
}

pub const SUBCOMMANDS: [&str; 7] = ["chsh", "lhv-simulate", "feasibility", "gfactor", "spreading", "vacuum", "randomfield"];

/// Reals with an optional `pi` factor: `0.3`, `-pi/4`, `3pi/2`, `2*pi`, `inf`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, t.strip_prefix('+').unwrap_or(t).trim()),
    };
    let Some(pos) = body.find("pi") else {
        return body.parse::<f64>().map(|v| sign * v).map_err(|e| format!("'{s}': {e}"));
    };
    let coef = body[..pos].trim().trim_end_matches('*').trim();
    let coef = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().map_err(|e| format!("'{s}': {e}"))? };
    let rest = body[pos + 2..].trim();
    let value = coef * std::f64::consts::PI;
    let value = if rest.is_empty() {
        value
    } else if let Some(d) = rest.strip_prefix('/') {
        value / d.trim().parse::<f64>().map_err(|e| format!("'{s}': {e}"))?
    } else if let Some(f) = rest.strip_prefix('*') {
        value * f.trim().parse::<f64>().map_err(|e| format!("'{s}': {e}"))?
    } else {
        return Err(format!("'{s}': expected '/' or '*' after pi"));
    };
    Ok(sign * value)
}

/// `x,y,z`.
pub fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("'{s}': expected three comma-separated values"));
    }
    Ok([parse_real(parts[0])?, parse_real(parts[1])?, parse_real(parts[2])?])
}

/// JSON has no infinities; unbounded box faces are written as "inf"/"-inf".
fn ser_extended<S: serde::Serializer>(v: &[f64; 3], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(3))?;
    for x in v {
        if x.is_finite() {
            seq.serialize_element(x)?;
        } else {
            seq.serialize_element(&x.to_string())?;
        }
    }
    seq.end()
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChshArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_real, default_value = "pi/2,0")]
    pub alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_real, default_value = "pi/4,-pi/4")]
    pub betas: Vec<f64>,
    /// Random unit-vector pairs for the singlet check.
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Cosine,
    Random,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LhvArgs {
    #[arg(long, value_enum, default_value_t = ModelKind::Cosine)]
    pub model: ModelKind,
    /// Visibility of the cosine model.
    #[arg(long, value_parser = parse_real, default_value = "0.4")]
    pub g: f64,
    /// Samples per setting pair.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    /// Number of random models.
    #[arg(long, default_value_t = 100)]
    pub models: usize,
    #[arg(long, value_delimiter = ',', value_parser = parse_real, default_value = "pi/2,0")]
    pub alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_real, default_value = "pi/4,-pi/4")]
    pub betas: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FeasibilityArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_real, default_value = "pi/2,0")]
    pub alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_real, default_value = "pi/4,-pi/4")]
    pub betas: Vec<f64>,
    /// Visibilities tested for membership.
    #[arg(long = "g-values", value_delimiter = ',', value_parser = parse_real, default_value = "0.5,0.8")]
    pub g_values: Vec<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value = "true", action = clap::ArgAction::Set)]
    pub bisect: bool,
    #[arg(long, value_parser = parse_real, default_value = "1e-6")]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GfactorArgs {
    #[arg(long, value_parser = parse_real, default_value = "1")]
    pub eps1: f64,
    #[arg(long, value_parser = parse_real, default_value = "1")]
    pub eps2: f64,
    #[arg(long, value_parser = parse_vec3, default_value = "0,0,0")]
    pub center1: [f64; 3],
    #[arg(long, value_parser = parse_vec3, default_value = "0,0,10")]
    pub center2: [f64; 3],
    #[arg(long = "box-a-lo", value_parser = parse_vec3, default_value = "-1,-1,-1")]
    #[serde(serialize_with = "ser_extended")]
    pub box_a_lo: [f64; 3],
    #[arg(long = "box-a-hi", value_parser = parse_vec3, default_value = "1,1,1")]
    #[serde(serialize_with = "ser_extended")]
    pub box_a_hi: [f64; 3],
    #[arg(long = "box-b-lo", value_parser = parse_vec3, default_value = "-1,-1,9")]
    #[serde(serialize_with = "ser_extended")]
    pub box_b_lo: [f64; 3],
    #[arg(long = "box-b-hi", value_parser = parse_vec3, default_value = "1,1,11")]
    #[serde(serialize_with = "ser_extended")]
    pub box_b_hi: [f64; 3],
    #[arg(long, value_parser = parse_real, default_value = "0")]
    pub t: f64,
    /// Spin settings for the scan (coplanar a(α), b(β)).
    #[arg(long, value_parser = parse_real, default_value = "0")]
    pub alpha: f64,
    #[arg(long, value_parser = parse_real, default_value = "0")]
    pub beta: f64,
    /// Translation direction of detector A.
    #[arg(long, value_parser = parse_vec3, default_value = "1,0,0")]
    pub direction: [f64; 3],
    /// Largest translation, in packet-1 widths.
    #[arg(long = "scan-max", value_parser = parse_real, default_value = "30")]
    pub scan_max: f64,
    #[arg(long = "scan-steps", default_value_t = 31)]
    pub scan_steps: usize,
    /// Also run the classical product representation for separated detectors.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value = "false", action = clap::ArgAction::Set)]
    pub representation: bool,
    /// Radius L of the exterior region B_L = {|r| ≥ L}.
    #[arg(long, value_parser = parse_real, default_value = "1.8")]
    pub radius: f64,
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    /// Angles per side of the representation grid, spaced by π/4 from 0.
    #[arg(long, default_value_t = 5)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpreadingArgs {
    #[arg(long, value_parser = parse_real, default_value = "1")]
    pub eps: f64,
    #[arg(long, value_parser = parse_real, default_value = "1")]
    pub mass: f64,
    #[arg(long, value_parser = parse_real, default_value = "1")]
    pub hbar: f64,
    #[arg(long, value_delimiter = ',', value_parser = parse_real, default_value = "0,0.5,1,10,100,1e3,1e4,1e5,1e6")]
    pub times: Vec<f64>,
    /// Half side of the centred detector cube.
    #[arg(long = "box-half", value_parser = parse_real, default_value = "1")]
    pub box_half: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VacuumArgs {
    #[arg(long, value_parser = parse_real, default_value = "1")]
    pub mass: f64,
    /// Separation grid in units of 1/m, log-spaced.
    #[arg(long = "s-min", value_parser = parse_real, default_value = "0.1")]
    pub s_min: f64,
    #[arg(long = "s-max", value_parser = parse_real, default_value = "20")]
    pub s_max: f64,
    #[arg(long, default_value_t = 41)]
    pub points: usize,
    /// Decay-fit window in units of 1/m.
    #[arg(long = "fit-min", value_parser = parse_real, default_value = "2")]
    pub fit_min: f64,
    #[arg(long = "fit-max", value_parser = parse_real, default_value = "16")]
    pub fit_max: f64,
    #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value = "true", action = clap::ArgAction::Set)]
    pub cluster: bool,
    /// Smearing width of the cluster test functions, in units of 1/m.
    #[arg(long, value_parser = parse_real, default_value = "0.3")]
    pub sigma: f64,
    /// Translations for the cluster sweep, in units of 1/m.
    #[arg(long, value_delimiter = ',', value_parser = parse_real, default_value = "2,3,4,5,6,7,8,9,10,11,12,13,14,15,16")]
    pub distances: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RandomFieldArgs {
    #[arg(long, value_parser = parse_real, default_value = "1")]
    pub mass: f64,
    /// Momentum cutoff Λ in units of m.
    #[arg(long, value_parser = parse_real, default_value = "8")]
    pub cutoff: f64,
    #[arg(long = "n-per-axis", default_value_t = 48)]
    pub n_per_axis: usize,
    /// Optional Gaussian regulator width ρ (units of 1/m); 0 keeps the sharp cutoff.
    #[arg(long, value_parser = parse_real, default_value = "0")]
    pub regulator: f64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Equal-time separations for the continuum comparison, units of 1/m.
    #[arg(long, value_delimiter = ',', value_parser = parse_real, default_value = "0.5,1,2,4")]
    pub separations: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn reals_with_pi() {
        assert_eq!(parse_real("0.25").unwrap(), 0.25);
        assert_eq!(parse_real("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(parse_real("3pi/2").unwrap(), 3.0 * PI / 2.0);
        assert_eq!(parse_real("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_real("pi*0.5").unwrap(), 0.5 * PI);
        assert_eq!(parse_real("-inf").unwrap(), f64::NEG_INFINITY);
        assert!(parse_real("pi^2").is_err());
        assert!(parse_vec3("1,2").is_err());
    }
}
