//! Batch command-line driver: argument and config-file handling, output
//! envelopes and exit codes. The commands themselves live in `commands`.

mod commands;

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::Method;
use crate::error::{Error, Result};
use crate::geometry::CurvatureSign;
use crate::spectra::HalfInteger;
use crate::systems::VortexCharge;

/// Version of the JSON envelope written by every command.
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_SUCCESS: u8 = 0;
pub const EXIT_TOLERANCE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "curved-duality", version, about = "Oscillator/Coulomb duality on curved surfaces: simulations, maps, spectra and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Integrate a trajectory and log the conserved quantities.
    Simulate,
    /// Carry oscillator data to the Coulomb side and check the images.
    Map {
        #[arg(value_enum, default_value_t = MapVariant::Bohlin)]
        variant: MapVariant,
    },
    /// Closed-form spectrum table.
    Spectrum,
    /// Closed-form levels against the radial eigensolver.
    Validate,
    /// Residuals of the Poisson-bracket relations at seeded random points.
    Brackets,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Map { variant: MapVariant::Bohlin } => "map bohlin",
            Command::Map { variant: MapVariant::Ks } => "map ks",
            Command::Map { variant: MapVariant::Magnetic } => "map magnetic",
            Command::Spectrum => "spectrum",
            Command::Validate => "validate",
            Command::Brackets => "brackets",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MapVariant {
    Bohlin,
    Ks,
    Magnetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemChoice {
    Oscillator,
    Coulomb,
}

/// Which oscillator cutoff `validate` checks on the pseudosphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CutoffChoice {
    /// Levels strictly below the continuum edge, `N + 1 < alpha~ R0^2`.
    Bound,
    /// The integer-part cutoff `N <= [2 alpha~ R0^2] - 1`.
    Printed,
}

macro_rules! value_enum_from_str {
    ($($t:ty),*) => {$(
        impl FromStr for $t {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                <$t as ValueEnum>::from_str(s.trim(), true).map_err(Error::Parse)
            }
        }
    )*};
}
value_enum_from_str!(Format, SystemChoice, CutoffChoice);

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `re,im`, got `{s}`"))?;
    let re: f64 = re.trim().parse().map_err(|e| format!("{e}"))?;
    let im: f64 = im.trim().parse().map_err(|e| format!("{e}"))?;
    Ok(Complex64::new(re, im))
}

/// Parameters shared by all commands. Unset values fall back to the config
/// file and then to per-command defaults.
#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct Params {
    /// Curvature sign, +1 (sphere) or -1 (pseudosphere).
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<CurvatureSign>,
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemChoice>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Surface radius; for the Coulomb system this is `r0`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Vortex charge, 0 or half.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<VortexCharge>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b0: Option<f64>,
    /// Highest oscillator level.
    #[arg(long = "n", global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// Highest Coulomb level, e.g. 2 or 5/2.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nsigma: Option<HalfInteger>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[arg(long = "t-end", global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[arg(long = "drift-budget", global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift_budget: Option<f64>,
    /// Initial position `re,im`.
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z0: Option<Complex64>,
    /// Initial momentum `re,im`.
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi0: Option<Complex64>,
    /// Energy of the on-shell samples of `map ks`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    /// Radial grid points.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<CutoffChoice>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Random points per suite.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Trajectory CSV written by `simulate`, read by `map bohlin`.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Flat `key = value` file; flags override it.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

fn fill<T: FromStr>(slot: &mut Option<T>, map: &mut BTreeMap<String, String>, key: &str) -> Result<()>
where
    T::Err: Display,
{
    if let Some(raw) = map.remove(key) {
        if slot.is_none() {
            let v = raw
                .parse()
                .map_err(|e| Error::Parse(format!("config key `{key}`: {e}")))?;
            *slot = Some(v);
        }
    }
    Ok(())
}

/// Reads `key = value` lines; `#` starts a comment and `-` in keys reads as `_`.
pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("{}:{}: expected `key = value`", path.display(), k + 1)))?;
        map.insert(key.trim().replace('-', "_"), value.trim().to_string());
    }
    Ok(map)
}

impl Params {
    /// Fills every unset field from the config file, rejecting unknown keys.
    pub fn merge_config(&mut self, mut map: BTreeMap<String, String>) -> Result<()> {
        fill(&mut self.epsilon, &mut map, "epsilon")?;
        fill(&mut self.system, &mut map, "system")?;
        fill(&mut self.alpha, &mut map, "alpha")?;
        fill(&mut self.radius, &mut map, "radius")?;
        fill(&mut self.gamma, &mut map, "gamma")?;
        fill(&mut self.sigma, &mut map, "sigma")?;
        fill(&mut self.b0, &mut map, "b0")?;
        fill(&mut self.n, &mut map, "n")?;
        fill(&mut self.nsigma, &mut map, "nsigma")?;
        fill(&mut self.dt, &mut map, "dt")?;
        fill(&mut self.t_end, &mut map, "t_end")?;
        fill(&mut self.method, &mut map, "method")?;
        fill(&mut self.drift_budget, &mut map, "drift_budget")?;
        if let Some(raw) = map.remove("z0") {
            self.z0 = self.z0.or(Some(parse_complex(&raw).map_err(Error::Parse)?));
        }
        if let Some(raw) = map.remove("pi0") {
            self.pi0 = self.pi0.or(Some(parse_complex(&raw).map_err(Error::Parse)?));
        }
        fill(&mut self.energy, &mut map, "energy")?;
        fill(&mut self.grid, &mut map, "grid")?;
        fill(&mut self.cutoff, &mut map, "cutoff")?;
        fill(&mut self.seed, &mut map, "seed")?;
        fill(&mut self.points, &mut map, "points")?;
        fill(&mut self.input, &mut map, "input")?;
        fill(&mut self.format, &mut map, "format")?;
        fill(&mut self.out, &mut map, "out")?;
        if let Some(key) = map.keys().next() {
            return Err(Error::Parse(format!("unknown config key `{key}`")));
        }
        Ok(())
    }

    pub(crate) fn eps(&self) -> CurvatureSign {
        self.epsilon.unwrap_or(CurvatureSign::Pseudosphere)
    }

    pub(crate) fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    curved_duality_schema: u32,
    command: &'a str,
    parameters: &'a Params,
    passed: bool,
    notes: &'a [String],
    result: &'a T,
}

/// What a command produced: a JSON payload, a CSV table and a verdict.
pub(crate) struct Report<T: Serialize> {
    pub result: T,
    pub csv: String,
    pub passed: bool,
    pub notes: Vec<String>,
}

pub(crate) fn emit<T: Serialize>(command: Command, params: &Params, report: &Report<T>) -> Result<()> {
    let mut buffer = Vec::new();
    match params.format() {
        Format::Json => {
            let env = Envelope {
                curved_duality_schema: SCHEMA_VERSION,
                command: command.name(),
                parameters: params,
                passed: report.passed,
                notes: &report.notes,
                result: &report.result,
            };
            serde_json::to_writer_pretty(&mut buffer, &env).map_err(|e| Error::Parse(e.to_string()))?;
            buffer.push(b'\n');
        }
        Format::Csv => {
            buffer.extend_from_slice(report.csv.as_bytes());
            for note in &report.notes {
                eprintln!("note: {note}");
            }
        }
    }
    match &params.out {
        Some(path) => fs::write(path, buffer)?,
        None => std::io::stdout().write_all(&buffer)?,
    }
    Ok(())
}

/// Joins rows into CSV text under `header`.
pub(crate) fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub(crate) fn num(v: f64) -> String {
    format!("{v:.15e}")
}

pub(crate) fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_SUCCESS };
        }
    };
    let mut params = cli.params;
    if let Some(path) = params.config.clone() {
        if let Err(e) = read_config(&path).and_then(|map| params.merge_config(map)) {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    }
    match commands::dispatch(cli.command, &params) {
        Ok(true) => EXIT_SUCCESS,
        Ok(false) => EXIT_TOLERANCE,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let cli = Cli::try_parse_from(["curved-duality", "spectrum", "--alpha", "2", "--epsilon", "-1"]).unwrap();
        let mut params = cli.params;
        let mut map = BTreeMap::new();
        map.insert("alpha".to_string(), "3".to_string());
        map.insert("radius".to_string(), "1.5".to_string());
        params.merge_config(map).unwrap();
        assert_eq!(params.alpha, Some(2.0));
        assert_eq!(params.radius, Some(1.5));
        assert_eq!(params.eps(), CurvatureSign::Pseudosphere);
        assert_eq!(params.gamma, None);
    }

    #[test]
    fn config_syntax() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "# comment\nt-end = 5\nz0 = 0.1, -0.2\nsigma = half\n\n").unwrap();
        let mut params = Params::default();
        params.merge_config(read_config(&path).unwrap()).unwrap();
        assert_eq!(params.t_end, Some(5.0));
        assert_eq!(params.z0, Some(Complex64::new(0.1, -0.2)));
        assert_eq!(params.sigma, Some(VortexCharge::Half));

        let mut map = BTreeMap::new();
        map.insert("colour".to_string(), "red".to_string());
        assert!(Params::default().merge_config(map).is_err());
        fs::write(&path, "alpha 3\n").unwrap();
        assert!(read_config(&path).is_err());
    }

    #[test]
    fn usage_errors_exit_with_two() {
        assert_eq!(run(["curved-duality", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["curved-duality", "spectrum", "--epsilon", "2"]), EXIT_USAGE);
    }

    #[test]
    fn complex_argument() {
        assert_eq!(parse_complex("1.5,-2").unwrap(), Complex64::new(1.5, -2.0));
        assert!(parse_complex("1.5").is_err());
    }
}
