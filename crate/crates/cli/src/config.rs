use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::output::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Measurement {
    Parity,
    Counting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Fig4Mode {
    Optimize,
    Sample,
    Curves,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Soos,
    Qooq,
    Decomposable,
}

/// Flags shared by every subcommand. Anything left unset falls back to the
/// `--config` file, then to the subcommand's default.
#[derive(Debug, Clone, Default, Args, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Opts {
    /// Probe, e.g. `noon:N=2`, `aooa`, `soos:nav=2`, `qooq:N=8`, `custom:file=amps.json`; repeatable
    #[arg(long = "state", short = 's')]
    #[serde(default)]
    pub state: Vec<String>,
    /// Average photon number(s), comma separated
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub nav: Vec<f64>,
    /// Transmittance(s) of the arm losses, comma separated
    #[arg(long = "T", value_delimiter = ',')]
    #[serde(default, rename = "T")]
    pub t: Vec<f64>,
    /// Phase value(s), comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(default)]
    pub phi: Vec<f64>,
    /// Cell-centred phase grid `start:stop:points`
    #[arg(long = "phi-grid")]
    pub phi_grid: Option<String>,
    /// Inclusive range of N for the optimal-N scan, `lo:hi`
    #[arg(long = "N-range")]
    #[serde(rename = "N_range")]
    pub n_range: Option<String>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest photon number of sampled components
    #[arg(long)]
    pub support: Option<usize>,
    /// Phase generator: `two-arm` or `single-arm`
    #[arg(long)]
    pub generator: Option<String>,
    #[arg(long, value_enum)]
    pub measurement: Option<Measurement>,
    #[arg(long, value_enum)]
    pub mode: Option<Fig4Mode>,
    #[arg(long, value_enum)]
    pub scheme: Option<Scheme>,
    /// Squeezing magnitude for `generate`
    #[arg(long)]
    pub r: Option<f64>,
    /// Squeezing angle for `generate`
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Conditional phase for `generate`
    #[arg(long, allow_negative_numbers = true)]
    pub x: Option<f64>,
    /// Photon number of the cascade for `generate --scheme qooq`
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// Displacement `re` or `re:im` for the cascade
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<String>,
    /// Gate program for `generate --scheme decomposable`, e.g. `squeeze:0.3:3.14159;rot:0.2`
    #[arg(long)]
    pub gates: Option<String>,
    /// Fock cutoff override for `generate`
    #[arg(long = "n-max")]
    #[serde(rename = "n_max")]
    pub n_max: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Worker threads
    #[arg(long)]
    #[serde(skip)]
    pub jobs: Option<usize>,
    /// JSON file with any of the above keys; flags take precedence
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

fn read_file(path: &Path) -> Result<Opts> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

impl Opts {
    /// Fills every unset flag from the config file, if one was given.
    pub fn resolve(self) -> Result<Opts> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = read_file(&path)?;
        fn vec_or<T>(flag: Vec<T>, file: Vec<T>) -> Vec<T> {
            if flag.is_empty() {
                file
            } else {
                flag
            }
        }
        Ok(Opts {
            state: vec_or(self.state, file.state),
            nav: vec_or(self.nav, file.nav),
            t: vec_or(self.t, file.t),
            phi: vec_or(self.phi, file.phi),
            phi_grid: self.phi_grid.or(file.phi_grid),
            n_range: self.n_range.or(file.n_range),
            count: self.count.or(file.count),
            seed: self.seed.or(file.seed),
            support: self.support.or(file.support),
            generator: self.generator.or(file.generator),
            measurement: self.measurement.or(file.measurement),
            mode: self.mode.or(file.mode),
            scheme: self.scheme.or(file.scheme),
            r: self.r.or(file.r),
            theta: self.theta.or(file.theta),
            x: self.x.or(file.x),
            n: self.n.or(file.n),
            alpha: self.alpha.or(file.alpha),
            gates: self.gates.or(file.gates),
            n_max: self.n_max.or(file.n_max),
            format: self.format.or(file.format),
            out: self.out,
            jobs: self.jobs,
            config: self.config,
        })
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }
}

/// `lo:hi` as an inclusive range.
pub fn parse_range(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once(':')
        .with_context(|| format!("expected lo:hi, got `{s}`"))?;
    let (lo, hi): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
    if lo > hi {
        bail!("empty range `{s}`");
    }
    Ok((lo, hi))
}

/// `start:stop:points`; `pi` and `2pi` are accepted as bounds.
pub fn parse_grid(s: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        bail!("expected start:stop:points, got `{s}`");
    }
    let bound = |x: &str| -> Result<f64> {
        match x.trim() {
            "pi" => Ok(std::f64::consts::PI),
            "2pi" => Ok(2.0 * std::f64::consts::PI),
            v => v.parse().with_context(|| format!("bad grid bound `{v}`")),
        }
    };
    Ok((bound(parts[0])?, bound(parts[1])?, parts[2].trim().parse()?))
}
