//! Run configuration: a `key = value` file mirrored by command-line flags.

use std::fmt;
use std::str::FromStr;

use copreli::numeric;
use copreli::ordering::default_grid;
use copreli::{CopulaSpec, Coupling, MarginalModel, Measure, Mode, Structure};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
        })
    }
}

/// `min:max:count:spacing`, e.g. `0.01:5:64:log`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Linear => numeric::lin_space(self.min, self.max, self.count),
            Spacing::Log => numeric::log_space(self.min, self.max, self.count),
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.min, self.max, self.count, self.spacing)
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [min, max, count, spacing] = parts.as_slice() else {
            return Err(format!("grid `{s}` is not of the form min:max:count:spacing"));
        };
        let real = |token: &str, what: &str| {
            token
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("grid {what} `{token}` is not a finite number"))
        };
        let (min, max) = (real(min, "min")?, real(max, "max")?);
        let count: usize = count
            .parse()
            .map_err(|_| format!("grid count `{count}` is not a non-negative integer"))?;
        let spacing = match *spacing {
            "linear" | "lin" => Spacing::Linear,
            "log" => Spacing::Log,
            other => return Err(format!("grid spacing `{other}` is neither linear nor log")),
        };
        if count == 0 {
            return Err("grid is empty (count = 0)".into());
        }
        if min < 0.0 {
            return Err(format!("grid min {min} is negative"));
        }
        if count > 1 && min >= max {
            return Err(format!("grid min {min} is not below max {max}"));
        }
        if spacing == Spacing::Log && min <= 0.0 {
            return Err(format!("log spacing needs min > 0, got {min}"));
        }
        Ok(GridSpec {
            min,
            max,
            count,
            spacing,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
    Md,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Md => "md",
        })
    }
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "md" | "markdown" => Ok(Format::Md),
            other => Err(format!("unknown format `{other}` (expected csv, json or md)")),
        }
    }
}

pub const DEFAULT_SAMPLES: usize = 10_000;

/// Every field is optional so a file and flags can be layered; defaults are
/// applied by the accessors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub copula: Option<CopulaSpec>,
    pub marginals: Vec<MarginalModel>,
    pub structure: Option<Structure>,
    pub mode: Option<Mode>,
    pub coupling: Option<Coupling>,
    pub grid: Option<GridSpec>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub measure: Option<Measure>,
    pub samples: Option<usize>,
}

pub const KEYS: [&str; 10] = [
    "copula",
    "marginal",
    "structure",
    "mode",
    "coupling",
    "grid",
    "format",
    "seed",
    "measure",
    "samples",
];

fn parsed<T: FromStr>(value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| e.to_string())
}

impl RunConfig {
    /// Sets one field from its textual form. `marginal` accumulates.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        match key {
            "copula" => self.copula = Some(parsed(value)?),
            "marginal" => self.marginals.push(parsed(value)?),
            "structure" => self.structure = Some(parsed(value)?),
            "mode" => self.mode = Some(parsed(value)?),
            "coupling" => self.coupling = Some(parsed(value)?),
            "grid" => self.grid = Some(parsed(value)?),
            "format" => self.format = Some(parsed(value)?),
            "seed" => self.seed = Some(value.parse().map_err(|_| format!("seed `{value}` is not a u64"))?),
            "measure" => self.measure = Some(parsed(value)?),
            "samples" => {
                let n: usize = value
                    .parse()
                    .map_err(|_| format!("samples `{value}` is not a non-negative integer"))?;
                if n == 0 {
                    return Err("samples must be positive".into());
                }
                self.samples = Some(n);
            }
            other => return Err(format!("unknown key `{other}` (known: {})", KEYS.join(", "))),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment. Errors carry the line number.
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut cfg = RunConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| CliError::config(format!("config line {}: {msg}", i + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected key = value, got `{line}`")))?;
            let key = key.trim();
            if key != "marginal" && seen.contains(&key) {
                return Err(at(format!("duplicate key `{key}`")));
            }
            cfg.set(key, value).map_err(|e| at(format!("{key}: {e}")))?;
            seen.push(key);
        }
        Ok(cfg)
    }

    /// Fields set in `flags` replace those of `self`; marginals are replaced as a list.
    pub fn overlay(mut self, flags: RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if flags.$f.is_some() { self.$f = flags.$f; } )* };
        }
        take!(copula, structure, mode, coupling, grid, format, seed, measure, samples);
        if !flags.marginals.is_empty() {
            self.marginals = flags.marginals;
        }
        self
    }

    pub fn require_copula(&self) -> CliResult<&CopulaSpec> {
        self.copula
            .as_ref()
            .ok_or_else(|| CliError::config("no copula given (use --copula or `copula =` in the config file)"))
    }

    /// The configured marginals, or `exp:1` for every component.
    pub fn marginals_for(&self, dim: usize) -> CliResult<Vec<MarginalModel>> {
        if self.marginals.is_empty() {
            Ok(vec![MarginalModel::exponential(1.0)?; dim])
        } else {
            Ok(self.marginals.clone())
        }
    }

    pub fn structure(&self) -> Structure {
        self.structure.unwrap_or(Structure::Series)
    }

    pub fn mode(&self) -> Mode {
        self.mode.unwrap_or(Mode::Dependent)
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling.unwrap_or_default()
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn measure(&self) -> Measure {
        self.measure.unwrap_or(Measure::Sf)
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(DEFAULT_SAMPLES)
    }

    /// The configured grid, else the default grid of `marginals`, with the
    /// spec string that reproduces it.
    pub fn grid_points(&self, marginals: &[MarginalModel]) -> CliResult<(Vec<f64>, String)> {
        match self.grid {
            Some(g) => Ok((g.points(), g.to_string())),
            None => {
                let g = default_grid(marginals)?;
                let spec = GridSpec {
                    min: g[0],
                    max: g[g.len() - 1],
                    count: g.len(),
                    spacing: Spacing::Log,
                };
                Ok((g, spec.to_string()))
            }
        }
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn line(f: &mut fmt::Formatter<'_>, key: &str, v: &Option<impl fmt::Display>) -> fmt::Result {
            match v {
                Some(v) => writeln!(f, "{key} = {v}"),
                None => Ok(()),
            }
        }
        line(f, "copula", &self.copula)?;
        for m in &self.marginals {
            writeln!(f, "marginal = {m}")?;
        }
        line(f, "structure", &self.structure)?;
        line(f, "mode", &self.mode)?;
        line(f, "coupling", &self.coupling)?;
        line(f, "grid", &self.grid)?;
        line(f, "format", &self.format)?;
        line(f, "seed", &self.seed)?;
        line(f, "measure", &self.measure)?;
        line(f, "samples", &self.samples)
    }
}
