//! Run configuration: command-line flags merged over an optional
//! `key=value` file.

use crate::CliError;
use clap::{Args, ValueEnum};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Ensemble {
    Coulomb,
    Ginibre,
    Spherical,
    Truncated,
    Product,
    Hermite,
}

impl Ensemble {
    pub fn name(self) -> &'static str {
        match self {
            Ensemble::Coulomb => "coulomb",
            Ensemble::Ginibre => "ginibre",
            Ensemble::Spherical => "spherical",
            Ensemble::Truncated => "truncated",
            Ensemble::Product => "product",
            Ensemble::Hermite => "hermite",
        }
    }

    /// Whether samples come from the Metropolis sampler rather than a
    /// random matrix.
    pub fn is_gas(self) -> bool {
        matches!(self, Ensemble::Coulomb | Ensemble::Hermite)
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Mh,
    Mala,
}

impl SchemeArg {
    pub fn name(self) -> &'static str {
        match self {
            SchemeArg::Mh => "mh",
            SchemeArg::Mala => "mala",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Every check of the verification battery.
    Default,
    /// Only the checks that involve no randomness.
    Deterministic,
    /// The default battery with the Gamma oracle's shape shifted by one.
    SelfTest,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Default => "default",
            Suite::Deterministic => "deterministic",
            Suite::SelfTest => "self-test",
        }
    }
}

/// Flags shared by every subcommand. All optional so that a config file
/// can fill the gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct RunFlags {
    /// key=value file; flags given on the command line win
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub ensemble: Option<Ensemble>,
    /// number of particles / matrix size
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub chains: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    /// ambient dimension of the coulomb ensemble
    #[arg(long)]
    pub dim: Option<usize>,
    /// unitary size (truncated) or number of factors (product)
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// worker threads; never changes outputs
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub ensemble: Ensemble,
    pub n: usize,
    pub beta: f64,
    pub seed: u64,
    pub chains: usize,
    pub samples: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub dim: usize,
    pub m: Option<usize>,
    pub scheme: SchemeArg,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
    pub suite: Suite,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ensemble: Ensemble::Ginibre,
            n: 16,
            beta: 2.0,
            seed: 0,
            chains: 1,
            samples: 100,
            burn_in: 20_000,
            thin: 100,
            dim: 2,
            m: None,
            scheme: SchemeArg::Mh,
            output_path: None,
            format: Format::Csv,
            threads: None,
            suite: Suite::Default,
        }
    }
}

pub const CONFIG_KEYS: [&str; 15] = [
    "ensemble", "n", "beta", "seed", "chains", "samples", "burn_in", "thin", "dim", "m", "scheme", "out", "format",
    "threads", "suite",
];

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| usage(format!("invalid value for `{key}`: {value:?}")))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T, CliError> {
    T::from_str(value, true).map_err(|_| usage(format!("invalid value for `{key}`: {value:?}")))
}

/// Parses `key=value` lines. Blank lines and comments are skipped, except
/// `# key=value` lines with a known key, which count as entries.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (comment, body) = match line.strip_prefix('#') {
            Some(rest) => (true, rest.trim()),
            None => (false, line),
        };
        let Some((key, value)) = body.split_once('=') else {
            if comment {
                continue;
            }
            return Err(usage(format!("config line {}: expected key=value, got {line:?}", lineno + 1)));
        };
        let key = key.trim().replace('-', "_");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            if comment {
                continue;
            }
            return Err(usage(format!("config line {}: unknown key `{key}`", lineno + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn apply_file(cfg: &mut RunConfig, map: &BTreeMap<String, String>) -> Result<(), CliError> {
    for (key, value) in map {
        match key.as_str() {
            "ensemble" => cfg.ensemble = parse_enum(key, value)?,
            "n" => cfg.n = parse_num(key, value)?,
            "beta" => cfg.beta = parse_num(key, value)?,
            "seed" => cfg.seed = parse_num(key, value)?,
            "chains" => cfg.chains = parse_num(key, value)?,
            "samples" => cfg.samples = parse_num(key, value)?,
            "burn_in" => cfg.burn_in = parse_num(key, value)?,
            "thin" => cfg.thin = parse_num(key, value)?,
            "dim" => cfg.dim = parse_num(key, value)?,
            "m" => cfg.m = if value == "none" { None } else { Some(parse_num(key, value)?) },
            "scheme" => cfg.scheme = parse_enum(key, value)?,
            "out" => cfg.output_path = Some(PathBuf::from(value)),
            "format" => cfg.format = parse_enum(key, value)?,
            "threads" => cfg.threads = Some(parse_num(key, value)?),
            "suite" => cfg.suite = parse_enum(key, value)?,
            _ => unreachable!("keys checked while parsing"),
        }
    }
    Ok(())
}

fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config file {}: {e}", path.display())))?;
    let is_table = path.extension().is_some_and(|e| e == "csv" || e == "json") || text.trim_start().starts_with('{');
    if !is_table {
        return parse_config_text(&text);
    }
    // a data file written by `sample`: its metadata is the config
    let table = crate::table::Table::read(path)?;
    Ok(table
        .metadata
        .into_iter()
        .filter(|(k, _)| CONFIG_KEYS.contains(&k.as_str()))
        .collect())
}

impl RunConfig {
    /// Defaults, then the config file, then explicit flags.
    pub fn resolve(flags: &RunFlags) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &flags.config {
            apply_file(&mut cfg, &read_config_file(path)?)?;
        }
        macro_rules! take {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = flags.$field.clone() { cfg.$target = v; })*
            };
        }
        take!(ensemble => ensemble, n => n, beta => beta, seed => seed, chains => chains, samples => samples,
              burn_in => burn_in, thin => thin, dim => dim, scheme => scheme, format => format, suite => suite);
        if flags.m.is_some() {
            cfg.m = flags.m;
        }
        if flags.out.is_some() {
            cfg.output_path = flags.out.clone();
        }
        if flags.threads.is_some() {
            cfg.threads = flags.threads;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n == 0 {
            return Err(usage("invalid `n`: must be >= 1"));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(usage(format!("invalid `beta`: must be positive and finite, got {}", self.beta)));
        }
        if self.chains == 0 {
            return Err(usage("invalid `chains`: must be >= 1"));
        }
        if self.samples == 0 {
            return Err(usage("invalid `samples`: must be >= 1"));
        }
        if self.thin == 0 {
            return Err(usage("invalid `thin`: must be >= 1"));
        }
        if self.dim < 2 {
            return Err(usage(format!("invalid `dim`: must be >= 2, got {}", self.dim)));
        }
        if self.threads == Some(0) {
            return Err(usage("invalid `threads`: must be >= 1"));
        }
        match (self.ensemble, self.m) {
            (Ensemble::Truncated, Some(m)) if m <= self.n => {
                return Err(usage(format!("invalid `m`: truncation needs m > n, got m={m}, n={}", self.n)))
            }
            (Ensemble::Product, Some(0)) => return Err(usage("invalid `m`: need at least one factor")),
            _ => {}
        }
        Ok(())
    }

    /// Unitary size for truncation (default `2n`) or factor count for
    /// products (default 2).
    pub fn resolved_m(&self) -> usize {
        match self.ensemble {
            Ensemble::Truncated => self.m.unwrap_or(2 * self.n),
            Ensemble::Product => self.m.unwrap_or(2),
            _ => self.m.unwrap_or(0),
        }
    }

    /// `(key, value)` pairs recorded in output metadata; feeding them back
    /// as a config file reproduces the run.
    pub fn metadata(&self) -> Vec<(&'static str, String)> {
        let mut v = vec![
            ("ensemble", self.ensemble.name().to_string()),
            ("n", self.n.to_string()),
            ("beta", format!("{:?}", self.beta)),
            ("seed", self.seed.to_string()),
            ("chains", self.chains.to_string()),
            ("samples", self.samples.to_string()),
            ("burn_in", self.burn_in.to_string()),
            ("thin", self.thin.to_string()),
            ("dim", self.dim.to_string()),
        ];
        if matches!(self.ensemble, Ensemble::Truncated | Ensemble::Product) {
            v.push(("m", self.resolved_m().to_string()));
        }
        v.push(("scheme", self.scheme.name().to_string()));
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_fill_and_flags_win() {
        let map = parse_config_text("n = 12\nburn-in=50\n# comment\n\nbeta=4\n").unwrap();
        let mut cfg = RunConfig::default();
        apply_file(&mut cfg, &map).unwrap();
        assert_eq!((cfg.n, cfg.burn_in, cfg.beta), (12, 50, 4.0));
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_config_text("temperature=3").unwrap_err();
        assert!(err.to_string().contains("temperature"));
    }

    #[test]
    fn metadata_round_trips() {
        let cfg = RunConfig { ensemble: Ensemble::Product, n: 9, beta: 0.1, seed: 4, ..RunConfig::default() };
        let text: String = cfg.metadata().iter().map(|(k, v)| format!("# {k}={v}\n")).collect();
        let mut back = RunConfig::default();
        apply_file(&mut back, &parse_config_text(&text).unwrap()).unwrap();
        back.m = cfg.m;
        assert_eq!(back, cfg);
    }

    #[test]
    fn validation_names_field() {
        let cfg = RunConfig { beta: -1.0, ..RunConfig::default() };
        assert!(cfg.validate().unwrap_err().to_string().contains("beta"));
        let cfg = RunConfig { ensemble: Ensemble::Truncated, n: 5, m: Some(5), ..RunConfig::default() };
        assert!(cfg.validate().unwrap_err().to_string().contains("`m`"));
    }
}
