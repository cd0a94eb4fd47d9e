//! Run configuration: built-in defaults, then a `key = value` file, then
//! command-line flags, each layer overriding the previous one.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qcrb_core::models::Splitter;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Command {
    Fig1,
    Fig2,
    Fig3,
    Saturation,
    MeasureDemo,
    Fuzz,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Fig1 => "fig1",
            Command::Fig2 => "fig2",
            Command::Fig3 => "fig3",
            Command::Saturation => "saturation",
            Command::MeasureDemo => "measure-demo",
            Command::Fuzz => "fuzz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Usage(format!("unknown format '{s}' (expected csv or json)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    Ghz,
    Mz,
}

impl FromStr for ModelChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "ghz" => Ok(ModelChoice::Ghz),
            "mz" => Ok(ModelChoice::Mz),
            _ => Err(CliError::Usage(format!("unknown model '{s}' (expected ghz or mz)"))),
        }
    }
}

impl fmt::Display for ModelChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelChoice::Ghz => "ghz",
            ModelChoice::Mz => "mz",
        })
    }
}

pub fn parse_splitter(s: &str) -> Result<Splitter, CliError> {
    match s {
        "bpi" => Ok(Splitter::BPi),
        "bpi2" => Ok(Splitter::BPi2),
        _ => Err(CliError::Usage(format!(
            "unknown splitter '{s}' (expected bpi or bpi2)"
        ))),
    }
}

fn splitter_name(s: Splitter) -> &'static str {
    match s {
        Splitter::BPi => "bpi",
        Splitter::BPi2 => "bpi2",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableKindArg {
    Hermitian,
    NonHermitian,
}

impl FromStr for ObservableKindArg {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "hermitian" => Ok(Self::Hermitian),
            "nonhermitian" => Ok(Self::NonHermitian),
            _ => Err(CliError::Usage(format!(
                "unknown kind '{s}' (expected hermitian or nonhermitian)"
            ))),
        }
    }
}

impl fmt::Display for ObservableKindArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Hermitian => "hermitian",
            Self::NonHermitian => "nonhermitian",
        })
    }
}

/// `count` equally spaced values from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn new(start: f64, stop: f64, count: usize) -> Self {
        Self { start, stop, count }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || CliError::Usage(format!("grid '{s}' is not START:STOP:COUNT"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if !start.is_finite() || !stop.is_finite() || count == 0 {
            return Err(bad());
        }
        Ok(Self { start, stop, count })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NMax {
    Auto,
    Fixed(usize),
}

impl FromStr for NMax {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        if s == "auto" {
            return Ok(NMax::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(NMax::Fixed(n)),
            _ => Err(CliError::Usage(format!(
                "n-max '{s}' is neither auto nor a positive integer"
            ))),
        }
    }
}

impl fmt::Display for NMax {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NMax::Auto => f.write_str("auto"),
            NMax::Fixed(n) => write!(f, "{n}"),
        }
    }
}

/// Values a user may set; `None` falls back to the command default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub model: Option<ModelChoice>,
    pub n_ions: Option<usize>,
    pub p: Option<f64>,
    pub alpha_re: Option<f64>,
    pub alpha_im: Option<f64>,
    pub r_mag: Option<f64>,
    pub r_phase: Option<f64>,
    pub splitter: Option<Splitter>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub theta: Option<f64>,
    pub grids: Vec<GridSpec>,
    pub samples: Option<usize>,
    pub kind: Option<ObservableKindArg>,
    pub seed: Option<u64>,
    pub n_max: Option<NMax>,
    pub observable: Option<String>,
    pub state: Option<String>,
    pub shots: Option<f64>,
    pub inject_fault: Option<bool>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("config key '{key}': cannot parse '{value}'")))
}

impl Overrides {
    /// Applies one `key = value` setting. Keys accept `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "model" => self.model = Some(value.parse()?),
            "n_ions" => self.n_ions = Some(parse_value(&key, value)?),
            "p" => self.p = Some(parse_value(&key, value)?),
            "alpha_re" => self.alpha_re = Some(parse_value(&key, value)?),
            "alpha_im" => self.alpha_im = Some(parse_value(&key, value)?),
            "r_mag" => self.r_mag = Some(parse_value(&key, value)?),
            "r_phase" => self.r_phase = Some(parse_value(&key, value)?),
            "splitter" => self.splitter = Some(parse_splitter(value)?),
            "beta" => self.beta = Some(parse_value(&key, value)?),
            "gamma" => self.gamma = Some(parse_value(&key, value)?),
            "theta" => self.theta = Some(parse_value(&key, value)?),
            "grid" => self.grids.push(value.parse()?),
            "samples" => self.samples = Some(parse_value(&key, value)?),
            "kind" => self.kind = Some(value.parse()?),
            "seed" => self.seed = Some(parse_value(&key, value)?),
            "n_max" => self.n_max = Some(value.parse()?),
            "observable" => self.observable = Some(value.to_string()),
            "state" => self.state = Some(value.to_string()),
            "shots" => self.shots = Some(parse_value(&key, value)?),
            "inject_fault" => self.inject_fault = Some(parse_value(&key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = Some(value.parse()?),
            _ => return Err(CliError::Usage(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    pub fn parse_file_contents(text: &str) -> Result<Self, CliError> {
        let mut out = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", lineno + 1)))?;
            out.set(key, value)?;
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse_file_contents(&text)
    }

    /// `self` with every value set in `top` replaced; grids are replaced as a
    /// whole when `top` names any.
    pub fn layered(mut self, top: Overrides) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if top.$f.is_some() { self.$f = top.$f; } )* };
        }
        take!(
            model,
            n_ions,
            p,
            alpha_re,
            alpha_im,
            r_mag,
            r_phase,
            splitter,
            beta,
            gamma,
            theta,
            samples,
            kind,
            seed,
            n_max,
            observable,
            state,
            shots,
            inject_fault,
            out,
            format
        );
        if !top.grids.is_empty() {
            self.grids = top.grids;
        }
        self
    }
}

/// Fully resolved configuration for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub model: ModelChoice,
    pub n_ions: usize,
    pub p: f64,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub r_mag: f64,
    pub r_phase: f64,
    pub splitter: Splitter,
    pub beta: f64,
    pub gamma: f64,
    pub theta: f64,
    pub grids: Vec<GridSpec>,
    pub samples: usize,
    pub kind: ObservableKindArg,
    pub seed: u64,
    pub n_max: NMax,
    pub observable: String,
    pub state: String,
    pub shots: Option<f64>,
    pub inject_fault: bool,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        let (model, p, alpha_re, r_mag, kind, grids) = match command {
            Command::Fig1 => (
                ModelChoice::Ghz,
                0.25,
                1.0,
                0.0,
                ObservableKindArg::Hermitian,
                vec![GridSpec::new(0.05, 0.95, 19)],
            ),
            Command::Fig2 => (
                ModelChoice::Mz,
                0.3,
                1.0,
                0.5,
                ObservableKindArg::Hermitian,
                vec![GridSpec::new(1.0, 9.0, 9), GridSpec::new(0.1, 0.9, 9)],
            ),
            Command::Fig3 => (
                ModelChoice::Ghz,
                1.0,
                1.0,
                0.0,
                ObservableKindArg::Hermitian,
                vec![GridSpec::new(0.0, 1.0, 21), GridSpec::new(0.0, 1.0, 21)],
            ),
            Command::Saturation => (ModelChoice::Ghz, 0.25, 2.0, 0.0, ObservableKindArg::Hermitian, vec![]),
            Command::MeasureDemo => (
                ModelChoice::Ghz,
                0.25,
                1.0,
                0.0,
                ObservableKindArg::NonHermitian,
                vec![GridSpec::new(0.0, 2.0 * PI, 65)],
            ),
            Command::Fuzz => (ModelChoice::Ghz, 0.25, 1.0, 0.0, ObservableKindArg::Hermitian, vec![]),
        };
        Self {
            command,
            model,
            n_ions: 4,
            p,
            alpha_re,
            alpha_im: 0.0,
            r_mag,
            r_phase: 0.0,
            splitter: Splitter::BPi,
            beta: PI,
            gamma: if command == Command::Fig3 { 0.2 } else { 0.0 },
            theta: 0.0,
            grids,
            samples: 10_000,
            kind,
            seed: 1,
            n_max: NMax::Auto,
            observable: "1,1,0,1".into(),
            state: "1,i".into(),
            shots: None,
            inject_fault: false,
            out: None,
            format: Format::Csv,
        }
    }

    pub fn resolve(command: Command, o: Overrides) -> Result<Self, CliError> {
        let mut c = Self::defaults(command);
        // the Mach-Zehnder saturation scan has its own default weight
        if command == Command::Saturation && o.model == Some(ModelChoice::Mz) && o.p.is_none() {
            c.p = 0.3;
        }
        macro_rules! apply {
            ($($f:ident),*) => { $( if let Some(v) = o.$f { c.$f = v; } )* };
        }
        apply!(
            model,
            n_ions,
            p,
            alpha_re,
            alpha_im,
            r_mag,
            r_phase,
            splitter,
            beta,
            gamma,
            theta,
            samples,
            kind,
            seed,
            n_max,
            observable,
            state,
            inject_fault,
            format
        );
        c.shots = o.shots.or(c.shots);
        c.out = o.out.or(c.out);
        if !o.grids.is_empty() {
            c.grids = o.grids;
        }
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), CliError> {
        let axes = match self.command {
            Command::Fig1 | Command::MeasureDemo => 1,
            Command::Fig2 | Command::Fig3 => 2,
            Command::Saturation | Command::Fuzz => 0,
        };
        if self.grids.len() < axes {
            return Err(CliError::Usage(format!(
                "{} needs {axes} grid axes, got {}",
                self.command.as_str(),
                self.grids.len()
            )));
        }
        let sweep = matches!(self.command, Command::Fig1 | Command::Fig2 | Command::Fig3);
        if sweep && self.grids.iter().take(axes).any(|g| g.count < 2) {
            return Err(CliError::Usage("sweep grids need at least 2 points".into()));
        }
        if self.samples == 0 {
            return Err(CliError::Usage("samples must be positive".into()));
        }
        if let Some(s) = self.shots {
            if !(s > 0.0) || !s.is_finite() {
                return Err(CliError::Usage(format!("shots = {s}")));
            }
        }
        Ok(())
    }

    /// Grid axis `i`, which must exist after validation.
    pub fn grid(&self, i: usize) -> Vec<f64> {
        self.grids[i].values()
    }

    /// Every setting that influences output, as sorted `key=value` lines.
    /// The output path and format are excluded.
    pub fn canonical(&self) -> String {
        let mut m = BTreeMap::new();
        m.insert("command", self.command.as_str().to_string());
        m.insert("model", self.model.to_string());
        m.insert("n_ions", self.n_ions.to_string());
        m.insert("p", self.p.to_string());
        m.insert("alpha_re", self.alpha_re.to_string());
        m.insert("alpha_im", self.alpha_im.to_string());
        m.insert("r_mag", self.r_mag.to_string());
        m.insert("r_phase", self.r_phase.to_string());
        m.insert("splitter", splitter_name(self.splitter).to_string());
        m.insert("beta", self.beta.to_string());
        m.insert("gamma", self.gamma.to_string());
        m.insert("theta", self.theta.to_string());
        m.insert(
            "grids",
            self.grids.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(";"),
        );
        m.insert("samples", self.samples.to_string());
        m.insert("kind", self.kind.to_string());
        m.insert("seed", self.seed.to_string());
        m.insert("n_max", self.n_max.to_string());
        m.insert("observable", self.observable.clone());
        m.insert("state", self.state.clone());
        m.insert("shots", self.shots.map_or("none".into(), |s| s.to_string()));
        m.insert("inject_fault", self.inject_fault.to_string());
        m.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn splitter_name(&self) -> &'static str {
        splitter_name(self.splitter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_exact() {
        let g: GridSpec = "0:1:21".parse().unwrap();
        let v = g.values();
        assert_eq!(v.len(), 21);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[20], 1.0);
        assert!("0:1".parse::<GridSpec>().is_err());
        assert!("a:1:3".parse::<GridSpec>().is_err());
    }

    #[test]
    fn file_then_flags_precedence() {
        let file = Overrides::parse_file_contents("# comment\np = 0.4\nn-ions = 8\ngrid = 0.1:0.9:5\n").unwrap();
        let mut flags = Overrides::default();
        flags.set("p", "0.6").unwrap();
        let cfg = RunConfig::resolve(Command::Fig1, file.layered(flags)).unwrap();
        assert_eq!(cfg.p, 0.6);
        assert_eq!(cfg.n_ions, 8);
        assert_eq!(cfg.grids, vec![GridSpec::new(0.1, 0.9, 5)]);
    }

    #[test]
    fn bad_settings_are_usage_errors() {
        assert!(Overrides::parse_file_contents("nonsense").is_err());
        assert!(Overrides::parse_file_contents("colour = red").is_err());
        let mut o = Overrides::default();
        o.grids.push(GridSpec::new(0.0, 1.0, 1));
        assert!(RunConfig::resolve(Command::Fig1, o).is_err());
    }

    #[test]
    fn hash_ignores_output_location() {
        let a = RunConfig::defaults(Command::Fig1);
        let mut b = a.clone();
        b.out = Some("x.csv".into());
        b.format = Format::Json;
        assert_eq!(a.config_hash(), b.config_hash());
        let mut c = a.clone();
        c.seed = 2;
        assert_ne!(a.config_hash(), c.config_hash());
        assert_eq!(a.config_hash().len(), 64);
    }
}
