use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Command, Overrides, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "qcrb",
    version,
    about = "Quantum Cramér-Rao bounds for non-Hermitian observables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,

    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Sub {
    /// GHZ Fisher information versus mixing weight, in units of N^2
    Fig1,
    /// Mach-Zehnder Fisher information over photon number and mixing weight
    Fig2,
    /// Lossy pure-state QFI over (theta / pi, gamma) for both models
    Fig3,
    /// Error propagation for random observables against the three bounds
    Saturation,
    /// Interferometric measurement of a 2x2 non-Hermitian observable
    MeasureDemo,
    /// Randomized uncertainty and Fisher invariant suites
    Fuzz,
}

impl Sub {
    fn command(self) -> Command {
        match self {
            Sub::Fig1 => Command::Fig1,
            Sub::Fig2 => Command::Fig2,
            Sub::Fig3 => Command::Fig3,
            Sub::Saturation => Command::Saturation,
            Sub::MeasureDemo => Command::MeasureDemo,
            Sub::Fuzz => Command::Fuzz,
        }
    }
}

/// Every value is parsed by the same rules as the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Key = value settings file; flags override its values
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Model for saturation: ghz | mz
    #[arg(long, global = true)]
    pub model: Option<String>,
    #[arg(long, global = true)]
    pub n_ions: Option<String>,
    /// Weight of the first eigenstate
    #[arg(long, global = true)]
    pub p: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha_re: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha_im: Option<String>,
    #[arg(long, global = true)]
    pub r_mag: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub r_phase: Option<String>,
    /// bpi | bpi2
    #[arg(long, global = true)]
    pub splitter: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, global = true)]
    pub gamma: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// START:STOP:COUNT, once per swept axis
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Vec<String>,
    #[arg(long, global = true)]
    pub samples: Option<String>,
    /// hermitian | nonhermitian
    #[arg(long, global = true)]
    pub kind: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// auto | INT
    #[arg(long, global = true)]
    pub n_max: Option<String>,
    /// Row-major 2x2 entries for measure-demo, e.g. "1,1,0,1"
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub observable: Option<String>,
    /// Two input amplitudes for measure-demo, e.g. "1,i"
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub state: Option<String>,
    /// Mean photon counts per chi point for the shot-noise fit
    #[arg(long, global = true)]
    pub shots: Option<String>,
    /// Make every fuzz case fail (self-test of the exit code)
    #[arg(long, global = true)]
    pub inject_fault: bool,
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// csv | json
    #[arg(long, global = true)]
    pub format: Option<String>,
}

impl Flags {
    pub fn overrides(&self) -> Result<Overrides, CliError> {
        let mut o = Overrides::default();
        let pairs = [
            ("model", &self.model),
            ("n_ions", &self.n_ions),
            ("p", &self.p),
            ("alpha_re", &self.alpha_re),
            ("alpha_im", &self.alpha_im),
            ("r_mag", &self.r_mag),
            ("r_phase", &self.r_phase),
            ("splitter", &self.splitter),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
            ("theta", &self.theta),
            ("samples", &self.samples),
            ("kind", &self.kind),
            ("seed", &self.seed),
            ("n_max", &self.n_max),
            ("observable", &self.observable),
            ("state", &self.state),
            ("shots", &self.shots),
            ("format", &self.format),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                o.set(key, v)?;
            }
        }
        for g in &self.grid {
            o.set("grid", g)?;
        }
        if self.inject_fault {
            o.inject_fault = Some(true);
        }
        o.out = self.out.clone();
        Ok(o)
    }
}

impl Cli {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.flags.config {
            Some(path) => Overrides::load(path)?,
            None => Overrides::default(),
        };
        RunConfig::resolve(self.command.command(), file.layered(self.flags.overrides()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_after_subcommand() {
        let cli = Cli::try_parse_from(["qcrb", "fig1", "--p", "0.3", "--grid", "0.1:0.5:3", "--beta", "-1"]).unwrap();
        let cfg = cli.resolve().unwrap();
        assert_eq!(cfg.command, Command::Fig1);
        assert_eq!(cfg.beta, -1.0);
        assert_eq!(cfg.grid(0), vec![0.1, 0.30000000000000004, 0.5]);
    }

    #[test]
    fn unknown_values_are_rejected() {
        let cli = Cli::try_parse_from(["qcrb", "saturation", "--kind", "weird"]).unwrap();
        assert_eq!(cli.resolve().unwrap_err().exit_code(), 2);
        assert!(Cli::try_parse_from(["qcrb", "nope"]).is_err());
    }
}
