use std::path::PathBuf;

use clap::Args;
use selfmod_lab::{
    parse_rational, Catalog, DiscountConfig, Exact, Experiment, LabError, TieBreak, DEFAULT_CAP,
};

use crate::CliError;

/// Options shared by `verify` and `run`.
#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    /// Environment name (built-in, or from --env-file).
    #[arg(long, default_value = "TwoButton")]
    pub env: String,

    /// TOML catalog with extra environments and utilities.
    #[arg(long)]
    pub env_file: Option<PathBuf>,

    /// Comma-separated utility names; the first is the agent's initial
    /// utility u1. Defaults to the environment's utilities.
    #[arg(long, value_delimiter = ',')]
    pub utility: Vec<String>,

    /// Discount factor as a rational, e.g. 1/2.
    #[arg(long, default_value = "1/2")]
    pub gamma: String,

    #[arg(long, default_value_t = 3)]
    pub horizon: usize,

    /// lexicographic, seeded, or seeded(N).
    #[arg(long, default_value = "lexicographic")]
    pub tie_break: String,

    /// Seed for randomized policy classes (and for `seeded` tie-breaks).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Enumeration cap.
    #[arg(long, env = "SELFMOD_LAB_CAP", default_value_t = DEFAULT_CAP)]
    pub cap: usize,

    /// Report directory.
    #[arg(long, default_value = "reports")]
    pub out: PathBuf,
}

fn config_err(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("--{field}: {msg}"))
}

pub fn parse_tie_break(text: &str, seed: u64) -> Result<TieBreak, CliError> {
    let t = text.trim().to_ascii_lowercase();
    if t == "lexicographic" || t == "lex" {
        return Ok(TieBreak::Lexicographic);
    }
    if t == "seeded" {
        return Ok(TieBreak::Seeded(seed));
    }
    let inner = t
        .strip_prefix("seeded(")
        .and_then(|r| r.strip_suffix(')'))
        .or_else(|| t.strip_prefix("seeded:"));
    match inner.map(str::parse::<u64>) {
        Some(Ok(n)) => Ok(TieBreak::Seeded(n)),
        _ => Err(config_err(
            "tie-break",
            format!("expected lexicographic, seeded or seeded(N), got {text:?}"),
        )),
    }
}

impl ExperimentArgs {
    pub fn catalog(&self) -> Result<Catalog, CliError> {
        match &self.env_file {
            None => Ok(Catalog::builtin()),
            Some(path) => Catalog::load(path).map_err(|e| config_err("env-file", e)),
        }
    }

    /// Validates every field and builds the exact-arithmetic experiment.
    pub fn experiment(&self) -> Result<Experiment<Exact>, CliError> {
        let catalog = self.catalog()?;
        let env = match catalog.environment::<Exact>(&self.env) {
            Ok(env) => env,
            // a single-environment file may be used without naming it
            Err(LabError::UnknownEnvironment(_))
                if self.env_file.is_some() && self.env == "TwoButton" =>
            {
                catalog
                    .first_environment()
                    .map_err(|e| config_err("env-file", e))?
            }
            Err(e) => return Err(config_err("env", e)),
        };
        let names: Vec<String> = if self.utility.is_empty() {
            env.default_utilities().to_vec()
        } else {
            self.utility.iter().map(|s| s.trim().to_string()).collect()
        };
        if names.is_empty() {
            return Err(config_err(
                "utility",
                "no utility given and the environment lists none",
            ));
        }
        let mut utilities = Vec::with_capacity(names.len());
        for n in &names {
            utilities.push(
                catalog
                    .utility::<Exact>(n, &env)
                    .map_err(|e| config_err("utility", e))?,
            );
        }
        let gamma = parse_rational(&self.gamma).map_err(|e| config_err("gamma", e))?;
        let cfg = DiscountConfig::new(gamma, self.horizon).map_err(|e| {
            if self.horizon == 0 {
                config_err("horizon", "must be at least 1")
            } else {
                config_err(
                    "gamma",
                    format!(
                        "must lie strictly between 0 and 1, got {:?}: {e}",
                        self.gamma
                    ),
                )
            }
        })?;
        if self.cap == 0 {
            return Err(config_err("cap", "must be at least 1"));
        }
        let tie = parse_tie_break(&self.tie_break, self.seed)?;
        let exp = Experiment::new(env, utilities, cfg).map_err(|e| config_err("utility", e))?;
        selfmod_lab::NameSpace::with_utilities(exp.utilities.clone())
            .map_err(|e| config_err("utility", e))?;
        Ok(exp
            .with_tie_break(tie)
            .with_seed(self.seed)
            .with_cap(self.cap))
    }
}
