mod config;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use selfmod_lab::catalog::BUILTIN_UTILITIES;
use selfmod_lab::rollout::dump_table;
use selfmod_lab::theorem_lab::{compare_agents, AgentKind};
use selfmod_lab::{
    truncation_bound, verify, Certificate, Claim, Exact, LabError, NameSpace, Scalar,
};

use config::ExperimentArgs;
use report::{ensure_dir, write_pair, write_text, RunRecord, RunRow, RUN_SCHEMA};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lab(LabError::CapExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "selfmod-lab",
    version,
    about = "Exact experiments with self-modifying agents"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run claim checks and write one report per claim.
    Verify {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Comma-separated claim ids, or `all`.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        claims: Vec<String>,
        /// Feed each check its corrupted input; every claim should fail.
        #[arg(long)]
        negative_control: bool,
    },
    /// Build agents, enumerate their histories and compare performance.
    Run {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Comma-separated agent kinds (realistic, hedonistic, ignorant,
        /// ignorant-worst), or `all`.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        kind: Vec<String>,
    },
    /// List built-in environments, utilities or claims.
    List {
        what: ListWhat,
        #[arg(long)]
        env_file: Option<std::path::PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ListWhat {
    Envs,
    Utilities,
    Claims,
}

fn parse_claims(ids: &[String]) -> Result<Vec<Claim>, CliError> {
    if ids.iter().any(|c| c.trim().eq_ignore_ascii_case("all")) {
        return Ok(Claim::ALL.to_vec());
    }
    let mut out = Vec::new();
    for id in ids {
        let c: Claim = id
            .parse()
            .map_err(|e| CliError::Config(format!("--claims: {e}")))?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out.sort();
    Ok(out)
}

fn parse_kinds(kinds: &[String]) -> Result<Vec<AgentKind>, CliError> {
    if kinds.iter().any(|k| k.trim().eq_ignore_ascii_case("all")) {
        return Ok(AgentKind::ALL.to_vec());
    }
    let mut out = Vec::new();
    for k in kinds {
        let a: AgentKind = k
            .parse()
            .map_err(|e| CliError::Config(format!("--kind: {e}")))?;
        if !out.contains(&a) {
            out.push(a);
        }
    }
    out.sort();
    Ok(out)
}

fn cmd_verify(args: &ExperimentArgs, claims: &[String], negative: bool) -> Result<u8, CliError> {
    let claims = parse_claims(claims)?;
    let mut exp = args.experiment()?;
    if negative {
        exp = exp.negative();
    }
    ensure_dir(&args.out)?;
    let results: Vec<(Claim, Result<Certificate, LabError>)> =
        claims.par_iter().map(|&c| (c, verify(c, &exp))).collect();
    let mut code = 0u8;
    let mut hard: Option<CliError> = None;
    for (claim, result) in results {
        match result {
            Ok(cert) => {
                let path = write_pair(&args.out, claim.id(), &cert.to_text(), &cert)?;
                let verdict = if cert.passed() { "PASS" } else { "FAIL" };
                println!(
                    "{claim} {verdict} checks={} report={}",
                    cert.checks,
                    path.display()
                );
                if !cert.passed() {
                    for w in cert.counterexamples().take(3) {
                        let values: Vec<String> =
                            w.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
                        println!("  counterexample {} [{}]", w.instance, values.join(", "));
                    }
                    code = code.max(1);
                }
            }
            Err(e) => {
                eprintln!("{claim}: {e}");
                let e = CliError::from(e);
                if hard.as_ref().is_none_or(|h| e.exit_code() < h.exit_code()) {
                    hard = Some(e);
                }
            }
        }
    }
    match hard {
        Some(e) => Ok(e.exit_code()),
        None => Ok(code),
    }
}

fn cmd_run(args: &ExperimentArgs, kinds: &[String]) -> Result<u8, CliError> {
    let kinds = parse_kinds(kinds)?;
    let exp = args.experiment()?;
    ensure_dir(&args.out)?;
    let cmp = compare_agents(&exp, &kinds)?;
    let record = RunRecord {
        schema: RUN_SCHEMA,
        fingerprint: exp.config_fingerprint(),
        environment: exp.env.name().to_string(),
        utilities: exp
            .utilities
            .iter()
            .map(|u| u.label().to_string())
            .collect(),
        gamma: exp.cfg.gamma().render(),
        horizon: exp.cfg.horizon(),
        truncation_bound: truncation_bound(&exp.cfg).render(),
        tie_break: exp.tie.to_string(),
        rows: cmp
            .rows
            .iter()
            .map(|r| RunRow {
                agent: r.agent.to_string(),
                performance: r.performance.render(),
                performance_f64: r.performance.to_f64(),
                modifications: r.modifications,
                root_value: r.root_value.render(),
                root_realistic: r.root_realistic.render(),
                root_action: r.root_action.clone(),
            })
            .collect(),
        realistic_dominates: cmp.realistic_dominates(),
    };
    let ns = NameSpace::with_utilities(exp.utilities.clone())?;
    let vocab = ns.vocabulary(&exp.env);
    for r in &cmp.rows {
        write_text(
            &args.out,
            &format!("histories-{}.tsv", r.agent),
            &dump_table(&r.histories, &vocab),
        )?;
    }
    let text = record.to_text();
    let path = write_pair(&args.out, "run", &text, &record)?;
    print!("{text}");
    println!("report={}", path.display());
    Ok(0)
}

fn cmd_list(what: ListWhat, env_file: Option<&std::path::Path>) -> Result<u8, CliError> {
    let catalog = match env_file {
        None => selfmod_lab::Catalog::builtin(),
        Some(p) => selfmod_lab::Catalog::load(p)
            .map_err(|e| CliError::Config(format!("--env-file: {e}")))?,
    };
    match what {
        ListWhat::Envs => {
            for name in catalog.environment_names() {
                let env = catalog.environment::<Exact>(name)?;
                let rewards: Vec<String> = env.rewards().iter().map(Scalar::render).collect();
                println!("{name}: {}", env.description());
                println!("  actions: {}", env.actions().symbols().join(", "));
                println!("  percepts: {}", env.percepts().symbols().join(", "));
                println!("  rewards: {}", rewards.join(", "));
                println!("  utilities: {}", env.default_utilities().join(", "));
                println!("  full support: {}", env.full_support());
            }
        }
        ListWhat::Utilities => {
            for (name, description) in BUILTIN_UTILITIES
                .iter()
                .copied()
                .chain(catalog.custom_utility_names())
            {
                println!("{name}: {description}");
            }
        }
        ListWhat::Claims => {
            for c in Claim::ALL {
                println!("{c}: {}", c.summary());
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify {
            exp,
            claims,
            negative_control,
        } => cmd_verify(exp, claims, *negative_control),
        Command::Run { exp, kind } => cmd_run(exp, kind),
        Command::List { what, env_file } => cmd_list(*what, env_file.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
