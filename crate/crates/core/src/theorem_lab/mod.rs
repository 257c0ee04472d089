//! Executable checks of the self-modification results, producing
//! certificates with witnesses.

mod agents;
mod claims;
pub mod classes;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::environment::Environment;
use crate::error::{LabError, Result};
use crate::scalar::Scalar;
use crate::utility::{truncation_bound, DiscountConfig, UtilityFunction};
use crate::value::TieBreak;

pub use agents::{compare_agents, AgentComparison, AgentKind, AgentRow};
pub use claims::{
    realistic_safety, verify_hedonistic_selfmod, verify_ignorant_indifference,
    verify_iterative_forms, verify_optimal_name_extension, verify_optimal_policy_existence,
    verify_realistic_safety, verify_world_policy_equivalence, SafetyStats,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Claim {
    #[serde(rename = "THM3")]
    Thm3,
    #[serde(rename = "THM4")]
    Thm4,
    #[serde(rename = "THM5")]
    Thm5,
    #[serde(rename = "LEM1")]
    Lem1,
    #[serde(rename = "APX_LEM4")]
    ApxLem4,
    #[serde(rename = "APX_THM7")]
    ApxThm7,
    #[serde(rename = "APX_THM8")]
    ApxThm8,
}

impl Claim {
    pub const ALL: [Claim; 7] = [
        Claim::Thm3,
        Claim::Thm4,
        Claim::Thm5,
        Claim::Lem1,
        Claim::ApxLem4,
        Claim::ApxThm7,
        Claim::ApxThm8,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Claim::Thm3 => "THM3",
            Claim::Thm4 => "THM4",
            Claim::Thm5 => "THM5",
            Claim::Lem1 => "LEM1",
            Claim::ApxLem4 => "APX_LEM4",
            Claim::ApxThm7 => "APX_THM7",
            Claim::ApxThm8 => "APX_THM8",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Claim::Thm3 => {
                "hedonistic agents self-modify: always-delude dominates in hedonistic value"
            }
            Claim::Thm4 => "ignorant agents are indifferent to modification decisions",
            Claim::Thm5 => "realistic agents only make value-preserving modifications on-policy",
            Claim::Lem1 => "recursive values equal their iterative (measure) forms",
            Claim::ApxLem4 => {
                "a policy and its associated world policy induce the same world measure and value"
            }
            Claim::ApxThm7 => "a non-modifying optimal policy exists",
            Claim::ApxThm8 => "the optimal world policy has a name in an extended name space",
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Claim {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_uppercase();
        Claim::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| LabError::Config(format!("unknown claim {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub instance: String,
    pub values: Vec<(String, String)>,
    pub tolerance: String,
    pub counterexample: bool,
}

pub const CERTIFICATE_SCHEMA: &str = "selfmod-lab/certificate/v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub claim: Claim,
    pub verdict: Verdict,
    pub negative_control: bool,
    /// Number of individual comparisons made.
    pub checks: usize,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
    /// sha256 of the canonical experiment description.
    pub fingerprint: String,
    pub environment: String,
    pub utilities: Vec<String>,
    pub gamma: String,
    pub horizon: usize,
    /// `γ^H/(1 − γ)`.
    pub truncation_bound: String,
    pub tie_break: String,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn counterexamples(&self) -> impl Iterator<Item = &Witness> {
        self.witnesses.iter().filter(|w| w.counterexample)
    }

    /// Plain-text rendering for reports.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "claim: {} ({})\nverdict: {}\nnegative control: {}\nenvironment: {}\nutilities: {}\ngamma: {}\nhorizon: {}\ntruncation bound: {}\ntie-break: {}\nfingerprint: {}\nchecks: {}\n",
            self.claim,
            self.claim.summary(),
            match self.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
            },
            self.negative_control,
            self.environment,
            self.utilities.join(","),
            self.gamma,
            self.horizon,
            self.truncation_bound,
            self.tie_break,
            self.fingerprint,
            self.checks
        );
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        for w in &self.witnesses {
            let values: Vec<String> = w.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!(
                "{} {} [{}] tol={}\n",
                if w.counterexample {
                    "counterexample"
                } else {
                    "witness"
                },
                w.instance,
                values.join(", "),
                w.tolerance
            ));
        }
        out
    }
}

/// Everything a verifier needs. The first utility is `u₁`; in utility mode
/// the utilities also form the name space.
#[derive(Debug, Clone)]
pub struct Experiment<S: Scalar> {
    pub env: Environment<S>,
    pub utilities: Vec<UtilityFunction<S>>,
    pub cfg: DiscountConfig<S>,
    pub tie: TieBreak,
    /// Seed for randomized policy classes and probes.
    pub seed: u64,
    pub cap: usize,
    /// Feed the documented corrupted input; the certificate must fail.
    pub negative_control: bool,
}

impl<S: Scalar> Experiment<S> {
    pub fn new(
        env: Environment<S>,
        utilities: Vec<UtilityFunction<S>>,
        cfg: DiscountConfig<S>,
    ) -> Result<Self> {
        if utilities.is_empty() {
            return Err(LabError::Config("at least one utility is required".into()));
        }
        Ok(Self {
            env,
            utilities,
            cfg,
            tie: TieBreak::Lexicographic,
            seed: 0,
            cap: crate::rollout::DEFAULT_CAP,
            negative_control: false,
        })
    }

    pub fn with_tie_break(mut self, tie: TieBreak) -> Self {
        self.tie = tie;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn negative(mut self) -> Self {
        self.negative_control = true;
        self
    }

    pub fn u1(&self) -> &UtilityFunction<S> {
        &self.utilities[0]
    }

    /// Canonical description hashed into the fingerprint.
    pub fn canonical(&self, claim: Claim) -> String {
        format!("claim={claim};{}", self.canonical_config())
    }

    /// Canonical description of everything but the claim.
    pub fn canonical_config(&self) -> String {
        let us: Vec<String> = self
            .utilities
            .iter()
            .map(UtilityFunction::canonical)
            .collect();
        format!(
            "env={};utilities={};gamma={};horizon={};tie={};seed={};cap={};negative={};exact={}",
            self.env.canonical(),
            us.join("|"),
            self.cfg.gamma().render(),
            self.cfg.horizon(),
            self.tie,
            self.seed,
            self.cap,
            self.negative_control,
            S::EXACT
        )
    }

    pub fn fingerprint(&self, claim: Claim) -> String {
        hex::encode(Sha256::digest(self.canonical(claim).as_bytes()))
    }

    pub fn config_fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_config().as_bytes()))
    }

    pub(crate) fn certificate(&self, claim: Claim) -> Certificate {
        Certificate {
            schema: CERTIFICATE_SCHEMA.into(),
            claim,
            verdict: Verdict::Pass,
            negative_control: self.negative_control,
            checks: 0,
            witnesses: vec![],
            notes: vec![],
            fingerprint: self.fingerprint(claim),
            environment: self.env.name().to_string(),
            utilities: self
                .utilities
                .iter()
                .map(|u| u.label().to_string())
                .collect(),
            gamma: self.cfg.gamma().render(),
            horizon: self.cfg.horizon(),
            truncation_bound: truncation_bound(&self.cfg).render(),
            tie_break: self.tie.to_string(),
        }
    }
}

/// Runs one claim.
pub fn verify<S: Scalar>(claim: Claim, exp: &Experiment<S>) -> Result<Certificate> {
    match claim {
        Claim::Thm3 => verify_hedonistic_selfmod(exp),
        Claim::Thm4 => verify_ignorant_indifference(exp),
        Claim::Thm5 => verify_realistic_safety(exp),
        Claim::Lem1 => verify_iterative_forms(exp),
        Claim::ApxLem4 => verify_world_policy_equivalence(exp),
        Claim::ApxThm7 => verify_optimal_policy_existence(exp),
        Claim::ApxThm8 => verify_optimal_name_extension(exp),
    }
}
