//! Agent construction and performance comparison.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Experiment;
use crate::error::{LabError, Result};
use crate::history::{History, WorldHistory};
use crate::namespace::NameSpace;
use crate::policy::PolicyTable;
use crate::rollout::{enumerate_realistic, modification_points, return_along, WeightedHistory};
use crate::scalar::Scalar;
use crate::value::{Planner, ValueKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgentKind {
    Realistic,
    Hedonistic,
    Ignorant,
    /// Ignorant agent whose root decision picks, among its maximizers, one
    /// that minimizes the realistic `u₁` value.
    IgnorantWorst,
}

impl AgentKind {
    pub const ALL: [AgentKind; 4] = [
        AgentKind::Realistic,
        AgentKind::Hedonistic,
        AgentKind::Ignorant,
        AgentKind::IgnorantWorst,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AgentKind::Realistic => "realistic",
            AgentKind::Hedonistic => "hedonistic",
            AgentKind::Ignorant => "ignorant",
            AgentKind::IgnorantWorst => "ignorant-worst",
        }
    }

    fn value_kind(self) -> ValueKind {
        match self {
            AgentKind::Realistic => ValueKind::Realistic,
            AgentKind::Hedonistic => ValueKind::Hedonistic,
            AgentKind::Ignorant | AgentKind::IgnorantWorst => ValueKind::Ignorant,
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AgentKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        AgentKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .or_else(|| {
                s.parse::<ValueKind>().ok().map(|k| match k {
                    ValueKind::Realistic => AgentKind::Realistic,
                    ValueKind::Hedonistic => AgentKind::Hedonistic,
                    ValueKind::Ignorant => AgentKind::Ignorant,
                })
            })
            .ok_or_else(|| LabError::Config(format!("unknown agent kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentRow<S> {
    pub agent: AgentKind,
    /// `ρ_re`-expected discounted `u₁` return.
    pub performance: S,
    /// Distinct on-policy histories where the agent names another self.
    pub modifications: usize,
    /// Optimal value of the agent's own kind at the empty history.
    pub root_value: S,
    /// `Q^re₁` of the agent's first action.
    pub root_realistic: S,
    pub root_action: String,
    /// The agent's `ρ_re` histories, in canonical order.
    pub histories: Vec<WeightedHistory<S>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentComparison<S> {
    pub rows: Vec<AgentRow<S>>,
}

impl<S: Scalar> AgentComparison<S> {
    pub fn row(&self, agent: AgentKind) -> Option<&AgentRow<S>> {
        self.rows.iter().find(|r| r.agent == agent)
    }

    fn perf(&self, agent: AgentKind) -> Option<&S> {
        self.row(agent).map(|r| &r.performance)
    }

    /// `performance(realistic) > performance(hedonistic)`.
    pub fn realistic_beats_hedonistic(&self) -> Option<bool> {
        Some(self.perf(AgentKind::Realistic)? > self.perf(AgentKind::Hedonistic)?)
    }

    /// `performance(ignorant-worst) < performance(realistic)`.
    pub fn worst_ignorant_below_realistic(&self) -> Option<bool> {
        Some(self.perf(AgentKind::IgnorantWorst)? < self.perf(AgentKind::Realistic)?)
    }

    /// Realistic performance at least that of every other agent.
    pub fn realistic_dominates(&self) -> Option<bool> {
        let re = self.perf(AgentKind::Realistic)?;
        Some(self.rows.iter().all(|r| r.performance <= *re))
    }
}

/// Builds each agent in a utility name space over the experiment's
/// utilities and measures its performance under `ρ_re`.
///
/// Realistic and ignorant agents' future selves are realistic-optimal for
/// their utility; hedonistic agents' future selves are hedonistic-optimal.
pub fn compare_agents<S: Scalar>(
    exp: &Experiment<S>,
    agents: &[AgentKind],
) -> Result<AgentComparison<S>> {
    let ns = NameSpace::with_utilities(exp.utilities.clone())?;
    let env = &exp.env;
    let re = Planner::new(env.clone(), ns.clone(), exp.u1().clone(), exp.cfg.clone())
        .with_tie_break(exp.tie);
    let he = Planner::new(env.clone(), ns.clone(), exp.u1().clone(), exp.cfg.clone())
        .with_tie_break(exp.tie)
        .with_successor(ValueKind::Hedonistic);
    let vocab = ns.vocabulary(env);
    let root = History::empty();
    let mut rows = Vec::new();
    for &agent in agents {
        let planner = if agent == AgentKind::Hedonistic {
            &he
        } else {
            &re
        };
        let kind = agent.value_kind();
        let mut pi1: PolicyTable = planner.build_optimal_policy(kind)?;
        if agent == AgentKind::IgnorantWorst {
            let mut worst: Option<(crate::history::Action, S)> = None;
            for a in planner.optimal_set(kind, &root)? {
                let q = re.q_optimal(ValueKind::Realistic, &root, a)?;
                if worst.as_ref().is_none_or(|(_, w)| q < *w) {
                    worst = Some((a, q));
                }
            }
            pi1.insert_world(WorldHistory::empty(), worst.expect("non-empty argmax").0);
            pi1.set_label("ignorant-optimal[worst root resolution]");
        }
        let first = pi1.decide(&root).expect("total table");
        let runs = enumerate_realistic(&pi1, env, planner, exp.cfg.horizon(), exp.cap)?;
        let perf = runs.iter().fold(S::zero(), |acc, wh| {
            acc + wh.prob.clone() * return_along(exp.u1(), &wh.history.world_projection(), &exp.cfg)
        });
        rows.push(AgentRow {
            agent,
            performance: perf,
            modifications: modification_points(&runs, planner.initial_name()).len(),
            root_value: planner.v_optimal(kind, &root)?,
            root_realistic: re.q_optimal(ValueKind::Realistic, &root, first)?,
            root_action: vocab.format_action(first),
            histories: runs,
        });
    }
    Ok(AgentComparison { rows })
}
