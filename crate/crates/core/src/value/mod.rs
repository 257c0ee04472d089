//! Hedonistic, ignorant and realistic value functions.

mod iterative;
mod planner;
pub mod standard;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::LabError;
use crate::history::{Action, History, Vocabulary};
use crate::scalar::Scalar;

pub use iterative::{q_iterative, ActingPolicies, IterativeQuery};
pub use planner::{
    build_optimal_policy, optimal_action, q_hedonistic, q_ignorant, q_realistic, v_value, Planner,
    Slot,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Hedonistic,
    Ignorant,
    Realistic,
}

impl ValueKind {
    pub const ALL: [ValueKind; 3] = [
        ValueKind::Hedonistic,
        ValueKind::Ignorant,
        ValueKind::Realistic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ValueKind::Hedonistic => "hedonistic",
            ValueKind::Ignorant => "ignorant",
            ValueKind::Realistic => "realistic",
        }
    }
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ValueKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, LabError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hedonistic" | "he" => Ok(ValueKind::Hedonistic),
            "ignorant" | "ig" => Ok(ValueKind::Ignorant),
            "realistic" | "re" => Ok(ValueKind::Realistic),
            other => Err(LabError::Config(format!("unknown value kind {other:?}"))),
        }
    }
}

/// How argmax ties are resolved.
///
/// `Lexicographic` takes the first maximizer in (world action symbol, name)
/// order, except that the deciding self's own name beats other names for
/// the same world action. `Seeded` picks uniformly among the maximizers
/// with a generator seeded from the seed, the deciding utility's label and
/// the world history, so a decision never depends on evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TieBreak {
    #[default]
    Lexicographic,
    Seeded(u64),
}

impl fmt::Display for TieBreak {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TieBreak::Lexicographic => f.write_str("lexicographic"),
            TieBreak::Seeded(s) => write!(f, "seeded({s})"),
        }
    }
}

/// A Q or V value with its kind, horizon and truncation error bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueReport<S> {
    pub value: S,
    pub kind: ValueKind,
    pub horizon: usize,
    /// `γ^H/(1 − γ)`.
    pub bound: S,
    pub at: History,
    pub action: Option<Action>,
}

pub const VALUE_SCHEMA: &str = "selfmod-lab/value/v1";

/// Serialized form of a [`ValueReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueRecord {
    pub schema: String,
    pub kind: ValueKind,
    /// Exact rendering (`p/q`) for rational scalars, decimal otherwise.
    pub value: String,
    pub value_f64: f64,
    pub bound: String,
    pub horizon: usize,
    pub history: String,
    pub action: Option<String>,
}

impl<S: Scalar> ValueReport<S> {
    pub fn record(&self, vocab: &Vocabulary<'_>) -> ValueRecord {
        ValueRecord {
            schema: VALUE_SCHEMA.into(),
            kind: self.kind,
            value: self.value.render(),
            value_f64: self.value.to_f64(),
            bound: self.bound.render(),
            horizon: self.horizon,
            history: vocab.format_history(&self.at),
            action: self.action.map(|a| vocab.format_action(a)),
        }
    }
}
