//! Bounded-suffix patterns over world histories.
//!
//! Environment and utility tables are keyed on the last few world steps. A
//! pattern is written oldest step first, each step as `action/percept` with
//! `_` as wildcard; `*` is the empty pattern that matches every history.

use std::fmt;

use crate::error::{LabError, Result};
use crate::history::{Alphabet, Percept, WorldAction, WorldHistory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StepPattern {
    pub action: Option<WorldAction>,
    pub percept: Option<Percept>,
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct SuffixPattern {
    steps: Vec<StepPattern>,
}

impl SuffixPattern {
    pub fn any() -> Self {
        Self::default()
    }

    pub fn new(steps: Vec<StepPattern>) -> Self {
        Self { steps }
    }

    pub fn last_percept(p: Percept) -> Self {
        Self {
            steps: vec![StepPattern {
                action: None,
                percept: Some(p),
            }],
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn matches(&self, h: &WorldHistory) -> bool {
        let n = self.steps.len();
        if h.len() < n {
            return false;
        }
        self.steps
            .iter()
            .zip(&h.steps()[h.len() - n..])
            .all(|(p, s)| {
                p.action.is_none_or(|a| a == s.action) && p.percept.is_none_or(|e| e == s.percept)
            })
    }

    pub fn parse(text: &str, actions: &Alphabet, percepts: &Alphabet) -> Result<Self> {
        let text = text.trim();
        if text == "*" || text.is_empty() {
            return Ok(Self::any());
        }
        let mut steps = Vec::new();
        for token in text.split_whitespace() {
            let (a, e) = token.split_once('/').ok_or_else(|| {
                LabError::Parse(format!("suffix step {token:?} is not action/percept"))
            })?;
            let action = match a {
                "_" => None,
                s => Some(WorldAction(actions.lookup(s)? as u16)),
            };
            let percept = match e {
                "_" => None,
                s => Some(Percept(percepts.lookup(s)? as u16)),
            };
            steps.push(StepPattern { action, percept });
        }
        Ok(Self { steps })
    }

    pub fn format(&self, actions: &Alphabet, percepts: &Alphabet) -> String {
        if self.steps.is_empty() {
            return "*".into();
        }
        self.steps
            .iter()
            .map(|s| {
                format!(
                    "{}/{}",
                    s.action
                        .and_then(|a| actions.symbol(a.index()))
                        .unwrap_or("_"),
                    s.percept
                        .and_then(|e| percepts.symbol(e.index()))
                        .unwrap_or("_")
                )
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Debug for SuffixPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .steps
            .iter()
            .map(|s| {
                let a = s.action.map_or("_".to_string(), |a| a.0.to_string());
                let e = s.percept.map_or("_".to_string(), |e| e.0.to_string());
                format!("{a}/{e}")
            })
            .collect();
        if parts.is_empty() {
            write!(f, "*")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}
