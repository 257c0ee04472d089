//! Actions, percepts and histories.
//!
//! A full history records, at every step, the world action, the name of the
//! policy (or utility) the agent installs for the next step, and the percept.
//! Its world projection drops the names.

use crate::error::{LabError, Result};

/// Index into the world-action alphabet of an environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldAction(pub u16);

/// Index into the percept alphabet of an environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Percept(pub u16);

/// Index of a name in a [`NameSpace`](crate::NameSpace).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NameId(pub u16);

impl WorldAction {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl Percept {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl NameId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A full action: a world action together with the modification target.
///
/// Not modifying is expressed by naming the currently active policy or
/// utility; the target is never absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action {
    pub world: WorldAction,
    pub target: NameId,
}

impl Action {
    pub fn new(world: WorldAction, target: NameId) -> Self {
        Self { world, target }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub action: Action,
    pub percept: Percept,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldStep {
    pub action: WorldAction,
    pub percept: Percept,
}

/// History `æ_{<t}` with modification records. The empty history is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct History {
    steps: Vec<Step>,
}

/// History without modification records.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldHistory {
    steps: Vec<WorldStep>,
}

impl History {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_steps(steps: Vec<Step>) -> Self {
        Self { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn last_action(&self) -> Option<Action> {
        self.steps.last().map(|s| s.action)
    }

    pub fn push(&mut self, action: Action, percept: Percept) {
        self.steps.push(Step { action, percept });
    }

    pub fn extended(&self, action: Action, percept: Percept) -> Self {
        let mut out = self.clone();
        out.push(action, percept);
        out
    }

    pub fn prefix(&self, len: usize) -> Self {
        Self {
            steps: self.steps[..len].to_vec(),
        }
    }

    pub fn world_projection(&self) -> WorldHistory {
        WorldHistory {
            steps: self
                .steps
                .iter()
                .map(|s| WorldStep {
                    action: s.action.world,
                    percept: s.percept,
                })
                .collect(),
        }
    }
}

/// Strips modification records from a history.
pub fn world_projection(h: &History) -> WorldHistory {
    h.world_projection()
}

impl WorldHistory {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_steps(steps: Vec<WorldStep>) -> Self {
        Self { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[WorldStep] {
        &self.steps
    }

    pub fn last(&self) -> Option<&WorldStep> {
        self.steps.last()
    }

    pub fn push(&mut self, action: WorldAction, percept: Percept) {
        self.steps.push(WorldStep { action, percept });
    }

    pub fn extended(&self, action: WorldAction, percept: Percept) -> Self {
        let mut out = self.clone();
        out.push(action, percept);
        out
    }

    pub fn prefix(&self, len: usize) -> Self {
        Self {
            steps: self.steps[..len].to_vec(),
        }
    }

    /// Lifts the world history to a full history whose step `i` names
    /// `names(i)`.
    pub fn decorate(&self, mut names: impl FnMut(usize) -> NameId) -> History {
        History {
            steps: self
                .steps
                .iter()
                .enumerate()
                .map(|(i, s)| Step {
                    action: Action::new(s.action, names(i)),
                    percept: s.percept,
                })
                .collect(),
        }
    }
}

/// Ordered set of symbols; the symbol order is the index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    kind: &'static str,
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new(kind: &'static str, symbols: Vec<String>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(LabError::InvalidEnvironment(format!(
                "empty {kind} alphabet"
            )));
        }
        if symbols.len() > u16::MAX as usize {
            return Err(LabError::InvalidEnvironment(format!(
                "{kind} alphabet too large"
            )));
        }
        for (i, s) in symbols.iter().enumerate() {
            if !is_symbol(s) {
                return Err(LabError::InvalidEnvironment(format!(
                    "bad {kind} symbol {s:?}"
                )));
            }
            if symbols[..i].contains(s) {
                return Err(LabError::InvalidEnvironment(format!(
                    "duplicate {kind} symbol {s:?}"
                )));
            }
        }
        Ok(Self { kind, symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, index: usize) -> Option<&str> {
        self.symbols.get(index).map(String::as_str)
    }

    pub fn lookup(&self, symbol: &str) -> Result<usize> {
        self.symbols
            .iter()
            .position(|s| s == symbol)
            .ok_or_else(|| LabError::UnknownSymbol {
                alphabet: self.kind.to_string(),
                symbol: symbol.to_string(),
            })
    }
}

/// Symbols are identifiers that cannot collide with the history syntax.
pub(crate) fn is_symbol(s: &str) -> bool {
    !s.is_empty()
        && !matches!(s, "ε" | "_" | "*")
        && s.chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '\'' | '*' | '.'))
}

/// Symbol tables needed to print, parse and validate histories.
#[derive(Debug, Clone, Copy)]
pub struct Vocabulary<'a> {
    pub actions: &'a Alphabet,
    pub percepts: &'a Alphabet,
    pub names: &'a [String],
}

const EMPTY: &str = "ε";

impl Vocabulary<'_> {
    pub fn format_action(&self, a: Action) -> String {
        format!(
            "{}[{}]",
            self.actions.symbol(a.world.index()).unwrap_or("?"),
            self.names
                .get(a.target.index())
                .map(String::as_str)
                .unwrap_or("?")
        )
    }

    /// Canonical form `a1[p2] e1 | a2[p3] e2`; the empty history prints as `ε`.
    pub fn format_history(&self, h: &History) -> String {
        if h.is_empty() {
            return EMPTY.to_string();
        }
        h.steps()
            .iter()
            .map(|s| {
                format!(
                    "{} {}",
                    self.format_action(s.action),
                    self.percepts.symbol(s.percept.index()).unwrap_or("?")
                )
            })
            .collect::<Vec<_>>()
            .join(" | ")
    }

    /// Canonical form `a1 e1 | a2 e2`.
    pub fn format_world(&self, h: &WorldHistory) -> String {
        if h.is_empty() {
            return EMPTY.to_string();
        }
        h.steps()
            .iter()
            .map(|s| {
                format!(
                    "{} {}",
                    self.actions.symbol(s.action.index()).unwrap_or("?"),
                    self.percepts.symbol(s.percept.index()).unwrap_or("?")
                )
            })
            .collect::<Vec<_>>()
            .join(" | ")
    }

    pub fn parse_action(&self, text: &str) -> Result<Action> {
        let text = text.trim();
        let (world, rest) = text
            .split_once('[')
            .ok_or_else(|| LabError::Parse(format!("action {text:?} lacks [name]")))?;
        let name = rest
            .strip_suffix(']')
            .ok_or_else(|| LabError::Parse(format!("action {text:?} lacks closing ]")))?;
        let world = self.actions.lookup(world)?;
        let target = self
            .names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| LabError::UnboundName(name.to_string()))?;
        Ok(Action::new(
            WorldAction(world as u16),
            NameId(target as u16),
        ))
    }

    pub fn parse_history(&self, text: &str) -> Result<History> {
        let text = text.trim();
        if text == EMPTY || text.is_empty() {
            return Ok(History::empty());
        }
        let mut h = History::empty();
        for (i, chunk) in text.split('|').enumerate() {
            let mut parts = chunk.split_whitespace();
            let (Some(action), Some(percept), None) = (parts.next(), parts.next(), parts.next())
            else {
                return Err(LabError::InvalidHistory {
                    step: i,
                    reason: format!("expected `action[name] percept`, got {:?}", chunk.trim()),
                });
            };
            let action = self
                .parse_action(action)
                .map_err(|e| LabError::InvalidHistory {
                    step: i,
                    reason: e.to_string(),
                })?;
            let percept = self
                .percepts
                .lookup(percept)
                .map_err(|e| LabError::InvalidHistory {
                    step: i,
                    reason: e.to_string(),
                })?;
            h.push(action, Percept(percept as u16));
        }
        Ok(h)
    }

    pub fn parse_world(&self, text: &str) -> Result<WorldHistory> {
        let text = text.trim();
        if text == EMPTY || text.is_empty() {
            return Ok(WorldHistory::empty());
        }
        let mut h = WorldHistory::empty();
        for (i, chunk) in text.split('|').enumerate() {
            let mut parts = chunk.split_whitespace();
            let (Some(action), Some(percept), None) = (parts.next(), parts.next(), parts.next())
            else {
                return Err(LabError::InvalidHistory {
                    step: i,
                    reason: format!("expected `action percept`, got {:?}", chunk.trim()),
                });
            };
            let a = self
                .actions
                .lookup(action)
                .map_err(|e| LabError::InvalidHistory {
                    step: i,
                    reason: e.to_string(),
                })?;
            let e = self
                .percepts
                .lookup(percept)
                .map_err(|e| LabError::InvalidHistory {
                    step: i,
                    reason: e.to_string(),
                })?;
            h.push(WorldAction(a as u16), Percept(e as u16));
        }
        Ok(h)
    }

    /// Ok iff every name in `h` is bound and every symbol is in its alphabet;
    /// otherwise reports the first offending step.
    pub fn validate_history(&self, h: &History) -> Result<()> {
        for (i, s) in h.steps().iter().enumerate() {
            if s.action.world.index() >= self.actions.len() {
                return Err(LabError::InvalidHistory {
                    step: i,
                    reason: format!(
                        "world action #{} not in the action alphabet",
                        s.action.world.0
                    ),
                });
            }
            if s.action.target.index() >= self.names.len() {
                return Err(LabError::InvalidHistory {
                    step: i,
                    reason: format!("name #{} is unbound", s.action.target.0),
                });
            }
            if s.percept.index() >= self.percepts.len() {
                return Err(LabError::InvalidHistory {
                    step: i,
                    reason: format!("percept #{} not in the percept alphabet", s.percept.0),
                });
            }
        }
        Ok(())
    }
}
