//! Explicit finite-horizon policy tables.

use std::collections::HashMap;

use crate::history::{Action, History, WorldAction, WorldHistory};

/// Deterministic policy `π : H → A` given by explicit entries.
///
/// Lookup order is: full-history entries, world-history entries, fallback.
/// A table without full-history entries is modification-independent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicyTable {
    label: String,
    world: HashMap<WorldHistory, Action>,
    full: HashMap<History, Action>,
    fallback: Option<Action>,
}

impl PolicyTable {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            world: HashMap::new(),
            full: HashMap::new(),
            fallback: None,
        }
    }

    /// The policy that plays `action` after every history.
    pub fn constant(label: impl Into<String>, action: Action) -> Self {
        Self::new(label).with_fallback(action)
    }

    /// Non-modifying wrapper `π(h) = (π̂(ĥ), name)` of a world policy.
    pub fn from_world_policy(
        label: impl Into<String>,
        world: &WorldPolicyTable,
        name: crate::history::NameId,
    ) -> Self {
        let mut out = Self::new(label).with_fallback(Action::new(world.fallback, name));
        for (h, a) in &world.table {
            out.world.insert(h.clone(), Action::new(*a, name));
        }
        out
    }

    pub fn with_fallback(mut self, action: Action) -> Self {
        self.fallback = Some(action);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn fallback(&self) -> Option<Action> {
        self.fallback
    }

    pub fn insert_world(&mut self, h: WorldHistory, a: Action) {
        self.world.insert(h, a);
    }

    /// Adds an entry keyed on the full history; makes the table
    /// modification-dependent.
    pub fn insert_full(&mut self, h: History, a: Action) {
        self.full.insert(h, a);
    }

    pub fn decide(&self, h: &History) -> Option<Action> {
        if !self.full.is_empty() {
            if let Some(a) = self.full.get(h) {
                return Some(*a);
            }
        }
        self.world
            .get(&h.world_projection())
            .copied()
            .or(self.fallback)
    }

    pub fn decide_world(&self, h: &WorldHistory) -> Option<Action> {
        self.world.get(h).copied().or(self.fallback)
    }

    pub fn is_mod_independent(&self) -> bool {
        self.full.is_empty()
    }

    pub fn world_entries(&self) -> impl Iterator<Item = (&WorldHistory, &Action)> {
        self.world.iter()
    }

    pub fn full_entries(&self) -> impl Iterator<Item = (&History, &Action)> {
        self.full.iter()
    }

    /// Every action the table can output.
    pub fn actions(&self) -> impl Iterator<Item = Action> + '_ {
        self.world
            .values()
            .chain(self.full.values())
            .copied()
            .chain(self.fallback)
    }

    /// Deterministic description used in fingerprints.
    pub fn canonical(&self) -> String {
        let mut world: Vec<_> = self.world.iter().collect();
        world.sort();
        let mut full: Vec<_> = self.full.iter().collect();
        full.sort();
        format!("{}|{:?}|{:?}|{:?}", self.label, world, full, self.fallback)
    }
}

/// Policy over world histories `π̂ : (Â × E)* → Â`, as in the standard model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldPolicyTable {
    pub table: HashMap<WorldHistory, WorldAction>,
    pub fallback: WorldAction,
}

impl WorldPolicyTable {
    pub fn new(fallback: WorldAction) -> Self {
        Self {
            table: HashMap::new(),
            fallback,
        }
    }

    pub fn decide(&self, h: &WorldHistory) -> WorldAction {
        self.table.get(h).copied().unwrap_or(self.fallback)
    }

    pub fn insert(&mut self, h: WorldHistory, a: WorldAction) {
        self.table.insert(h, a);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::{NameId, Percept};

    fn act(w: u16, n: u16) -> Action {
        Action::new(WorldAction(w), NameId(n))
    }

    #[test]
    fn lookup_order() {
        let mut p = PolicyTable::constant("p", act(0, 0));
        let w = WorldHistory::empty().extended(WorldAction(1), Percept(0));
        p.insert_world(w.clone(), act(1, 0));
        assert!(p.is_mod_independent());
        let h0 = w.decorate(|_| NameId(0));
        let h1 = w.decorate(|_| NameId(1));
        assert_eq!(p.decide(&h0), Some(act(1, 0)));
        assert_eq!(p.decide(&h1), Some(act(1, 0)));
        assert_eq!(p.decide(&History::empty()), Some(act(0, 0)));

        p.insert_full(h1.clone(), act(0, 1));
        assert!(!p.is_mod_independent());
        assert_eq!(p.decide(&h0), Some(act(1, 0)));
        assert_eq!(p.decide(&h1), Some(act(0, 1)));
    }

    #[test]
    fn undefined_without_fallback() {
        let p = PolicyTable::new("partial");
        assert_eq!(p.decide(&History::empty()), None);
    }

    #[test]
    fn world_wrapper_never_modifies() {
        let mut w = WorldPolicyTable::new(WorldAction(0));
        w.insert(WorldHistory::empty(), WorldAction(1));
        let p = PolicyTable::from_world_policy("p*", &w, NameId(3));
        assert!(p.actions().all(|a| a.target == NameId(3)));
        assert_eq!(p.decide(&History::empty()), Some(act(1, 3)));
    }
}
