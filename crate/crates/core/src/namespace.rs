//! Finite name spaces: the interpreter from names to policies or utilities.

use std::sync::Arc;

use crate::environment::Environment;
use crate::error::{LabError, Result};
use crate::history::{Action, NameId, Vocabulary};
use crate::policy::PolicyTable;
use crate::scalar::Scalar;
use crate::utility::UtilityFunction;

/// Which kind of object the second action component names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModMode {
    Policy,
    Utility,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Binding<S> {
    Policy(Arc<PolicyTable>),
    Utility(Arc<UtilityFunction<S>>),
}

/// Finite, non-empty map from names to policies (policy mode) or utilities
/// (utility mode). Name ids index `names()` in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct NameSpace<S> {
    mode: ModMode,
    names: Vec<String>,
    bindings: Vec<Binding<S>>,
    counter: usize,
}

impl<S: Scalar> NameSpace<S> {
    /// Policies may only target names of this space.
    pub fn with_policies(entries: Vec<(String, PolicyTable)>) -> Result<Self> {
        let mut ns = Self {
            mode: ModMode::Policy,
            names: vec![],
            bindings: vec![],
            counter: 0,
        };
        for (name, p) in entries {
            ns.bind(name, Binding::Policy(Arc::new(p)))?;
        }
        ns.check_non_empty()?;
        for (i, b) in ns.bindings.iter().enumerate() {
            if let Binding::Policy(p) = b {
                check_targets(p, ns.names.len(), &ns.names[i])?;
            }
        }
        Ok(ns)
    }

    /// Names are the utility labels.
    pub fn with_utilities(utilities: Vec<UtilityFunction<S>>) -> Result<Self> {
        let mut ns = Self {
            mode: ModMode::Utility,
            names: vec![],
            bindings: vec![],
            counter: 0,
        };
        for u in utilities {
            ns.bind(u.label().to_string(), Binding::Utility(Arc::new(u)))?;
        }
        ns.check_non_empty()?;
        Ok(ns)
    }

    fn bind(&mut self, name: String, binding: Binding<S>) -> Result<()> {
        if self.names.contains(&name) {
            return Err(LabError::Config(format!("name {name:?} bound twice")));
        }
        if self.names.len() >= u16::MAX as usize {
            return Err(LabError::Config("too many names".into()));
        }
        self.names.push(name);
        self.bindings.push(binding);
        Ok(())
    }

    fn check_non_empty(&self) -> Result<()> {
        if self.names.is_empty() {
            Err(LabError::Config("name space is empty".into()))
        } else {
            Ok(())
        }
    }

    pub fn mode(&self) -> ModMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn ids(&self) -> impl Iterator<Item = NameId> {
        (0..self.names.len() as u16).map(NameId)
    }

    pub fn name(&self, id: NameId) -> Result<&str> {
        self.names
            .get(id.index())
            .map(String::as_str)
            .ok_or_else(|| LabError::UnboundName(format!("#{}", id.0)))
    }

    pub fn lookup(&self, name: &str) -> Result<NameId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| NameId(i as u16))
            .ok_or_else(|| LabError::UnboundName(name.to_string()))
    }

    pub fn binding(&self, id: NameId) -> Result<&Binding<S>> {
        self.bindings
            .get(id.index())
            .ok_or_else(|| LabError::UnboundName(format!("#{}", id.0)))
    }

    pub fn policy(&self, id: NameId) -> Result<&Arc<PolicyTable>> {
        match self.binding(id)? {
            Binding::Policy(p) => Ok(p),
            Binding::Utility(_) => Err(LabError::ModeMismatch(format!(
                "name {:?} is a utility, not a policy",
                self.names[id.index()]
            ))),
        }
    }

    pub fn utility(&self, id: NameId) -> Result<&Arc<UtilityFunction<S>>> {
        match self.binding(id)? {
            Binding::Utility(u) => Ok(u),
            Binding::Policy(_) => Err(LabError::ModeMismatch(format!(
                "name {:?} is a policy, not a utility",
                self.names[id.index()]
            ))),
        }
    }

    /// True when every bound policy ignores modification records. Utility
    /// name spaces always qualify.
    pub fn all_mod_independent(&self) -> bool {
        self.bindings.iter().all(|b| match b {
            Binding::Policy(p) => p.is_mod_independent(),
            Binding::Utility(_) => true,
        })
    }

    /// Name of the first bound policy equal to `p`, if any.
    pub fn find_policy(&self, p: &PolicyTable) -> Option<NameId> {
        self.bindings
            .iter()
            .position(|b| matches!(b, Binding::Policy(q) if q.as_ref() == p))
            .map(|i| NameId(i as u16))
    }

    pub fn vocabulary<'a>(&'a self, env: &'a Environment<S>) -> Vocabulary<'a> {
        Vocabulary {
            actions: env.actions(),
            percepts: env.percepts(),
            names: &self.names,
        }
    }

    /// `ι′ ⊇ ι` with a fresh name bound to `p`.
    ///
    /// Fresh names are `p*1`, `p*2`, ... from a counter that never reuses a
    /// value, so extending twice with the same table gives two names.
    pub fn extend(&self, p: PolicyTable) -> Result<(Self, NameId)> {
        if self.mode != ModMode::Policy {
            return Err(LabError::ModeMismatch(
                "cannot bind a policy in a utility name space".into(),
            ));
        }
        let mut next = self.clone();
        let name = loop {
            next.counter += 1;
            let candidate = format!("p*{}", next.counter);
            if !next.names.contains(&candidate) {
                break candidate;
            }
        };
        check_targets(&p, next.names.len() + 1, &name)?;
        next.bind(name, Binding::Policy(Arc::new(p)))?;
        let id = NameId(next.names.len() as u16 - 1);
        Ok((next, id))
    }

    /// Deterministic description used in fingerprints.
    pub fn canonical(&self) -> String {
        let parts: Vec<String> = self
            .names
            .iter()
            .zip(&self.bindings)
            .map(|(n, b)| match b {
                Binding::Policy(p) => format!("{n}:policy({})", p.canonical()),
                Binding::Utility(u) => format!("{n}:utility({})", u.canonical()),
            })
            .collect();
        format!("{:?}[{}]", self.mode, parts.join(";"))
    }
}

fn check_targets(p: &PolicyTable, bound: usize, name: &str) -> Result<()> {
    let bad = p.actions().find(|a: &Action| a.target.index() >= bound);
    match bad {
        Some(a) => Err(LabError::UnboundName(format!(
            "policy {name:?} targets unbound name #{}",
            a.target.0
        ))),
        None => Ok(()),
    }
}

/// Free-function form of [`NameSpace::extend`].
pub fn extend_namespace<S: Scalar>(
    ns: &NameSpace<S>,
    p: PolicyTable,
) -> Result<(NameSpace<S>, NameId)> {
    ns.extend(p)
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;
    use crate::history::WorldAction;
    use crate::utility::constant_one_utility;

    type Q = BigRational;

    fn act(w: u16, n: u16) -> Action {
        Action::new(WorldAction(w), NameId(n))
    }

    fn two() -> NameSpace<Q> {
        NameSpace::with_policies(vec![
            ("p0".into(), PolicyTable::constant("p0", act(0, 0))),
            ("p1".into(), PolicyTable::constant("p1", act(1, 0))),
        ])
        .unwrap()
    }

    #[test]
    fn extension_keeps_old_bindings() {
        let ns = two();
        let (ext, id) = ns.extend(PolicyTable::constant("star", act(1, 2))).unwrap();
        assert_eq!(ext.len(), 3);
        assert_eq!(id, NameId(2));
        for n in ns.ids() {
            assert_eq!(ns.policy(n).unwrap(), ext.policy(n).unwrap());
            assert_eq!(ns.name(n).unwrap(), ext.name(n).unwrap());
        }
    }

    #[test]
    fn double_extension_gives_fresh_names() {
        let p = PolicyTable::constant("star", act(1, 0));
        let (a, x) = two().extend(p.clone()).unwrap();
        let (b, y) = a.extend(p).unwrap();
        assert_ne!(b.name(x).unwrap(), b.name(y).unwrap());
        assert_eq!(b.policy(x).unwrap(), b.policy(y).unwrap());
    }

    #[test]
    fn extension_rejects_dangling_targets() {
        assert!(two()
            .extend(PolicyTable::constant("bad", act(0, 7)))
            .is_err());
        // a self-reference to the fresh name is fine
        assert!(two().extend(PolicyTable::constant("ok", act(0, 2))).is_ok());
    }

    #[test]
    fn construction_checks() {
        assert!(NameSpace::<Q>::with_policies(vec![]).is_err());
        assert!(NameSpace::<Q>::with_policies(vec![(
            "p".into(),
            PolicyTable::constant("p", act(0, 1))
        )])
        .is_err());
        let ns =
            NameSpace::<Q>::with_utilities(vec![UtilityFunction::zero(), constant_one_utility()])
                .unwrap();
        assert_eq!(ns.lookup("one").unwrap(), NameId(1));
        assert!(ns.policy(NameId(0)).is_err());
        assert!(ns.extend(PolicyTable::new("x")).is_err());
        assert!(ns.lookup("nosuch").is_err());
    }
}
