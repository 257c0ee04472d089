//! Modification-independent environments (the agent's belief `ρ`).

use crate::error::{LabError, Result};
use crate::history::{Alphabet, Percept, WorldAction, WorldHistory};
use crate::pattern::SuffixPattern;
use crate::scalar::Scalar;
use crate::utility::DiscountConfig;

/// Probability vector over the percept alphabet, indexed by percept.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<S> {
    weights: Vec<S>,
}

impl<S: Scalar> Distribution<S> {
    /// Checks every weight lies in `[0,1]` and the total is within `1e-12`
    /// of one.
    pub fn new(weights: Vec<S>) -> Result<Self> {
        if weights.is_empty() {
            return Err(LabError::InvalidEnvironment("empty distribution".into()));
        }
        let mut total = S::zero();
        for w in &weights {
            if *w < S::zero() || *w > S::one() {
                return Err(LabError::InvalidEnvironment(format!(
                    "weight {} outside [0,1]",
                    w.render()
                )));
            }
            total = total + w.clone();
        }
        if total.abs_diff_f64(&S::one()) > 1e-12 {
            return Err(LabError::InvalidEnvironment(format!(
                "weights sum to {}, not 1",
                total.render()
            )));
        }
        Ok(Self { weights })
    }

    /// Point mass on `p` over an alphabet of `n` percepts.
    pub fn point(p: Percept, n: usize) -> Self {
        let weights = (0..n)
            .map(|i| if i == p.index() { S::one() } else { S::zero() })
            .collect();
        Self { weights }
    }

    pub fn weight(&self, p: Percept) -> S {
        self.weights.get(p.index()).cloned().unwrap_or_else(S::zero)
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    /// Percepts with positive probability, in percept order.
    pub fn support(&self) -> impl Iterator<Item = (Percept, &S)> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > S::zero())
            .map(|(i, w)| (Percept(i as u16), w))
    }

    pub fn is_full_support(&self) -> bool {
        self.weights.iter().all(|w| *w > S::zero())
    }
}

/// One table record: the percept distribution after `action` (any action
/// when `None`) on histories ending in `suffix`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule<S> {
    pub suffix: SuffixPattern,
    pub action: Option<WorldAction>,
    pub dist: Distribution<S>,
}

/// Belief `ρ(e | ĥ, â)`. The distribution is keyed on the world history
/// only, so the environment is modification-independent by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment<S> {
    name: String,
    actions: Alphabet,
    percepts: Alphabet,
    rewards: Vec<S>,
    rules: Vec<Rule<S>>,
    full_support: bool,
    utilities: Vec<String>,
    description: String,
}

impl<S: Scalar> Environment<S> {
    /// Validates the table: every distribution has one weight per percept,
    /// every action has a rule with the empty suffix (so lookup is total),
    /// and a declared `full_support` flag holds for every rule.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        actions: Alphabet,
        percepts: Alphabet,
        rewards: Vec<S>,
        rules: Vec<Rule<S>>,
        full_support: bool,
        utilities: Vec<String>,
        description: impl Into<String>,
    ) -> Result<Self> {
        let name = name.into();
        if rewards.len() != percepts.len() {
            return Err(LabError::InvalidEnvironment(format!(
                "{name}: {} rewards for {} percepts",
                rewards.len(),
                percepts.len()
            )));
        }
        for r in &rewards {
            if *r < S::zero() || *r > S::one() {
                return Err(LabError::InvalidEnvironment(format!(
                    "{name}: reward {} outside [0,1]",
                    r.render()
                )));
            }
        }
        for rule in &rules {
            if rule.dist.weights().len() != percepts.len() {
                return Err(LabError::InvalidEnvironment(format!(
                    "{name}: distribution over {} percepts, alphabet has {}",
                    rule.dist.weights().len(),
                    percepts.len()
                )));
            }
            if rule.action.is_some_and(|a| a.index() >= actions.len()) {
                return Err(LabError::InvalidEnvironment(format!(
                    "{name}: rule for unknown action"
                )));
            }
            if full_support && !rule.dist.is_full_support() {
                return Err(LabError::InvalidEnvironment(format!(
                    "{name}: declared full support but rule {:?} has a zero weight",
                    rule.suffix.format(&actions, &percepts)
                )));
            }
        }
        for a in 0..actions.len() {
            let covered = rules
                .iter()
                .any(|r| r.suffix.is_empty() && r.action.is_none_or(|x| x.index() == a));
            if !covered {
                return Err(LabError::InvalidEnvironment(format!(
                    "{name}: action {} has no rule with suffix *",
                    actions.symbol(a).unwrap_or("?")
                )));
            }
        }
        Ok(Self {
            name,
            actions,
            percepts,
            rewards,
            rules,
            full_support,
            utilities,
            description: description.into(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn actions(&self) -> &Alphabet {
        &self.actions
    }

    pub fn percepts(&self) -> &Alphabet {
        &self.percepts
    }

    pub fn world_actions(&self) -> impl Iterator<Item = WorldAction> {
        (0..self.actions.len() as u16).map(WorldAction)
    }

    pub fn rewards(&self) -> &[S] {
        &self.rewards
    }

    pub fn rules(&self) -> &[Rule<S>] {
        &self.rules
    }

    pub fn full_support(&self) -> bool {
        self.full_support
    }

    /// Utility names forming the default utility-modification name space.
    pub fn default_utilities(&self) -> &[String] {
        &self.utilities
    }

    /// `ρ(· | ĥ, â)`: the most specific matching rule (longest suffix, then
    /// action-specific over wildcard, then first declared).
    pub fn distribution(&self, h: &WorldHistory, a: WorldAction) -> Result<&Distribution<S>> {
        if a.index() >= self.actions.len() {
            return Err(LabError::UnknownSymbol {
                alphabet: "action".into(),
                symbol: format!("#{}", a.0),
            });
        }
        let mut best: Option<(usize, bool, &Rule<S>)> = None;
        for rule in &self.rules {
            if rule.action.is_some_and(|x| x != a) || !rule.suffix.matches(h) {
                continue;
            }
            let key = (rule.suffix.len(), rule.action.is_some());
            if best.is_none_or(|(len, specific, _)| key > (len, specific)) {
                best = Some((key.0, key.1, rule));
            }
        }
        // `new` guarantees a `*` rule for every action
        Ok(&best.expect("total rule table").2.dist)
    }

    /// Rejects environments without full support, for checks that need a
    /// belief in `Δ̄E`.
    pub fn require_full_support(&self) -> Result<()> {
        if self.full_support {
            Ok(())
        } else {
            Err(LabError::InvalidEnvironment(format!(
                "{} lacks full support",
                self.name
            )))
        }
    }

    /// All world histories of length `len` with positive probability under
    /// some action sequence, in lexicographic order.
    pub fn reachable(&self, len: usize) -> Vec<WorldHistory> {
        let mut layer = vec![WorldHistory::empty()];
        for _ in 0..len {
            let mut next = Vec::new();
            for h in &layer {
                for a in self.world_actions() {
                    let dist = self.distribution(h, a).expect("valid action");
                    for (e, _) in dist.support() {
                        next.push(h.extended(a, e));
                    }
                }
            }
            layer = next;
        }
        layer
    }

    /// Reachable world histories of every length below `horizon`.
    pub fn reachable_below(&self, horizon: usize) -> Vec<WorldHistory> {
        (0..horizon).flat_map(|d| self.reachable(d)).collect()
    }

    /// Deterministic description used in fingerprints.
    pub fn canonical(&self) -> String {
        let rules: Vec<String> = self
            .rules
            .iter()
            .map(|r| {
                let w: Vec<String> = r.dist.weights().iter().map(Scalar::render).collect();
                format!(
                    "{}|{}|{}",
                    r.suffix.format(&self.actions, &self.percepts),
                    r.action
                        .and_then(|a| self.actions.symbol(a.index()))
                        .unwrap_or("*"),
                    w.join(",")
                )
            })
            .collect();
        let rewards: Vec<String> = self.rewards.iter().map(Scalar::render).collect();
        format!(
            "{};{:?};{:?};{:?};{};{}",
            self.name,
            self.actions.symbols(),
            self.percepts.symbols(),
            rewards,
            self.full_support,
            rules.join(";")
        )
    }
}

/// `ρ(· | ĥ, â)` with the horizon precondition `|ĥ| < H` enforced.
pub fn percept_distribution<'e, S: Scalar>(
    env: &'e Environment<S>,
    h: &WorldHistory,
    a: WorldAction,
    cfg: &DiscountConfig<S>,
) -> Result<&'e Distribution<S>> {
    if h.len() >= cfg.horizon() {
        return Err(LabError::HorizonExceeded {
            len: h.len(),
            horizon: cfg.horizon(),
        });
    }
    env.distribution(h, a)
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;

    type Q = BigRational;

    fn alph(kind: &'static str, s: &[&str]) -> Alphabet {
        Alphabet::new(kind, s.iter().map(|x| x.to_string()).collect()).unwrap()
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(vec![Q::from_ratio(1, 2), Q::from_ratio(1, 2)]).is_ok());
        assert!(Distribution::new(vec![Q::from_ratio(1, 2), Q::from_ratio(1, 3)]).is_err());
        assert!(Distribution::new(vec![Q::from_ratio(3, 2), Q::from_ratio(-1, 2)]).is_err());
        assert!(Distribution::<Q>::new(vec![]).is_err());
        assert!(Distribution::new(vec![0.9f64, 0.1]).is_ok());
    }

    #[test]
    fn most_specific_rule_wins() {
        let actions = alph("action", &["x", "y"]);
        let percepts = alph("percept", &["lo", "hi"]);
        let half = Distribution::new(vec![Q::from_ratio(1, 2), Q::from_ratio(1, 2)]).unwrap();
        let rules = vec![
            Rule {
                suffix: SuffixPattern::any(),
                action: None,
                dist: Distribution::point(Percept(0), 2),
            },
            Rule {
                suffix: SuffixPattern::any(),
                action: Some(WorldAction(1)),
                dist: Distribution::point(Percept(1), 2),
            },
            Rule {
                suffix: SuffixPattern::parse("_/hi", &actions, &percepts).unwrap(),
                action: None,
                dist: half.clone(),
            },
        ];
        let env = Environment::new(
            "t",
            actions,
            percepts,
            vec![Q::from_ratio(0, 1), Q::from_ratio(1, 1)],
            rules,
            false,
            vec![],
            "",
        )
        .unwrap();
        let e = WorldHistory::empty();
        assert_eq!(
            env.distribution(&e, WorldAction(0))
                .unwrap()
                .weight(Percept(0)),
            Q::from_ratio(1, 1)
        );
        assert_eq!(
            env.distribution(&e, WorldAction(1))
                .unwrap()
                .weight(Percept(1)),
            Q::from_ratio(1, 1)
        );
        let h = e.extended(WorldAction(1), Percept(1));
        assert_eq!(env.distribution(&h, WorldAction(1)).unwrap(), &half);
        assert!(env.distribution(&h, WorldAction(7)).is_err());
        assert!(env.require_full_support().is_err());
    }

    #[test]
    fn uncovered_action_rejected() {
        let rules = vec![Rule {
            suffix: SuffixPattern::any(),
            action: Some(WorldAction(0)),
            dist: Distribution::<Q>::point(Percept(0), 1),
        }];
        let err = Environment::new(
            "t",
            alph("action", &["x", "y"]),
            alph("percept", &["lo"]),
            vec![Q::from_ratio(0, 1)],
            rules,
            false,
            vec![],
            "",
        );
        assert!(err.is_err());
    }
}
