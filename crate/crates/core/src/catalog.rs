//! Declarative environment and utility catalogs.
//!
//! Catalogs are TOML documents. Each `[[environment]]` lists its alphabets,
//! per-percept rewards and one `[[environment.rule]]` record per
//! (history suffix, action) pair with the percept weights. Each
//! `[[utility]]` is a suffix table with a default value. Weights and values
//! are strings holding `p/q` fractions or decimals (plain TOML numbers are
//! accepted too) so they load exactly.

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::BigRational;
use serde::Deserialize;

use crate::environment::{Distribution, Environment, Rule};
use crate::error::{LabError, Result};
use crate::history::{Alphabet, WorldAction};
use crate::pattern::SuffixPattern;
use crate::scalar::{parse_rational, rational_in_unit, Scalar};
use crate::utility::{constant_one_utility, UtilityFunction};

const BUILTIN: &str = include_str!("catalog.toml");

/// Utility constructors available for every environment.
pub const BUILTIN_UTILITIES: &[(&str, &str)] = &[
    (
        "reward",
        "reward carried by the last percept (0 on the empty history)",
    ),
    ("one", "constant 1: the delusion target"),
    ("zero", "constant 0"),
    (
        "reward_twin",
        "same values as reward under a distinct label",
    ),
];

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Number {
    Text(String),
    Int(i64),
    Float(f64),
}

impl Number {
    fn rational(&self) -> Result<BigRational> {
        match self {
            Number::Text(s) => parse_rational(s),
            Number::Int(i) => parse_rational(&i.to_string()),
            Number::Float(f) => parse_rational(&format!("{f}")),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleSpec {
    #[serde(default = "any_suffix")]
    suffix: String,
    #[serde(default = "any_suffix")]
    action: String,
    weights: BTreeMap<String, Number>,
}

fn any_suffix() -> String {
    "*".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvSpec {
    name: String,
    #[serde(default)]
    description: String,
    actions: Vec<String>,
    percepts: Vec<String>,
    #[serde(default)]
    rewards: Vec<Number>,
    #[serde(default)]
    full_support: bool,
    #[serde(default)]
    utilities: Vec<String>,
    #[serde(default, rename = "rule")]
    rules: Vec<RuleSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct UtilityRuleSpec {
    suffix: String,
    value: Number,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct UtilitySpec {
    name: String,
    #[serde(default)]
    description: String,
    default: Number,
    #[serde(default, rename = "rule")]
    rules: Vec<UtilityRuleSpec>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Catalog {
    #[serde(default, rename = "environment")]
    environments: Vec<EnvSpec>,
    #[serde(default, rename = "utility")]
    utilities: Vec<UtilitySpec>,
}

impl Catalog {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("built-in catalog is valid")
    }

    /// Parses and validates a catalog; every environment must build with
    /// normalized rows.
    pub fn parse(text: &str) -> Result<Self> {
        let catalog: Catalog =
            toml::from_str(text).map_err(|e| LabError::Parse(format!("catalog: {e}")))?;
        for spec in &catalog.environments {
            catalog.build_env::<BigRational>(spec)?;
        }
        for (i, u) in catalog.utilities.iter().enumerate() {
            if catalog.utilities[..i].iter().any(|v| v.name == u.name) {
                return Err(LabError::Parse(format!("duplicate utility {:?}", u.name)));
            }
        }
        Ok(catalog)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn environment_names(&self) -> Vec<&str> {
        self.environments.iter().map(|e| e.name.as_str()).collect()
    }

    pub fn custom_utility_names(&self) -> Vec<(&str, &str)> {
        self.utilities
            .iter()
            .map(|u| (u.name.as_str(), u.description.as_str()))
            .collect()
    }

    pub fn environment<S: Scalar>(&self, name: &str) -> Result<Environment<S>> {
        let spec = self
            .environments
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| LabError::UnknownEnvironment(name.to_string()))?;
        self.build_env(spec)
    }

    /// The first environment of the catalog (for single-environment files).
    pub fn first_environment<S: Scalar>(&self) -> Result<Environment<S>> {
        let spec = self
            .environments
            .first()
            .ok_or_else(|| LabError::Parse("catalog has no environment".into()))?;
        self.build_env(spec)
    }

    /// Looks up a catalog utility first, then the built-in constructors.
    pub fn utility<S: Scalar>(
        &self,
        name: &str,
        env: &Environment<S>,
    ) -> Result<UtilityFunction<S>> {
        if let Some(spec) = self.utilities.iter().find(|u| u.name == name) {
            let mut rules = Vec::new();
            for r in &spec.rules {
                let pattern = SuffixPattern::parse(&r.suffix, env.actions(), env.percepts())?;
                rules.push((pattern, S::from_rational(&unit(&r.value)?)));
            }
            return UtilityFunction::from_rules(
                name,
                rules,
                S::from_rational(&unit(&spec.default)?),
            );
        }
        builtin_utility(name, env)
    }

    fn build_env<S: Scalar>(&self, spec: &EnvSpec) -> Result<Environment<S>> {
        let err = |m: String| LabError::InvalidEnvironment(format!("{}: {m}", spec.name));
        let actions = Alphabet::new("action", spec.actions.clone())?;
        let percepts = Alphabet::new("percept", spec.percepts.clone())?;
        let rewards = if spec.rewards.is_empty() {
            vec![S::zero(); percepts.len()]
        } else {
            spec.rewards
                .iter()
                .map(|r| unit(r).map(|q| S::from_rational(&q)))
                .collect::<Result<Vec<_>>>()?
        };
        let mut rules = Vec::new();
        for r in &spec.rules {
            let suffix = SuffixPattern::parse(&r.suffix, &actions, &percepts)?;
            let action = match r.action.as_str() {
                "*" => None,
                a => Some(WorldAction(actions.lookup(a)? as u16)),
            };
            let mut exact = vec![BigRational::from_integer(0.into()); percepts.len()];
            for (p, w) in &r.weights {
                let idx = percepts.lookup(p)?;
                exact[idx] = w.rational()?;
            }
            let total: BigRational = exact.iter().sum();
            if !exact.iter().all(rational_in_unit) || total != BigRational::from_integer(1.into()) {
                return Err(err(format!(
                    "row ({}, {}) is not a probability vector (sums to {total})",
                    r.suffix, r.action
                )));
            }
            let dist = Distribution::new(exact.iter().map(S::from_rational).collect())?;
            rules.push(Rule {
                suffix,
                action,
                dist,
            });
        }
        Environment::new(
            spec.name.clone(),
            actions,
            percepts,
            rewards,
            rules,
            spec.full_support,
            spec.utilities.clone(),
            spec.description.clone(),
        )
    }
}

fn unit(n: &Number) -> Result<BigRational> {
    let q = n.rational()?;
    if rational_in_unit(&q) {
        Ok(q)
    } else {
        Err(LabError::UtilityRange(q.to_string()))
    }
}

/// Built-in environment from the published catalog
/// (`TwoButton`, `NoisyButton`, `DelusionButton`, `ChessToy`).
pub fn builtin_environment<S: Scalar>(name: &str) -> Result<Environment<S>> {
    Catalog::builtin().environment(name)
}

pub fn builtin_utility<S: Scalar>(name: &str, env: &Environment<S>) -> Result<UtilityFunction<S>> {
    match name {
        "reward" => UtilityFunction::reward("reward", env.rewards()),
        "reward_twin" => UtilityFunction::reward("reward_twin", env.rewards()),
        "one" => Ok(constant_one_utility()),
        "zero" => Ok(UtilityFunction::zero()),
        other => Err(LabError::UnknownUtility(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::{Percept, WorldHistory};

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    #[test]
    fn catalog_has_four_entries() {
        assert_eq!(
            Catalog::builtin().environment_names(),
            vec!["TwoButton", "NoisyButton", "DelusionButton", "ChessToy"]
        );
    }

    #[test]
    fn two_button_shape() {
        let env: Environment<Q> = builtin_environment("TwoButton").unwrap();
        assert_eq!(env.actions().len(), 2);
        assert_eq!(env.percepts().len(), 2);
        assert!(!env.full_support());
        for rule in env.rules() {
            assert_eq!(rule.dist.support().count(), 1);
        }
    }

    #[test]
    fn noisy_button_full_support() {
        let env: Environment<Q> = builtin_environment("NoisyButton").unwrap();
        assert!(env.full_support());
        assert!(env.require_full_support().is_ok());
    }

    #[test]
    fn unknown_environment() {
        assert_eq!(
            builtin_environment::<Q>("nosuch").unwrap_err(),
            LabError::UnknownEnvironment("nosuch".into())
        );
    }

    #[test]
    fn two_button_fixture_table() {
        let env: Environment<Q> = builtin_environment("TwoButton").unwrap();
        let safe = WorldAction(env.actions().lookup("a_safe").unwrap() as u16);
        let hack = WorldAction(env.actions().lookup("a_hack").unwrap() as u16);
        let good = Percept(env.percepts().lookup("e_good").unwrap() as u16);
        let bad = Percept(env.percepts().lookup("e_bad").unwrap() as u16);
        let d = env.distribution(&WorldHistory::empty(), safe).unwrap();
        assert_eq!(d.weight(good), q(1, 1));
        assert_eq!(d.weight(bad), q(0, 1));
        let d = env.distribution(&WorldHistory::empty(), hack).unwrap();
        assert_eq!(d.weight(bad), q(1, 1));
    }

    #[test]
    fn noisy_button_fixture_table() {
        let env: Environment<Q> = builtin_environment("NoisyButton").unwrap();
        let safe = WorldAction(env.actions().lookup("a_safe").unwrap() as u16);
        let good = Percept(env.percepts().lookup("e_good").unwrap() as u16);
        let bad = Percept(env.percepts().lookup("e_bad").unwrap() as u16);
        for h in env.reachable(2) {
            let d = env.distribution(&h, safe).unwrap();
            assert_eq!(d.weight(good), q(9, 10));
            assert_eq!(d.weight(bad), q(1, 10));
            assert_eq!(d.weight(good) + d.weight(bad), q(1, 1));
        }
    }

    #[test]
    fn rejects_unnormalized_rows() {
        let text = r#"
            [[environment]]
            name = "Bad"
            actions = ["x"]
            percepts = ["lo", "hi"]
            [[environment.rule]]
            action = "x"
            weights = { lo = "1/2", hi = "1/3" }
        "#;
        assert!(matches!(
            Catalog::parse(text),
            Err(LabError::InvalidEnvironment(_))
        ));
    }

    #[test]
    fn float_weights_load_exactly() {
        let text = r#"
            [[environment]]
            name = "F"
            actions = ["x"]
            percepts = ["lo", "hi"]
            rewards = [0, 1]
            [[environment.rule]]
            weights = { lo = 0.1, hi = 0.9 }

            [[utility]]
            name = "hi_only"
            default = "0"
            [[utility.rule]]
            suffix = "_/hi"
            value = "1"
        "#;
        let cat = Catalog::parse(text).unwrap();
        let env: Environment<Q> = cat.environment("F").unwrap();
        let d = env
            .distribution(&WorldHistory::empty(), WorldAction(0))
            .unwrap();
        assert_eq!(d.weight(Percept(1)), q(9, 10));
        let u = cat.utility("hi_only", &env).unwrap();
        assert_eq!(
            u.eval(&WorldHistory::empty().extended(WorldAction(0), Percept(1))),
            q(1, 1)
        );
        assert_eq!(u.eval(&WorldHistory::empty()), q(0, 1));
        assert!(cat.utility("one", &env).unwrap().is_constant_one());
        assert!(cat.utility("nope", &env).is_err());
    }

    #[test]
    fn builtin_utilities_listed() {
        let names: Vec<_> = BUILTIN_UTILITIES.iter().map(|(n, _)| *n).collect();
        assert!(names.contains(&"one") && names.contains(&"reward"));
    }
}
