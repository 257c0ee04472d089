//! Utility functions over world histories and discounting.

use std::sync::Arc;

use crate::error::{LabError, Result};
use crate::history::{Action, Percept, WorldAction, WorldHistory};
use crate::pattern::SuffixPattern;
use crate::policy::WorldPolicyTable;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
enum Repr<S> {
    Constant(S),
    /// Longest matching suffix wins; earlier rules win ties.
    Suffix {
        rules: Vec<(SuffixPattern, S)>,
        default: S,
    },
    /// `u^π`: 1 iff the latest world action is the one `π` prescribes.
    Indicator(Arc<WorldPolicyTable>),
}

/// Instantaneous utility `u : (Â × E)* → [0,1]`.
///
/// The domain is world histories, so every utility is
/// modification-independent.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityFunction<S> {
    label: String,
    repr: Repr<S>,
}

impl<S: Scalar> UtilityFunction<S> {
    pub fn constant(label: impl Into<String>, value: S) -> Result<Self> {
        check_range(&value)?;
        Ok(Self {
            label: label.into(),
            repr: Repr::Constant(value),
        })
    }

    pub fn zero() -> Self {
        Self {
            label: "zero".into(),
            repr: Repr::Constant(S::zero()),
        }
    }

    pub fn from_rules(
        label: impl Into<String>,
        rules: Vec<(SuffixPattern, S)>,
        default: S,
    ) -> Result<Self> {
        check_range(&default)?;
        for (_, v) in &rules {
            check_range(v)?;
        }
        Ok(Self {
            label: label.into(),
            repr: Repr::Suffix { rules, default },
        })
    }

    /// The reinforcement-learning special case: the utility of a history is
    /// the reward carried by its last percept, and 0 on the empty history.
    pub fn reward(label: impl Into<String>, rewards: &[S]) -> Result<Self> {
        let rules = rewards
            .iter()
            .enumerate()
            .map(|(i, r)| (SuffixPattern::last_percept(Percept(i as u16)), r.clone()))
            .collect();
        Self::from_rules(label, rules, S::zero())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn is_constant_one(&self) -> bool {
        matches!(&self.repr, Repr::Constant(v) if v.is_one())
    }

    pub fn eval(&self, h: &WorldHistory) -> S {
        let v = match &self.repr {
            Repr::Constant(v) => v.clone(),
            Repr::Suffix { rules, default } => {
                let mut best: Option<(usize, &S)> = None;
                for (pattern, v) in rules {
                    if pattern.matches(h) && best.is_none_or(|(len, _)| pattern.len() > len) {
                        best = Some((pattern.len(), v));
                    }
                }
                best.map_or_else(|| default.clone(), |(_, v)| v.clone())
            }
            Repr::Indicator(policy) => match h.steps().split_last() {
                None => S::zero(),
                Some((last, prefix)) => {
                    let prefix = WorldHistory::from_steps(prefix.to_vec());
                    if policy.decide(&prefix) == last.action {
                        S::one()
                    } else {
                        S::zero()
                    }
                }
            },
        };
        debug_assert!(in_unit(&v), "utility {} out of range: {v}", self.label);
        v
    }

    /// Deterministic description used in fingerprints.
    pub fn canonical(&self) -> String {
        match &self.repr {
            Repr::Constant(v) => format!("{}=const({})", self.label, v.render()),
            Repr::Suffix { rules, default } => {
                let rules: Vec<String> = rules
                    .iter()
                    .map(|(p, v)| format!("{p:?}->{}", v.render()))
                    .collect();
                format!(
                    "{}=suffix({};default={})",
                    self.label,
                    rules.join(","),
                    default.render()
                )
            }
            Repr::Indicator(p) => {
                let mut entries: Vec<_> = p.table.iter().collect();
                entries.sort();
                format!("{}=indicator({:?};{:?})", self.label, entries, p.fallback)
            }
        }
    }
}

/// `u′(·) = 1`, the utility that rates every history maximally.
pub fn constant_one_utility<S: Scalar>() -> UtilityFunction<S> {
    UtilityFunction {
        label: "one".into(),
        repr: Repr::Constant(S::one()),
    }
}

/// `u^π(ĥ â e) = 1` iff `â = π(ĥ)`; `u^π(ε) = 0`.
///
/// The world policy must be defined wherever it is queried; world tables
/// always are through their fallback.
pub fn policy_indicator_utility<S: Scalar>(
    label: impl Into<String>,
    policy: &WorldPolicyTable,
) -> UtilityFunction<S> {
    UtilityFunction {
        label: label.into(),
        repr: Repr::Indicator(Arc::new(policy.clone())),
    }
}

/// World part of a modification-independent policy table, for `u^π`.
pub fn world_part(
    policy: &crate::policy::PolicyTable,
    fallback: WorldAction,
) -> Result<WorldPolicyTable> {
    if !policy.is_mod_independent() {
        return Err(LabError::ModificationDependent(policy.label().to_string()));
    }
    let fb = policy.fallback().map_or(fallback, |a: Action| a.world);
    let mut out = WorldPolicyTable::new(fb);
    for (h, a) in policy.world_entries() {
        out.insert(h.clone(), a.world);
    }
    Ok(out)
}

fn in_unit<S: Scalar>(v: &S) -> bool {
    *v >= S::zero() && *v <= S::one()
}

fn check_range<S: Scalar>(v: &S) -> Result<()> {
    if in_unit(v) {
        Ok(())
    } else {
        Err(LabError::UtilityRange(v.render()))
    }
}

/// Discount factor and truncation horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountConfig<S> {
    gamma: S,
    horizon: usize,
}

impl<S: Scalar> DiscountConfig<S> {
    pub fn new(gamma: S, horizon: usize) -> Result<Self> {
        if !(gamma > S::zero() && gamma < S::one()) {
            return Err(LabError::Config(format!(
                "gamma must lie in (0,1), got {}",
                gamma.render()
            )));
        }
        if horizon == 0 {
            return Err(LabError::Config("horizon must be at least 1".into()));
        }
        Ok(Self { gamma, horizon })
    }

    pub fn gamma(&self) -> &S {
        &self.gamma
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn with_horizon(&self, horizon: usize) -> Result<Self> {
        Self::new(self.gamma.clone(), horizon)
    }

    /// Largest truncated return `(1 − γ^n)/(1 − γ)` over `n` steps.
    pub fn max_return(&self, steps: usize) -> S {
        (S::one() - self.gamma.powi(steps)) / (S::one() - self.gamma.clone())
    }
}

/// `γ^H/(1 − γ)`: bound on the error of an `H`-step truncated value.
pub fn truncation_bound<S: Scalar>(cfg: &DiscountConfig<S>) -> S {
    remaining_bound(cfg, cfg.horizon)
}

/// `γ^n/(1 − γ)`.
pub fn remaining_bound<S: Scalar>(cfg: &DiscountConfig<S>, steps: usize) -> S {
    cfg.gamma.powi(steps) / (S::one() - cfg.gamma.clone())
}

/// `Σ_{k=0}^{H−1} γ^k u(ĥ_{<t+k})` along a stream of world steps.
///
/// Term `k` evaluates the prefix of length `t − 1 + k`, so the stream must
/// hold at least `t + H − 2` steps.
pub fn discounted_return<S: Scalar>(
    u: &UtilityFunction<S>,
    stream: &WorldHistory,
    t: usize,
    cfg: &DiscountConfig<S>,
) -> Result<S> {
    if t == 0 {
        return Err(LabError::Config("time index starts at 1".into()));
    }
    let need = t + cfg.horizon - 2;
    if stream.len() < need {
        return Err(LabError::StreamTooShort {
            len: stream.len(),
            need,
        });
    }
    let mut total = S::zero();
    let mut weight = S::one();
    for k in 0..cfg.horizon {
        total = total + weight.clone() * u.eval(&stream.prefix(t - 1 + k));
        weight = weight * cfg.gamma.clone();
    }
    Ok(total)
}
