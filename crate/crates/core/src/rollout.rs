//! Exact enumeration of the realistic and ignorant history measures, agent
//! performance and the associated world policy.

use std::collections::{BTreeMap, BTreeSet};

use crate::environment::Environment;
use crate::error::{LabError, Result};
use crate::history::{History, NameId, Vocabulary, WorldAction, WorldHistory};
use crate::policy::{PolicyTable, WorldPolicyTable};
use crate::scalar::Scalar;
use crate::utility::{DiscountConfig, UtilityFunction};
use crate::value::ActingPolicies;

/// Default enumeration cap (number of histories).
pub const DEFAULT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedHistory<S> {
    pub history: History,
    pub prob: S,
}

fn decide(pi: &PolicyTable, h: &History) -> Result<crate::history::Action> {
    pi.decide(h).ok_or_else(|| LabError::PolicyUndefined {
        policy: pi.label().to_string(),
        history: format!("{h:?}"),
    })
}

fn enumerate<S: Scalar>(
    env: &Environment<S>,
    depth: usize,
    cap: usize,
    mut choose: impl FnMut(&History) -> Result<crate::history::Action>,
) -> Result<Vec<WeightedHistory<S>>> {
    let mut layer = vec![WeightedHistory {
        history: History::empty(),
        prob: S::one(),
    }];
    for _ in 0..depth {
        let mut next = Vec::new();
        for wh in &layer {
            let a = choose(&wh.history)?;
            let dist = env.distribution(&wh.history.world_projection(), a.world)?;
            for (e, p) in dist.support() {
                if next.len() >= cap {
                    return Err(LabError::CapExceeded { cap });
                }
                next.push(WeightedHistory {
                    history: wh.history.extended(a, e),
                    prob: wh.prob.clone() * p.clone(),
                });
            }
        }
        layer = next;
    }
    layer.sort_by(|a, b| a.history.cmp(&b.history));
    Ok(layer)
}

/// `ρ_re^{π₁}` on histories of length `depth`: the first action comes from
/// `π₁`, every later one from the self named by the previous action.
pub fn enumerate_realistic<S: Scalar>(
    pi1: &PolicyTable,
    env: &Environment<S>,
    acting: &dyn ActingPolicies<S>,
    depth: usize,
    cap: usize,
) -> Result<Vec<WeightedHistory<S>>> {
    enumerate(env, depth, cap, |h| match h.last_action() {
        None => decide(pi1, h),
        Some(prev) => acting.act(prev.target, h),
    })
}

/// `ρ_ig^{π₁}`: every action comes from `π₁`.
pub fn enumerate_ignorant<S: Scalar>(
    pi1: &PolicyTable,
    env: &Environment<S>,
    depth: usize,
    cap: usize,
) -> Result<Vec<WeightedHistory<S>>> {
    enumerate(env, depth, cap, |h| decide(pi1, h))
}

/// Probability of each world history, summing over equal projections.
pub fn world_marginals<S: Scalar>(histories: &[WeightedHistory<S>]) -> BTreeMap<WorldHistory, S> {
    let mut out: BTreeMap<WorldHistory, S> = BTreeMap::new();
    for wh in histories {
        let entry = out
            .entry(wh.history.world_projection())
            .or_insert_with(S::zero);
        *entry = entry.clone() + wh.prob.clone();
    }
    out
}

/// `Σ_k γ^{k−1} u₁(âê_{1:k})` for `k = 1..=H` along one history.
pub fn return_along<S: Scalar>(
    u1: &UtilityFunction<S>,
    h: &WorldHistory,
    cfg: &DiscountConfig<S>,
) -> S {
    let mut total = S::zero();
    let mut weight = S::one();
    for k in 1..=cfg.horizon().min(h.len()) {
        total = total + weight.clone() * u1.eval(&h.prefix(k));
        weight = weight * cfg.gamma().clone();
    }
    total
}

/// Agent performance: the `ρ_re^{π₁}`-expected discounted `u₁` return.
pub fn performance<S: Scalar>(
    pi1: &PolicyTable,
    env: &Environment<S>,
    acting: &dyn ActingPolicies<S>,
    u1: &UtilityFunction<S>,
    cfg: &DiscountConfig<S>,
    cap: usize,
) -> Result<S> {
    let histories = enumerate_realistic(pi1, env, acting, cfg.horizon(), cap)?;
    Ok(histories.iter().fold(S::zero(), |acc, wh| {
        acc + wh.prob.clone() * return_along(u1, &wh.history.world_projection(), cfg)
    }))
}

/// Distinct on-policy decision points whose action names a different self
/// than the one acting. `initial` is the name of the first self, if it has
/// one; otherwise the first action never counts as a switch.
pub fn modification_points<S: Scalar>(
    histories: &[WeightedHistory<S>],
    initial: Option<NameId>,
) -> BTreeSet<History> {
    let mut out = BTreeSet::new();
    for wh in histories {
        let steps = wh.history.steps();
        for (t, s) in steps.iter().enumerate() {
            let current = if t == 0 {
                initial
            } else {
                Some(steps[t - 1].action.target)
            };
            if current.is_some_and(|c| c != s.action.target) {
                out.insert(wh.history.prefix(t));
            }
        }
    }
    out
}

/// The associated world policy `π̂`: along the unique `ρ_re^π`-positive
/// history with a given world projection, the world part of `π_t`'s choice.
/// World histories without a positive extension get the first world action
/// in symbol order.
pub fn associated_world_policy<S: Scalar>(
    pi1: &PolicyTable,
    env: &Environment<S>,
    acting: &dyn ActingPolicies<S>,
    cfg: &DiscountConfig<S>,
    cap: usize,
) -> Result<WorldPolicyTable> {
    let fallback = env
        .world_actions()
        .min_by(|a, b| {
            env.actions()
                .symbol(a.index())
                .cmp(&env.actions().symbol(b.index()))
        })
        .unwrap_or(WorldAction(0));
    let mut table = WorldPolicyTable::new(fallback);
    let mut layer = vec![History::empty()];
    let mut seen = 0usize;
    for depth in 0..cfg.horizon() {
        let mut next = Vec::new();
        for h in &layer {
            let a = match h.last_action() {
                None => decide(pi1, h)?,
                Some(prev) => acting.act(prev.target, h)?,
            };
            table.insert(h.world_projection(), a.world);
            if depth + 1 < cfg.horizon() {
                for (e, _) in env.distribution(&h.world_projection(), a.world)?.support() {
                    seen += 1;
                    if seen > cap {
                        return Err(LabError::CapExceeded { cap });
                    }
                    next.push(h.extended(a, e));
                }
            }
        }
        layer = next;
    }
    Ok(table)
}

/// Tab-separated dump, one `history<TAB>probability` row per history.
pub fn dump_table<S: Scalar>(histories: &[WeightedHistory<S>], vocab: &Vocabulary<'_>) -> String {
    let mut out = String::from("history\tprob\n");
    for wh in histories {
        out.push_str(&vocab.format_history(&wh.history));
        out.push('\t');
        out.push_str(&wh.prob.render());
        out.push('\n');
    }
    out
}
