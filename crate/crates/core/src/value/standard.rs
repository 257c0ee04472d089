//! The standard model without self-modification: world policies, their
//! values, expectimax and the induced measure over world histories.
//!
//! Written against world histories only and independent of the planner, so
//! it can cross-check realistic values.

use std::collections::{BTreeMap, HashMap};

use crate::environment::Environment;
use crate::error::Result;
use crate::history::{WorldAction, WorldHistory};
use crate::policy::WorldPolicyTable;
use crate::scalar::Scalar;
use crate::utility::{DiscountConfig, UtilityFunction};

/// `Q^π̂(ĥ, â) = Σ_e ρ(e | ĥ â) [u(ĥ â e) + γ V^π̂(ĥ â e)]`.
pub fn standard_q<S: Scalar>(
    env: &Environment<S>,
    u: &UtilityFunction<S>,
    pi: &WorldPolicyTable,
    h: &WorldHistory,
    a: WorldAction,
    cfg: &DiscountConfig<S>,
) -> Result<S> {
    let mut total = S::zero();
    for (e, p) in env.distribution(h, a)?.support() {
        let h2 = h.extended(a, e);
        let mut v = u.eval(&h2);
        if h2.len() < cfg.horizon() {
            v = v + cfg.gamma().clone() * standard_q(env, u, pi, &h2, pi.decide(&h2), cfg)?;
        }
        total = total + p.clone() * v;
    }
    Ok(total)
}

/// `V^π̂(ĥ) = Q^π̂(ĥ, π̂(ĥ))`.
pub fn standard_v<S: Scalar>(
    env: &Environment<S>,
    u: &UtilityFunction<S>,
    pi: &WorldPolicyTable,
    h: &WorldHistory,
    cfg: &DiscountConfig<S>,
) -> Result<S> {
    standard_q(env, u, pi, h, pi.decide(h), cfg)
}

/// Finite-horizon expectimax over world actions. Ties go to the first
/// world action in symbol order.
pub struct Expectimax<'a, S: Scalar> {
    env: &'a Environment<S>,
    u: &'a UtilityFunction<S>,
    cfg: &'a DiscountConfig<S>,
    order: Vec<WorldAction>,
    memo: HashMap<WorldHistory, S>,
}

impl<'a, S: Scalar> Expectimax<'a, S> {
    pub fn new(
        env: &'a Environment<S>,
        u: &'a UtilityFunction<S>,
        cfg: &'a DiscountConfig<S>,
    ) -> Self {
        let mut order: Vec<WorldAction> = env.world_actions().collect();
        order.sort_by(|a, b| {
            env.actions()
                .symbol(a.index())
                .cmp(&env.actions().symbol(b.index()))
        });
        Self {
            env,
            u,
            cfg,
            order,
            memo: HashMap::new(),
        }
    }

    /// `V*(ĥ)`; 0 at the horizon.
    pub fn v_star(&mut self, h: &WorldHistory) -> Result<S> {
        if h.len() >= self.cfg.horizon() {
            return Ok(S::zero());
        }
        if let Some(v) = self.memo.get(h) {
            return Ok(v.clone());
        }
        let mut best: Option<S> = None;
        for a in self.order.clone() {
            let q = self.q_star(h, a)?;
            if best.as_ref().is_none_or(|b| q > *b) {
                best = Some(q);
            }
        }
        let v = best.expect("non-empty action set");
        self.memo.insert(h.clone(), v.clone());
        Ok(v)
    }

    pub fn q_star(&mut self, h: &WorldHistory, a: WorldAction) -> Result<S> {
        let dist = self.env.distribution(h, a)?.clone();
        let mut total = S::zero();
        for (e, p) in dist.support() {
            let h2 = h.extended(a, e);
            let v = self.u.eval(&h2) + self.cfg.gamma().clone() * self.v_star(&h2)?;
            total = total + p.clone() * v;
        }
        Ok(total)
    }

    pub fn best_action(&mut self, h: &WorldHistory) -> Result<WorldAction> {
        let mut best: Option<(WorldAction, S)> = None;
        for a in self.order.clone() {
            let q = self.q_star(h, a)?;
            if best.as_ref().is_none_or(|(_, b)| q > *b) {
                best = Some((a, q));
            }
        }
        Ok(best.expect("non-empty action set").0)
    }

    /// Optimal world policy `π̂*` on every reachable world history below the
    /// horizon.
    pub fn policy(&mut self) -> Result<WorldPolicyTable> {
        let mut table = WorldPolicyTable::new(self.order[0]);
        for h in self.env.reachable_below(self.cfg.horizon()) {
            let a = self.best_action(&h)?;
            table.insert(h, a);
        }
        Ok(table)
    }
}

/// `(V*(ε), π̂*)`.
pub fn expectimax<S: Scalar>(
    env: &Environment<S>,
    u: &UtilityFunction<S>,
    cfg: &DiscountConfig<S>,
) -> Result<(S, WorldPolicyTable)> {
    let mut planner = Expectimax::new(env, u, cfg);
    let v = planner.v_star(&WorldHistory::empty())?;
    Ok((v, planner.policy()?))
}

/// The measure `ρ^π̂` on world histories of length `depth`, restricted to
/// positive-probability histories.
pub fn standard_measure<S: Scalar>(
    env: &Environment<S>,
    pi: &WorldPolicyTable,
    depth: usize,
) -> Result<BTreeMap<WorldHistory, S>> {
    let mut layer = BTreeMap::from([(WorldHistory::empty(), S::one())]);
    for _ in 0..depth {
        let mut next = BTreeMap::new();
        for (h, w) in &layer {
            let a = pi.decide(h);
            for (e, p) in env.distribution(h, a)?.support() {
                next.insert(h.extended(a, e), w.clone() * p.clone());
            }
        }
        layer = next;
    }
    Ok(layer)
}
