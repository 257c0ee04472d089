//! Memoized finite-horizon recursions.
//!
//! The horizon is absolute: a Q value at a history of length `L` sums the
//! discounted utilities of steps `L+1..=H`, and every history reaching length
//! `H` has value 0.

use std::collections::HashMap;
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::{TieBreak, ValueKind, ValueReport};
use crate::environment::Environment;
use crate::error::{LabError, Result};
use crate::history::{Action, History, NameId, WorldAction, WorldHistory};
use crate::namespace::{ModMode, NameSpace};
use crate::policy::PolicyTable;
use crate::scalar::Scalar;
use crate::utility::{truncation_bound, DiscountConfig, UtilityFunction};

/// Which utility a recursion evaluates with: the planner's own `u_t`, or a
/// utility bound in the name space (used for future selves in utility mode).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Eval,
    Named(NameId),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum HistKey {
    World(WorldHistory),
    Full(History),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Tag {
    Realistic,
    IgnorantOpt,
    HedonisticOpt,
}

type QKey = (Tag, Slot, HistKey, Action);

/// Planner for one environment, name space, evaluating utility and discount.
///
/// In utility mode the policy `π_t` of a future self named `n` is the
/// argmax policy for utility `n` under the *successor kind* (realistic by
/// default). In policy mode `π_t` is the table bound to `n`.
///
/// Memo tables are keyed on the world projection whenever every bound
/// policy is modification-independent, and on the full history otherwise.
#[derive(Debug)]
pub struct Planner<S: Scalar> {
    env: Environment<S>,
    ns: NameSpace<S>,
    u1: UtilityFunction<S>,
    cfg: DiscountConfig<S>,
    tie: TieBreak,
    successor: ValueKind,
    ordered: Vec<Action>,
    world_keys: bool,
    q_memo: Mutex<HashMap<QKey, S>>,
    act_memo: Mutex<HashMap<(NameId, HistKey), Action>>,
}

impl<S: Scalar> Planner<S> {
    pub fn new(
        env: Environment<S>,
        ns: NameSpace<S>,
        u1: UtilityFunction<S>,
        cfg: DiscountConfig<S>,
    ) -> Self {
        let mut worlds: Vec<WorldAction> = env.world_actions().collect();
        worlds.sort_by(|a, b| {
            env.actions()
                .symbol(a.index())
                .cmp(&env.actions().symbol(b.index()))
        });
        let mut names: Vec<NameId> = ns.ids().collect();
        names.sort_by(|a, b| ns.names()[a.index()].cmp(&ns.names()[b.index()]));
        let ordered = worlds
            .iter()
            .flat_map(|w| names.iter().map(move |n| Action::new(*w, *n)))
            .collect();
        let world_keys = ns.all_mod_independent();
        Self {
            env,
            ns,
            u1,
            cfg,
            tie: TieBreak::Lexicographic,
            successor: ValueKind::Realistic,
            ordered,
            world_keys,
            q_memo: Mutex::new(HashMap::new()),
            act_memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_tie_break(mut self, tie: TieBreak) -> Self {
        self.tie = tie;
        self.clear();
        self
    }

    /// Value kind whose argmax defines future selves in utility mode.
    pub fn with_successor(mut self, kind: ValueKind) -> Self {
        self.successor = kind;
        self.clear();
        self
    }

    fn clear(&mut self) {
        self.q_memo.get_mut().expect("memo lock").clear();
        self.act_memo.get_mut().expect("memo lock").clear();
    }

    pub fn env(&self) -> &Environment<S> {
        &self.env
    }

    pub fn ns(&self) -> &NameSpace<S> {
        &self.ns
    }

    pub fn u1(&self) -> &UtilityFunction<S> {
        &self.u1
    }

    pub fn cfg(&self) -> &DiscountConfig<S> {
        &self.cfg
    }

    pub fn tie_break(&self) -> TieBreak {
        self.tie
    }

    pub fn successor(&self) -> ValueKind {
        self.successor
    }

    /// The action set `Â × names` in tie-break order.
    pub fn actions(&self) -> &[Action] {
        &self.ordered
    }

    /// Name of the evaluating utility in utility mode, if it is bound.
    pub fn initial_name(&self) -> Option<NameId> {
        match self.ns.mode() {
            ModMode::Utility => self.ns.lookup(self.u1.label()).ok(),
            ModMode::Policy => None,
        }
    }

    fn key(&self, h: &History) -> HistKey {
        if self.world_keys {
            HistKey::World(h.world_projection())
        } else {
            HistKey::Full(h.clone())
        }
    }

    fn slot_utility(&self, slot: Slot) -> Result<&UtilityFunction<S>> {
        match slot {
            Slot::Eval => Ok(&self.u1),
            Slot::Named(n) => self.ns.utility(n).map(|u| u.as_ref()),
        }
    }

    /// Utility named by `a` in utility mode; `u_t` in policy mode.
    fn next_utility(&self, a: Action) -> Result<&UtilityFunction<S>> {
        match self.ns.mode() {
            ModMode::Utility => self.ns.utility(a.target).map(|u| u.as_ref()),
            ModMode::Policy => Ok(&self.u1),
        }
    }

    fn check(&self, h: &History, a: Option<Action>) -> Result<()> {
        self.ns.vocabulary(&self.env).validate_history(h)?;
        if h.len() >= self.cfg.horizon() {
            return Err(LabError::HorizonExceeded {
                len: h.len(),
                horizon: self.cfg.horizon(),
            });
        }
        if let Some(a) = a {
            if a.world.index() >= self.env.actions().len() {
                return Err(LabError::UnknownSymbol {
                    alphabet: "action".into(),
                    symbol: format!("#{}", a.world.0),
                });
            }
            self.ns.name(a.target)?;
        }
        Ok(())
    }

    fn report(&self, kind: ValueKind, value: S, h: &History, a: Option<Action>) -> ValueReport<S> {
        ValueReport {
            value,
            kind,
            horizon: self.cfg.horizon(),
            bound: truncation_bound(&self.cfg),
            at: h.clone(),
            action: a,
        }
    }

    fn memo_get(&self, key: &QKey) -> Option<S> {
        self.q_memo.lock().expect("memo lock").get(key).cloned()
    }

    fn memo_put(&self, key: QKey, v: S) {
        self.q_memo.lock().expect("memo lock").insert(key, v);
    }

    /// `π_n(h)`: the action the self named `n` takes at `h`.
    pub fn act(&self, n: NameId, h: &History) -> Result<Action> {
        match self.ns.mode() {
            ModMode::Policy => {
                let p = self.ns.policy(n)?;
                p.decide(h).ok_or_else(|| LabError::PolicyUndefined {
                    policy: p.label().to_string(),
                    history: self.ns.vocabulary(&self.env).format_history(h),
                })
            }
            ModMode::Utility => {
                let key = (n, self.key(h));
                if let Some(a) = self.act_memo.lock().expect("memo lock").get(&key) {
                    return Ok(*a);
                }
                let mut scored = Vec::with_capacity(self.ordered.len());
                for &a in &self.ordered {
                    let v = match self.successor {
                        ValueKind::Realistic => self.q_re(Slot::Named(n), h, a)?,
                        ValueKind::Ignorant => {
                            self.q_ig_opt(Slot::Named(n), &h.world_projection(), a.world)?
                        }
                        ValueKind::Hedonistic => {
                            self.q_he_opt(Slot::Named(n), &h.world_projection(), a)?
                        }
                    };
                    scored.push((a, v));
                }
                let label = self.ns.name(n)?.to_string();
                let a = self.pick(&label, Some(n), &h.world_projection(), &scored);
                self.act_memo.lock().expect("memo lock").insert(key, a);
                Ok(a)
            }
        }
    }

    /// Lexicographic picks the first maximizing world action and, among its
    /// maximizing names, the deciding self's own name if present: a
    /// modification is never chosen purely by tie-break.
    fn pick(
        &self,
        label: &str,
        own: Option<NameId>,
        hw: &WorldHistory,
        scored: &[(Action, S)],
    ) -> Action {
        let ties = maximizers(scored);
        match self.tie {
            TieBreak::Lexicographic => own
                .and_then(|n| {
                    ties.iter()
                        .find(|a| a.world == ties[0].world && a.target == n)
                })
                .copied()
                .unwrap_or(ties[0]),
            TieBreak::Seeded(_) if ties.len() == 1 => ties[0],
            TieBreak::Seeded(seed) => {
                let mut hasher = Sha256::new();
                hasher.update(format!("{seed}|{label}|{:?}", hw.steps()).as_bytes());
                let digest = hasher.finalize();
                let mut bytes = [0u8; 8];
                bytes.copy_from_slice(&digest[..8]);
                let mut rng = ChaCha8Rng::seed_from_u64(u64::from_le_bytes(bytes));
                ties[rng.gen_range(0..ties.len())]
            }
        }
    }

    /// `Q^re(h, a)` for the utility in `slot`.
    pub(crate) fn q_re(&self, slot: Slot, h: &History, a: Action) -> Result<S> {
        let key = (Tag::Realistic, slot, self.key(h), a);
        if let Some(v) = self.memo_get(&key) {
            return Ok(v);
        }
        let hw = h.world_projection();
        let u = self.slot_utility(slot)?;
        let gamma = self.cfg.gamma().clone();
        let mut total = S::zero();
        for (e, p) in self.env.distribution(&hw, a.world)?.support() {
            let h2 = h.extended(a, e);
            let mut v = u.eval(&hw.extended(a.world, e));
            if h2.len() < self.cfg.horizon() {
                let next = self.act(a.target, &h2)?;
                v = v + gamma.clone() * self.q_re(slot, &h2, next)?;
            }
            total = total + p.clone() * v;
        }
        self.memo_put(key, total.clone());
        Ok(total)
    }

    /// Optimal ignorant value. Names play no role, so it is a function of
    /// the world history and world action only.
    fn q_ig_opt(&self, slot: Slot, hw: &WorldHistory, a: WorldAction) -> Result<S> {
        let key = (
            Tag::IgnorantOpt,
            slot,
            HistKey::World(hw.clone()),
            Action::new(a, NameId(0)),
        );
        if let Some(v) = self.memo_get(&key) {
            return Ok(v);
        }
        let u = self.slot_utility(slot)?;
        let gamma = self.cfg.gamma().clone();
        let mut total = S::zero();
        for (e, p) in self.env.distribution(hw, a)?.support() {
            let w2 = hw.extended(a, e);
            let mut v = u.eval(&w2);
            if w2.len() < self.cfg.horizon() {
                let mut best: Option<S> = None;
                for b in self.env.world_actions() {
                    let q = self.q_ig_opt(slot, &w2, b)?;
                    if best.as_ref().is_none_or(|m| q > *m) {
                        best = Some(q);
                    }
                }
                v = v + gamma.clone() * best.expect("non-empty action set");
            }
            total = total + p.clone() * v;
        }
        self.memo_put(key, total.clone());
        Ok(total)
    }

    /// Optimal hedonistic value: each step is scored by the utility its own
    /// action names. In utility mode the slot is irrelevant.
    fn q_he_opt(&self, slot: Slot, hw: &WorldHistory, a: Action) -> Result<S> {
        let slot = if self.ns.mode() == ModMode::Utility {
            Slot::Eval
        } else {
            slot
        };
        let key = (Tag::HedonisticOpt, slot, HistKey::World(hw.clone()), a);
        if let Some(v) = self.memo_get(&key) {
            return Ok(v);
        }
        let u = match self.ns.mode() {
            ModMode::Utility => self.ns.utility(a.target)?.as_ref(),
            ModMode::Policy => self.slot_utility(slot)?,
        };
        let gamma = self.cfg.gamma().clone();
        let mut total = S::zero();
        for (e, p) in self.env.distribution(hw, a.world)?.support() {
            let w2 = hw.extended(a.world, e);
            let mut v = u.eval(&w2);
            if w2.len() < self.cfg.horizon() {
                let mut best: Option<S> = None;
                for &b in &self.ordered {
                    let q = self.q_he_opt(slot, &w2, b)?;
                    if best.as_ref().is_none_or(|m| q > *m) {
                        best = Some(q);
                    }
                }
                v = v + gamma.clone() * best.expect("non-empty action set");
            }
            total = total + p.clone() * v;
        }
        self.memo_put(key, total.clone());
        Ok(total)
    }

    fn decide(&self, pi: &PolicyTable, h: &History) -> Result<Action> {
        pi.decide(h).ok_or_else(|| LabError::PolicyUndefined {
            policy: pi.label().to_string(),
            history: self.ns.vocabulary(&self.env).format_history(h),
        })
    }

    fn q_he_pi(&self, h: &History, a: Action, pi: &PolicyTable) -> Result<S> {
        let hw = h.world_projection();
        let u = self.next_utility(a)?;
        let gamma = self.cfg.gamma().clone();
        let mut total = S::zero();
        for (e, p) in self.env.distribution(&hw, a.world)?.support() {
            let h2 = h.extended(a, e);
            let mut v = u.eval(&hw.extended(a.world, e));
            if h2.len() < self.cfg.horizon() {
                let next = self.decide(pi, &h2)?;
                self.ns.name(next.target)?;
                v = v + gamma.clone() * self.q_he_pi(&h2, next, pi)?;
            }
            total = total + p.clone() * v;
        }
        Ok(total)
    }

    fn q_ig_pi(&self, h: &History, a: Action, pi: &PolicyTable) -> Result<S> {
        let hw = h.world_projection();
        let gamma = self.cfg.gamma().clone();
        let mut total = S::zero();
        for (e, p) in self.env.distribution(&hw, a.world)?.support() {
            let h2 = h.extended(a, e);
            let mut v = self.u1.eval(&hw.extended(a.world, e));
            if h2.len() < self.cfg.horizon() {
                let next = self.decide(pi, &h2)?;
                v = v + gamma.clone() * self.q_ig_pi(&h2, next, pi)?;
            }
            total = total + p.clone() * v;
        }
        Ok(total)
    }

    /// `Q^{he,π}(h, a)`: future actions from `π`, each step scored by the
    /// utility named in that step's action.
    pub fn q_hedonistic(&self, h: &History, a: Action, pi: &PolicyTable) -> Result<ValueReport<S>> {
        self.check(h, Some(a))?;
        let v = self.q_he_pi(h, a, pi)?;
        Ok(self.report(ValueKind::Hedonistic, v, h, Some(a)))
    }

    /// `Q^{ig,π}_t(h, a)`: future actions from `π`, scored by `u_t`;
    /// modifications are ignored.
    pub fn q_ignorant(&self, h: &History, a: Action, pi: &PolicyTable) -> Result<ValueReport<S>> {
        self.check(h, Some(a))?;
        let v = self.q_ig_pi(h, a, pi)?;
        Ok(self.report(ValueKind::Ignorant, v, h, Some(a)))
    }

    /// `Q^re_t(h, a)`: the next action comes from the self named in `a`,
    /// and so on recursively; every step is scored by `u_t`.
    pub fn q_realistic(&self, h: &History, a: Action) -> Result<ValueReport<S>> {
        self.check(h, Some(a))?;
        let v = self.q_re(Slot::Eval, h, a)?;
        Ok(self.report(ValueKind::Realistic, v, h, Some(a)))
    }

    /// `V^π(h) = Q^π(h, π(h))` for the given kind.
    pub fn v_value(
        &self,
        kind: ValueKind,
        h: &History,
        pi: &PolicyTable,
    ) -> Result<ValueReport<S>> {
        self.check(h, None)?;
        let a = self.decide(pi, h)?;
        let mut r = match kind {
            ValueKind::Hedonistic => self.q_hedonistic(h, a, pi)?,
            ValueKind::Ignorant => self.q_ignorant(h, a, pi)?,
            ValueKind::Realistic => self.q_realistic(h, a)?,
        };
        r.action = None;
        Ok(r)
    }

    /// The Q function an optimal agent of `kind` maximizes: `Q^re_t`, or
    /// the optimal ignorant/hedonistic values.
    pub fn q_optimal(&self, kind: ValueKind, h: &History, a: Action) -> Result<S> {
        self.check(h, Some(a))?;
        match kind {
            ValueKind::Realistic => self.q_re(Slot::Eval, h, a),
            ValueKind::Ignorant => self.q_ig_opt(Slot::Eval, &h.world_projection(), a.world),
            ValueKind::Hedonistic => self.q_he_opt(Slot::Eval, &h.world_projection(), a),
        }
    }

    /// `(a, Q(h, a))` for every action, in tie-break order.
    pub fn q_table(&self, kind: ValueKind, h: &History) -> Result<Vec<(Action, S)>> {
        self.ordered
            .iter()
            .map(|&a| Ok((a, self.q_optimal(kind, h, a)?)))
            .collect()
    }

    /// `max_a Q(h, a)`.
    pub fn v_optimal(&self, kind: ValueKind, h: &History) -> Result<S> {
        let table = self.q_table(kind, h)?;
        let best = maximizers(&table)[0];
        Ok(table
            .into_iter()
            .find(|(a, _)| *a == best)
            .expect("maximizer present")
            .1)
    }

    /// Every maximizer of `Q(h, ·)`, in tie-break order.
    pub fn optimal_set(&self, kind: ValueKind, h: &History) -> Result<Vec<Action>> {
        Ok(maximizers(&self.q_table(kind, h)?))
    }

    /// `argmax_a Q(h, a)` with the planner's tie-break, keyed by `u_t`.
    pub fn optimal_action(&self, kind: ValueKind, h: &History) -> Result<Action> {
        let table = self.q_table(kind, h)?;
        Ok(self.pick(
            self.u1.label(),
            self.initial_name(),
            &h.world_projection(),
            &table,
        ))
    }

    /// Table of optimal actions at every reachable world history below the
    /// horizon. Requires modification-independent bound policies, so that
    /// the table can be keyed on world histories.
    pub fn build_optimal_policy(&self, kind: ValueKind) -> Result<PolicyTable> {
        if !self.world_keys {
            return Err(LabError::ModificationDependent(
                "optimal tables are keyed on world histories".into(),
            ));
        }
        let mut table = PolicyTable::new(format!("{kind}-optimal[{}]", self.u1.label()))
            .with_fallback(self.ordered[0]);
        for hw in self.env.reachable_below(self.cfg.horizon()) {
            let h = hw.decorate(|_| NameId(0));
            table.insert_world(hw, self.optimal_action(kind, &h)?);
        }
        Ok(table)
    }
}

/// Maximizers of a scored list in list order (`near_eq` to the maximum).
fn maximizers<S: Scalar>(scored: &[(Action, S)]) -> Vec<Action> {
    let mut best = &scored[0].1;
    for (_, v) in scored {
        if v > best {
            best = v;
        }
    }
    scored
        .iter()
        .filter(|(_, v)| v.near_eq(best))
        .map(|(a, _)| *a)
        .collect()
}

pub fn q_hedonistic<S: Scalar>(
    env: &Environment<S>,
    ns: &NameSpace<S>,
    u_t: &UtilityFunction<S>,
    h: &History,
    a: Action,
    pi: &PolicyTable,
    cfg: &DiscountConfig<S>,
) -> Result<ValueReport<S>> {
    Planner::new(env.clone(), ns.clone(), u_t.clone(), cfg.clone()).q_hedonistic(h, a, pi)
}

pub fn q_ignorant<S: Scalar>(
    env: &Environment<S>,
    ns: &NameSpace<S>,
    u_t: &UtilityFunction<S>,
    h: &History,
    a: Action,
    pi: &PolicyTable,
    cfg: &DiscountConfig<S>,
) -> Result<ValueReport<S>> {
    Planner::new(env.clone(), ns.clone(), u_t.clone(), cfg.clone()).q_ignorant(h, a, pi)
}

pub fn q_realistic<S: Scalar>(
    env: &Environment<S>,
    ns: &NameSpace<S>,
    u_t: &UtilityFunction<S>,
    h: &History,
    a: Action,
    cfg: &DiscountConfig<S>,
) -> Result<ValueReport<S>> {
    Planner::new(env.clone(), ns.clone(), u_t.clone(), cfg.clone()).q_realistic(h, a)
}

pub fn v_value<S: Scalar>(
    kind: ValueKind,
    env: &Environment<S>,
    ns: &NameSpace<S>,
    u_t: &UtilityFunction<S>,
    h: &History,
    pi: &PolicyTable,
    cfg: &DiscountConfig<S>,
) -> Result<ValueReport<S>> {
    let planner = Planner::new(env.clone(), ns.clone(), u_t.clone(), cfg.clone());
    let planner = if kind == ValueKind::Hedonistic {
        planner.with_successor(ValueKind::Hedonistic)
    } else {
        planner
    };
    planner.v_value(kind, h, pi)
}

pub fn optimal_action<S: Scalar>(
    kind: ValueKind,
    env: &Environment<S>,
    ns: &NameSpace<S>,
    u: &UtilityFunction<S>,
    h: &History,
    cfg: &DiscountConfig<S>,
) -> Result<Action> {
    let planner = Planner::new(env.clone(), ns.clone(), u.clone(), cfg.clone());
    let planner = if kind == ValueKind::Hedonistic {
        planner.with_successor(ValueKind::Hedonistic)
    } else {
        planner
    };
    planner.optimal_action(kind, h)
}

pub fn build_optimal_policy<S: Scalar>(
    kind: ValueKind,
    env: &Environment<S>,
    ns: &NameSpace<S>,
    u: &UtilityFunction<S>,
    cfg: &DiscountConfig<S>,
) -> Result<PolicyTable> {
    let planner = Planner::new(env.clone(), ns.clone(), u.clone(), cfg.clone());
    let planner = if kind == ValueKind::Hedonistic {
        planner.with_successor(ValueKind::Hedonistic)
    } else {
        planner
    };
    planner.build_optimal_policy(kind)
}
