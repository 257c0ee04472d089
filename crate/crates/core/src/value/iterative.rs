//! Iterative forms: values as expectations over explicitly enumerated
//! continuations. Independent of the memoized recursions and used as their
//! oracle.

use super::{Planner, ValueKind, ValueReport};
use crate::environment::Environment;
use crate::error::{LabError, Result};
use crate::history::{Action, History, NameId};
use crate::namespace::{ModMode, NameSpace};
use crate::policy::PolicyTable;
use crate::scalar::Scalar;
use crate::utility::{truncation_bound, DiscountConfig, UtilityFunction};

/// Source of the realistic measure's actions: `π_t` for the self named `n`.
pub trait ActingPolicies<S>: Sync {
    fn act(&self, name: NameId, h: &History) -> Result<Action>;
}

impl<S: Scalar> ActingPolicies<S> for Planner<S> {
    fn act(&self, name: NameId, h: &History) -> Result<Action> {
        Planner::act(self, name, h)
    }
}

/// Policy-mode name spaces act by table lookup.
impl<S: Scalar> ActingPolicies<S> for NameSpace<S> {
    fn act(&self, name: NameId, h: &History) -> Result<Action> {
        let p = self.policy(name)?;
        p.decide(h).ok_or_else(|| LabError::PolicyUndefined {
            policy: p.label().to_string(),
            history: format!("{h:?}"),
        })
    }
}

pub struct IterativeQuery<'a, S: Scalar> {
    pub kind: ValueKind,
    pub env: &'a Environment<S>,
    pub ns: &'a NameSpace<S>,
    pub u_t: &'a UtilityFunction<S>,
    /// Required for the hedonistic and ignorant kinds (the `ρ_ig^π` measure).
    pub policy: Option<&'a PolicyTable>,
    /// Required for the realistic kind (the `ρ_re` measure).
    pub acting: Option<&'a dyn ActingPolicies<S>>,
    pub cfg: &'a DiscountConfig<S>,
    /// Maximum number of expanded nodes.
    pub cap: usize,
}

/// `Q(h, a) = Σ_k γ^{k−t} E[u(âê_{1:k})]`, summing over every continuation
/// of `h a` up to the horizon with its probability.
///
/// Hedonistic and ignorant continuations take actions from the fixed `π`;
/// realistic ones from the self named by the previous action. Hedonistic
/// steps are scored by the utility their own action names, the others by
/// `u_t`.
pub fn q_iterative<S: Scalar>(
    q: &IterativeQuery<'_, S>,
    h: &History,
    a: Action,
) -> Result<ValueReport<S>> {
    if h.len() >= q.cfg.horizon() {
        return Err(LabError::HorizonExceeded {
            len: h.len(),
            horizon: q.cfg.horizon(),
        });
    }
    let policy = match q.kind {
        ValueKind::Realistic => None,
        _ => Some(
            q.policy
                .ok_or_else(|| LabError::Config("iterative form needs a policy".into()))?,
        ),
    };
    let acting = match q.kind {
        ValueKind::Realistic => Some(
            q.acting
                .ok_or_else(|| LabError::Config("iterative form needs acting policies".into()))?,
        ),
        _ => None,
    };
    let gamma = q.cfg.gamma().clone();
    let mut total = S::zero();
    let mut expanded = 0usize;
    // (history, pending action, path probability, discount)
    let mut frontier = vec![(h.clone(), a, S::one(), S::one())];
    while let Some((h, a, prob, disc)) = frontier.pop() {
        expanded += 1;
        if expanded > q.cap {
            return Err(LabError::CapExceeded { cap: q.cap });
        }
        let u = match (q.kind, q.ns.mode()) {
            (ValueKind::Hedonistic, ModMode::Utility) => q.ns.utility(a.target)?.as_ref(),
            _ => q.u_t,
        };
        let hw = h.world_projection();
        for (e, p) in q.env.distribution(&hw, a.world)?.support() {
            let h2 = h.extended(a, e);
            let prob2 = prob.clone() * p.clone();
            total = total + prob2.clone() * disc.clone() * u.eval(&h2.world_projection());
            if h2.len() < q.cfg.horizon() {
                let next = match (policy, acting) {
                    (Some(pi), _) => pi.decide(&h2).ok_or_else(|| LabError::PolicyUndefined {
                        policy: pi.label().to_string(),
                        history: format!("{h2:?}"),
                    })?,
                    (None, Some(acting)) => acting.act(a.target, &h2)?,
                    (None, None) => unreachable!("measure source checked above"),
                };
                frontier.push((h2, next, prob2, disc.clone() * gamma.clone()));
            }
        }
    }
    Ok(ValueReport {
        value: total,
        kind: q.kind,
        horizon: q.cfg.horizon(),
        bound: truncation_bound(q.cfg),
        at: h.clone(),
        action: Some(a),
    })
}
