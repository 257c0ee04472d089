//! Finite policy classes standing in for "all policies".

use rand::seq::SliceRandom;
use rand::Rng;

use crate::environment::Environment;
use crate::error::{LabError, Result};
use crate::history::{Action, NameId, WorldHistory};
use crate::namespace::NameSpace;
use crate::policy::PolicyTable;
use crate::scalar::Scalar;

/// Every table that assigns an action to each reachable world history of
/// length below `min(2, horizon)`, plus a fallback action for all longer
/// histories.
pub fn depth2_class<S: Scalar>(
    env: &Environment<S>,
    actions: &[Action],
    horizon: usize,
    cap: usize,
) -> Result<Vec<PolicyTable>> {
    let keys: Vec<WorldHistory> = env.reachable_below(horizon.min(2));
    let slots = keys.len() + 1;
    let size = (actions.len() as u128)
        .checked_pow(slots as u32)
        .unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(LabError::CapExceeded { cap });
    }
    let mut out = Vec::with_capacity(size as usize);
    let mut digits = vec![0usize; slots];
    for i in 0..size as usize {
        let mut table = PolicyTable::new(format!("depth2#{i}")).with_fallback(actions[digits[0]]);
        for (k, h) in keys.iter().enumerate() {
            table.insert_world(h.clone(), actions[digits[k + 1]]);
        }
        out.push(table);
        for d in digits.iter_mut() {
            *d += 1;
            if *d < actions.len() {
                break;
            }
            *d = 0;
        }
    }
    Ok(out)
}

/// World-keyed table with a uniformly random action at every reachable
/// world history below the horizon.
pub fn random_world_table<S: Scalar, R: Rng>(
    rng: &mut R,
    env: &Environment<S>,
    actions: &[Action],
    horizon: usize,
    label: impl Into<String>,
) -> PolicyTable {
    let mut table = PolicyTable::new(label).with_fallback(*actions.choose(rng).expect("actions"));
    for h in env.reachable_below(horizon) {
        table.insert_world(h, *actions.choose(rng).expect("actions"));
    }
    table
}

/// All actions `Â × {0..names}` in index order.
pub fn action_grid<S: Scalar>(env: &Environment<S>, names: usize) -> Vec<Action> {
    env.world_actions()
        .flat_map(|w| (0..names as u16).map(move |n| Action::new(w, NameId(n))))
        .collect()
}

/// Policy-mode name space `p0..p{k-1}` of random self-modifying tables.
/// With `mod_dependent`, the last policy also gets full-history entries on
/// randomly decorated histories.
pub fn random_policy_namespace<S: Scalar, R: Rng>(
    rng: &mut R,
    env: &Environment<S>,
    k: usize,
    horizon: usize,
    mod_dependent: bool,
) -> Result<NameSpace<S>> {
    let actions = action_grid(env, k);
    let mut entries = Vec::new();
    for i in 0..k {
        let mut table = random_world_table(rng, env, &actions, horizon, format!("p{i}"));
        if mod_dependent && i + 1 == k {
            for h in env.reachable_below(horizon).into_iter().skip(1) {
                if rng.gen_bool(0.5) {
                    let full = h.decorate(|_| NameId(rng.gen_range(0..k as u16)));
                    table.insert_full(full, *actions.choose(rng).expect("actions"));
                }
            }
        }
        entries.push((format!("p{i}"), table));
    }
    NameSpace::with_policies(entries)
}
