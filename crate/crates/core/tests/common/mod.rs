#![allow(dead_code)]

use selfmod_lab::{
    builtin_environment, builtin_utility, Action, DiscountConfig, Environment, Exact, NameId,
    NameSpace, UtilityFunction, WorldAction,
};

pub type Q = Exact;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

pub fn env(name: &str) -> Environment<Q> {
    builtin_environment(name).unwrap()
}

pub fn utility(name: &str, env: &Environment<Q>) -> UtilityFunction<Q> {
    builtin_utility(name, env).unwrap()
}

/// Utility-mode name space over the environment's default utilities.
pub fn utility_ns(env: &Environment<Q>) -> NameSpace<Q> {
    let us = env
        .default_utilities()
        .iter()
        .map(|n| utility(n, env))
        .collect();
    NameSpace::with_utilities(us).unwrap()
}

pub fn cfg(n: i64, d: i64, h: usize) -> DiscountConfig<Q> {
    DiscountConfig::new(q(n, d), h).unwrap()
}

pub fn action(env: &Environment<Q>, ns: &NameSpace<Q>, world: &str, name: &str) -> Action {
    Action::new(
        WorldAction(env.actions().lookup(world).unwrap() as u16),
        ns.lookup(name).unwrap_or(NameId(0)),
    )
}
