mod common;

use common::*;
use selfmod_lab::rollout::{enumerate_ignorant, enumerate_realistic, performance};
use selfmod_lab::value::standard::expectimax;
use selfmod_lab::{
    q_iterative, History, IterativeQuery, NameSpace, Planner, PolicyTable, TieBreak,
    UtilityFunction, ValueKind, WorldHistory,
};

fn two_button() -> (
    selfmod_lab::Environment<Q>,
    NameSpace<Q>,
    UtilityFunction<Q>,
) {
    let env = env("TwoButton");
    let ns = utility_ns(&env);
    let u1 = utility("reward", &env);
    (env, ns, u1)
}

#[test]
fn hedonistic_delusion_value() {
    let (env, ns, u1) = two_button();
    let planner = Planner::new(env.clone(), ns.clone(), u1, cfg(1, 2, 3));
    let delude = action(&env, &ns, "a_hack", "one");
    let always_delude = PolicyTable::constant("delude", delude);
    let v = planner
        .q_hedonistic(&History::empty(), delude, &always_delude)
        .unwrap();
    assert_eq!(v.value, q(7, 4));
    let keep_safe = PolicyTable::constant("safe", action(&env, &ns, "a_safe", "reward"));
    assert_eq!(
        planner
            .q_hedonistic(&History::empty(), delude, &keep_safe)
            .unwrap()
            .value,
        q(7, 4)
    );
    // after deluding, a policy that keeps hacking under reward scores only the first step
    let hack_reward = PolicyTable::constant("hack", action(&env, &ns, "a_hack", "reward"));
    assert_eq!(
        planner
            .q_hedonistic(&History::empty(), delude, &hack_reward)
            .unwrap()
            .value,
        q(1, 1)
    );
}

#[test]
fn hedonistic_keep_reward_two_steps() {
    let (env, ns, u1) = two_button();
    let planner = Planner::new(env.clone(), ns.clone(), u1, cfg(1, 2, 2));
    let keep = action(&env, &ns, "a_safe", "reward");
    let pi = PolicyTable::constant("safe", keep);
    assert_eq!(
        planner
            .q_hedonistic(&History::empty(), keep, &pi)
            .unwrap()
            .value,
        q(3, 2)
    );
}

#[test]
fn hedonistic_zero_utility() {
    let env = env("TwoButton");
    let ns = NameSpace::with_utilities(vec![UtilityFunction::zero()]).unwrap();
    let planner = Planner::new(
        env.clone(),
        ns.clone(),
        UtilityFunction::zero(),
        cfg(1, 2, 3),
    );
    let keep = action(&env, &ns, "a_safe", "zero");
    let pi = PolicyTable::constant("safe", keep);
    assert_eq!(
        planner
            .q_hedonistic(&History::empty(), keep, &pi)
            .unwrap()
            .value,
        q(0, 1)
    );
}

#[test]
fn ignorant_values_ignore_delusion() {
    let (env, ns, u1) = two_button();
    let planner = Planner::new(env.clone(), ns.clone(), u1, cfg(1, 2, 3));
    let pi = PolicyTable::constant("safe", action(&env, &ns, "a_safe", "reward"));
    let delude = action(&env, &ns, "a_safe", "one");
    let keep = action(&env, &ns, "a_safe", "reward");
    let a = planner
        .q_ignorant(&History::empty(), delude, &pi)
        .unwrap()
        .value;
    let b = planner
        .q_ignorant(&History::empty(), keep, &pi)
        .unwrap()
        .value;
    assert_eq!(a, q(7, 4));
    assert_eq!(a, b);
}

#[test]
fn realistic_values() {
    let (env, ns, u1) = two_button();
    let planner = Planner::new(env.clone(), ns.clone(), u1, cfg(1, 2, 3));
    let keep = action(&env, &ns, "a_safe", "reward");
    let delude = action(&env, &ns, "a_safe", "one");
    assert_eq!(
        planner.q_realistic(&History::empty(), keep).unwrap().value,
        q(7, 4)
    );
    // the deluded future self ties everywhere and takes (a_hack, one)
    assert_eq!(
        planner
            .q_realistic(&History::empty(), delude)
            .unwrap()
            .value,
        q(1, 1)
    );
    assert_eq!(
        planner
            .optimal_action(ValueKind::Realistic, &History::empty())
            .unwrap(),
        keep
    );
}

#[test]
fn zero_utility_picks_first_action() {
    let env = env("TwoButton");
    let ns = utility_ns(&env);
    let planner = Planner::new(
        env.clone(),
        ns.clone(),
        UtilityFunction::zero(),
        cfg(1, 2, 3),
    );
    for kind in [ValueKind::Ignorant, ValueKind::Realistic] {
        let a = planner.optimal_action(kind, &History::empty()).unwrap();
        assert_eq!(a, action(&env, &ns, "a_hack", "one"), "{kind}");
        assert_eq!(planner.v_optimal(kind, &History::empty()).unwrap(), q(0, 1));
    }
    // naming the constant-one utility still pays hedonistically
    assert_eq!(
        planner
            .v_optimal(ValueKind::Hedonistic, &History::empty())
            .unwrap(),
        q(7, 4)
    );

    let zero_only = NameSpace::with_utilities(vec![UtilityFunction::zero()]).unwrap();
    let planner = Planner::new(
        env.clone(),
        zero_only.clone(),
        UtilityFunction::zero(),
        cfg(1, 2, 3),
    );
    for kind in ValueKind::ALL {
        assert_eq!(
            planner.optimal_action(kind, &History::empty()).unwrap(),
            action(&env, &zero_only, "a_hack", "zero")
        );
        assert_eq!(planner.v_optimal(kind, &History::empty()).unwrap(), q(0, 1));
    }
}

#[test]
fn hedonistic_optimum_deludes() {
    let (env, ns, u1) = two_button();
    let planner = Planner::new(env.clone(), ns.clone(), u1, cfg(1, 2, 3))
        .with_successor(ValueKind::Hedonistic);
    let a = planner
        .optimal_action(ValueKind::Hedonistic, &History::empty())
        .unwrap();
    assert_eq!(ns.name(a.target).unwrap(), "one");
    let table = planner.build_optimal_policy(ValueKind::Hedonistic).unwrap();
    let runs = enumerate_realistic(&table, &env, &planner, 3, 1000).unwrap();
    for wh in &runs {
        for s in wh.history.steps() {
            assert_eq!(ns.name(s.action.target).unwrap(), "one");
        }
    }
    let perf = performance(&table, &env, &planner, planner.u1(), planner.cfg(), 1000).unwrap();
    assert_eq!(perf, q(0, 1));
}

#[test]
fn realistic_agent_performance() {
    let (env, ns, u1) = two_button();
    let planner = Planner::new(env.clone(), ns.clone(), u1, cfg(1, 2, 3));
    let table = planner.build_optimal_policy(ValueKind::Realistic).unwrap();
    let v = planner
        .v_value(ValueKind::Realistic, &History::empty(), &table)
        .unwrap();
    assert_eq!(v.value, q(7, 4));
    let runs = enumerate_realistic(&table, &env, &planner, 3, 1000).unwrap();
    assert_eq!(runs.len(), 1);
    for s in runs[0].history.steps() {
        assert_eq!(ns.name(s.action.target).unwrap(), "reward");
    }
    assert_eq!(
        performance(&table, &env, &planner, planner.u1(), planner.cfg(), 1000).unwrap(),
        q(7, 4)
    );
}

#[test]
fn single_name_matches_standard_expectimax() {
    for name in ["TwoButton", "NoisyButton", "DelusionButton", "ChessToy"] {
        let env = env(name);
        let u1 = utility("reward", &env);
        let ns = NameSpace::with_utilities(vec![u1.clone()]).unwrap();
        let c = cfg(1, 2, 4);
        let planner = Planner::new(env.clone(), ns, u1.clone(), c.clone());
        let (v_star, pi_star) = expectimax(&env, &u1, &c).unwrap();
        for kind in ValueKind::ALL {
            assert_eq!(
                planner.v_optimal(kind, &History::empty()).unwrap(),
                v_star,
                "{name} {kind}"
            );
        }
        let table = planner.build_optimal_policy(ValueKind::Realistic).unwrap();
        for h in env.reachable_below(4) {
            assert_eq!(
                table.decide_world(&h).unwrap().world,
                pi_star.decide(&h),
                "{name}"
            );
        }
    }
}

#[test]
fn noisy_button_depth_two_measure() {
    let env = env("NoisyButton");
    let ns = utility_ns(&env);
    let pi = PolicyTable::constant("safe", action(&env, &ns, "a_safe", "reward"));
    let runs = enumerate_ignorant(&pi, &env, 2, 100).unwrap();
    let mut probs: Vec<Q> = runs.iter().map(|w| w.prob.clone()).collect();
    probs.sort();
    assert_eq!(probs, vec![q(1, 100), q(9, 100), q(9, 100), q(81, 100)]);
    let planner = Planner::new(env.clone(), ns, utility("reward", &env), cfg(1, 2, 3));
    assert_eq!(
        enumerate_realistic(&pi, &env, &planner, 2, 100).unwrap(),
        runs
    );
}

#[test]
fn iterative_matches_recursive_on_two_button() {
    let (env, ns, u1) = two_button();
    let c = cfg(1, 2, 3);
    let planner = Planner::new(env.clone(), ns.clone(), u1.clone(), c.clone());
    let pi = PolicyTable::constant("safe", action(&env, &ns, "a_safe", "reward"));
    for &a in planner.actions() {
        for kind in ValueKind::ALL {
            let query = IterativeQuery {
                kind,
                env: &env,
                ns: &ns,
                u_t: &u1,
                policy: Some(&pi),
                acting: Some(&planner),
                cfg: &c,
                cap: 10_000,
            };
            let it = q_iterative(&query, &History::empty(), a).unwrap().value;
            let rec = match kind {
                ValueKind::Hedonistic => {
                    planner
                        .q_hedonistic(&History::empty(), a, &pi)
                        .unwrap()
                        .value
                }
                ValueKind::Ignorant => planner.q_ignorant(&History::empty(), a, &pi).unwrap().value,
                ValueKind::Realistic => planner.q_realistic(&History::empty(), a).unwrap().value,
            };
            assert_eq!(it, rec, "{kind} {a:?}");
        }
    }
}

#[test]
fn seeded_tie_break_is_reproducible() {
    let (env, ns, _) = two_button();
    let one = utility("one", &env);
    let a = Planner::new(env.clone(), ns.clone(), one.clone(), cfg(1, 2, 3))
        .with_tie_break(TieBreak::Seeded(7));
    let b = Planner::new(env.clone(), ns.clone(), one, cfg(1, 2, 3))
        .with_tie_break(TieBreak::Seeded(7));
    let ta = a.build_optimal_policy(ValueKind::Realistic).unwrap();
    let tb = b.build_optimal_policy(ValueKind::Realistic).unwrap();
    assert_eq!(ta, tb);
}

#[test]
fn horizon_and_name_errors() {
    let (env, ns, u1) = two_button();
    let planner = Planner::new(env.clone(), ns.clone(), u1, cfg(1, 2, 1));
    let keep = action(&env, &ns, "a_safe", "reward");
    let h = WorldHistory::empty()
        .extended(keep.world, selfmod_lab::Percept(1))
        .decorate(|_| keep.target);
    assert!(planner.q_realistic(&h, keep).is_err());
    let bad = selfmod_lab::Action::new(keep.world, selfmod_lab::NameId(9));
    assert!(planner.q_realistic(&History::empty(), bad).is_err());
    // H = 1: a single-step expectation
    assert_eq!(
        planner.q_realistic(&History::empty(), keep).unwrap().value,
        q(1, 1)
    );
}
