mod common;

use common::*;
use selfmod_lab::{Catalog, LabError, Percept, WorldAction, WorldHistory};

const COIN: &str = r#"
[[environment]]
name = "Coin"
description = "fair coin regardless of action"
actions = ["a", "b"]
percepts = ["tails", "heads"]
rewards = ["0", "1"]
full_support = true
utilities = ["reward", "one"]

[[environment.rule]]
suffix = "*"
action = "*"
weights = { tails = "1/2", heads = "1/2" }

[[environment.rule]]
suffix = "_/heads"
action = "b"
weights = { tails = 0.25, heads = 0.75 }

[[utility]]
name = "streak"
description = "1 after two heads"
default = "0"
rule = [{ suffix = "_/heads _/heads", value = "1" }]
"#;

#[test]
fn custom_catalog_round_trip() {
    let cat = Catalog::parse(COIN).unwrap();
    assert_eq!(cat.environment_names(), ["Coin"]);
    let env = cat.environment::<Q>("Coin").unwrap();
    let (a, b) = (WorldAction(0), WorldAction(1));
    let heads = WorldHistory::empty().extended(a, Percept(1));
    assert_eq!(
        env.distribution(&heads, b).unwrap().weights(),
        [q(1, 4), q(3, 4)]
    );
    assert_eq!(
        env.distribution(&heads, a).unwrap().weights(),
        [q(1, 2), q(1, 2)]
    );
    let streak = cat.utility::<Q>("streak", &env).unwrap();
    assert_eq!(streak.eval(&heads), q(0, 1));
    assert_eq!(streak.eval(&heads.extended(b, Percept(1))), q(1, 1));
    assert_eq!(streak.eval(&heads.extended(b, Percept(0))), q(0, 1));
    let reward = cat.utility::<Q>("reward", &env).unwrap();
    assert_eq!(reward.eval(&heads), q(1, 1));
}

#[test]
fn unnormalized_rows_are_rejected() {
    let bad = COIN.replace("tails = \"1/2\"", "tails = \"1/3\"");
    assert!(matches!(
        Catalog::parse(&bad),
        Err(LabError::InvalidEnvironment(_))
    ));
}

#[test]
fn unknown_names() {
    let cat = Catalog::builtin();
    assert!(matches!(
        cat.environment::<Q>("Nope"),
        Err(LabError::UnknownEnvironment(_))
    ));
    let e = env("TwoButton");
    assert!(matches!(
        cat.utility::<Q>("nope", &e),
        Err(LabError::UnknownUtility(_))
    ));
    assert_eq!(cat.environment_names().len(), 4);
}

#[test]
fn builtin_environments_are_consistent_in_floats() {
    let cat = Catalog::builtin();
    for name in cat.environment_names() {
        let exact = cat.environment::<Q>(name).unwrap();
        let float = cat.environment::<f64>(name).unwrap();
        for h in exact.reachable_below(3) {
            for a in exact.world_actions() {
                let x: Vec<f64> = exact
                    .distribution(&h, a)
                    .unwrap()
                    .weights()
                    .iter()
                    .map(selfmod_lab::Scalar::to_f64)
                    .collect();
                assert_eq!(x, float.distribution(&h, a).unwrap().weights());
            }
        }
    }
}
