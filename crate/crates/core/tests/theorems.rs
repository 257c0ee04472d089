mod common;

use common::*;
use selfmod_lab::theorem_lab::{compare_agents, realistic_safety, AgentKind};
use selfmod_lab::{
    builtin_environment, builtin_utility, verify, Claim, DiscountConfig, Experiment, TieBreak,
};

fn experiment(name: &str, h: usize) -> Experiment<Q> {
    let e = env(name);
    let us = e
        .default_utilities()
        .iter()
        .map(|n| utility(n, &e))
        .collect();
    Experiment::new(e, us, cfg(1, 2, h)).unwrap()
}

fn float_experiment(name: &str, h: usize) -> Experiment<f64> {
    let e = builtin_environment::<f64>(name).unwrap();
    let us = e
        .default_utilities()
        .iter()
        .map(|n| builtin_utility(n, &e).unwrap())
        .collect();
    Experiment::new(e, us, DiscountConfig::new(0.5, h).unwrap()).unwrap()
}

fn assert_claims(exp: &Experiment<Q>, claims: &[Claim]) {
    for &claim in claims {
        let pos = verify(claim, exp).unwrap();
        assert!(
            pos.passed(),
            "{claim} on {}:\n{}",
            exp.env.name(),
            pos.to_text()
        );
        assert!(pos.checks > 0, "{claim} made no checks");
        let neg = verify(claim, &exp.clone().negative()).unwrap();
        assert!(
            !neg.passed(),
            "{claim} negative control passed on {}",
            exp.env.name()
        );
        assert!(neg.counterexamples().next().is_some());
    }
}

#[test]
fn two_button_all_claims() {
    assert_claims(&experiment("TwoButton", 4), &Claim::ALL);
}

#[test]
fn noisy_button_all_claims() {
    assert_claims(&experiment("NoisyButton", 3), &Claim::ALL);
}

#[test]
fn delusion_button_cheap_claims() {
    assert_claims(
        &experiment("DelusionButton", 4),
        &[
            Claim::Thm5,
            Claim::Lem1,
            Claim::ApxLem4,
            Claim::ApxThm7,
            Claim::ApxThm8,
        ],
    );
}

#[test]
fn hedonistic_claim_samples_when_class_is_large() {
    let cert = verify(Claim::Thm3, &experiment("ChessToy", 3)).unwrap();
    assert!(cert.passed(), "{}", cert.to_text());
    assert!(cert.notes.iter().any(|n| n.contains("random")));
}

#[test]
fn float_scalars_agree() {
    let exp = float_experiment("NoisyButton", 3);
    for claim in [
        Claim::Thm4,
        Claim::Thm5,
        Claim::Lem1,
        Claim::ApxLem4,
        Claim::ApxThm7,
    ] {
        assert!(verify(claim, &exp).unwrap().passed(), "{claim} in f64");
        assert!(
            !verify(claim, &exp.clone().negative()).unwrap().passed(),
            "{claim} negative in f64"
        );
    }
}

#[test]
fn seeded_tie_break_keeps_safety() {
    for seed in 0..4 {
        let exp = experiment("TwoButton", 4).with_tie_break(TieBreak::Seeded(seed));
        let (cert, stats) = realistic_safety(&exp).unwrap();
        assert!(cert.passed());
        assert_eq!(stats.value_changing_modifications, 0);
    }
}

#[test]
fn certificate_is_deterministic() {
    let exp = experiment("TwoButton", 3).with_seed(7);
    let a = verify(Claim::Thm4, &exp).unwrap();
    let b = verify(Claim::Thm4, &exp).unwrap();
    assert_eq!(a, b);
    assert_ne!(
        a.fingerprint,
        verify(Claim::Thm4, &exp.clone().with_seed(8))
            .unwrap()
            .fingerprint
    );
    let json = serde_json::to_string(&a).unwrap();
    assert!(json.contains("\"claim\":\"THM4\""));
}

#[test]
fn agent_comparison_two_button() {
    let cmp = compare_agents(&experiment("TwoButton", 4), &AgentKind::ALL).unwrap();
    let re = cmp.row(AgentKind::Realistic).unwrap();
    assert_eq!(re.performance, q(15, 8));
    assert_eq!(re.modifications, 0);
    assert_eq!(cmp.row(AgentKind::Hedonistic).unwrap().performance, q(0, 1));
    assert_eq!(cmp.realistic_beats_hedonistic(), Some(true));
    assert_eq!(cmp.worst_ignorant_below_realistic(), Some(true));
    assert_eq!(cmp.realistic_dominates(), Some(true));
}

#[test]
fn unknown_claim_is_config_error() {
    assert!("THM9".parse::<Claim>().is_err());
    assert_eq!("apx_thm7".parse::<Claim>().unwrap(), Claim::ApxThm7);
}
