//! Acceptance criteria, one PASS/FAIL line each. Run with `--nocapture` to
//! see the report.

mod common;

use std::path::Path;
use std::process::Command;

use common::*;
use selfmod_lab::theorem_lab::{compare_agents, realistic_safety, AgentKind};
use selfmod_lab::{
    truncation_bound, verify, Certificate, Claim, Experiment, History, NameSpace, Planner,
    PolicyTable, TieBreak, ValueKind,
};

/// Exact criteria compare rationals with `==`.
const EXACT: &str = "0 (exact)";
/// Safety tolerance is `2γ^H/(1−γ) + SAFETY_SLACK`.
const SAFETY_SLACK: f64 = 1e-9;
const MIN_THM4_TRIPLES: usize = 200;
const MIN_LEM1_PROBES: usize = 100;
const LEM4_POLICIES: usize = 20;
const SAFETY_SEEDS: u64 = 10;

fn experiment(name: &str, h: usize) -> Experiment<Q> {
    let e = env(name);
    let us = e
        .default_utilities()
        .iter()
        .map(|n| utility(n, &e))
        .collect();
    Experiment::new(e, us, cfg(1, 2, h)).unwrap()
}

/// Integer preceding `marker` in one of the certificate's notes.
fn noted(cert: &Certificate, marker: &str) -> Option<usize> {
    cert.notes.iter().find_map(|n| {
        let head = n.split(marker).next().filter(|_| n.contains(marker))?;
        head.split_whitespace().last()?.parse().ok()
    })
}

fn exact_witnesses(cert: &Certificate) -> bool {
    cert.witnesses
        .iter()
        .all(|w| w.tolerance == EXACT || w.tolerance == "exact")
}

struct Report {
    failed: Vec<usize>,
}

impl Report {
    fn line(&mut self, n: usize, ok: bool, detail: String) {
        println!(
            "criterion {n}: {} {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            self.failed.push(n);
        }
    }
}

fn criterion_1() -> (bool, String) {
    let exp = experiment("TwoButton", 4);
    let cert = verify(Claim::Thm3, &exp).unwrap();
    let ns = NameSpace::with_utilities(exp.utilities.clone()).unwrap();
    let planner = Planner::new(
        exp.env.clone(),
        ns.clone(),
        exp.u1().clone(),
        exp.cfg.clone(),
    )
    .with_successor(ValueKind::Hedonistic);
    let delude = PolicyTable::constant("always-delude", action(&exp.env, &ns, "a_hack", "one"));
    let root = planner
        .v_value(ValueKind::Hedonistic, &History::empty(), &delude)
        .unwrap()
        .value;
    let class = noted(&cert, "depth-2 tables").unwrap_or(0);
    let ok = cert.passed() && exact_witnesses(&cert) && root == q(15, 8) && class == 256;
    (ok, format!("V^he(eps)={root} (want 15/8); {} checks over {class} depth-2 tables + optimal policies; tol {EXACT}", cert.checks))
}

fn criterion_2() -> (bool, String) {
    let mut ok = true;
    let mut parts = vec![];
    for (name, h) in [("TwoButton", 4), ("NoisyButton", 3)] {
        let cert = verify(Claim::Thm4, &experiment(name, h)).unwrap();
        let triples = noted(&cert, "(policy, sibling, history) triples").unwrap_or(0);
        ok &= cert.passed() && exact_witnesses(&cert) && triples >= MIN_THM4_TRIPLES;
        parts.push(format!(
            "{name}: {triples} triples, {} equalities, {:?}",
            cert.checks, cert.verdict
        ));
    }
    (
        ok,
        format!(
            "{}; need >= {MIN_THM4_TRIPLES} each; tol {EXACT}",
            parts.join("; ")
        ),
    )
}

fn criterion_3() -> (bool, String) {
    let mut ok = true;
    let (mut steps, mut passed, mut mods, mut bad) = (0, 0, 0, 0);
    for seed in 0..SAFETY_SEEDS {
        let exp = experiment("DelusionButton", 5)
            .with_tie_break(TieBreak::Seeded(seed))
            .with_seed(seed);
        let (cert, stats) = realistic_safety(&exp).unwrap();
        let tol = format!("2*{}+{SAFETY_SLACK:e}", truncation_bound(&exp.cfg));
        ok &= cert.passed() && stats.value_changing_modifications == 0;
        ok &= cert.witnesses.iter().all(|w| w.tolerance == tol);
        steps += stats.steps;
        passed += stats.steps - cert.counterexamples().count();
        mods += stats.modifications;
        bad += stats.value_changing_modifications;
    }
    ok &= steps > 0 && passed == steps;
    (
        ok,
        format!(
            "DelusionButton H=5, {SAFETY_SEEDS} seeds: {passed}/{steps} on-policy steps hold; switches away from the current utility: {mods} (value-changing: {bad}); tol 2*gamma^H/(1-gamma)+{SAFETY_SLACK:e}"
        ),
    )
}

fn criterion_4() -> (bool, String) {
    let mut ok = true;
    let mut parts = vec![];
    for (name, h) in [("TwoButton", 4), ("DelusionButton", 4)] {
        let cert = verify(Claim::Lem1, &experiment(name, h)).unwrap();
        let probes = noted(&cert, "probes per value kind").unwrap_or(0);
        ok &= cert.passed() && exact_witnesses(&cert) && probes >= MIN_LEM1_PROBES;
        parts.push(format!(
            "{name}: {probes} probes/kind, {} comparisons",
            cert.checks
        ));
    }
    (
        ok,
        format!(
            "{}; need >= {MIN_LEM1_PROBES}; tol {EXACT}",
            parts.join("; ")
        ),
    )
}

fn criterion_5() -> (bool, String) {
    let cert = verify(Claim::ApxLem4, &experiment("DelusionButton", 5)).unwrap();
    let policies = noted(&cert, "random policies").unwrap_or(0);
    let modifying = noted(&cert, "of them modify").unwrap_or(0);
    let ok = cert.passed() && exact_witnesses(&cert) && policies == LEM4_POLICIES && modifying > 0;
    (
        ok,
        format!("DelusionButton depths 0..=5: {policies} policies ({modifying} self-modifying), {} checks; tol {EXACT}", cert.checks),
    )
}

fn criterion_6() -> (bool, String) {
    let mut ok = true;
    let mut parts = vec![];
    for (name, h) in [("TwoButton", 4), ("DelusionButton", 5)] {
        let exp = experiment(name, h);
        let t7 = verify(Claim::ApxThm7, &exp).unwrap();
        let t8 = verify(Claim::ApxThm8, &exp).unwrap();
        // the re-extension comparison is always one of the extension checks
        ok &= t7.passed() && t8.passed() && exact_witnesses(&t7) && exact_witnesses(&t8);
        parts.push(format!(
            "{name}: existence {:?} ({} checks), extension {:?} ({} checks)",
            t7.verdict, t7.checks, t8.verdict, t8.checks
        ));
    }
    (
        ok,
        format!(
            "{}; re-extension verdict unchanged; tol {EXACT}",
            parts.join("; ")
        ),
    )
}

fn criterion_7() -> (bool, String) {
    let cmp = compare_agents(&experiment("DelusionButton", 5), &AgentKind::ALL).unwrap();
    let perf = |k| cmp.row(k).unwrap().performance.clone();
    let ok = cmp.realistic_beats_hedonistic() == Some(true)
        && cmp.worst_ignorant_below_realistic() == Some(true)
        && cmp.realistic_dominates() == Some(true);
    (
        ok,
        format!(
            "DelusionButton H=5: realistic={} hedonistic={} ignorant={} ignorant-worst={}",
            perf(AgentKind::Realistic),
            perf(AgentKind::Hedonistic),
            perf(AgentKind::Ignorant),
            perf(AgentKind::IgnorantWorst)
        ),
    )
}

fn cli(args: &[&str], out: &Path) -> Option<i32> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    Command::new(env!("CARGO"))
        .current_dir(root)
        .args(["run", "-q", "-p", "selfmod-lab-cli", "--"])
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("SELFMOD_LAB_CAP")
        .output()
        .ok()?
        .status
        .code()
}

fn criterion_8() -> (bool, String) {
    let mut ok = true;
    let mut failing = 0;
    for claim in Claim::ALL {
        let cert = verify(claim, &experiment("TwoButton", 4).negative()).unwrap();
        let caught = !cert.passed() && cert.counterexamples().next().is_some();
        ok &= caught;
        failing += caught as usize;
    }
    let out = std::env::temp_dir().join(format!("selfmod-lab-acceptance-{}", std::process::id()));
    let expect: [(&[&str], i32); 4] = [
        (
            &[
                "verify",
                "--env",
                "TwoButton",
                "--gamma",
                "1/2",
                "--horizon",
                "3",
                "--claims",
                "THM3,THM4,THM5",
            ],
            0,
        ),
        (
            &[
                "verify",
                "--env",
                "TwoButton",
                "--horizon",
                "3",
                "--claims",
                "THM5",
                "--negative-control",
            ],
            1,
        ),
        (&["verify", "--gamma", "1.5", "--claims", "THM3"], 2),
        (
            &[
                "verify",
                "--env",
                "NoisyButton",
                "--horizon",
                "3",
                "--claims",
                "THM5",
                "--cap",
                "2",
            ],
            3,
        ),
    ];
    let mut codes = vec![];
    for (args, want) in expect {
        let got = cli(args, &out);
        ok &= got == Some(want);
        codes.push(format!(
            "{want}->{}",
            got.map_or("none".into(), |c| c.to_string())
        ));
    }
    let _ = std::fs::remove_dir_all(&out);
    (
        ok,
        format!(
            "{failing}/{} negative controls fail with witnesses; CLI exit codes (want->got) {}",
            Claim::ALL.len(),
            codes.join(" ")
        ),
    )
}

#[test]
fn acceptance() {
    let mut report = Report { failed: vec![] };
    let criteria: [fn() -> (bool, String); 8] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
    ];
    for (i, c) in criteria.iter().enumerate() {
        let (ok, detail) = c();
        report.line(i + 1, ok, detail);
    }
    assert!(
        report.failed.is_empty(),
        "failed criteria: {:?}",
        report.failed
    );
}
