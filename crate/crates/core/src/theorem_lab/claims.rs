//! The verifiers.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::classes::{action_grid, depth2_class, random_policy_namespace, random_world_table};
use super::{Certificate, Claim, Experiment, Verdict, Witness};
use crate::error::{LabError, Result};
use crate::history::{Action, History, NameId, WorldAction, WorldHistory};
use crate::namespace::NameSpace;
use crate::policy::{PolicyTable, WorldPolicyTable};
use crate::rollout::{associated_world_policy, enumerate_realistic, world_marginals};
use crate::scalar::Scalar;
use crate::utility::truncation_bound;
use crate::value::standard::{expectimax, standard_measure, standard_v, Expectimax};
use crate::value::{q_iterative, IterativeQuery, Planner, ValueKind};

const KEEP_PASSING: usize = 6;
const KEEP_FAILING: usize = 25;

struct Recorder {
    cert: Certificate,
    kept_pass: usize,
    failures: usize,
}

impl Recorder {
    fn new(cert: Certificate) -> Self {
        Self {
            cert,
            kept_pass: 0,
            failures: 0,
        }
    }

    fn check(
        &mut self,
        ok: bool,
        instance: String,
        values: Vec<(String, String)>,
        tolerance: &str,
    ) {
        self.cert.checks += 1;
        if ok {
            if self.kept_pass < KEEP_PASSING {
                self.kept_pass += 1;
                self.push(instance, values, tolerance, false);
            }
        } else {
            self.cert.verdict = Verdict::Fail;
            self.failures += 1;
            if self.failures <= KEEP_FAILING {
                self.push(instance, values, tolerance, true);
            }
        }
    }

    fn push(
        &mut self,
        instance: String,
        values: Vec<(String, String)>,
        tolerance: &str,
        counterexample: bool,
    ) {
        self.cert.witnesses.push(Witness {
            instance,
            values,
            tolerance: tolerance.into(),
            counterexample,
        });
    }

    fn note(&mut self, note: impl Into<String>) {
        self.cert.notes.push(note.into());
    }

    fn finish(mut self) -> Certificate {
        if self.failures > 0 {
            let n = self.failures;
            self.note(format!("{n} of {} checks failed", self.cert.checks));
        }
        self.cert
    }
}

fn exact_tol<S: Scalar>() -> f64 {
    if S::EXACT {
        0.0
    } else {
        1e-9
    }
}

fn tol_text(tol: f64) -> String {
    if tol == 0.0 {
        "0 (exact)".into()
    } else {
        format!("{tol:e}")
    }
}

fn close<S: Scalar>(a: &S, b: &S, tol: f64) -> bool {
    if tol == 0.0 {
        a == b
    } else {
        a.abs_diff_f64(b) <= tol
    }
}

fn at_most<S: Scalar>(a: &S, b: &S, tol: f64) -> bool {
    a <= b || a.abs_diff_f64(b) <= tol
}

fn kv(k: &str, v: impl Into<String>) -> (String, String) {
    (k.to_string(), v.into())
}

fn utility_ns<S: Scalar>(exp: &Experiment<S>) -> Result<NameSpace<S>> {
    NameSpace::with_utilities(exp.utilities.clone())
}

fn first_world<S: Scalar>(exp: &Experiment<S>) -> WorldAction {
    let env = &exp.env;
    env.world_actions()
        .min_by(|a, b| {
            env.actions()
                .symbol(a.index())
                .cmp(&env.actions().symbol(b.index()))
        })
        .expect("non-empty action alphabet")
}

fn decide(pi: &PolicyTable, h: &History) -> Result<Action> {
    pi.decide(h).ok_or_else(|| LabError::PolicyUndefined {
        policy: pi.label().to_string(),
        history: format!("{h:?}"),
    })
}

const THM3_SAMPLE: usize = 256;

/// Hedonistic value of always deluding (acting with the first world action
/// and naming the constant-one utility) equals the maximal truncated return
/// at every reachable history and dominates the depth-2 class plus the
/// optimal policies of every kind. When the depth-2 class exceeds the cap,
/// a seeded sample of random world tables stands in for it.
///
/// Negative control: the candidate keeps `u₁` instead of deluding.
pub fn verify_hedonistic_selfmod<S: Scalar>(exp: &Experiment<S>) -> Result<Certificate> {
    let mut rec = Recorder::new(exp.certificate(Claim::Thm3));
    let ns = utility_ns(exp)?;
    let Some(one) = ns
        .ids()
        .find(|n| ns.utility(*n).is_ok_and(|u| u.is_constant_one()))
    else {
        rec.note("constant-one utility absent from the name space: dominance check is vacuous");
        return Ok(rec.finish());
    };
    let env = &exp.env;
    let h_max = exp.cfg.horizon();
    let he = Planner::new(env.clone(), ns.clone(), exp.u1().clone(), exp.cfg.clone())
        .with_tie_break(exp.tie)
        .with_successor(ValueKind::Hedonistic);
    let re = Planner::new(env.clone(), ns.clone(), exp.u1().clone(), exp.cfg.clone())
        .with_tie_break(exp.tie);
    let vocab = ns.vocabulary(env);
    let home = ns.lookup(exp.u1().label()).unwrap_or(NameId(0));
    let target = if exp.negative_control {
        match ns.ids().find(|n| *n != one) {
            Some(n) => n,
            None => {
                rec.note(
                    "only the constant-one utility is bound: no non-deluding candidate exists",
                );
                one
            }
        }
    } else {
        one
    };
    let candidate = PolicyTable::constant(
        if target == one {
            "always-delude"
        } else {
            "never-delude"
        },
        Action::new(first_world(exp), target),
    );
    let histories: Vec<History> = env
        .reachable_below(h_max)
        .into_iter()
        .map(|h| h.decorate(|_| home))
        .collect();
    let budget = exp.cap / histories.len().max(1);
    let (mut class, sampled) = match depth2_class(env, he.actions(), h_max, budget) {
        Ok(class) => (class, false),
        Err(LabError::CapExceeded { .. }) => {
            let mut rng = ChaCha8Rng::seed_from_u64(exp.seed);
            let n = budget.clamp(1, THM3_SAMPLE);
            let class = (0..n)
                .map(|i| {
                    random_world_table(&mut rng, env, he.actions(), h_max, format!("random#{i}"))
                })
                .collect();
            (class, true)
        }
        Err(e) => return Err(e),
    };
    let surrogate = class.len();
    class.push(he.build_optimal_policy(ValueKind::Hedonistic)?);
    class.push(re.build_optimal_policy(ValueKind::Ignorant)?);
    class.push(re.build_optimal_policy(ValueKind::Realistic)?);
    rec.note(format!(
        "candidate {} = ({}); class: {surrogate} {} tables + {} optimal policies; {} reachable histories",
        candidate.label(),
        vocab.format_action(candidate.fallback().expect("constant")),
        if sampled { "random (depth-2 class over the cap)" } else { "depth-2" },
        class.len() - surrogate,
        histories.len()
    ));
    let tol = exact_tol::<S>();
    let tol_s = tol_text(tol);
    let mut best = Vec::with_capacity(histories.len());
    for h in &histories {
        let v = he.v_value(ValueKind::Hedonistic, h, &candidate)?.value;
        let goal = exp.cfg.max_return(h_max - h.len());
        rec.check(
            close(&v, &goal, tol),
            format!(
                "V^he of {} at {}",
                candidate.label(),
                vocab.format_history(h)
            ),
            vec![kv("value", v.render()), kv("expected", goal.render())],
            &tol_s,
        );
        best.push(v);
    }
    for pi in &class {
        for (h, top) in histories.iter().zip(&best) {
            let v = he.v_value(ValueKind::Hedonistic, h, pi)?.value;
            rec.check(
                at_most(&v, top, tol),
                format!(
                    "{} vs {} at {}",
                    pi.label(),
                    candidate.label(),
                    vocab.format_history(h)
                ),
                vec![kv("policy", v.render()), kv("candidate", top.render())],
                &tol_s,
            );
        }
    }
    Ok(rec.finish())
}

const THM4_TRIPLES: usize = 240;

/// Ignorant values of a modification-independent policy and of any sibling
/// that differs in one modification decision are equal at every history.
///
/// Negative control: siblings also change the world action.
pub fn verify_ignorant_indifference<S: Scalar>(exp: &Experiment<S>) -> Result<Certificate> {
    let mut rec = Recorder::new(exp.certificate(Claim::Thm4));
    let ns = utility_ns(exp)?;
    if ns.len() < 2 {
        rec.note("a single name admits no sibling policies");
        return Ok(rec.finish());
    }
    let env = &exp.env;
    let h_max = exp.cfg.horizon();
    let planner = Planner::new(env.clone(), ns.clone(), exp.u1().clone(), exp.cfg.clone())
        .with_tie_break(exp.tie);
    let vocab = ns.vocabulary(env);
    let actions = planner.actions().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(exp.seed);
    let points = env.reachable_below(h_max);
    let worlds: Vec<WorldAction> = env.world_actions().collect();

    let mut dependent = random_world_table(&mut rng, env, &actions, h_max, "mod-dependent");
    dependent.insert_full(History::empty(), actions[0]);
    let mut class: Vec<PolicyTable> = actions
        .iter()
        .map(|a| PolicyTable::constant(format!("const {}", vocab.format_action(*a)), *a))
        .collect();
    class.push(dependent);
    let per_policy = points.len() * (ns.len() - 1);
    let mut i = 0;
    while (class.len() - 1) * per_policy < THM4_TRIPLES {
        class.push(random_world_table(
            &mut rng,
            env,
            &actions,
            h_max,
            format!("random#{i}"),
        ));
        i += 1;
    }

    let tol = exact_tol::<S>();
    let tol_s = tol_text(tol);
    let mut triples = 0usize;
    let mut skipped = 0usize;
    for pi in &class {
        if !pi.is_mod_independent() {
            skipped += 1;
            continue;
        }
        for h0 in &points {
            let base = pi.decide_world(h0).expect("total table");
            for alt in ns.ids().filter(|n| *n != base.target) {
                let world = if exp.negative_control {
                    let k = worlds
                        .iter()
                        .position(|w| *w == base.world)
                        .expect("known action");
                    worlds[(k + 1) % worlds.len()]
                } else {
                    base.world
                };
                let mut sibling = pi.clone();
                sibling.set_label(format!(
                    "{} with {} at {}",
                    pi.label(),
                    vocab.format_action(Action::new(world, alt)),
                    vocab.format_world(h0)
                ));
                sibling.insert_world(h0.clone(), Action::new(world, alt));
                triples += 1;
                let mut evals = vec![
                    History::empty(),
                    h0.decorate(|_| NameId(rng.gen_range(0..ns.len() as u16))),
                ];
                for _ in 0..6 {
                    let w = points.choose(&mut rng).expect("non-empty");
                    evals.push(w.decorate(|_| NameId(rng.gen_range(0..ns.len() as u16))));
                }
                for h in &evals {
                    let a = planner.v_value(ValueKind::Ignorant, h, pi)?.value;
                    let b = planner.v_value(ValueKind::Ignorant, h, &sibling)?.value;
                    rec.check(
                        close(&a, &b, tol),
                        format!("{} at {}", sibling.label(), vocab.format_history(h)),
                        vec![kv("policy", a.render()), kv("sibling", b.render())],
                        &tol_s,
                    );
                }
            }
        }
    }
    rec.note(format!(
        "{triples} (policy, sibling, history) triples over {} policies",
        class.len() - skipped
    ));
    if skipped > 0 {
        rec.note(format!(
            "skipped {skipped} modification-dependent policy (outside the hypothesis)"
        ));
    }
    Ok(rec.finish())
}

/// On-policy statistics of the realistic safety check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SafetyStats {
    pub steps: usize,
    pub modifications: usize,
    pub value_changing_modifications: usize,
    pub delusions: usize,
}

/// At every on-policy history of the realistic-optimal agent,
/// `Q^re₁(h π_t(h)) = Q^re₁(h π₁(h)) = max_a Q^re₁(h a)` within
/// `2γ^H/(1−γ) + 1e−9`.
///
/// Negative control: `π₁` plays a minimizing action at the empty history.
pub fn verify_realistic_safety<S: Scalar>(exp: &Experiment<S>) -> Result<Certificate> {
    realistic_safety(exp).map(|(c, _)| c)
}

pub fn realistic_safety<S: Scalar>(exp: &Experiment<S>) -> Result<(Certificate, SafetyStats)> {
    let mut rec = Recorder::new(exp.certificate(Claim::Thm5));
    let ns = utility_ns(exp)?;
    let env = &exp.env;
    let planner = Planner::new(env.clone(), ns.clone(), exp.u1().clone(), exp.cfg.clone())
        .with_tie_break(exp.tie);
    let vocab = ns.vocabulary(env);
    let mut pi1 = planner.build_optimal_policy(ValueKind::Realistic)?;
    if exp.negative_control {
        let table = planner.q_table(ValueKind::Realistic, &History::empty())?;
        let mut worst = &table[0];
        for entry in &table {
            if entry.1 < worst.1 {
                worst = entry;
            }
        }
        let top = planner.v_optimal(ValueKind::Realistic, &History::empty())?;
        if top.abs_diff_f64(&worst.1) <= 2.0 * truncation_bound(&exp.cfg).to_f64() + 1e-9 {
            rec.note(
                "every root action is within tolerance of optimal: corruption cannot be detected",
            );
        }
        pi1.insert_world(WorldHistory::empty(), worst.0);
        pi1.set_label("corrupted realistic-optimal");
    }
    let initial = planner.initial_name();
    let runs = enumerate_realistic(&pi1, env, &planner, exp.cfg.horizon(), exp.cap)?;
    let mut points = BTreeSet::new();
    for wh in &runs {
        for t in 0..wh.history.len() {
            points.insert(wh.history.prefix(t));
        }
    }
    let bound = truncation_bound(&exp.cfg);
    let tol = 2.0 * bound.to_f64() + 1e-9;
    let tol_s = format!("2*{}+1e-9", bound.render());
    let one: Option<NameId> = ns
        .ids()
        .find(|n| ns.utility(*n).is_ok_and(|u| u.is_constant_one()));
    let mut stats = SafetyStats::default();
    for h in &points {
        let current = match h.last_action() {
            None => initial,
            Some(prev) => Some(prev.target),
        };
        let a_t = match h.last_action() {
            None => decide(&pi1, h)?,
            Some(prev) => planner.act(prev.target, h)?,
        };
        let a_1 = decide(&pi1, h)?;
        let q_t = planner.q_optimal(ValueKind::Realistic, h, a_t)?;
        let q_1 = planner.q_optimal(ValueKind::Realistic, h, a_1)?;
        let v = planner.v_optimal(ValueKind::Realistic, h)?;
        let ok = q_t.abs_diff_f64(&q_1) <= tol
            && q_t.abs_diff_f64(&v) <= tol
            && q_1.abs_diff_f64(&v) <= tol;
        stats.steps += 1;
        if current.is_some_and(|c| c != a_t.target) {
            stats.modifications += 1;
            if !ok {
                stats.value_changing_modifications += 1;
            }
        }
        if one.is_some_and(|o| o == a_t.target && Some(o) != initial) {
            stats.delusions += 1;
        }
        rec.check(
            ok,
            format!("t={} h={}", h.len() + 1, vocab.format_history(h)),
            vec![
                kv("pi_t", vocab.format_action(a_t)),
                kv("pi_1", vocab.format_action(a_1)),
                kv("Q(pi_t)", q_t.render()),
                kv("Q(pi_1)", q_1.render()),
                kv("max Q", v.render()),
            ],
            &tol_s,
        );
    }
    rec.note(format!(
        "on-policy steps: {}; modifications: {}; value-changing modifications: {}; delusions: {}",
        stats.steps, stats.modifications, stats.value_changing_modifications, stats.delusions
    ));
    Ok((rec.finish(), stats))
}

const LEM1_PROBES: usize = 60;

/// Recursive values equal iterative expectations under `ρ_ig^π`
/// (hedonistic, ignorant) and `ρ_re` (realistic), on random probes in a
/// utility name space and in a random policy name space.
///
/// Negative control: the ignorant and realistic probes use each other's
/// measure.
pub fn verify_iterative_forms<S: Scalar>(exp: &Experiment<S>) -> Result<Certificate> {
    let mut rec = Recorder::new(exp.certificate(Claim::Lem1));
    let env = &exp.env;
    let h_max = exp.cfg.horizon();
    let mut rng = ChaCha8Rng::seed_from_u64(exp.seed ^ 0x1e31);
    let spaces = [
        ("utility", utility_ns(exp)?),
        (
            "policy",
            random_policy_namespace(&mut rng, env, 3, h_max, true)?,
        ),
    ];
    let points = env.reachable_below(h_max);
    let tol = exact_tol::<S>();
    let tol_s = tol_text(tol);
    for (mode, ns) in &spaces {
        let planner = Planner::new(env.clone(), ns.clone(), exp.u1().clone(), exp.cfg.clone())
            .with_tie_break(exp.tie);
        let vocab = ns.vocabulary(env);
        let actions = planner.actions().to_vec();
        for i in 0..LEM1_PROBES {
            let w = points.choose(&mut rng).expect("non-empty");
            let h = w.decorate(|_| NameId(rng.gen_range(0..ns.len() as u16)));
            let a = *actions.choose(&mut rng).expect("non-empty");
            let pi = random_world_table(&mut rng, env, &actions, h_max, format!("probe#{i}"));
            for kind in ValueKind::ALL {
                let recursive = match kind {
                    ValueKind::Hedonistic => planner.q_hedonistic(&h, a, &pi)?,
                    ValueKind::Ignorant => planner.q_ignorant(&h, a, &pi)?,
                    ValueKind::Realistic => planner.q_realistic(&h, a)?,
                }
                .value;
                let measure = match (exp.negative_control, kind) {
                    (true, ValueKind::Ignorant) => ValueKind::Realistic,
                    (true, ValueKind::Realistic) => ValueKind::Ignorant,
                    _ => kind,
                };
                let query = IterativeQuery {
                    kind: measure,
                    env,
                    ns,
                    u_t: exp.u1(),
                    policy: Some(&pi),
                    acting: Some(&planner),
                    cfg: &exp.cfg,
                    cap: exp.cap,
                };
                let iterative = q_iterative(&query, &h, a)?.value;
                rec.check(
                    close(&recursive, &iterative, tol),
                    format!(
                        "{mode} mode {kind} probe#{i} h={} a={}",
                        vocab.format_history(&h),
                        vocab.format_action(a)
                    ),
                    vec![
                        kv("recursive", recursive.render()),
                        kv("iterative", iterative.render()),
                    ],
                    &tol_s,
                );
            }
        }
    }
    rec.note(format!(
        "{} probes per value kind",
        LEM1_PROBES * spaces.len()
    ));
    Ok(rec.finish())
}

const LEM4_POLICIES: usize = 20;

/// For random self-modifying policies, the realistic world marginals equal
/// the standard measure of the associated world policy at every depth, and
/// the root realistic value equals its standard value.
///
/// Negative control: the associated world policy is perturbed at the empty
/// history, which always has positive measure.
pub fn verify_world_policy_equivalence<S: Scalar>(exp: &Experiment<S>) -> Result<Certificate> {
    let mut rec = Recorder::new(exp.certificate(Claim::ApxLem4));
    let env = &exp.env;
    let h_max = exp.cfg.horizon();
    let mut rng = ChaCha8Rng::seed_from_u64(exp.seed ^ 0x4a4);
    let tol = exact_tol::<S>();
    let tol_s = tol_text(tol);
    let worlds: Vec<WorldAction> = env.world_actions().collect();
    if exp.negative_control && worlds.len() < 2 {
        rec.note("a single world action leaves nothing to perturb");
    }
    let mut modifying = 0usize;
    for i in 0..LEM4_POLICIES {
        let ns = random_policy_namespace(&mut rng, env, 3, h_max, i % 4 == 3)?;
        let pi1 = random_world_table(
            &mut rng,
            env,
            &action_grid(env, ns.len()),
            h_max,
            format!("pi1#{i}"),
        );
        let vocab = ns.vocabulary(env);
        let planner = Planner::new(env.clone(), ns.clone(), exp.u1().clone(), exp.cfg.clone());
        let mut hat = associated_world_policy(&pi1, env, &ns, &exp.cfg, exp.cap)?;
        if exp.negative_control && worlds.len() > 1 {
            let root = hat.decide(&WorldHistory::empty());
            let k = worlds
                .iter()
                .position(|w| *w == root)
                .expect("known action");
            hat.insert(WorldHistory::empty(), worlds[(k + 1) % worlds.len()]);
        }
        let full = enumerate_realistic(&pi1, env, &ns, h_max, exp.cap)?;
        if full.iter().any(|wh| {
            let s = wh.history.steps();
            s.windows(2)
                .any(|p| p[0].action.target != p[1].action.target)
        }) {
            modifying += 1;
        }
        for depth in 0..=h_max {
            let re = world_marginals(&enumerate_realistic(&pi1, env, &ns, depth, exp.cap)?);
            let std = standard_measure(env, &hat, depth)?;
            let mut ok = re.len() == std.len();
            let mut first_diff = None;
            for (h, p) in &re {
                let q = std.get(h);
                if !q.is_some_and(|q| close(p, q, tol)) {
                    ok = false;
                    first_diff.get_or_insert((
                        h.clone(),
                        p.render(),
                        q.map_or("0".into(), |q| q.render()),
                    ));
                }
            }
            let mut values = vec![
                kv("support(re)", re.len().to_string()),
                kv("support(std)", std.len().to_string()),
            ];
            if let Some((h, p, q)) = first_diff {
                values.push(kv("history", vocab.format_world(&h)));
                values.push(kv("rho_re", p));
                values.push(kv("rho_std", q));
            }
            rec.check(
                ok,
                format!("policy#{i} world marginals at depth {depth}"),
                values,
                &tol_s,
            );
        }
        let a = decide(&pi1, &History::empty())?;
        let q = planner.q_realistic(&History::empty(), a)?.value;
        let s = standard_v(env, exp.u1(), &hat, &WorldHistory::empty(), &exp.cfg)?;
        rec.check(
            close(&q, &s, tol),
            format!("policy#{i} root value"),
            vec![kv("Q^re", q.render()), kv("standard", s.render())],
            &tol_s,
        );
    }
    rec.note(format!(
        "{LEM4_POLICIES} random policies, {modifying} of them modify on-policy"
    ));
    Ok(rec.finish())
}

fn worst_constant<S: Scalar>(exp: &Experiment<S>) -> Result<WorldPolicyTable> {
    let mut ex = Expectimax::new(&exp.env, exp.u1(), &exp.cfg);
    let mut worst: Option<(WorldAction, S)> = None;
    for a in exp.env.world_actions() {
        let q = ex.q_star(&WorldHistory::empty(), a)?;
        if worst.as_ref().is_none_or(|(_, w)| q < *w) {
            worst = Some((a, q));
        }
    }
    Ok(WorldPolicyTable::new(worst.expect("non-empty").0))
}

/// In utility mode, `V*(ĥ) = max_a Q^re₁(h a) = Q^re₁(h (π̂*(ĥ), u₁))` at
/// every reachable world history: never modifying and playing the optimal
/// world policy is optimal.
///
/// Negative control: a worst constant world policy replaces `π̂*`.
pub fn verify_optimal_policy_existence<S: Scalar>(exp: &Experiment<S>) -> Result<Certificate> {
    let mut rec = Recorder::new(exp.certificate(Claim::ApxThm7));
    let ns = utility_ns(exp)?;
    let home = ns.lookup(exp.u1().label())?;
    let env = &exp.env;
    let vocab = ns.vocabulary(env);
    let planner = Planner::new(env.clone(), ns.clone(), exp.u1().clone(), exp.cfg.clone())
        .with_tie_break(exp.tie);
    let hat = if exp.negative_control {
        worst_constant(exp)?
    } else {
        expectimax(env, exp.u1(), &exp.cfg)?.1
    };
    let mut ex = Expectimax::new(env, exp.u1(), &exp.cfg);
    let tol = exact_tol::<S>();
    let tol_s = tol_text(tol);
    for w in env.reachable_below(exp.cfg.horizon()) {
        let h = w.decorate(|_| home);
        let v_star = ex.v_star(&w)?;
        let v_max = planner.v_optimal(ValueKind::Realistic, &h)?;
        let a = Action::new(hat.decide(&w), home);
        let q = planner.q_optimal(ValueKind::Realistic, &h, a)?;
        rec.check(
            close(&v_star, &v_max, tol) && close(&v_max, &q, tol),
            format!("h={} a={}", vocab.format_world(&w), vocab.format_action(a)),
            vec![
                kv("V*", v_star.render()),
                kv("max Q^re", v_max.render()),
                kv("Q^re(non-modifying)", q.render()),
            ],
            &tol_s,
        );
    }
    Ok(rec.finish())
}

/// One check: verdict, instance and reported values.
type Check = (bool, String, Vec<(String, String)>);

/// Result of checking one name extension.
struct Extension {
    ok: bool,
    checks: Vec<Check>,
}

fn check_extension<S: Scalar>(
    exp: &Experiment<S>,
    ns: &NameSpace<S>,
    hat: &WorldPolicyTable,
) -> Result<(Extension, NameSpace<S>, NameId)> {
    let env = &exp.env;
    let fresh = NameId(ns.len() as u16);
    let pi_star = PolicyTable::from_world_policy("pi*", hat, fresh);
    let (ext, name) = ns.extend(pi_star.clone())?;
    debug_assert_eq!(name, fresh);
    let vocab = ext.vocabulary(env);
    let planner = Planner::new(env.clone(), ext.clone(), exp.u1().clone(), exp.cfg.clone())
        .with_tie_break(exp.tie);
    let mut ex = Expectimax::new(env, exp.u1(), &exp.cfg);
    let tol = exact_tol::<S>();
    let mut out = Extension {
        ok: true,
        checks: vec![],
    };
    let never = pi_star.actions().all(|a| a.target == name);
    out.ok &= never;
    out.checks
        .push((never, format!("{} never modifies", ext.name(name)?), vec![]));
    for w in env.reachable_below(exp.cfg.horizon()) {
        let h = w.decorate(|_| name);
        let a = decide(&pi_star, &h)?;
        let q = planner.q_realistic(&h, a)?.value;
        let v_max = planner.v_optimal(ValueKind::Realistic, &h)?;
        let v_star = ex.v_star(&w)?;
        let ok = close(&q, &v_max, tol) && close(&q, &v_star, tol);
        out.ok &= ok;
        out.checks.push((
            ok,
            format!(
                "{} at {} plays {}",
                ext.name(name)?,
                vocab.format_world(&w),
                vocab.format_action(a)
            ),
            vec![
                kv("Q^re", q.render()),
                kv("max over A'", v_max.render()),
                kv("V*", v_star.render()),
            ],
        ));
    }
    Ok((out, ext, name))
}

/// The non-modifying policy built from the standard-optimal world policy
/// and bound to a fresh name is realistic-optimal in the extended action
/// space, equals `V*` everywhere, and the verdict survives re-extension.
///
/// Negative control: a worst constant world policy replaces `π̂*`.
pub fn verify_optimal_name_extension<S: Scalar>(exp: &Experiment<S>) -> Result<Certificate> {
    let mut rec = Recorder::new(exp.certificate(Claim::ApxThm8));
    let env = &exp.env;
    let mut rng = ChaCha8Rng::seed_from_u64(exp.seed ^ 0x7e8);
    let ns = random_policy_namespace(&mut rng, env, 2, exp.cfg.horizon(), true)?;
    let hat = if exp.negative_control {
        worst_constant(exp)?
    } else {
        expectimax(env, exp.u1(), &exp.cfg)?.1
    };
    let tol_s = tol_text(exact_tol::<S>());
    let (first, ext, _) = check_extension(exp, &ns, &hat)?;
    for (ok, instance, values) in first.checks {
        rec.check(ok, instance, values, &tol_s);
    }
    let (second, ext2, name2) = check_extension(exp, &ext, &hat)?;
    rec.check(
        first.ok == second.ok,
        format!(
            "re-extension with {} gives the same verdict",
            ext2.name(name2)?
        ),
        vec![
            kv("first", first.ok.to_string()),
            kv("second", second.ok.to_string()),
        ],
        "exact",
    );
    if !second.ok {
        rec.note("re-extended name space also fails");
    }
    rec.note(format!(
        "base name space: {} random policies (one modification-dependent)",
        ns.len()
    ));
    Ok(rec.finish())
}
