//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines show up in plain `cargo test` output.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hornsolve::check::{check_solution, CheckOutcome};
use hornsolve::encode::{
    encode_nested, encode_path, encode_search_tree, encode_state_transition, encode_transition,
    encode_unfolding, encode_wellfounded, invariance_clauses, invariance_expansion, parse_program,
    parse_search_tree, parse_transition_system, QuantifierMode, TransitionSystem,
};
use hornsolve::frontend::{parse_solution, render_formula, render_solution, render_system, SourceFormat};
use hornsolve::graph::analyze;
use hornsolve::logic::{AtomicConstraint, Conjunction, Head, LinearTerm};
use hornsolve::lra::{check_constraints, check_valid, check_valid_constraints, equivalent, entails, verify_certificate, SatResult, Validity};
use hornsolve::qelim::eliminate;
use hornsolve::unfold::{unfold, Derivation};
use hornsolve::wf::{eliminate_wf, synthesize_ranking, Ranking, WfElimination};
use hornsolve::solver::solve_detailed;
use hornsolve::{solve, Budget, ClauseSystem, DnfFormula, Error, Options, Rational, Variable, Verdict};
use num_traits::{Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::*;

const WORKED_LIMIT: Duration = Duration::from_secs(1);
const QE_LIMIT: Duration = Duration::from_millis(100);
const RANDOM_LIMIT: Duration = Duration::from_secs(300);
const RANDOM_SYSTEMS: usize = 500;
const RANDOM_SEED: u64 = 0x5eed_0005;
const RELATIONS: usize = 200;
const STARTS: usize = 100;
const RELATION_SEED: u64 = 0x5eed_0008;
const REPEATS: usize = 10;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

/// Worked system: solved, verified, stated solution accepted, q exact.
/// Returns the rendered solution as transcript.
fn worked(transcript: &mut String) -> Outcome {
    let system = native(WORKED);
    let (verdict, took) = timed(|| solve(&system, &Options::default()));
    let Verdict::Solvable(sol) = verdict.map_err(|e| e.to_string())? else {
        return Err("expected sat".into());
    };
    ensure(took < WORKED_LIMIT, || format!("took {:?}", took))?;
    ensure(check_solution(&system, &sol).unwrap().is_verified(), || "produced solution fails the checker".into())?;
    let stated = parse_solution(WORKED_SOLUTION, SourceFormat::Native).unwrap();
    ensure(check_solution(&system, &stated).unwrap().is_verified(), || "stated solution fails the checker".into())?;
    let q = system.predicate("q", 2).unwrap();
    let expect = over_formals("q(X1, X2) = X2 >= X1 + 10");
    let produced = sol.get(q).unwrap();
    ensure(equivalent(produced, &expect), || format!("q = {}", render_formula(produced)))?;
    *transcript += &render_solution(&sol, SourceFormat::Native);
    Ok(format!("sat, verified, q equivalent to w >= v + 10 ({:.3?})", took))
}

/// Certificates of the single ground implication cancel every variable.
fn farkas(transcript: &mut String) -> Outcome {
    let system = native(WORKED);
    let info = analyze(&system).unwrap();
    let ds = unfold(&system, &info, &Budget::default()).unwrap();
    ensure(ds.len() == 1, || format!("{} derivations", ds.len()))?;
    let body = ds[0].implication.body_constraints();
    let head = ds[0].implication.head_formula().unwrap();
    let Validity::Valid(refs) = check_valid_constraints(&body, head) else {
        return Err("ground implication not valid".into());
    };
    for r in &refs {
        let mut all = body.clone();
        all.extend(r.negated_head.iter().cloned());
        ensure(verify_certificate(&all, &r.certificate), || "certificate rejected".into())?;
        let (sum, strict) = r.certificate.combine(&all).ok_or("ill-formed certificate")?;
        ensure(sum.is_constant(), || "weighted sum keeps variables".into())?;
        let k = sum.constant_part();
        ensure(k.is_negative() || (strict && k.is_zero()), || "weighted sum is not contradictory".into())?;
        *transcript += &format!("{:?}\n", r.certificate.weights());
    }
    Ok(format!("{} refutation(s), weighted sums contradictory", refs.len()))
}

/// a >= 10, c = a + b, b =< 0 with `a` eliminated.
fn qe(transcript: &mut String) -> Outcome {
    let f = over_formals("f(X1, X2, X3) = X1 >= 10, X2 = X1 + X3, X3 =< 0");
    let a: BTreeSet<Variable> = [Variable::formal(0)].into();
    let (g, took) = timed(|| eliminate(&f, &a).unwrap());
    let expect = over_formals("f(X1, X2, X3) = X2 >= X3 + 10, X3 =< 0");
    ensure(entails(&g, &expect) && entails(&expect, &g), || format!("got {}", render_formula(&g)))?;
    ensure(took < QE_LIMIT, || format!("took {:?}", took))?;
    *transcript += &render_formula(&g);
    Ok(format!("c >= b + 10, b =< 0 ({:.3?})", took))
}

/// wf elimination yields the expected replacement; solve and check.
fn wellfounded(transcript: &mut String) -> Outcome {
    let system = native(WORKED_WF);
    let start = Instant::now();
    let WfElimination::Eliminated { system: transformed, witnesses } =
        eliminate_wf(&system, &Budget::default()).unwrap()
    else {
        return Err("wf elimination gave up".into());
    };
    ensure(witnesses.len() == 1, || "expected one witness".into())?;
    let replacement = transformed
        .clauses()
        .iter()
        .find(|c| matches!(&c.head, Head::Formula(_)) && c.body_atoms.len() == 1 && c.body_atoms[0].predicate().name() == "r")
        .ok_or("no replacement clause")?;
    let Head::Formula(h) = &replacement.head else { unreachable!() };
    let h = h.rename(&replacement.body_atoms[0].to_formals());
    let expect = over_formals("r(X1, X2) = X1 =< 0, X2 >= X1 + 1");
    ensure(equivalent(&h, &expect), || format!("replacement head {}", render_formula(&h)))?;

    let Verdict::Solvable(sol) = solve(&system, &Options::default()).map_err(|e| e.to_string())? else {
        return Err("expected sat".into());
    };
    let took = start.elapsed();
    let r = system.predicate("r", 2).unwrap();
    ensure(entails(sol.get(r).unwrap(), &expect), || "r does not entail the replacement head".into())?;
    let stated = parse_solution(WORKED_WF_SOLUTION, SourceFormat::Native).unwrap();
    ensure(check_solution(&transformed, &stated).unwrap().is_verified(), || "stated solution fails on the transformed system".into())?;
    ensure(took < WORKED_LIMIT, || format!("took {:?}", took))?;
    *transcript += &render_system(&transformed, SourceFormat::Native);
    *transcript += &render_solution(&sol, SourceFormat::Native);
    Ok(format!("replacement r(s,t) -> s =< 0, t >= s + 1; sat ({:.3?})", took))
}

#[derive(Clone)]
struct RandomStats {
    sat: usize,
    unsat: usize,
    /// Samples over the derivation cap, drawn again.
    resampled: usize,
    /// Sat answers that needed the least-solution fallback.
    fallbacks: usize,
    disagreements: Vec<usize>,
    unsound: Vec<String>,
    took: Duration,
}

fn random_runs() -> RandomStats {
    let mut rng = StdRng::seed_from_u64(RANDOM_SEED);
    let cap = Options::default().limits.max_derivations as u128;
    let mut st = RandomStats {
        sat: 0,
        unsat: 0,
        resampled: 0,
        fallbacks: 0,
        disagreements: Vec::new(),
        unsound: Vec::new(),
        took: Duration::ZERO,
    };
    let start = Instant::now();
    for i in 0..RANDOM_SYSTEMS {
        let (system, rejected) = random_system_within(&mut rng, Shape::default(), cap);
        st.resampled += rejected;
        let report = solve_detailed(&system, &Options::default());
        if matches!(&report, Ok(r) if r.used_fallback) {
            st.fallbacks += 1;
        }
        let sat = match report.map(|r| r.verdict) {
            Ok(Verdict::Solvable(sol)) => {
                st.sat += 1;
                if check_solution(&system, &sol).unwrap() != CheckOutcome::Verified {
                    st.unsound.push(format!("#{} solution rejected", i));
                }
                true
            }
            Ok(Verdict::Unsolvable(cex)) => {
                st.unsat += 1;
                if !cex.is_witnessed().unwrap() {
                    st.unsound.push(format!("#{} counterexample not witnessed", i));
                }
                false
            }
            Ok(Verdict::Unknown(r)) => {
                st.unsound.push(format!("#{} unknown: {}", i, r));
                continue;
            }
            Err(e) => {
                st.unsound.push(format!("#{} error: {}", i, e));
                continue;
            }
        };
        if sat != oracle_sat(&system) {
            st.disagreements.push(i);
        }
    }
    st.took = start.elapsed();
    st
}

fn soundness(st: &RandomStats) -> Outcome {
    ensure(st.unsound.is_empty(), || st.unsound.join("; "))?;
    ensure(st.took < RANDOM_LIMIT, || format!("took {:?}", st.took))?;
    Ok(format!(
        "{} systems: {} sat verified ({} via fallback), {} unsat witnessed, {} over the derivation cap redrawn ({:.1?})",
        RANDOM_SYSTEMS, st.sat, st.fallbacks, st.unsat, st.resampled, st.took
    ))
}

fn completeness(st: &RandomStats) -> Outcome {
    ensure(st.disagreements.is_empty(), || format!("disagrees on {:?}", st.disagreements))?;
    Ok(format!("{} systems agree with the least-solution oracle", RANDOM_SYSTEMS))
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|k| if k % 2 == 0 { "a".to_string() } else { "b".to_string() }).collect()
}

fn counting_ts() -> TransitionSystem {
    parse_transition_system(
        "VARS x y\nINIT x = 0, y = 0\nTRANS a x' = x + 1, y' = y + x\nTRANS b x' = x + 2, y' = y\n\
         SAFE y >= 0\nGUARD x >= 0\nSUMMARY x' >= x\n",
    )
    .unwrap()
}

fn counts(s: &ClauseSystem) -> (usize, usize) {
    (s.predicates().len(), s.clauses().len())
}

/// The single derivation of a path encoding is init(v0) ∧ ⋀ next_k(v_{k-1}, v_k) → safe(v_n).
fn path_shape(ts: &TransitionSystem, system: &ClauseSystem, path: &[String]) -> Result<(), String> {
    let info = analyze(system).map_err(|e| e.to_string())?;
    let ds = unfold(system, &info, &Budget::default()).map_err(|e| e.to_string())?;
    ensure(ds.len() == 1, || format!("{} derivations", ds.len()))?;
    let d = &ds[0];
    ensure(d.tree.nodes.len() == path.len() + 2, || "derivation is not a chain".into())?;
    // copies v_k are the head arguments of the nodes for i_k, leaf first
    let mut copies: Vec<Vec<Variable>> = d.tree.nodes[1..]
        .iter()
        .map(|n| n.head.as_ref().unwrap().args().to_vec())
        .collect();
    copies.reverse();
    implication_shape(ts, d, &copies, path)
}

/// Like the path shape; the copies are the variables `v{k}_x` of the query clause.
fn transition_shape(ts: &TransitionSystem, system: &ClauseSystem, path: &[String]) -> Result<(), String> {
    let info = analyze(system).map_err(|e| e.to_string())?;
    let ds = unfold(system, &info, &Budget::default()).map_err(|e| e.to_string())?;
    ensure(ds.len() == 1, || format!("{} derivations", ds.len()))?;
    let d = &ds[0];
    let query = system.clause(d.tree.root_clause()).unwrap();
    let vars = query.vars();
    let renaming = &d.tree.nodes[0].renaming;
    let copies: Vec<Vec<Variable>> = (0..=path.len())
        .map(|k| {
            ts.vars
                .iter()
                .map(|x| {
                    let v = vars.iter().find(|v| v.name() == format!("v{}_{}", k, x)).unwrap();
                    renaming.get(v).cloned().unwrap_or_else(|| v.clone())
                })
                .collect()
        })
        .collect();
    implication_shape(ts, d, &copies, path)
}

/// `init(v0) ∧ ⋀ next_k(v_{k-1}, v_k) → safe(v_n)` up to equivalence.
fn implication_shape(
    ts: &TransitionSystem,
    d: &Derivation,
    copies: &[Vec<Variable>],
    path: &[String],
) -> Result<(), String> {
    let (s, p) = (ts.state(), ts.primed());
    let bind = |pairs: &[(&[Variable], &[Variable])]| {
        pairs
            .iter()
            .flat_map(|(t, a)| t.iter().cloned().zip(a.iter().cloned()))
            .collect()
    };
    let mut expect = ts.init.rename(&bind(&[(&s, &copies[0])]));
    for (k, l) in path.iter().enumerate() {
        let next = ts.transition(l).unwrap();
        expect = expect.and(&next.rename(&bind(&[(&s, &copies[k]), (&p, &copies[k + 1])])));
    }
    let body = DnfFormula::from_conjunction(Conjunction::new(d.implication.body_constraints()));
    ensure(equivalent(&body, &expect), || "body differs from init and transitions".into())?;
    let safe = ts.safe.rename(&bind(&[(&s, &copies[path.len()])]));
    ensure(equivalent(d.implication.head_formula().unwrap(), &safe), || "head differs from safe".into())
}

fn encoders() -> Outcome {
    let ts = counting_ts();
    let tree = parse_search_tree(
        "VARS x\nROOT x >= 0\nCHILD x' = x + 1 | x >= 1\nCHILD x' = x - 1 | x >= -1\nCHILD x' = 2 * x | x >= 0\n\
         CHILD x' = x | x >= 0\nCHILD x' = x + 3 | x >= 3\n",
    )
    .unwrap();
    let prog = parse_program(
        "GLOBALS g\nPROC main\nLOCALS x\nINIT g = 0, x = 0\nSAFE g >= 0\nINST a g' = g + 1, x' = x\n\
         CALL c -> inc y' = x\nPROC inc\nLOCALS y\nINST b g' = g + y, y' = y\nRET r g' = g\n",
    )
    .unwrap();
    let mut checked = 0;
    for n in 0..=5 {
        let path = labels(n);
        let check = |family: &str, s: &ClauseSystem, want: (usize, usize)| -> Result<(), String> {
            analyze(s).map_err(|e| format!("{} n={}: {}", family, n, e))?;
            ensure(counts(s) == want, || format!("{} n={}: counts {:?}, want {:?}", family, n, counts(s), want))
        };

        let s = encode_path(&ts, &path).map_err(|e| e.to_string())?;
        check("path", &s, (n + 1, n + 2))?;
        path_shape(&ts, &s, &path).map_err(|e| format!("path n={}: {}", n, e))?;

        let s = encode_transition(&ts, &path).map_err(|e| e.to_string())?;
        check("transition", &s, (n, n + 1))?;
        transition_shape(&ts, &s, &path).map_err(|e| format!("transition n={}: {}", n, e))?;

        for m in 0..=2 {
            let stem = labels(m);
            match encode_wellfounded(&ts, &stem, &path) {
                Ok(_) if n == 0 => return Err("wf: empty loop accepted".into()),
                Ok(s) => {
                    check("wf", &s, (m + 1 + n, m + 1 + n))?;
                    ensure(s.wf_conditions().len() == 1, || "wf condition missing".into())?;
                }
                Err(Error::Encode(_)) if n == 0 => {}
                Err(e) => return Err(e.to_string()),
            }
        }

        match encode_state_transition(&ts, &path) {
            Ok(_) if n == 0 => return Err("state/transition: empty path accepted".into()),
            Ok(s) => check("state/transition", &s, (2 * n, 2 * n + 1))?,
            Err(Error::Encode(_)) if n == 0 => {}
            Err(e) => return Err(e.to_string()),
        }

        let mut sub = tree.clone();
        sub.children.truncate(n);
        for mode in [QuantifierMode::Existential, QuantifierMode::Universal] {
            match encode_search_tree(&sub, mode) {
                Ok(_) if n == 0 => return Err("search tree: childless node accepted".into()),
                Ok(s) => check("search tree", &s, (n, 2 * n))?,
                Err(Error::Encode(_)) if n == 0 => {}
                Err(e) => return Err(e.to_string()),
            }
        }

        // main: a* then call, inc body, return
        let nested: Vec<String> = match n {
            0 => vec![],
            1 => vec!["a".into()],
            _ => {
                let mut v: Vec<String> = vec!["c".into()];
                v.extend((0..n - 2).map(|_| "b".to_string()));
                v.push("r".into());
                v
            }
        };
        let s = encode_nested(&prog, &nested).map_err(|e| e.to_string())?;
        check("nested", &s, (n + 1, n + 2))?;

        let exp = invariance_expansion(&ts, &path).map_err(|e| e.to_string())?;
        let s = encode_unfolding(&invariance_clauses(&ts).unwrap(), &exp).map_err(|e| e.to_string())?;
        let l = exp.len();
        check("unfolding", &s, (l - 1, l))?;
        checked += 1;
    }
    Ok(format!("7 families, n = 0..5 ({} sizes), counts and shapes as expected, n = 0 rejected where required", checked))
}

fn successor(rel: &Conjunction, k: usize, state: &[Rational]) -> Option<Vec<Rational>> {
    let mut cs = rel.constraints().to_vec();
    for (i, x) in state.iter().enumerate() {
        cs.push(AtomicConstraint::eq(
            LinearTerm::var(Variable::formal(i)),
            LinearTerm::constant(x.clone()),
        ));
    }
    match check_constraints(&cs) {
        SatResult::Sat(m) => Some(
            (k..2 * k)
                .map(|i| m.assignment.get(&Variable::formal(i)).cloned().unwrap_or_else(Rational::zero))
                .collect(),
        ),
        SatResult::Unsat(_) => None,
    }
}

fn rankings() -> Outcome {
    let mut rng = StdRng::seed_from_u64(RELATION_SEED);
    let mut longest = 0usize;
    for i in 0..RELATIONS {
        let k = rng.gen_range(1..=3);
        let rel = random_terminating_relation(&mut rng, k);
        let Ranking::Found(w) = synthesize_ranking(&rel, k).map_err(|e| e.to_string())? else {
            return Err(format!("relation #{}: no ranking function", i));
        };
        ensure(w.decrease.is_positive(), || format!("relation #{}: decrease {}", i, w.decrease))?;
        let pre: Vec<Variable> = (0..k).map(Variable::formal).collect();
        let post: Vec<Variable> = (k..2 * k).map(Variable::formal).collect();
        let f_pre = w.rank_term(&pre);
        let bound = DnfFormula::from_constraints([AtomicConstraint::ge(f_pre.clone(), LinearTerm::constant(w.bound.clone()))]);
        let decrease = DnfFormula::from_constraints([AtomicConstraint::ge(
            f_pre.minus(&w.rank_term(&post)),
            LinearTerm::constant(w.decrease.clone()),
        )]);
        for d in rel.disjuncts() {
            ensure(check_valid(d, &bound).is_valid(), || format!("relation #{}: bound not entailed", i))?;
            ensure(check_valid(d, &decrease).is_valid(), || format!("relation #{}: decrease not entailed", i))?;
        }
        let Some(conj) = rel.disjuncts().first() else { continue };
        for _ in 0..STARTS {
            let start: Vec<Rational> = (0..k).map(|_| Rational::from_integer(rng.gen_range(-30..=30).into())).collect();
            let limit = (w.rank(&start) - &w.bound) / &w.decrease + Rational::from_integer(1.into());
            let mut state = start.clone();
            let mut steps = 0usize;
            while let Some(next) = successor(conj, k, &state) {
                steps += 1;
                state = next;
                ensure(Rational::from_integer(steps.into()) <= limit, || {
                    format!("relation #{}: chain of {} steps exceeds {}", i, steps, limit)
                })?;
            }
            longest = longest.max(steps);
        }
    }
    Ok(format!(
        "{} relations ranked, entailments valid, {} chains within bound (longest {})",
        RELATIONS,
        RELATIONS * STARTS,
        longest
    ))
}

fn determinism() -> Outcome {
    let run = || {
        let mut t = String::new();
        let r = (worked(&mut t), farkas(&mut t), qe(&mut t), wellfounded(&mut t));
        (t, r.0.is_ok() && r.1.is_ok() && r.2.is_ok() && r.3.is_ok())
    };
    let (first, _) = run();
    for i in 1..REPEATS {
        let (again, _) = run();
        ensure(again == first, || format!("run {} differs", i + 1))?;
    }
    Ok(format!("{} runs of criteria 1-4 byte-identical ({} bytes)", REPEATS, first.len()))
}

fn guarded<T>(f: impl FnOnce() -> Result<T, String>) -> Result<T, String> {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    })
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, o: Outcome| {
        match &o {
            Ok(detail) => println!("criterion {} {:<26} PASS  {}", n, name, detail),
            Err(why) => {
                failed += 1;
                println!("criterion {} {:<26} FAIL  {}", n, name, why)
            }
        }
    };
    report(1, "worked example", guarded(|| worked(&mut String::new())));
    report(2, "farkas certificate", guarded(|| farkas(&mut String::new())));
    report(3, "quantifier elimination", guarded(|| qe(&mut String::new())));
    report(4, "wf elimination", guarded(|| wellfounded(&mut String::new())));
    let stats = guarded(|| Ok(random_runs()));
    report(5, "soundness (random)", stats.clone().and_then(|s| soundness(&s)));
    report(6, "completeness (random)", stats.and_then(|s| completeness(&s)));
    report(7, "encoder structure", guarded(encoders));
    report(8, "ranking witnesses", guarded(rankings));
    report(9, "determinism", guarded(determinism));
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", failed);
        ExitCode::FAILURE
    }
}
