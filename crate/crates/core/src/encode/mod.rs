//! Interpolation problems as recursion-free clause systems.
//!
//! Every family takes formulas over a fixed state vector `v` (and its primed
//! copy `v'` for transitions) and instantiates them at fresh variables
//! `v0_x, v1_x, …`, one copy per path position.

mod files;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::logic::{
    Atom, ClauseSystem, Conjunction, DnfFormula, Head, HornClause, PredicateSymbol, Renaming,
    Variable,
};
use crate::qelim::eliminate;

pub use files::{parse_program, parse_search_tree, parse_transition_system};

/// Template variable `i` of a state vector of length `n`; primed copies are
/// `n + i`.
fn template(names: &[String], primed: bool) -> Vec<Variable> {
    let n = names.len();
    names
        .iter()
        .enumerate()
        .map(|(i, x)| {
            if primed {
                Variable::new((n + i) as u32, format!("{}'", x))
            } else {
                Variable::new(i as u32, x.as_str())
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionSystem {
    pub vars: Vec<String>,
    /// Over [`TransitionSystem::state`].
    pub init: DnfFormula,
    /// Over `state ++ primed`.
    pub transitions: Vec<(String, DnfFormula)>,
    pub safe: DnfFormula,
    /// State/transition family only.
    pub guard: DnfFormula,
    /// State/transition family only, over `state ++ primed`.
    pub summary: Option<DnfFormula>,
}

impl TransitionSystem {
    pub fn new(vars: Vec<String>) -> Self {
        TransitionSystem {
            vars,
            init: DnfFormula::truth(),
            transitions: Vec::new(),
            safe: DnfFormula::truth(),
            guard: DnfFormula::truth(),
            summary: None,
        }
    }

    pub fn state(&self) -> Vec<Variable> {
        template(&self.vars, false)
    }

    pub fn primed(&self) -> Vec<Variable> {
        template(&self.vars, true)
    }

    pub fn transition(&self, label: &str) -> Result<&DnfFormula> {
        self.transitions
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, f)| f)
            .ok_or_else(|| Error::Encode(format!("unknown transition label `{}`", label)))
    }

    fn path(&self, labels: &[String]) -> Result<Vec<DnfFormula>> {
        labels.iter().map(|l| self.transition(l).cloned()).collect()
    }
}

/// A node of a search tree with its outgoing transitions and child labels.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchNode {
    pub vars: Vec<String>,
    pub label: DnfFormula,
    /// `(next_k over v ++ v', s_k over v)`
    pub children: Vec<(DnfFormula, DnfFormula)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum QuantifierMode {
    /// `∃v'. next → s'`, as printed.
    #[default]
    Existential,
    /// `¬∃v'. next ∧ ¬s'`, the weakest precondition.
    Universal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Procedure {
    pub name: String,
    pub locals: Vec<String>,
    /// Over globals ++ locals; main only.
    pub init: DnfFormula,
    pub safe: DnfFormula,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// Over `g, l, g', l'`.
    Inst,
    /// Over `g, l, l_callee'`.
    Call { callee: usize },
    /// Over `g, l, g'`.
    Ret,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub label: String,
    pub procedure: usize,
    pub kind: StepKind,
    pub formula: DnfFormula,
}

/// Formulas use template variables: globals first, then the locals of the
/// procedure, then primed globals, then primed locals (of the callee for
/// calls). See [`ProceduralProgram::frame`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProceduralProgram {
    pub globals: Vec<String>,
    pub procedures: Vec<Procedure>,
    pub main: usize,
    pub steps: Vec<Step>,
}

impl ProceduralProgram {
    /// Unprimed and primed template variables for `globals ++ locals(p)`;
    /// with `callee`, the primed half is `globals ++ locals(callee)`.
    pub fn frame(&self, p: usize, callee: Option<usize>) -> (Vec<Variable>, Vec<Variable>) {
        let pre: Vec<String> = self
            .globals
            .iter()
            .chain(&self.procedures[p].locals)
            .cloned()
            .collect();
        let post: Vec<String> = self
            .globals
            .iter()
            .chain(&self.procedures[callee.unwrap_or(p)].locals)
            .cloned()
            .collect();
        let pre_vars: Vec<Variable> = pre
            .iter()
            .enumerate()
            .map(|(i, x)| Variable::new(i as u32, x.as_str()))
            .collect();
        let post_vars: Vec<Variable> = post
            .iter()
            .enumerate()
            .map(|(i, x)| Variable::new((pre.len() + i) as u32, format!("{}'", x)))
            .collect();
        (pre_vars, post_vars)
    }

    pub fn procedure(&self, name: &str) -> Option<usize> {
        self.procedures.iter().position(|p| p.name == name)
    }

    fn step(&self, label: &str) -> Result<&Step> {
        self.steps
            .iter()
            .find(|s| s.label == label)
            .ok_or_else(|| Error::Encode(format!("unknown transition label `{}`", label)))
    }
}

/// Clause construction with per-clause fresh copies of the state vector.
struct Builder {
    system: ClauseSystem,
}

impl Builder {
    fn new() -> Self {
        Builder {
            system: ClauseSystem::new(),
        }
    }

    /// `v{k}_x` for every `x`.
    fn copy(&mut self, k: usize, names: &[String]) -> Vec<Variable> {
        names
            .iter()
            .map(|x| self.system.fresh_var(&format!("v{}_{}", k, x)))
            .collect()
    }

    fn atom(&self, p: &PredicateSymbol, args: &[Variable]) -> Atom {
        Atom::new(p.clone(), args.to_vec()).unwrap()
    }

    /// One clause per disjunct of `constraint`, each disjunct conjoined to the body.
    fn clauses(&mut self, atoms: Vec<Atom>, constraint: &DnfFormula, head: Head) -> Result<()> {
        for d in constraint.disjuncts() {
            self.system.add_clause(atoms.clone(), d.clone(), head.clone())?;
        }
        Ok(())
    }
}

/// `template[i] ↦ actual[i]` across several template/actual pairs.
fn bind(pairs: &[(&[Variable], &[Variable])]) -> Renaming {
    let mut map = HashMap::new();
    for (t, a) in pairs {
        for (x, y) in t.iter().zip(a.iter()) {
            map.insert(x.clone(), y.clone());
        }
    }
    map
}

/// Clause bodies are conjunctions and the encoders emit one clause per
/// step, so step formulas must be conjunctive.
fn conjunctive(f: &DnfFormula, what: &str) -> Result<Conjunction> {
    match f.disjuncts() {
        [one] => Ok(one.clone()),
        [] => Ok(Conjunction::falsity()),
        _ => Err(Error::Encode(format!("{} must be a conjunction", what))),
    }
}

fn predicate(b: &mut Builder, name: String, arity: usize) -> PredicateSymbol {
    b.system.declare(&name, arity)
}

/// `init → i0`, `i_{k-1} ∧ next_k → i_k`, `i_n → safe`.
pub fn encode_path(ts: &TransitionSystem, path: &[String]) -> Result<ClauseSystem> {
    let steps = ts.path(path)?;
    let (s, p) = (ts.state(), ts.primed());
    let n = ts.vars.len();
    let mut b = Builder::new();
    let preds: Vec<PredicateSymbol> = (0..=steps.len()).map(|k| predicate(&mut b, format!("i{}", k), n)).collect();

    let v0 = b.copy(0, &ts.vars);
    let init = conjunctive(&ts.init, "init")?.rename(&bind(&[(&s, &v0)]));
    b.system.add_clause(vec![], init, Head::Atom(b.atom(&preds[0], &v0)))?;
    for (k, next) in steps.iter().enumerate() {
        let pre = b.copy(k, &ts.vars);
        let post = b.copy(k + 1, &ts.vars);
        let body = conjunctive(next, &path[k])?.rename(&bind(&[(&s, &pre), (&p, &post)]));
        let atoms = vec![b.atom(&preds[k], &pre)];
        b.system.add_clause(atoms, body, Head::Atom(b.atom(&preds[k + 1], &post)))?;
    }
    let vn = b.copy(steps.len(), &ts.vars);
    let safe = ts.safe.rename(&bind(&[(&s, &vn)]));
    let atoms = vec![b.atom(&preds[steps.len()], &vn)];
    b.clauses(atoms, &DnfFormula::truth(), Head::Formula(safe))?;
    Ok(b.system)
}

/// `next_k → t_k`, `init(v0) ∧ t_1(v0, v1) ∧ … ∧ t_n(v_{n-1}, v_n) → safe(v_n)`.
pub fn encode_transition(ts: &TransitionSystem, path: &[String]) -> Result<ClauseSystem> {
    let steps = ts.path(path)?;
    let (s, p) = (ts.state(), ts.primed());
    let n = ts.vars.len();
    let mut b = Builder::new();
    let preds: Vec<PredicateSymbol> = (1..=steps.len())
        .map(|k| predicate(&mut b, format!("t{}", k), 2 * n))
        .collect();
    for (k, next) in steps.iter().enumerate() {
        let pre = b.copy(k, &ts.vars);
        let post = b.copy(k + 1, &ts.vars);
        let body = conjunctive(next, &path[k])?.rename(&bind(&[(&s, &pre), (&p, &post)]));
        let args: Vec<Variable> = pre.iter().chain(&post).cloned().collect();
        b.system.add_clause(vec![], body, Head::Atom(b.atom(&preds[k], &args)))?;
    }
    let copies: Vec<Vec<Variable>> = (0..=steps.len()).map(|k| b.copy(k, &ts.vars)).collect();
    let init = conjunctive(&ts.init, "init")?.rename(&bind(&[(&s, &copies[0])]));
    let atoms: Vec<Atom> = (0..steps.len())
        .map(|k| {
            let args: Vec<Variable> = copies[k].iter().chain(&copies[k + 1]).cloned().collect();
            b.atom(&preds[k], &args)
        })
        .collect();
    let safe = ts.safe.rename(&bind(&[(&s, &copies[steps.len()])]));
    b.system.add_clause(atoms, init, Head::Formula(safe))?;
    Ok(b.system)
}

/// Stem `i0 … im` followed by loop relations `t1 … tn` and `wf(tn)`.
pub fn encode_wellfounded(
    ts: &TransitionSystem,
    stem: &[String],
    lp: &[String],
) -> Result<ClauseSystem> {
    if lp.is_empty() {
        return Err(Error::Encode("the loop must have at least one transition".into()));
    }
    let stem_steps = ts.path(stem)?;
    let loop_steps = ts.path(lp)?;
    let (s, p) = (ts.state(), ts.primed());
    let n = ts.vars.len();
    let m = stem_steps.len();
    let mut b = Builder::new();
    let is: Vec<PredicateSymbol> = (0..=m).map(|k| predicate(&mut b, format!("i{}", k), n)).collect();
    let ts_: Vec<PredicateSymbol> = (1..=loop_steps.len())
        .map(|k| predicate(&mut b, format!("t{}", k), 2 * n))
        .collect();

    let v0 = b.copy(0, &ts.vars);
    let init = conjunctive(&ts.init, "init")?.rename(&bind(&[(&s, &v0)]));
    b.system.add_clause(vec![], init, Head::Atom(b.atom(&is[0], &v0)))?;
    for (k, next) in stem_steps.iter().enumerate() {
        let pre = b.copy(k, &ts.vars);
        let post = b.copy(k + 1, &ts.vars);
        let body = conjunctive(next, &stem[k])?.rename(&bind(&[(&s, &pre), (&p, &post)]));
        let atoms = vec![b.atom(&is[k], &pre)];
        b.system.add_clause(atoms, body, Head::Atom(b.atom(&is[k + 1], &post)))?;
    }
    for (k, next) in loop_steps.iter().enumerate() {
        let entry = b.copy(m, &ts.vars);
        let pre = if k == 0 { entry.clone() } else { b.copy(m + k, &ts.vars) };
        let post = b.copy(m + k + 1, &ts.vars);
        let body = conjunctive(next, &lp[k])?.rename(&bind(&[(&s, &pre), (&p, &post)]));
        let atoms = if k == 0 {
            vec![b.atom(&is[m], &pre)]
        } else {
            let args: Vec<Variable> = entry.iter().chain(&pre).cloned().collect();
            vec![b.atom(&ts_[k - 1], &args)]
        };
        let head: Vec<Variable> = entry.iter().chain(&post).cloned().collect();
        b.system.add_clause(atoms, body, Head::Atom(b.atom(&ts_[k], &head)))?;
    }
    b.system.add_wf(ts_.last().unwrap())?;
    Ok(b.system)
}

/// `next_k → s_k`, `g → g1`, `g_k ∧ s_k → g_{k+1}`, `g_n ∧ s_n → summary`.
pub fn encode_state_transition(ts: &TransitionSystem, path: &[String]) -> Result<ClauseSystem> {
    if path.is_empty() {
        return Err(Error::Encode("state/transition problems need at least one step".into()));
    }
    let summary = ts
        .summary
        .as_ref()
        .ok_or_else(|| Error::Encode("no SUMMARY given".into()))?;
    let steps = ts.path(path)?;
    let (s, p) = (ts.state(), ts.primed());
    let n = ts.vars.len();
    let len = steps.len();
    let mut b = Builder::new();
    let ss: Vec<PredicateSymbol> = (1..=len).map(|k| predicate(&mut b, format!("s{}", k), 2 * n)).collect();
    let gs: Vec<PredicateSymbol> = (1..=len).map(|k| predicate(&mut b, format!("g{}", k), n)).collect();

    for (k, next) in steps.iter().enumerate() {
        let pre = b.copy(k, &ts.vars);
        let post = b.copy(k + 1, &ts.vars);
        let body = conjunctive(next, &path[k])?.rename(&bind(&[(&s, &pre), (&p, &post)]));
        let args: Vec<Variable> = pre.iter().chain(&post).cloned().collect();
        b.system.add_clause(vec![], body, Head::Atom(b.atom(&ss[k], &args)))?;
    }
    let v0 = b.copy(0, &ts.vars);
    let guard = conjunctive(&ts.guard, "guard")?.rename(&bind(&[(&s, &v0)]));
    b.system.add_clause(vec![], guard, Head::Atom(b.atom(&gs[0], &v0)))?;
    for k in 0..len {
        let pre = b.copy(k, &ts.vars);
        let post = b.copy(k + 1, &ts.vars);
        let args: Vec<Variable> = pre.iter().chain(&post).cloned().collect();
        let atoms = vec![b.atom(&gs[k], &pre), b.atom(&ss[k], &args)];
        let head = if k + 1 < len {
            Head::Atom(b.atom(&gs[k + 1], &post))
        } else {
            Head::Formula(summary.rename(&bind(&[(&s, &pre), (&p, &post)])))
        };
        b.system.add_clause(atoms, Conjunction::truth(), head)?;
    }
    Ok(b.system)
}

/// `s0 → i_k` and `i_k → head_k` for each child, the head being the
/// quantifier-free form of the child's condition.
pub fn encode_search_tree(node: &SearchNode, mode: QuantifierMode) -> Result<ClauseSystem> {
    if node.children.is_empty() {
        return Err(Error::Encode("a search node needs at least one child".into()));
    }
    let s = template(&node.vars, false);
    let p = template(&node.vars, true);
    let to_primed = bind(&[(&s, &p)]);
    let primed_set = p.iter().cloned().collect();
    let n = node.vars.len();
    let mut b = Builder::new();
    let preds: Vec<PredicateSymbol> = (1..=node.children.len())
        .map(|k| predicate(&mut b, format!("i{}", k), n))
        .collect();
    let root = conjunctive(&node.label, "root label")?;
    for pk in &preds {
        let v = b.copy(0, &node.vars);
        let body = root.rename(&bind(&[(&s, &v)]));
        b.system.add_clause(vec![], body, Head::Atom(b.atom(pk, &v)))?;
    }
    for (k, (next, label)) in node.children.iter().enumerate() {
        let succ = label.rename(&to_primed);
        let head = match mode {
            QuantifierMode::Existential => eliminate(&next.negate().or(&succ), &primed_set)?,
            QuantifierMode::Universal => eliminate(&next.and(&succ.negate()), &primed_set)?.negate(),
        };
        let v = b.copy(0, &node.vars);
        let head = head.rename(&bind(&[(&s, &v)]));
        let atoms = vec![b.atom(&preds[k], &v)];
        b.system.add_clause(atoms, Conjunction::truth(), Head::Formula(head))?;
    }
    Ok(b.system)
}

/// Path through a procedural program. Calls push the caller's position; a
/// return conjoins the caller's pending interpolant so that the caller's
/// locals are carried across the call.
pub fn encode_nested(prog: &ProceduralProgram, path: &[String]) -> Result<ClauseSystem> {
    let mut b = Builder::new();
    let mut cur = prog.main;
    // (caller, index of the caller's interpolant before the call, label)
    let mut stack: Vec<(usize, usize, String)> = Vec::new();
    let names = |p: usize| -> Vec<String> {
        prog.globals.iter().chain(&prog.procedures[p].locals).cloned().collect()
    };
    let mut preds: Vec<(PredicateSymbol, usize)> = Vec::new();
    let declare = |b: &mut Builder, preds: &mut Vec<(PredicateSymbol, usize)>, p: usize| {
        let k = preds.len();
        let sym = predicate(b, format!("i{}", k), names(p).len());
        preds.push((sym.clone(), p));
        sym
    };

    let i0 = declare(&mut b, &mut preds, cur);
    let (tmpl, _) = prog.frame(cur, None);
    let v0 = b.copy(0, &names(cur));
    let init = conjunctive(&prog.procedures[cur].init, "init")?.rename(&bind(&[(&tmpl, &v0)]));
    b.system.add_clause(vec![], init, Head::Atom(b.atom(&i0, &v0)))?;

    let g = prog.globals.len();
    for (k, label) in path.iter().enumerate() {
        let step = prog.step(label)?;
        if step.procedure != cur {
            return Err(discipline(prog, &stack, label, format!(
                "`{}` belongs to {} but control is in {}",
                label, prog.procedures[step.procedure].name, prog.procedures[cur].name
            )));
        }
        let prev = preds[k].0.clone();
        match step.kind {
            StepKind::Inst => {
                let (pre_t, post_t) = prog.frame(cur, None);
                let pre = b.copy(k, &names(cur));
                let post = b.copy(k + 1, &names(cur));
                let body = conjunctive(&step.formula, label)?
                    .rename(&bind(&[(&pre_t, &pre), (&post_t, &post)]));
                let next = declare(&mut b, &mut preds, cur);
                let atoms = vec![b.atom(&prev, &pre)];
                b.system.add_clause(atoms, body, Head::Atom(b.atom(&next, &post)))?;
            }
            StepKind::Call { callee } => {
                let (pre_t, post_t) = prog.frame(cur, Some(callee));
                let pre = b.copy(k, &names(cur));
                let post = b.copy(k + 1, &names(callee));
                // the callee starts with the caller's globals
                let mut args: Vec<Variable> = pre[..g].to_vec();
                args.extend(post[g..].iter().cloned());
                let body = conjunctive(&step.formula, label)?
                    .rename(&bind(&[(&pre_t, &pre), (&post_t[g..], &post[g..])]));
                let next = declare(&mut b, &mut preds, callee);
                let atoms = vec![b.atom(&prev, &pre)];
                b.system.add_clause(atoms, body, Head::Atom(b.atom(&next, &args)))?;
                stack.push((cur, k, label.clone()));
                cur = callee;
            }
            StepKind::Ret => {
                let Some((caller, at, _)) = stack.pop() else {
                    return Err(discipline(prog, &stack, label, format!(
                        "`{}` returns from {} with an empty call stack",
                        label, prog.procedures[cur].name
                    )));
                };
                let (pre_t, post_t) = prog.frame(cur, None);
                let pre = b.copy(k, &names(cur));
                let post_g = b.copy(k + 1, &prog.globals);
                let at_call = b.copy(at, &names(caller));
                let body = conjunctive(&step.formula, label)?
                    .rename(&bind(&[(&pre_t, &pre), (&post_t[..g], &post_g)]));
                let mut args = post_g.clone();
                args.extend(at_call[g..].iter().cloned());
                let next = declare(&mut b, &mut preds, caller);
                let atoms = vec![b.atom(&prev, &pre), b.atom(&preds[at].0, &at_call)];
                b.system.add_clause(atoms, body, Head::Atom(b.atom(&next, &args)))?;
                cur = caller;
            }
        }
    }
    let (tmpl, _) = prog.frame(cur, None);
    let vn = b.copy(path.len(), &names(cur));
    let safe = prog.procedures[cur].safe.rename(&bind(&[(&tmpl, &vn)]));
    let atoms = vec![b.atom(&preds[path.len()].0, &vn)];
    b.system.add_clause(atoms, Conjunction::truth(), Head::Formula(safe))?;
    Ok(b.system)
}

fn discipline(prog: &ProceduralProgram, stack: &[(usize, usize, String)], label: &str, msg: String) -> Error {
    let mut text = format!("calling discipline violated at `{}`: {}", label, msg);
    if stack.is_empty() {
        text += "\n  call stack: (empty)";
    } else {
        text += "\n  call stack:";
        for (caller, _, call) in stack.iter().rev() {
            text += &format!("\n    {} via `{}`", prog.procedures[*caller].name, call);
        }
    }
    Error::Encode(text)
}

/// The invariance rule for `ts` as recursive clauses over `inv`: clause 0 is
/// `init → inv`, clause `1 + i` the `i`-th transition, the last one `inv → safe`.
pub fn invariance_clauses(ts: &TransitionSystem) -> Result<ClauseSystem> {
    let (s, p) = (ts.state(), ts.primed());
    let mut b = Builder::new();
    let inv = predicate(&mut b, "inv".into(), ts.vars.len());
    let v = b.copy(0, &ts.vars);
    let init = conjunctive(&ts.init, "init")?.rename(&bind(&[(&s, &v)]));
    b.system.add_clause(vec![], init, Head::Atom(b.atom(&inv, &v)))?;
    for (label, next) in &ts.transitions {
        let pre = b.copy(0, &ts.vars);
        let post = b.copy(1, &ts.vars);
        let body = conjunctive(next, label)?.rename(&bind(&[(&s, &pre), (&p, &post)]));
        let atoms = vec![b.atom(&inv, &pre)];
        b.system.add_clause(atoms, body, Head::Atom(b.atom(&inv, &post)))?;
    }
    let v = b.copy(0, &ts.vars);
    let safe = ts.safe.rename(&bind(&[(&s, &v)]));
    let atoms = vec![b.atom(&inv, &v)];
    b.system.add_clause(atoms, Conjunction::truth(), Head::Formula(safe))?;
    Ok(b.system)
}

/// Clause ids for unfolding `invariance_clauses(ts)` along the given labels.
pub fn invariance_expansion(ts: &TransitionSystem, labels: &[String]) -> Result<Vec<usize>> {
    let mut out = vec![0];
    for l in labels {
        let i = ts
            .transitions
            .iter()
            .position(|(t, _)| t == l)
            .ok_or_else(|| Error::Encode(format!("unknown transition label `{}`", l)))?;
        out.push(1 + i);
    }
    out.push(1 + ts.transitions.len());
    Ok(out)
}

/// Linear unfolding of `recursive` along `expansion` (clause ids). The first
/// clause must have no body atoms, every later one exactly one, matching the
/// previous head; the last clause must have a formula head. Step `k` uses a
/// fresh copy `p_k` of the head predicate `p`.
pub fn encode_unfolding(recursive: &ClauseSystem, expansion: &[usize]) -> Result<ClauseSystem> {
    if expansion.len() < 2 {
        return Err(Error::Encode("an unfolding needs at least a first and a last clause".into()));
    }
    let clause = |id: usize| -> Result<&HornClause> {
        recursive
            .clause(id)
            .ok_or_else(|| Error::Encode(format!("no clause with id {}", id)))
    };
    let mut b = Builder::new();
    // the copy made by the previous step and the predicate it stands for
    let mut prev: Option<(PredicateSymbol, PredicateSymbol)> = None;
    for (k, &id) in expansion.iter().enumerate() {
        let c = clause(id)?;
        let last = k + 1 == expansion.len();
        let atoms: Vec<Atom> = match (&prev, c.body_atoms.as_slice()) {
            (None, []) => Vec::new(),
            (Some((pk, orig)), [a]) if a.predicate() == orig => {
                vec![Atom::new(pk.clone(), a.args().to_vec())?]
            }
            (None, _) => {
                return Err(Error::Encode(format!(
                    "clause {} starts the unfolding but has body atoms",
                    id
                )))
            }
            (Some((_, orig)), _) => {
                return Err(Error::Encode(format!(
                    "clause {} does not continue from {}",
                    id, orig
                )))
            }
        };
        let head = match (&c.head, last) {
            (Head::Formula(f), true) => Head::Formula(f.clone()),
            (Head::Atom(a), false) => {
                let pk = predicate(&mut b, format!("{}_{}", a.predicate().name(), k), a.predicate().arity());
                prev = Some((pk.clone(), a.predicate().clone()));
                Head::Atom(Atom::new(pk, a.args().to_vec())?)
            }
            (_, true) => {
                return Err(Error::Encode(format!("last clause {} must have a formula head", id)))
            }
            (_, false) => {
                return Err(Error::Encode(format!("clause {} must have an atom head", id)))
            }
        };
        // fresh variables per step
        let mut map = HashMap::new();
        for v in c.vars() {
            let fresh = b.system.fresh_var(v.name());
            map.insert(v, fresh);
        }
        let clause = HornClause {
            id: k,
            body_atoms: atoms,
            body: c.body.clone(),
            head,
        }
        .rename(&map);
        b.system.push_clause(clause)?;
    }
    Ok(b.system)
}
