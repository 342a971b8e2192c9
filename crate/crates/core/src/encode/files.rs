//! Line-oriented input files for the encoders.
//!
//! Every entry starts with an upper-case keyword; lines that do not start with
//! one continue the previous entry. `#` starts a comment.

use std::collections::{HashMap, HashSet};

use super::{
    template, ProceduralProgram, Procedure, SearchNode, Step, StepKind, TransitionSystem,
};
use crate::error::{Error, Result};
use crate::frontend::parse_formula;
use crate::logic::{DnfFormula, Variable};

const TS_KEYWORDS: &[&str] = &["VARS", "INIT", "TRANS", "SAFE", "GUARD", "SUMMARY"];
const TREE_KEYWORDS: &[&str] = &["VARS", "ROOT", "CHILD"];
const PROGRAM_KEYWORDS: &[&str] = &[
    "GLOBALS", "MAIN", "PROC", "LOCALS", "INIT", "SAFE", "INST", "CALL", "RET",
];

struct Entry {
    keyword: String,
    line: usize,
    /// Text after the keyword, continuation lines joined with `\n`.
    rest: String,
    /// Column of the first character of `rest`.
    column: usize,
}

impl Entry {
    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::syntax(self.line, 1, msg))
    }

    /// Splits off the first whitespace-delimited word of `rest`.
    fn word(&self) -> Option<(String, Entry)> {
        let trimmed = self.rest.trim_start_matches([' ', '\t']);
        let skipped = self.rest.len() - trimmed.len();
        let end = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        if end == 0 {
            return None;
        }
        Some((
            trimmed[..end].to_string(),
            Entry {
                keyword: self.keyword.clone(),
                line: self.line,
                rest: trimmed[end..].to_string(),
                column: self.column + skipped + end,
            },
        ))
    }

    fn formula(&self, scope: &HashMap<String, Variable>) -> Result<DnfFormula> {
        if self.rest.trim().is_empty() {
            return self.error(format!("{} expects a formula", self.keyword));
        }
        parse_formula(&self.rest, scope, self.line, self.column)
    }

    /// Splits `rest` at the first `sep`; the position of the right part is kept.
    fn split(&self, sep: char) -> Option<(Entry, Entry)> {
        let at = self.rest.find(sep)?;
        let left = &self.rest[..at];
        let right = &self.rest[at + sep.len_utf8()..];
        let newlines = left.matches('\n').count();
        let (line, column) = if newlines == 0 {
            (self.line, self.column + at + sep.len_utf8())
        } else {
            let tail = left.rsplit('\n').next().unwrap();
            (self.line + newlines, tail.chars().count() + 2)
        };
        Some((
            Entry {
                keyword: self.keyword.clone(),
                line: self.line,
                rest: left.to_string(),
                column: self.column,
            },
            Entry {
                keyword: self.keyword.clone(),
                line,
                rest: right.to_string(),
                column,
            },
        ))
    }

    fn names(&self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for w in self.rest.split(|c: char| c.is_whitespace() || c == ',') {
            if w.is_empty() {
                continue;
            }
            if !is_name(w) {
                return self.error(format!("`{}` is not a valid variable name", w));
            }
            if out.iter().any(|x| x == w) {
                return self.error(format!("variable `{}` listed twice", w));
            }
            out.push(w.to_string());
        }
        Ok(out)
    }
}

fn is_name(w: &str) -> bool {
    let mut cs = w.chars();
    matches!(cs.next(), Some(c) if c.is_alphabetic() || c == '_')
        && cs.all(|c| c.is_alphanumeric() || c == '_')
        && !matches!(w, "true" | "false")
        && !TS_KEYWORDS.contains(&w)
        && !TREE_KEYWORDS.contains(&w)
        && !PROGRAM_KEYWORDS.contains(&w)
}

fn entries(text: &str, keywords: &[&str]) -> Result<Vec<Entry>> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap();
        let trimmed = line.trim_start();
        if trimmed.is_empty() {
            continue;
        }
        let first = trimmed.split_whitespace().next().unwrap();
        if keywords.contains(&first) {
            let start = line.len() - trimmed.len() + first.len();
            out.push(Entry {
                keyword: first.to_string(),
                line: i + 1,
                rest: line[start..].to_string(),
                column: line[..start].chars().count() + 1,
            });
        } else if let Some(e) = out.last_mut() {
            e.rest.push('\n');
            e.rest.push_str(line);
        } else {
            return Err(Error::syntax(
                i + 1,
                line.len() - trimmed.len() + 1,
                format!("expected one of {}", keywords.join(", ")),
            ));
        }
    }
    Ok(out)
}

fn scope(vars: &[Variable]) -> HashMap<String, Variable> {
    vars.iter().map(|v| (v.name().to_string(), v.clone())).collect()
}

fn vars_first(es: &[Entry]) -> Result<Vec<String>> {
    match es.first() {
        Some(e) if e.keyword == "VARS" => e.names(),
        Some(e) => e.error("the file must start with VARS"),
        None => Err(Error::syntax(1, 1, "empty input")),
    }
}

fn once(slot: &mut Option<DnfFormula>, e: &Entry, f: DnfFormula) -> Result<()> {
    if slot.is_some() {
        return e.error(format!("{} given twice", e.keyword));
    }
    *slot = Some(f);
    Ok(())
}

/// `VARS`, `INIT`, `TRANS <label> <formula>`, `SAFE`, and for the
/// state/transition family `GUARD` and `SUMMARY`. Transition formulas refer to
/// post-states as `x'`.
pub fn parse_transition_system(text: &str) -> Result<TransitionSystem> {
    let es = entries(text, TS_KEYWORDS)?;
    let vars = vars_first(&es)?;
    let mut ts = TransitionSystem::new(vars);
    let state = scope(&ts.state());
    let mut both = state.clone();
    both.extend(scope(&ts.primed()));
    let (mut init, mut safe, mut guard, mut summary) = (None, None, None, None);
    for e in &es[1..] {
        match e.keyword.as_str() {
            "VARS" => return e.error("VARS given twice"),
            "INIT" => once(&mut init, e, e.formula(&state)?)?,
            "SAFE" => once(&mut safe, e, e.formula(&state)?)?,
            "GUARD" => once(&mut guard, e, e.formula(&state)?)?,
            "SUMMARY" => once(&mut summary, e, e.formula(&both)?)?,
            "TRANS" => {
                let Some((label, f)) = e.word() else {
                    return e.error("TRANS expects a label and a formula");
                };
                if ts.transitions.iter().any(|(l, _)| *l == label) {
                    return e.error(format!("transition `{}` defined twice", label));
                }
                ts.transitions.push((label, f.formula(&both)?));
            }
            _ => unreachable!(),
        }
    }
    ts.init = init.unwrap_or_else(DnfFormula::truth);
    ts.safe = safe.unwrap_or_else(DnfFormula::truth);
    ts.guard = guard.unwrap_or_else(DnfFormula::truth);
    ts.summary = summary;
    Ok(ts)
}

/// `VARS`, `ROOT <label>`, and `CHILD <next> | <label>` per child.
pub fn parse_search_tree(text: &str) -> Result<SearchNode> {
    let es = entries(text, TREE_KEYWORDS)?;
    let vars = vars_first(&es)?;
    let state = scope(&template(&vars, false));
    let mut both = state.clone();
    both.extend(scope(&template(&vars, true)));
    let mut root = None;
    let mut children = Vec::new();
    for e in &es[1..] {
        match e.keyword.as_str() {
            "VARS" => return e.error("VARS given twice"),
            "ROOT" => once(&mut root, e, e.formula(&state)?)?,
            "CHILD" => {
                let Some((next, label)) = e.split('|') else {
                    return e.error("CHILD expects `<transition> | <label>`");
                };
                children.push((next.formula(&both)?, label.formula(&state)?));
            }
            _ => unreachable!(),
        }
    }
    Ok(SearchNode {
        vars,
        label: root.unwrap_or_else(DnfFormula::truth),
        children,
    })
}

/// `GLOBALS`, `MAIN <name>` (default `main`), `PROC <name>` followed by its
/// `LOCALS`, `INIT`, `SAFE` and steps `INST <label> <formula>`,
/// `CALL <label> -> <callee> <formula>`, `RET <label> <formula>`.
pub fn parse_program(text: &str) -> Result<ProceduralProgram> {
    let es = entries(text, PROGRAM_KEYWORDS)?;

    // declarations first, so that calls may refer to later procedures
    let mut globals: Option<Vec<String>> = None;
    let mut main_name: Option<String> = None;
    let mut procedures: Vec<Procedure> = Vec::new();
    let mut locals_seen: HashSet<usize> = HashSet::new();
    for e in &es {
        match e.keyword.as_str() {
            "GLOBALS" => {
                if globals.is_some() || !procedures.is_empty() {
                    return e.error("GLOBALS must come once, before any PROC");
                }
                globals = Some(e.names()?);
            }
            "MAIN" => {
                let Some((name, rest)) = e.word() else {
                    return e.error("MAIN expects a procedure name");
                };
                if !rest.rest.trim().is_empty() || main_name.is_some() {
                    return e.error("MAIN expects a single procedure name, once");
                }
                main_name = Some(name);
            }
            "PROC" => {
                let Some((name, rest)) = e.word() else {
                    return e.error("PROC expects a name");
                };
                if !rest.rest.trim().is_empty() {
                    return e.error("PROC expects a single name");
                }
                if procedures.iter().any(|p| p.name == name) {
                    return e.error(format!("procedure `{}` defined twice", name));
                }
                procedures.push(Procedure {
                    name,
                    locals: Vec::new(),
                    init: DnfFormula::truth(),
                    safe: DnfFormula::truth(),
                });
            }
            "LOCALS" => {
                let Some(p) = procedures.len().checked_sub(1) else {
                    return e.error("LOCALS outside a PROC");
                };
                if !locals_seen.insert(p) {
                    return e.error("LOCALS given twice");
                }
                let locals = e.names()?;
                if let Some(x) = locals
                    .iter()
                    .find(|x| globals.iter().flatten().any(|g| g == *x))
                {
                    return e.error(format!("local `{}` shadows a global", x));
                }
                procedures[p].locals = locals;
            }
            _ => {}
        }
    }
    let main_name = main_name.unwrap_or_else(|| "main".to_string());
    let mut prog = ProceduralProgram {
        globals: globals.unwrap_or_default(),
        procedures,
        main: 0,
        steps: Vec::new(),
    };
    prog.main = prog
        .procedure(&main_name)
        .ok_or_else(|| Error::Encode(format!("no procedure named `{}`", main_name)))?;

    let mut cur: Option<usize> = None;
    let (mut inits, mut safes): (HashSet<usize>, HashSet<usize>) = Default::default();
    for e in &es {
        let kw = e.keyword.as_str();
        if kw == "PROC" {
            cur = Some(cur.map_or(0, |p| p + 1));
            continue;
        }
        if matches!(kw, "GLOBALS" | "MAIN" | "LOCALS") {
            continue;
        }
        let Some(p) = cur else {
            return e.error(format!("{} outside a PROC", kw));
        };
        match kw {
            "INIT" | "SAFE" => {
                let (pre, _) = prog.frame(p, None);
                let f = e.formula(&scope(&pre))?;
                if kw == "INIT" {
                    if p != prog.main {
                        return e.error("INIT is only allowed in the main procedure");
                    }
                    if !inits.insert(p) {
                        return e.error("INIT given twice");
                    }
                    prog.procedures[p].init = f;
                } else {
                    if !safes.insert(p) {
                        return e.error("SAFE given twice");
                    }
                    prog.procedures[p].safe = f;
                }
            }
            "INST" | "CALL" | "RET" => {
                let Some((label, rest)) = e.word() else {
                    return e.error(format!("{} expects a label", kw));
                };
                if prog.steps.iter().any(|s| s.label == label) {
                    return e.error(format!("step `{}` defined twice", label));
                }
                let (kind, rest) = if kw == "CALL" {
                    let parsed = rest
                        .word()
                        .filter(|(arrow, _)| arrow == "->")
                        .and_then(|(_, r)| r.word());
                    let Some((callee, rest)) = parsed else {
                        return e.error("CALL expects `<label> -> <callee> <formula>`");
                    };
                    let callee = prog
                        .procedure(&callee)
                        .ok_or_else(|| Error::syntax(e.line, 1, format!("no procedure named `{}`", callee)))?;
                    (StepKind::Call { callee }, rest)
                } else if kw == "RET" {
                    (StepKind::Ret, rest)
                } else {
                    (StepKind::Inst, rest)
                };
                let g = prog.globals.len();
                let vars: Vec<Variable> = match kind {
                    StepKind::Inst => {
                        let (pre, post) = prog.frame(p, None);
                        pre.into_iter().chain(post).collect()
                    }
                    StepKind::Call { callee } => {
                        let (pre, post) = prog.frame(p, Some(callee));
                        pre.into_iter().chain(post.into_iter().skip(g)).collect()
                    }
                    StepKind::Ret => {
                        let (pre, post) = prog.frame(p, None);
                        pre.into_iter().chain(post.into_iter().take(g)).collect()
                    }
                };
                let formula = rest.formula(&scope(&vars))?;
                prog.steps.push(Step {
                    label,
                    procedure: p,
                    kind,
                    formula,
                });
            }
            _ => unreachable!(),
        }
    }
    Ok(prog)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn continuation_lines() {
        let ts = parse_transition_system(
            "# counter\nVARS x, y\nINIT x = 0,\n     y = 0\nTRANS t x' = x + 1, y' = y\n",
        )
        .unwrap();
        assert_eq!(ts.vars, ["x", "y"]);
        assert_eq!(ts.init.disjuncts()[0].constraints().len(), 2);
        assert_eq!(ts.transitions.len(), 1);
    }

    #[test]
    fn positions_are_file_positions() {
        let err = parse_transition_system("VARS x\nSAFE x =< z\n").unwrap_err();
        let Error::Syntax { line, column, .. } = err else { panic!("{:?}", err) };
        assert_eq!((line, column), (2, 11));
    }

    #[test]
    fn primes_only_in_transitions() {
        assert!(parse_transition_system("VARS x\nSAFE x' >= 0\n").is_err());
        assert!(parse_transition_system("VARS x\nTRANS t x' >= x\n").is_ok());
    }

    #[test]
    fn keywords_are_reserved() {
        assert!(parse_transition_system("VARS SAFE\n").is_err());
        assert!(parse_transition_system("x = 0\n").is_err());
    }

    #[test]
    fn program() {
        let p = parse_program(
            "GLOBALS g\nPROC main\nLOCALS x\nINIT g = 0, x = 0\nSAFE g =< 5\n\
             CALL c -> inc y' = x\nPROC inc\nLOCALS y\nINST a g' = g + 1, y' = y\nRET r g' = g\n",
        )
        .unwrap();
        assert_eq!(p.procedures.len(), 2);
        assert_eq!(p.steps.len(), 3);
        assert_eq!(p.steps[0].kind, StepKind::Call { callee: 1 });
        // callee locals are primed in calls, caller locals are not in scope
        assert!(parse_program("PROC main\nLOCALS x\nCALL c -> main x' = x\n").is_ok());
        assert!(parse_program("GLOBALS g\nPROC main\nRET r x' = 0\n").is_err());
        assert!(parse_program("PROC f\n").is_err());
    }
}
