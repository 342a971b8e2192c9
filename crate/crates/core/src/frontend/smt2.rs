//! SMT-LIB2 Horn dialect.
//!
//! ```text
//! (set-logic HORN)
//! (declare-fun p (Real) Bool)
//! (declare-wf r)
//! (assert (forall ((x Real)) (=> (>= x 10) (p x))))
//! ```
//!
//! Solutions are `(model (define-fun p ((x1 Real)) Bool …) …)`.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::sexp::{read_all, Sexp};
use super::{
    add_clauses, clause_vars, definition, display_names, resolve_predicate, sides, AtomSyntax,
    Body, HeadSyntax, Lit, SourceFormat,
};
use crate::error::{Error, Result};
use crate::logic::{
    AtomicConstraint, ClauseSystem, Conjunction, DnfFormula, Head, LinearTerm, PredicateSymbol,
    Rational, Relation, Solution, Variable,
};
use crate::lra::Model;
use crate::solver::Counterexample;
use crate::unfold::DerivationTree;

const RESERVED: &[&str] = &[
    "and", "or", "not", "=>", "true", "false", "forall", "exists", "let", "ite", "distinct", "_",
    "!", "as", "par", "Real", "Int", "Bool",
];

struct Parser {
    system: ClauseSystem,
    predicates: HashMap<String, PredicateSymbol>,
    scope: HashMap<String, Variable>,
}

impl Parser {
    fn new() -> Self {
        Parser {
            system: ClauseSystem::new(),
            predicates: HashMap::new(),
            scope: HashMap::new(),
        }
    }

    fn command(&mut self, cmd: &Sexp, wf: &mut Vec<Sexp>) -> Result<()> {
        let Some(items) = cmd.list() else {
            return cmd.error("expected a command");
        };
        let Some(name) = cmd.head() else {
            return cmd.error("expected a command name");
        };
        match name {
            "set-logic" => match items.get(1).and_then(Sexp::atom) {
                Some("HORN") => Ok(()),
                _ => cmd.error("only the HORN logic is supported"),
            },
            "set-info" | "set-option" | "check-sat" | "get-model" | "get-info" | "exit" => Ok(()),
            "declare-fun" => self.declare_fun(cmd, items),
            "declare-wf" => {
                if items.len() != 2 || items[1].atom().is_none() {
                    return cmd.error("expected (declare-wf <predicate>)");
                }
                wf.push(items[1].clone());
                Ok(())
            }
            "assert" => {
                if items.len() != 2 {
                    return cmd.error("expected (assert <clause>)");
                }
                self.assert(&items[1])
            }
            other => cmd.error(format!("unsupported command `{}`", other)),
        }
    }

    fn declare_fun(&mut self, cmd: &Sexp, items: &[Sexp]) -> Result<()> {
        let (Some(name), Some(sorts), Some(ret)) = (
            items.get(1).and_then(Sexp::atom),
            items.get(2).and_then(Sexp::list),
            items.get(3).and_then(Sexp::atom),
        ) else {
            return cmd.error("expected (declare-fun <name> (<sort>*) Bool)");
        };
        if items.len() != 4 {
            return cmd.error("expected (declare-fun <name> (<sort>*) Bool)");
        }
        if ret != "Bool" {
            return items[3].error("only Bool-valued predicates can be declared");
        }
        for s in sorts {
            if s.atom() != Some("Real") {
                return s.error("only the Real sort is supported");
            }
        }
        let (l, c) = cmd.pos();
        if self.predicates.contains_key(name) {
            return cmd.error(format!("{} is declared twice", name));
        }
        let p = resolve_predicate(&mut self.system, name, sorts.len(), l, c)?;
        self.predicates.insert(name.to_string(), p);
        Ok(())
    }

    fn bind(&mut self, binders: &Sexp) -> Result<Vec<(String, Option<Variable>)>> {
        let Some(list) = binders.list() else {
            return binders.error("expected a binder list");
        };
        let mut saved = Vec::new();
        for b in list {
            let (Some(name), Some(sort)) = (
                b.list().and_then(|l| l.first()).and_then(Sexp::atom),
                b.list().and_then(|l| l.get(1)).and_then(Sexp::atom),
            ) else {
                return b.error("expected (<name> Real)");
            };
            if b.list().unwrap().len() != 2 {
                return b.error("expected (<name> Real)");
            }
            if sort != "Real" {
                return b.error("only the Real sort is supported");
            }
            let v = self.system.fresh_var(name);
            saved.push((name.to_string(), self.scope.insert(name.to_string(), v)));
        }
        Ok(saved)
    }

    fn unbind(&mut self, saved: Vec<(String, Option<Variable>)>) {
        for (name, old) in saved.into_iter().rev() {
            match old {
                Some(v) => self.scope.insert(name, v),
                None => self.scope.remove(&name),
            };
        }
    }

    fn assert(&mut self, e: &Sexp) -> Result<()> {
        self.scope.clear();
        let mut f = e;
        if e.head() == Some("forall") {
            let items = e.list().unwrap();
            if items.len() != 3 {
                return e.error("expected (forall (<binder>*) <clause>)");
            }
            self.bind(&items[1])?;
            f = &items[2];
        }
        let (body, head) = match (f.head(), f.list()) {
            (Some("=>"), Some(items)) if items.len() >= 3 => {
                let mut body = Body::truth();
                for b in &items[1..items.len() - 1] {
                    body = body.and(&self.body(b)?);
                }
                (body, self.head(&items[items.len() - 1])?)
            }
            (Some("not"), Some(items)) if items.len() == 2 => {
                (self.body(&items[1])?, HeadSyntax::Formula(DnfFormula::falsity()))
            }
            _ => (Body::truth(), self.head(f)?),
        };
        add_clauses(&mut self.system, &body, &head)
    }

    fn head(&mut self, e: &Sexp) -> Result<HeadSyntax> {
        if let Some(a) = self.atom(e)? {
            return Ok(HeadSyntax::Atom(a));
        }
        Ok(HeadSyntax::Formula(self.formula(e)?))
    }

    /// A predicate application, if `e` is one.
    fn atom(&mut self, e: &Sexp) -> Result<Option<AtomSyntax>> {
        let (line, column) = e.pos();
        match e {
            Sexp::Atom { text, .. } => {
                if self.scope.contains_key(text) {
                    return Ok(None);
                }
                match self.predicates.get(text) {
                    Some(p) if p.arity() == 0 => Ok(Some(AtomSyntax {
                        name: text.clone(),
                        args: Vec::new(),
                        line,
                        column,
                    })),
                    _ => Ok(None),
                }
            }
            Sexp::List { items, .. } => {
                let Some(name) = e.head() else { return Ok(None) };
                let Some(p) = self.predicates.get(name) else {
                    return Ok(None);
                };
                if items.len() - 1 != p.arity() {
                    return e.error(format!(
                        "{} applied to {} arguments, declared with {}",
                        name,
                        items.len() - 1,
                        p.arity()
                    ));
                }
                let args = items[1..]
                    .iter()
                    .map(|t| self.term(t))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Some(AtomSyntax {
                    name: name.to_string(),
                    args,
                    line,
                    column,
                }))
            }
        }
    }

    fn body(&mut self, e: &Sexp) -> Result<Body> {
        if let Some(a) = self.atom(e)? {
            return Ok(Body::lit(Lit::Atom(a)));
        }
        match (e.head(), e.list()) {
            (Some("and"), Some(items)) => {
                let mut b = Body::truth();
                for x in &items[1..] {
                    b = b.and(&self.body(x)?);
                }
                Ok(b)
            }
            (Some("or"), Some(items)) => {
                let mut b = Body(Vec::new());
                for x in &items[1..] {
                    b = b.or(self.body(x)?);
                }
                Ok(b)
            }
            (Some("exists"), Some(items)) if items.len() == 3 => {
                let saved = self.bind(&items[1])?;
                let b = self.body(&items[2]);
                self.unbind(saved);
                b
            }
            _ => Ok(Body::formula(&self.formula(e)?)),
        }
    }

    /// A theory formula without predicates.
    fn formula(&mut self, e: &Sexp) -> Result<DnfFormula> {
        if let Some(a) = self.atom(e)? {
            return Err(Error::syntax(
                a.line,
                a.column,
                format!("predicate {} is not allowed here", a.name),
            ));
        }
        if let Some(s) = e.atom() {
            return match s {
                "true" => Ok(DnfFormula::truth()),
                "false" => Ok(DnfFormula::falsity()),
                _ => e.error(format!("expected a formula, found `{}`", s)),
            };
        }
        let items = e.list().unwrap();
        let Some(op) = e.head() else {
            return e.error("expected a formula");
        };
        let args = &items[1..];
        match op {
            "and" => {
                let mut f = DnfFormula::truth();
                for x in args {
                    f = f.and(&self.formula(x)?);
                }
                Ok(f)
            }
            "or" => {
                let mut f = DnfFormula::falsity();
                for x in args {
                    f = f.or(&self.formula(x)?);
                }
                Ok(f)
            }
            "not" if args.len() == 1 => Ok(self.formula(&args[0])?.negate()),
            "=>" if args.len() >= 2 => {
                let mut f = self.formula(&args[args.len() - 1])?;
                for x in args[..args.len() - 1].iter().rev() {
                    f = self.formula(x)?.negate().or(&f);
                }
                Ok(f)
            }
            ">=" | "<=" | ">" | "<" | "=" if args.len() >= 2 => {
                let terms = args.iter().map(|t| self.term(t)).collect::<Result<Vec<_>>>()?;
                let mut cs = Vec::new();
                for w in terms.windows(2) {
                    let (a, b) = (w[0].clone(), w[1].clone());
                    cs.push(match op {
                        ">=" => AtomicConstraint::ge(a, b),
                        "<=" => AtomicConstraint::le(a, b),
                        ">" => AtomicConstraint::gt(a, b),
                        "<" => AtomicConstraint::lt(a, b),
                        _ => AtomicConstraint::eq(a, b),
                    });
                }
                Ok(DnfFormula::from_constraints(cs))
            }
            _ => e.error(format!("unsupported formula `{}`", op)),
        }
    }

    fn term(&mut self, e: &Sexp) -> Result<LinearTerm> {
        if let Some(s) = e.atom() {
            if s.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                if s.contains('.') {
                    return e.error("decimal fractions are not supported, write (/ p q)");
                }
                let n: BigInt = s
                    .parse()
                    .map_err(|_| Error::syntax(e.pos().0, e.pos().1, format!("bad numeral `{}`", s)))?;
                return Ok(LinearTerm::constant(Rational::from_integer(n)));
            }
            return match self.scope.get(s) {
                Some(v) => Ok(LinearTerm::var(v.clone())),
                None => e.error(format!("unknown variable `{}`", s)),
            };
        }
        let items = e.list().unwrap();
        let Some(op) = e.head() else {
            return e.error("expected a term");
        };
        let args = items[1..]
            .iter()
            .map(|t| self.term(t))
            .collect::<Result<Vec<_>>>()?;
        match op {
            "+" if !args.is_empty() => Ok(args.iter().fold(LinearTerm::zero(), |a, b| a.plus(b))),
            "-" if args.len() == 1 => Ok(args[0].negated()),
            "-" if args.len() > 1 => Ok(args[1..].iter().fold(args[0].clone(), |a, b| a.minus(b))),
            "*" if !args.is_empty() => {
                let mut acc = args[0].clone();
                for b in &args[1..] {
                    acc = if acc.is_constant() {
                        b.scaled(acc.constant_part())
                    } else if b.is_constant() {
                        acc.scaled(b.constant_part())
                    } else {
                        return e.error("nonlinear product");
                    };
                }
                Ok(acc)
            }
            "/" if args.len() >= 2 => {
                let mut acc = args[0].clone();
                for b in &args[1..] {
                    if !b.is_constant() || b.constant_part().is_zero() {
                        return e.error("division by a non-constant or zero");
                    }
                    acc = acc.scaled(&b.constant_part().recip());
                }
                Ok(acc)
            }
            _ => e.error(format!("unsupported term `{}`", op)),
        }
    }
}

pub(super) fn parse_system(text: &str) -> Result<ClauseSystem> {
    let mut p = Parser::new();
    let mut wf = Vec::new();
    for cmd in read_all(text)? {
        p.command(&cmd, &mut wf)?;
    }
    for w in wf {
        let name = w.atom().unwrap();
        let Some(pred) = p.predicates.get(name).cloned() else {
            return w.error(format!("well-foundedness condition on undeclared predicate {}", name));
        };
        if pred.arity() % 2 != 0 {
            return w.error(format!("well-foundedness condition on {} needs an even arity", pred));
        }
        p.system.add_wf(&pred)?;
    }
    Ok(p.system)
}

pub(super) fn parse_solution(text: &str) -> Result<Solution> {
    let mut top = read_all(text)?;
    if top.first().and_then(Sexp::atom) == Some("sat") {
        top.remove(0);
    }
    // `(model d …)`, `(d …)` or a bare sequence of definitions
    let defs: Vec<Sexp> = match top.as_slice() {
        [one] if one.head() == Some("model") => one.list().unwrap()[1..].to_vec(),
        [one] if one.head() != Some("define-fun") && one.list().is_some() => one.list().unwrap().to_vec(),
        _ => top,
    };
    let mut p = Parser::new();
    let mut sol = Solution::new();
    for d in &defs {
        let items = d.list().unwrap_or(&[]);
        let ok = d.head() == Some("define-fun")
            && items.len() == 5
            && items[1].atom().is_some()
            && items[3].atom() == Some("Bool");
        if !ok {
            return d.error("expected (define-fun <name> ((<x> Real)*) Bool <formula>)");
        }
        p.scope.clear();
        let saved = p.bind(&items[2])?;
        let params: Vec<Variable> = saved.iter().map(|(n, _)| p.scope[n].clone()).collect();
        if params.iter().collect::<HashSet<_>>().len() != params.len()
            || saved.iter().map(|(n, _)| n).collect::<HashSet<_>>().len() != saved.len()
        {
            return items[2].error("parameters must be distinct");
        }
        let body = p.formula(&items[4])?;
        let (pred, f) = definition(items[1].atom().unwrap(), &params, body)?;
        if sol.get(&pred).is_some() {
            return d.error(format!("{} is defined twice", pred));
        }
        sol.insert(pred, f)?;
    }
    Ok(sol)
}

fn is_simple_symbol(s: &str) -> bool {
    let extra = "~!@$%^&*_-+=<>.?/";
    !s.is_empty()
        && !s.chars().next().unwrap().is_ascii_digit()
        && s.chars().all(|c| c.is_ascii_alphanumeric() || extra.contains(c))
        && !RESERVED.contains(&s)
}

pub(super) fn variable_name(raw: &str) -> String {
    let extra = "~!@$%^&*_-+=<>.?/";
    let mut s: String = raw
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || extra.contains(c) { c } else { '_' })
        .collect();
    if s.is_empty() || s.chars().next().unwrap().is_ascii_digit() {
        s = format!("v{}", s);
    }
    if RESERVED.contains(&s.as_str()) {
        s.push('_');
    }
    s
}

fn symbol(name: &str) -> String {
    if is_simple_symbol(name) {
        name.to_string()
    } else {
        format!("|{}|", name)
    }
}

fn number(r: &Rational) -> String {
    let abs = if r.is_integer() {
        r.numer().abs().to_string()
    } else {
        format!("(/ {} {})", r.numer().abs(), r.denom())
    };
    if r.is_negative() {
        format!("(- {})", abs)
    } else {
        abs
    }
}

fn side(parts: &[(Variable, Rational)], constant: &Rational, names: &HashMap<Variable, String>) -> String {
    let mut items: Vec<String> = parts
        .iter()
        .map(|(v, a)| {
            if a.is_one() {
                names[v].clone()
            } else {
                format!("(* {} {})", number(a), names[v])
            }
        })
        .collect();
    if !constant.is_zero() {
        items.push(number(constant));
    }
    match items.len() {
        0 => "0".into(),
        1 => items.pop().unwrap(),
        _ => format!("(+ {})", items.join(" ")),
    }
}

fn constraint(c: &AtomicConstraint, names: &HashMap<Variable, String>) -> String {
    let (left, right, lc, rc) = sides(c.term());
    let (l, r) = (side(&left, &lc, names), side(&right, &rc, names));
    if left.is_empty() && !right.is_empty() {
        let rel = match c.relation() {
            Relation::Ge => "<=",
            Relation::Gt => "<",
            Relation::Eq => "=",
        };
        format!("({} {} {})", rel, r, l)
    } else {
        format!("({} {} {})", c.relation().symbol(), l, r)
    }
}

fn conjunction(c: &Conjunction, names: &HashMap<Variable, String>) -> String {
    match c.constraints() {
        [] => "true".into(),
        [one] => constraint(one, names),
        many => format!(
            "(and {})",
            many.iter().map(|a| constraint(a, names)).collect::<Vec<_>>().join(" ")
        ),
    }
}

fn formula(f: &DnfFormula, names: &HashMap<Variable, String>) -> String {
    match f.disjuncts() {
        [] => "false".into(),
        [one] => conjunction(one, names),
        many => format!(
            "(or {})",
            many.iter().map(|d| conjunction(d, names)).collect::<Vec<_>>().join(" ")
        ),
    }
}

fn atom(a: &crate::logic::Atom, names: &HashMap<Variable, String>) -> String {
    let name = symbol(a.predicate().name());
    if a.args().is_empty() {
        return name;
    }
    let args: Vec<&str> = a.args().iter().map(|v| names[v].as_str()).collect();
    format!("({} {})", name, args.join(" "))
}

pub(super) fn render_system(system: &ClauseSystem) -> String {
    let mut out = String::from("(set-logic HORN)\n");
    let mut reserved: HashSet<String> = HashSet::new();
    for p in system.predicates() {
        let sorts = vec!["Real"; p.arity()].join(" ");
        out += &format!("(declare-fun {} ({}) Bool)\n", symbol(p.name()), sorts);
        reserved.insert(p.name().to_string());
    }
    for w in system.wf_conditions() {
        out += &format!("(declare-wf {})\n", symbol(w.predicate.name()));
    }
    for c in system.clauses() {
        let vars = clause_vars(c);
        let names = display_names(&vars, SourceFormat::Smtlib2, &reserved);
        let head = match &c.head {
            Head::Atom(a) => atom(a, &names),
            Head::Formula(f) => formula(f, &names),
        };
        let mut body: Vec<String> = c.body_atoms.iter().map(|a| atom(a, &names)).collect();
        body.extend(c.body.constraints().iter().map(|a| constraint(a, &names)));
        let body = match body.len() {
            0 => "true".to_string(),
            1 => body.pop().unwrap(),
            _ => format!("(and {})", body.join(" ")),
        };
        let inner = format!("(=> {} {})", body, head);
        if vars.is_empty() {
            out += &format!("(assert {})\n", inner);
        } else {
            let binders: Vec<String> = vars.iter().map(|v| format!("({} Real)", names[v])).collect();
            out += &format!("(assert (forall ({}) {}))\n", binders.join(" "), inner);
        }
    }
    out += "(check-sat)\n";
    out
}

pub(super) fn render_solution(sol: &Solution) -> String {
    let mut out = String::from("(model\n");
    for (p, f) in sol.iter() {
        let names: HashMap<Variable, String> = p
            .formals()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, format!("x{}", i + 1)))
            .collect();
        let params: Vec<String> = (1..=p.arity()).map(|i| format!("(x{} Real)", i)).collect();
        out += &format!(
            "  (define-fun {} ({}) Bool {})\n",
            symbol(p.name()),
            params.join(" "),
            formula(f, &names)
        );
    }
    out += ")\n";
    out
}

fn derivation(tree: &DerivationTree, node: usize) -> String {
    let n = &tree.nodes[node];
    if n.children.is_empty() {
        return n.clause.to_string();
    }
    let kids: Vec<String> = n.children.iter().map(|&c| derivation(tree, c)).collect();
    format!("({} {})", n.clause, kids.join(" "))
}

pub(super) fn render_counterexample(cex: &Counterexample) -> String {
    format!(
        "(counterexample\n  (derivation {})\n{})\n",
        derivation(&cex.derivation.tree, 0),
        assignments(&cex.model)
    )
}

fn assignments(model: &Model) -> String {
    let names = display_names(model.assignment.keys(), SourceFormat::Smtlib2, &HashSet::new());
    let mut out = String::new();
    for (v, value) in &model.assignment {
        out += &format!("  (define-fun {} () Real {})\n", names[v], number(value));
    }
    out
}

pub(super) fn render_model(model: &Model) -> String {
    format!("(model\n{})\n", assignments(model))
}
