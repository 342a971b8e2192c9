//! Prolog-style syntax.
//!
//! ```text
//! :- declare p/1.
//! p(X) :- X >= 10.
//! q(V, W) :- p(U), W = U + V.
//! Z >= Y :- q(Y, Z), Y =< 0.
//! wf(r(S, T)).
//! ```
//!
//! Solutions are lists of definitions `p(X1) = X1 >= 10.`

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{
    add_clauses, add_wf, clause_vars, definition, derivation_text, display_names, resolve_predicate,
    sides, AtomSyntax, Body, HeadSyntax, Lit, SourceFormat,
};
use crate::error::{Error, Result};
use crate::logic::{
    AtomicConstraint, ClauseSystem, Conjunction, DnfFormula, Head, LinearTerm, Rational, Relation,
    Solution, Variable,
};
use crate::lra::Model;
use crate::solver::Counterexample;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Var(String),
    Ident(String),
    /// `'quoted name'`, always a predicate
    Quoted(String),
    Num(BigInt),
    LParen,
    RParen,
    Comma,
    Semi,
    Dot,
    Neck,
    Plus,
    Minus,
    Star,
    Slash,
    Ge,
    Le,
    Gt,
    Lt,
    Eq,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Var(s) | Tok::Ident(s) => format!("`{}`", s),
        Tok::Quoted(s) => format!("'{}'", s),
        Tok::Num(n) => format!("`{}`", n),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Semi => "`;`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Neck => "`:-`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Ge => "`>=`".into(),
        Tok::Le => "`=<`".into(),
        Tok::Gt => "`>`".into(),
        Tok::Lt => "`<`".into(),
        Tok::Eq => "`=`".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// With `free_names`, every identifier is a variable and may carry primes
/// (`x'`); only `true` and `false` stay keywords.
fn lex(text: &str, free_names: bool) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let (l, cl) = (line, col);
        let peek = chars.get(i + 1).copied();
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        let (tok, len) = if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if chars.get(j) == Some(&'.') && chars.get(j + 1).is_some_and(|d| d.is_ascii_digit()) {
                return Err(Error::syntax(
                    l,
                    cl,
                    "decimal fractions are not supported, write p/q",
                ));
            }
            let digits: String = chars[i..j].iter().collect();
            (Tok::Num(digits.parse().unwrap()), j - i)
        } else if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            if free_names {
                while j < chars.len() && chars[j] == '\'' {
                    j += 1;
                }
            }
            let word: String = chars[i..j].iter().collect();
            let is_var = if free_names {
                word != "true" && word != "false"
            } else {
                c.is_uppercase() || c == '_'
            };
            if is_var {
                (Tok::Var(word), j - i)
            } else {
                (Tok::Ident(word), j - i)
            }
        } else if c == '\'' {
            let mut j = i + 1;
            while j < chars.len() && chars[j] != '\'' {
                if chars[j] == '\n' {
                    break;
                }
                j += 1;
            }
            if j >= chars.len() || chars[j] != '\'' {
                return Err(Error::syntax(l, cl, "unterminated quoted name"));
            }
            let word: String = chars[i + 1..j].iter().collect();
            (Tok::Quoted(word), j + 1 - i)
        } else {
            match (c, peek) {
                (':', Some('-')) => (Tok::Neck, 2),
                ('>', Some('=')) => (Tok::Ge, 2),
                ('=', Some('<')) => (Tok::Le, 2),
                ('<', Some('=')) => {
                    return Err(Error::syntax(l, cl, "`<=` is not a relation here, write `=<`"))
                }
                ('>', _) => (Tok::Gt, 1),
                ('<', _) => (Tok::Lt, 1),
                ('=', _) => (Tok::Eq, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                (',', _) => (Tok::Comma, 1),
                (';', _) => (Tok::Semi, 1),
                ('.', _) => (Tok::Dot, 1),
                ('+', _) => (Tok::Plus, 1),
                ('-', _) => (Tok::Minus, 1),
                ('*', _) => (Tok::Star, 1),
                ('/', _) => (Tok::Slash, 1),
                _ => return Err(Error::syntax(l, cl, format!("unexpected character `{}`", c))),
            }
        };
        out.push(Token {
            tok,
            line: l,
            column: cl,
        });
        advance(&mut i, &mut line, &mut col, len);
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

enum Item {
    Clause { head: HeadSyntax, body: Body },
    Wf(AtomSyntax),
    Definition { name: String, params: Vec<Variable>, body: DnfFormula },
    Declare,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    system: ClauseSystem,
    /// Variables of the current item by name.
    scope: HashMap<String, Variable>,
    /// When set, unknown variable names are an error.
    closed: bool,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            toks: lex(text, false)?,
            pos: 0,
            system: ClauseSystem::new(),
            scope: HashMap::new(),
            closed: false,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (l, c) = self.here();
        Err(Error::syntax(l, c, msg))
    }

    fn expect(&mut self, t: &Tok) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", describe(t), describe(self.peek())))
        }
    }

    fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn item(&mut self) -> Result<Item> {
        self.scope.clear();
        self.closed = false;
        if self.eat(&Tok::Neck) {
            return self.directive();
        }
        if *self.peek() == Tok::Ident("wf".into()) && *self.peek_at(1) == Tok::LParen {
            self.bump();
            self.bump();
            let atom = self.atom()?;
            self.expect(&Tok::RParen)?;
            self.expect(&Tok::Dot)?;
            return Ok(Item::Wf(atom));
        }
        let head = match self.peek() {
            Tok::Quoted(_) => HeadSyntax::Atom(self.atom()?),
            Tok::Ident(s) if s != "true" && s != "false" => HeadSyntax::Atom(self.atom()?),
            _ => {
                let (l, c) = self.here();
                match self.disjunction(false)?.into_formula() {
                    Ok(f) => HeadSyntax::Formula(f),
                    Err(_) => return Err(Error::syntax(l, c, "predicate inside a formula head")),
                }
            }
        };
        if let HeadSyntax::Atom(a) = &head {
            if *self.peek() == Tok::Eq {
                return self.definition(a.clone());
            }
        }
        let body = if self.eat(&Tok::Neck) {
            self.disjunction(true)?
        } else {
            Body::truth()
        };
        self.expect(&Tok::Dot)?;
        Ok(Item::Clause { head, body })
    }

    fn directive(&mut self) -> Result<Item> {
        match self.bump() {
            Tok::Ident(s) if s == "declare" => {}
            t => return self.error(format!("unknown directive {}", describe(&t))),
        }
        loop {
            let (l, c) = self.here();
            let name = self.predicate_name()?;
            self.expect(&Tok::Slash)?;
            let arity = match self.bump() {
                Tok::Num(n) => usize::try_from(n).map_err(|_| Error::syntax(l, c, "arity too large"))?,
                t => return self.error(format!("expected an arity, found {}", describe(&t))),
            };
            resolve_predicate(&mut self.system, &name, arity, l, c)?;
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::Dot)?;
        Ok(Item::Declare)
    }

    fn definition(&mut self, head: AtomSyntax) -> Result<Item> {
        self.expect(&Tok::Eq)?;
        let mut params = Vec::new();
        for t in &head.args {
            match t.coeffs().iter().next() {
                Some((v, a))
                    if t.coeffs().len() == 1
                        && a.is_one()
                        && t.constant_part().is_zero()
                        && !params.contains(v) =>
                {
                    params.push(v.clone())
                }
                _ => {
                    return Err(Error::syntax(
                        head.line,
                        head.column,
                        "definition parameters must be distinct variables",
                    ))
                }
            }
        }
        self.closed = true;
        let (l, c) = self.here();
        let body = self
            .disjunction(false)?
            .into_formula()
            .map_err(|_| Error::syntax(l, c, "predicate inside a definition"))?;
        self.expect(&Tok::Dot)?;
        Ok(Item::Definition {
            name: head.name,
            params,
            body,
        })
    }

    fn predicate_name(&mut self) -> Result<String> {
        match self.bump() {
            Tok::Ident(s) | Tok::Quoted(s) => Ok(s),
            t => self.error(format!("expected a predicate name, found {}", describe(&t))),
        }
    }

    fn atom(&mut self) -> Result<AtomSyntax> {
        let (line, column) = self.here();
        let name = self.predicate_name()?;
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
            loop {
                args.push(self.expr()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RParen)?;
        }
        Ok(AtomSyntax {
            name,
            args,
            line,
            column,
        })
    }

    fn disjunction(&mut self, atoms: bool) -> Result<Body> {
        let mut b = self.conjunction(atoms)?;
        while self.eat(&Tok::Semi) {
            b = b.or(self.conjunction(atoms)?);
        }
        Ok(b)
    }

    fn conjunction(&mut self, atoms: bool) -> Result<Body> {
        let mut b = self.literal(atoms)?;
        while self.eat(&Tok::Comma) {
            b = b.and(&self.literal(atoms)?);
        }
        Ok(b)
    }

    fn literal(&mut self, atoms: bool) -> Result<Body> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Body::truth())
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Body::falsity())
            }
            Tok::Ident(_) | Tok::Quoted(_) => {
                if !atoms {
                    return self.error("predicates are not allowed here");
                }
                Ok(Body::lit(Lit::Atom(self.atom()?)))
            }
            Tok::LParen => {
                // `(X + 1) >= 2` or `(X >= 1 ; X =< 0)`: try the comparison first
                let save = self.pos;
                match self.comparison() {
                    Ok(b) => Ok(b),
                    Err(first) => {
                        self.pos = save;
                        self.bump();
                        let inner = self.disjunction(atoms);
                        match inner {
                            Ok(b) => {
                                self.expect(&Tok::RParen)?;
                                Ok(b)
                            }
                            Err(_) => Err(first),
                        }
                    }
                }
            }
            _ => self.comparison(),
        }
    }

    fn comparison(&mut self) -> Result<Body> {
        let lhs = self.expr()?;
        let rel = self.bump();
        let rhs = self.expr()?;
        let c = match rel {
            Tok::Ge => AtomicConstraint::ge(lhs, rhs),
            Tok::Gt => AtomicConstraint::gt(lhs, rhs),
            Tok::Le => AtomicConstraint::le(lhs, rhs),
            Tok::Lt => AtomicConstraint::lt(lhs, rhs),
            Tok::Eq => AtomicConstraint::eq(lhs, rhs),
            t => {
                self.pos -= 1;
                return self.error(format!("expected a relation, found {}", describe(&t)));
            }
        };
        Ok(Body::lit(Lit::Constraint(c)))
    }

    fn expr(&mut self) -> Result<LinearTerm> {
        let mut acc = if self.eat(&Tok::Minus) {
            self.product()?.negated()
        } else {
            self.eat(&Tok::Plus);
            self.product()?
        };
        loop {
            if self.eat(&Tok::Plus) {
                acc = acc.plus(&self.product()?);
            } else if self.eat(&Tok::Minus) {
                acc = acc.minus(&self.product()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<LinearTerm> {
        let mut acc = self.factor()?;
        loop {
            let (l, c) = self.here();
            if self.eat(&Tok::Star) {
                let rhs = self.factor()?;
                acc = if acc.is_constant() {
                    rhs.scaled(acc.constant_part())
                } else if rhs.is_constant() {
                    acc.scaled(rhs.constant_part())
                } else {
                    return Err(Error::syntax(l, c, "nonlinear product"));
                };
            } else if self.eat(&Tok::Slash) {
                let rhs = self.factor()?;
                if !rhs.is_constant() || rhs.constant_part().is_zero() {
                    return Err(Error::syntax(l, c, "division by a non-constant or zero"));
                }
                acc = acc.scaled(&rhs.constant_part().recip());
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<LinearTerm> {
        let (l, c) = self.here();
        match self.bump() {
            Tok::Num(n) => Ok(LinearTerm::constant(Rational::from_integer(n))),
            Tok::Var(name) => Ok(LinearTerm::var(self.variable(&name, l, c)?)),
            Tok::Minus => Ok(self.factor()?.negated()),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            t => Err(Error::syntax(l, c, format!("expected a term, found {}", describe(&t)))),
        }
    }

    fn variable(&mut self, name: &str, line: usize, column: usize) -> Result<Variable> {
        if name == "_" {
            if self.closed {
                return Err(Error::syntax(line, column, "anonymous variable in a definition"));
            }
            return Ok(self.system.fresh_var("_"));
        }
        if let Some(v) = self.scope.get(name) {
            return Ok(v.clone());
        }
        if self.closed {
            return Err(Error::syntax(
                line,
                column,
                format!("`{}` is not in scope here", name),
            ));
        }
        let v = self.system.fresh_var(name);
        self.scope.insert(name.to_string(), v.clone());
        Ok(v)
    }
}

pub(super) fn parse_system(text: &str) -> Result<ClauseSystem> {
    let mut p = Parser::new(text)?;
    let mut wf = Vec::new();
    while !p.at_eof() {
        let (l, c) = p.here();
        match p.item()? {
            Item::Clause { head, body } => add_clauses(&mut p.system, &body, &head)?,
            Item::Wf(a) => wf.push(a),
            Item::Declare => {}
            Item::Definition { .. } => {
                return Err(Error::syntax(l, c, "definitions belong in solution files"))
            }
        }
    }
    for a in &wf {
        add_wf(&mut p.system, a)?;
    }
    Ok(p.system)
}

pub(super) fn parse_solution(text: &str) -> Result<Solution> {
    let mut p = Parser::new(text)?;
    let mut sol = Solution::new();
    while !p.at_eof() {
        let (l, c) = p.here();
        match p.item()? {
            Item::Definition { name, params, body } => {
                let (pred, f) = definition(&name, &params, body)?;
                if sol.get(&pred).is_some() {
                    return Err(Error::syntax(l, c, format!("{} is defined twice", pred)));
                }
                sol.insert(pred, f)?;
            }
            Item::Declare => {}
            _ => return Err(Error::syntax(l, c, "expected a definition `p(X1, ...) = formula.`")),
        }
    }
    Ok(sol)
}

/// A formula over the variables in `scope`, written at `line`/`column` of
/// some enclosing file. Identifiers of any case are variables.
pub(crate) fn parse_formula(
    text: &str,
    scope: &HashMap<String, Variable>,
    line: usize,
    column: usize,
) -> Result<DnfFormula> {
    let shift = |l: usize, c: usize| (l + line - 1, if l == 1 { c + column - 1 } else { c });
    let mut toks = lex(text, true).map_err(|e| match e {
        Error::Syntax { line: l, column: c, message } => {
            let (l, c) = shift(l, c);
            Error::Syntax { line: l, column: c, message }
        }
        other => other,
    })?;
    for t in &mut toks {
        (t.line, t.column) = shift(t.line, t.column);
    }
    let mut p = Parser {
        toks,
        pos: 0,
        system: ClauseSystem::new(),
        scope: scope.clone(),
        closed: true,
    };
    let (l, c) = p.here();
    let f = p
        .disjunction(false)?
        .into_formula()
        .map_err(|_| Error::syntax(l, c, "predicates are not allowed here"))?;
    if !p.at_eof() {
        return p.error(format!("unexpected {}", describe(p.peek())));
    }
    Ok(f)
}

pub(super) fn variable_name(raw: &str) -> String {
    let mut s: String = raw
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    match s.chars().next() {
        None => s = "V".into(),
        Some('_') if s.len() == 1 => s = "V_".into(),
        Some(c) if c.is_lowercase() => {
            let upper: String = c.to_uppercase().collect();
            s = upper + &s[c.len_utf8()..];
        }
        Some(c) if !(c.is_uppercase() || c == '_') => s = format!("V{}", s),
        _ => {}
    }
    s
}

fn predicate_name(name: &str) -> String {
    let plain = name.chars().next().is_some_and(|c| c.is_lowercase())
        && name.chars().all(|c| c.is_alphanumeric() || c == '_')
        && !matches!(name, "true" | "false" | "wf");
    if plain {
        name.to_string()
    } else {
        format!("'{}'", name)
    }
}

fn number(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn side(parts: &[(Variable, Rational)], constant: &Rational, names: &HashMap<Variable, String>) -> String {
    let mut items: Vec<String> = parts
        .iter()
        .map(|(v, a)| {
            if a.is_one() {
                names[v].clone()
            } else {
                format!("{}*{}", number(a), names[v])
            }
        })
        .collect();
    if !constant.is_zero() || items.is_empty() {
        items.push(number(constant));
    }
    items.join(" + ")
}

pub(super) fn constraint(c: &AtomicConstraint, names: &HashMap<Variable, String>) -> String {
    let (left, right, lc, rc) = sides(c.term());
    let (l, r) = (side(&left, &lc, names), side(&right, &rc, names));
    // keep variables on the left when only the right side has them
    if left.is_empty() && !right.is_empty() {
        let rel = match c.relation() {
            Relation::Ge => "=<",
            Relation::Gt => "<",
            Relation::Eq => "=",
        };
        format!("{} {} {}", r, rel, l)
    } else {
        format!("{} {} {}", l, c.relation().symbol(), r)
    }
}

fn conjunction(c: &Conjunction, names: &HashMap<Variable, String>) -> String {
    if c.is_empty() {
        return "true".into();
    }
    c.constraints()
        .iter()
        .map(|a| constraint(a, names))
        .collect::<Vec<_>>()
        .join(", ")
}

pub(super) fn formula(f: &DnfFormula, names: &HashMap<Variable, String>) -> String {
    if f.is_false() {
        return "false".into();
    }
    let many = f.disjuncts().len() > 1;
    f.disjuncts()
        .iter()
        .map(|d| {
            let s = conjunction(d, names);
            if many && d.len() > 1 {
                format!("({})", s)
            } else {
                s
            }
        })
        .collect::<Vec<_>>()
        .join(" ; ")
}

fn atom(a: &crate::logic::Atom, names: &HashMap<Variable, String>) -> String {
    let name = predicate_name(a.predicate().name());
    if a.args().is_empty() {
        return name;
    }
    let args: Vec<&str> = a.args().iter().map(|v| names[v].as_str()).collect();
    format!("{}({})", name, args.join(", "))
}

pub(super) fn render_system(system: &ClauseSystem) -> String {
    let mut out = String::new();
    for p in system.predicates() {
        out += &format!(":- declare {}/{}.\n", predicate_name(p.name()), p.arity());
    }
    for c in system.clauses() {
        let names = display_names(&clause_vars(c), SourceFormat::Native, &HashSet::new());
        let head = match &c.head {
            Head::Atom(a) => atom(a, &names),
            Head::Formula(f) => formula(f, &names),
        };
        let mut body: Vec<String> = c.body_atoms.iter().map(|a| atom(a, &names)).collect();
        body.extend(c.body.constraints().iter().map(|a| constraint(a, &names)));
        if body.is_empty() {
            out += &format!("{}.\n", head);
        } else {
            out += &format!("{} :- {}.\n", head, body.join(", "));
        }
    }
    for w in system.wf_conditions() {
        let params: Vec<String> = (1..=w.predicate.arity()).map(|i| format!("X{}", i)).collect();
        out += &format!("wf({}({})).\n", predicate_name(w.predicate.name()), params.join(", "));
    }
    out
}

pub(super) fn render_solution(sol: &Solution) -> String {
    let mut out = String::new();
    for (p, f) in sol.iter() {
        let formals = p.formals();
        let names: HashMap<Variable, String> = formals
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), format!("X{}", i + 1)))
            .collect();
        let head = if formals.is_empty() {
            predicate_name(p.name())
        } else {
            let args: Vec<&str> = formals.iter().map(|v| names[v].as_str()).collect();
            format!("{}({})", predicate_name(p.name()), args.join(", "))
        };
        out += &format!("{} = {}.\n", head, formula(f, &names));
    }
    out
}

pub(super) fn render_counterexample(cex: &Counterexample) -> String {
    let out = format!("derivation: {}\n", derivation_text(&cex.derivation.tree, 0, ", "));
    out + &render_model(&cex.model)
}

pub(super) fn render_model(model: &Model) -> String {
    let mut out = String::new();
    let names = display_names(model.assignment.keys(), SourceFormat::Native, &HashSet::new());
    for (v, value) in &model.assignment {
        let text = if value.is_negative() {
            format!("-{}", number(&-value.clone()))
        } else {
            number(value)
        };
        out += &format!("{} = {}.\n", names[v], text);
    }
    out
}
