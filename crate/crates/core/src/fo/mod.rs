//! First-order formulas over a presentation's relational signature.
//!
//! Text syntax is s-expressions:
//! `(forall (x y) (exists z (and (Op x y z) (not (= z x)))))`.

mod compile;
pub mod laws;

pub(crate) use compile::compile_serial;
pub use compile::{compile, compile_with_order, decide, define_set, CompiledFormula};

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    /// Relation atom `R(x₁, .., x_k)`.
    Atom(String, Vec<String>),
    Eq(String, String),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
    Forall(Vec<String>, Box<Formula>),
}

impl Formula {
    pub fn parse(text: &str) -> Result<Formula> {
        let tokens = tokenize(text);
        let mut pos = 0;
        let sexp = read(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Parse(format!("trailing input after token {pos}")));
        }
        to_formula(&sexp)
    }

    pub fn atom(name: &str, args: &[&str]) -> Formula {
        Formula::Atom(name.to_string(), args.iter().map(|s| s.to_string()).collect())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    /// Free variables in order of first occurrence, left to right.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        let mut note = |v: &String, bound: &Vec<String>| {
            if !bound.contains(v) && !out.contains(v) {
                out.push(v.clone());
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(_, args) => args.iter().for_each(|a| note(a, bound)),
            Formula::Eq(a, b) => {
                note(a, bound);
                note(b, bound);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(vs, f) | Formula::Forall(vs, f) => {
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                f.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    /// Names bound by some quantifier.
    pub fn bound_vars(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Exists(vs, _) | Formula::Forall(vs, _) = f {
                for v in vs {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            }
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => g.visit(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit(f)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Relation names with the arities they are used at.
    pub fn atoms(&self) -> Vec<(String, usize)> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Atom(name, args) = f {
                let key = (name.clone(), args.len());
                if !out.contains(&key) {
                    out.push(key);
                }
            }
        });
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, items: &[Formula]| {
            write!(f, "({head}")?;
            for i in items {
                write!(f, " {i}")?;
            }
            write!(f, ")")
        };
        let binder = |f: &mut fmt::Formatter<'_>, head: &str, vs: &[String], body: &Formula| {
            if vs.len() == 1 {
                write!(f, "({head} {} {body})", vs[0])
            } else {
                write!(f, "({head} ({}) {body})", vs.join(" "))
            }
        };
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(r, args) if args.is_empty() => write!(f, "({r})"),
            Formula::Atom(r, args) => write!(f, "({r} {})", args.join(" ")),
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(gs) => list(f, "and", gs),
            Formula::Or(gs) => list(f, "or", gs),
            Formula::Implies(a, b) => write!(f, "(implies {a} {b})"),
            Formula::Iff(a, b) => write!(f, "(iff {a} {b})"),
            Formula::Exists(vs, g) => binder(f, "exists", vs, g),
            Formula::Forall(vs, g) => binder(f, "forall", vs, g),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Sym(String),
    List(Vec<Sexp>),
}

fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn read(tokens: &[String], pos: &mut usize) -> Result<Sexp> {
    let tok = tokens.get(*pos).ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    None => return Err(Error::Parse("missing ')'".into())),
                    Some(")") => {
                        *pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    Some(_) => items.push(read(tokens, pos)?),
                }
            }
        }
        ")" => Err(Error::Parse("unexpected ')'".into())),
        s => Ok(Sexp::Sym(s.to_string())),
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

fn var(s: &Sexp) -> Result<String> {
    match s {
        Sexp::Sym(v) if is_ident(v) && !is_keyword(v) => Ok(v.clone()),
        other => Err(Error::Parse(format!("expected a variable, found {other:?}"))),
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "forall" | "exists" | "and" | "or" | "not" | "implies" | "iff" | "true" | "false")
}

fn to_formula(s: &Sexp) -> Result<Formula> {
    let items = match s {
        Sexp::Sym(t) if t == "true" => return Ok(Formula::True),
        Sexp::Sym(t) if t == "false" => return Ok(Formula::False),
        Sexp::Sym(t) => return Err(Error::Parse(format!("unexpected symbol '{t}'"))),
        Sexp::List(items) => items,
    };
    let (head, rest) = match items.split_first() {
        Some((Sexp::Sym(h), rest)) => (h.as_str(), rest),
        _ => return Err(Error::Parse("expected an operator".into())),
    };
    let arity = |n: usize| {
        if rest.len() == n {
            Ok(())
        } else {
            Err(Error::Parse(format!("'{head}' takes {n} arguments, got {}", rest.len())))
        }
    };
    match head {
        "not" => {
            arity(1)?;
            Ok(Formula::not(to_formula(&rest[0])?))
        }
        "and" | "or" => {
            let fs = rest.iter().map(to_formula).collect::<Result<Vec<_>>>()?;
            Ok(if head == "and" { Formula::And(fs) } else { Formula::Or(fs) })
        }
        "implies" | "iff" => {
            arity(2)?;
            let (a, b) = (Box::new(to_formula(&rest[0])?), Box::new(to_formula(&rest[1])?));
            Ok(if head == "implies" { Formula::Implies(a, b) } else { Formula::Iff(a, b) })
        }
        "forall" | "exists" => {
            arity(2)?;
            let vars = match &rest[0] {
                Sexp::List(vs) if !vs.is_empty() => vs.iter().map(var).collect::<Result<Vec<_>>>()?,
                Sexp::List(_) => return Err(Error::Parse("empty binder list".into())),
                v => vec![var(v)?],
            };
            let body = Box::new(to_formula(&rest[1])?);
            Ok(if head == "forall" { Formula::Forall(vars, body) } else { Formula::Exists(vars, body) })
        }
        "=" => {
            arity(2)?;
            Ok(Formula::Eq(var(&rest[0])?, var(&rest[1])?))
        }
        name if is_ident(name) && !is_keyword(name) => {
            let args = rest.iter().map(var).collect::<Result<Vec<_>>>()?;
            Ok(Formula::Atom(name.to_string(), args))
        }
        other => Err(Error::Parse(format!("unknown operator '{other}'"))),
    }
}
