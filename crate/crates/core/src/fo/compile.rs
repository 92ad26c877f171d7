//! Formula compilation to automata.
//!
//! Formulas are brought into negation normal form with quantifier blocks,
//! then evaluated bottom-up over track-serialized automata. A quantified
//! conjunction is eliminated one variable at a time, always picking the
//! variable whose bucket of factors spans the fewest tracks.

use std::collections::HashMap;

use super::Formula;
use crate::automata::Dfa;
use crate::error::{Error, Result};
use crate::presentations::Presentation;
use crate::relations::serial::SerialAut;
use crate::relations::RelationAutomaton;

/// A compiled formula: track `i` of `relation` is the free variable `vars[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledFormula {
    pub vars: Vec<String>,
    pub relation: RelationAutomaton,
}

type Var = usize;

#[derive(Debug, Clone)]
enum Node {
    Const(bool),
    Atom { name: String, args: Vec<Var>, neg: bool },
    Eq(Var, Var, bool),
    And(Vec<Node>),
    Or(Vec<Node>),
    Exists(Vec<Var>, Box<Node>),
    Forall(Vec<Var>, Box<Node>),
}

fn negate(n: Node) -> Node {
    match n {
        Node::Const(b) => Node::Const(!b),
        Node::Atom { name, args, neg } => Node::Atom { name, args, neg: !neg },
        Node::Eq(a, b, neg) => Node::Eq(a, b, !neg),
        Node::And(cs) => Node::Or(cs.into_iter().map(negate).collect()),
        Node::Or(cs) => Node::And(cs.into_iter().map(negate).collect()),
        Node::Exists(vs, b) => Node::Forall(vs, Box::new(negate(*b))),
        Node::Forall(vs, b) => Node::Exists(vs, Box::new(negate(*b))),
    }
}

struct Lowering {
    scope: Vec<(String, Var)>,
    next: Var,
}

impl Lowering {
    fn lookup(&self, name: &str) -> Var {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|&(_, v)| v)
            .expect("variables are checked before lowering")
    }

    fn lower(&mut self, f: &Formula, neg: bool) -> Node {
        match f {
            Formula::True => Node::Const(!neg),
            Formula::False => Node::Const(neg),
            Formula::Atom(name, args) => {
                Node::Atom { name: name.clone(), args: args.iter().map(|a| self.lookup(a)).collect(), neg }
            }
            Formula::Eq(a, b) => Node::Eq(self.lookup(a), self.lookup(b), neg),
            Formula::Not(g) => self.lower(g, !neg),
            Formula::And(gs) | Formula::Or(gs) => {
                let is_and = matches!(f, Formula::And(_)) != neg;
                let mut parts = Vec::new();
                for g in gs {
                    match self.lower(g, neg) {
                        Node::And(inner) if is_and => parts.extend(inner),
                        Node::Or(inner) if !is_and => parts.extend(inner),
                        other => parts.push(other),
                    }
                }
                if is_and {
                    Node::And(parts)
                } else {
                    Node::Or(parts)
                }
            }
            Formula::Implies(a, b) => {
                let desugared = Formula::Or(vec![Formula::not((**a).clone()), (**b).clone()]);
                self.lower(&desugared, neg)
            }
            Formula::Iff(a, b) => {
                let (a, b) = ((**a).clone(), (**b).clone());
                let desugared = Formula::Or(vec![
                    Formula::And(vec![a.clone(), b.clone()]),
                    Formula::And(vec![Formula::not(a), Formula::not(b)]),
                ]);
                self.lower(&desugared, neg)
            }
            Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
                let exists = matches!(f, Formula::Exists(..)) != neg;
                let depth = self.scope.len();
                let ids: Vec<Var> = vs
                    .iter()
                    .map(|v| {
                        let id = self.next;
                        self.next += 1;
                        self.scope.push((v.clone(), id));
                        id
                    })
                    .collect();
                let body = self.lower(g, neg);
                self.scope.truncate(depth);
                match (exists, body) {
                    (true, Node::Exists(mut inner, b)) => {
                        let mut all = ids;
                        all.append(&mut inner);
                        Node::Exists(all, b)
                    }
                    (false, Node::Forall(mut inner, b)) => {
                        let mut all = ids;
                        all.append(&mut inner);
                        Node::Forall(all, b)
                    }
                    (true, b) => Node::Exists(ids, Box::new(b)),
                    (false, b) => Node::Forall(ids, Box::new(b)),
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Val {
    Bool(bool),
    /// `vars` is sorted ascending and matches the automaton's tracks.
    Rel(Vec<Var>, SerialAut),
}

impl Val {
    fn vars(&self) -> &[Var] {
        match self {
            Val::Bool(_) => &[],
            Val::Rel(vs, _) => vs,
        }
    }
}

struct Evaluator<'a> {
    pres: &'a Presentation,
    base: usize,
    atoms: HashMap<(String, Vec<usize>), SerialAut>,
}

fn merge(a: &[Var], b: &[Var]) -> Vec<Var> {
    let mut out: Vec<Var> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

impl Evaluator<'_> {
    fn domain(&self) -> &Dfa {
        self.pres.domain()
    }

    fn widen(&self, vars: &[Var], aut: &SerialAut, target: &[Var]) -> SerialAut {
        let keep: Vec<bool> = target.iter().map(|v| vars.contains(v)).collect();
        aut.expand(&keep)
    }

    fn combine(&self, a: Val, b: Val, and: bool) -> Val {
        match (a, b) {
            (Val::Bool(x), other) | (other, Val::Bool(x)) => {
                if x == and {
                    other
                } else {
                    Val::Bool(x)
                }
            }
            (Val::Rel(va, sa), Val::Rel(vb, sb)) => {
                let vars = merge(&va, &vb);
                let (wa, wb) = (self.widen(&va, &sa, &vars), self.widen(&vb, &sb, &vars));
                let aut = if and { wa.intersect(&wb) } else { wa.union(&wb) };
                if aut.is_empty() {
                    // an empty relation is false whatever its tracks
                    return Val::Bool(false);
                }
                Val::Rel(vars, aut)
            }
        }
    }

    fn complement(&self, v: Val) -> Val {
        match v {
            Val::Bool(b) => Val::Bool(!b),
            Val::Rel(vs, aut) => Val::Rel(vs, aut.complement()),
        }
    }

    fn exists_var(&self, v: Val, x: Var) -> Val {
        match v {
            Val::Rel(vars, aut) => match vars.iter().position(|&y| y == x) {
                None => Val::Rel(vars, aut),
                Some(_) if vars.len() == 1 => Val::Bool(aut.exists_last(self.domain())),
                Some(j) => {
                    let aut = aut.exists(j, self.domain());
                    let mut vars = vars;
                    vars.remove(j);
                    if aut.is_empty() {
                        Val::Bool(false)
                    } else {
                        Val::Rel(vars, aut)
                    }
                }
            },
            b => b,
        }
    }

    fn atom(&mut self, name: &str, args: &[Var]) -> Result<Val> {
        let mut distinct = args.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let pattern: Vec<usize> = args.iter().map(|a| distinct.binary_search(a).unwrap()).collect();
        let key = (name.to_string(), pattern.clone());
        if !self.atoms.contains_key(&key) {
            let dense = self.pres.relation(name).ok_or_else(|| Error::Signature(format!("unknown relation {name}")))?;
            let mut perm: Vec<usize> = (0..args.len()).collect();
            perm.sort_by_key(|&i| (pattern[i], i));
            let mut aut = SerialAut::from_dense(&dense.reorder(&perm)?);
            let mut slots: Vec<usize> = perm.iter().map(|&i| pattern[i]).collect();
            for t in (1..slots.len()).rev() {
                if slots[t] == slots[t - 1] {
                    let eq = SerialAut::tracks_equal(self.base, aut.arity(), t - 1, t);
                    aut = aut.intersect(&eq).exists(t, self.domain());
                    slots.remove(t);
                }
            }
            self.atoms.insert(key.clone(), aut);
        }
        Ok(Val::Rel(distinct, self.atoms[&key].clone()))
    }

    fn eval(&mut self, n: &Node) -> Result<Val> {
        Ok(match n {
            Node::Const(b) => Val::Bool(*b),
            Node::Atom { name, args, neg } => {
                let v = self.atom(name, args)?;
                if *neg {
                    self.complement(v)
                } else {
                    v
                }
            }
            Node::Eq(a, b, neg) if a == b => Val::Bool(!neg),
            Node::Eq(a, b, neg) => {
                let aut = SerialAut::tracks_equal(self.base, 2, 0, 1);
                let aut = if *neg { aut.complement() } else { aut };
                Val::Rel(vec![*a.min(b), *a.max(b)], aut)
            }
            Node::And(cs) | Node::Or(cs) => {
                let and = matches!(n, Node::And(_));
                let mut acc = Val::Bool(and);
                for c in cs {
                    let v = self.eval(c)?;
                    acc = self.combine(acc, v, and);
                    if matches!(acc, Val::Bool(b) if b != and) {
                        break;
                    }
                }
                acc
            }
            Node::Exists(vs, body) => self.exists_block(vs, body)?,
            Node::Forall(vs, body) => {
                let inner = negate((**body).clone());
                let v = self.exists_block(vs, &inner)?;
                self.complement(v)
            }
        })
    }

    fn exists_block(&mut self, vs: &[Var], body: &Node) -> Result<Val> {
        match body {
            Node::Or(cs) => {
                let mut acc = Val::Bool(false);
                for c in cs {
                    let v = self.exists_block(vs, c)?;
                    acc = self.combine(acc, v, false);
                    if matches!(acc, Val::Bool(true)) {
                        break;
                    }
                }
                Ok(acc)
            }
            Node::And(cs) => {
                let mut factors = Vec::new();
                for c in cs {
                    match self.eval(c)? {
                        Val::Bool(true) => {}
                        Val::Bool(false) => return Ok(Val::Bool(false)),
                        v => factors.push(v),
                    }
                }
                Ok(self.eliminate(factors, vs))
            }
            other => {
                let v = self.eval(other)?;
                Ok(self.eliminate(vec![v], vs))
            }
        }
    }

    fn eliminate(&self, mut factors: Vec<Val>, vs: &[Var]) -> Val {
        let mut pending: Vec<Var> = vs.to_vec();
        loop {
            pending.retain(|x| factors.iter().any(|f| f.vars().contains(x)));
            let best = pending
                .iter()
                .map(|&x| {
                    let span = factors
                        .iter()
                        .filter(|f| f.vars().contains(&x))
                        .fold(Vec::new(), |acc: Vec<Var>, f| merge(&acc, f.vars()));
                    (span.len(), x)
                })
                .min();
            let Some((_, x)) = best else { break };
            let (mut bucket, rest): (Vec<Val>, Vec<Val>) = factors.into_iter().partition(|f| f.vars().contains(&x));
            factors = rest;
            bucket.sort_by_key(|f| f.vars().len());
            let joined = bucket.into_iter().fold(Val::Bool(true), |acc, f| self.combine(acc, f, true));
            match self.exists_var(joined, x) {
                Val::Bool(true) => {}
                Val::Bool(false) => return Val::Bool(false),
                v => factors.push(v),
            }
        }
        factors.into_iter().fold(Val::Bool(true), |acc, f| self.combine(acc, f, true))
    }
}

fn check(phi: &Formula, pres: &Presentation) -> Result<()> {
    for (name, arity) in phi.atoms() {
        match pres.arity_of(&name) {
            None => return Err(Error::Signature(format!("unknown relation {name}"))),
            Some(a) if a != arity => {
                return Err(Error::Signature(format!("{name} has arity {a}, used with {arity} arguments")))
            }
            _ => {}
        }
    }
    let bound = phi.bound_vars();
    if let Some(v) = phi.free_vars().iter().find(|v| bound.contains(v)) {
        return Err(Error::FreeVariables(format!("{v} occurs both free and bound")));
    }
    Ok(())
}

fn run(phi: &Formula, pres: &Presentation, free: &[String]) -> Result<Val> {
    check(phi, pres)?;
    let mut lowering = Lowering { scope: free.iter().cloned().zip(0..).collect(), next: free.len() };
    let node = lowering.lower(phi, false);
    let mut ev = Evaluator { pres, base: pres.base().size(), atoms: HashMap::new() };
    ev.eval(&node)
}

fn finish_serial(val: Val, pres: &Presentation, n: usize) -> SerialAut {
    let b = pres.base().size();
    let all: Vec<Var> = (0..n).collect();
    match val {
        Val::Bool(true) => SerialAut::universal(b, n),
        Val::Bool(false) => SerialAut::empty(b, n),
        Val::Rel(vars, aut) => {
            let keep: Vec<bool> = all.iter().map(|v| vars.contains(v)).collect();
            aut.expand(&keep)
        }
    }
}

fn finish(val: Val, pres: &Presentation, n: usize) -> RelationAutomaton {
    finish_serial(val, pres, n).to_dense(pres.base(), pres.domain())
}

/// Compile a formula with at least one free variable; tracks follow the
/// order of first occurrence.
pub fn compile(phi: &Formula, pres: &Presentation) -> Result<CompiledFormula> {
    let vars = phi.free_vars();
    if vars.is_empty() {
        return Err(Error::FreeVariables("a sentence has no tracks; use decide".into()));
    }
    let val = run(phi, pres, &vars)?;
    Ok(CompiledFormula { relation: finish(val, pres, vars.len()), vars })
}

/// Compile with an explicit track order; `params` must cover the free
/// variables and may list extra, unconstrained ones.
pub fn compile_with_order(phi: &Formula, pres: &Presentation, params: &[&str]) -> Result<RelationAutomaton> {
    let val = run_ordered(phi, pres, params)?;
    Ok(finish(val, pres, params.len()))
}

/// Like [`compile_with_order`] but returns the track-serialized automaton,
/// restricted to the domain on every track, without packing columns.
pub(crate) fn compile_serial(phi: &Formula, pres: &Presentation, params: &[&str]) -> Result<SerialAut> {
    let val = run_ordered(phi, pres, params)?;
    Ok(finish_serial(val, pres, params.len()).cut(pres.domain()))
}

fn run_ordered(phi: &Formula, pres: &Presentation, params: &[&str]) -> Result<Val> {
    let params: Vec<String> = params.iter().map(|s| s.to_string()).collect();
    if params.is_empty() {
        return Err(Error::FreeVariables("no parameters".into()));
    }
    for (i, v) in params.iter().enumerate() {
        if params[..i].contains(v) {
            return Err(Error::FreeVariables(format!("parameter {v} listed twice")));
        }
    }
    if let Some(v) = phi.free_vars().iter().find(|v| !params.contains(v)) {
        return Err(Error::FreeVariables(format!("{v} is free but not a parameter")));
    }
    run(phi, pres, &params)
}

/// Truth value of a sentence.
pub fn decide(phi: &Formula, pres: &Presentation) -> Result<bool> {
    let free = phi.free_vars();
    if !free.is_empty() {
        return Err(Error::FreeVariables(format!("sentence has free variables: {}", free.join(", "))));
    }
    match run(phi, pres, &[])? {
        Val::Bool(b) => Ok(b),
        Val::Rel(..) => unreachable!("closed formulas evaluate to truth values"),
    }
}

/// The set of domain words satisfying a formula with one free variable.
pub fn define_set(phi: &Formula, pres: &Presentation) -> Result<Dfa> {
    let free = phi.free_vars();
    if free.len() != 1 {
        return Err(Error::FreeVariables(format!("expected one free variable, found {}", free.len())));
    }
    let c = compile(phi, pres)?;
    Ok(c.relation.dfa().clone().with_alphabet(pres.base().clone()))
}
