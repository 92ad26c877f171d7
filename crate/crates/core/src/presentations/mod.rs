//! FA presentations: a regular domain plus named regular relations.

mod bundle;
mod groups;

pub use bundle::{load_bundle, save_bundle, Manifest};
pub use groups::{
    cyclic, ep_presentation, finite_group, finite_power, hp_presentation, hp_symbol, nat_add, require_odd_prime, ut3,
    FiniteGroupTable,
};

use std::collections::BTreeMap;

use crate::automata::{Alphabet, Dfa, Symbol, Word};
use crate::error::{Error, Result};
use crate::fo::{self, Formula};
use crate::relations::{self, RelationAutomaton};

/// A domain automaton with named relations over one base alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    name: String,
    p: Option<u32>,
    base: Alphabet,
    domain: Dfa,
    relations: BTreeMap<String, RelationAutomaton>,
    equality: Option<RelationAutomaton>,
    neutral: Word,
    metadata: BTreeMap<String, String>,
}

impl Presentation {
    pub fn new(name: &str, base: Alphabet, domain: Dfa, neutral: Word) -> Result<Self> {
        if domain.alphabet().size() != base.size() {
            return Err(Error::AlphabetMismatch { left: domain.alphabet().size(), right: base.size() });
        }
        let domain = domain.minimize().with_alphabet(base.clone());
        if !domain.accepts(&neutral)? {
            return Err(Error::NotInDomain(base.format_word(&neutral)));
        }
        Ok(Presentation {
            name: name.to_string(),
            p: None,
            base,
            domain,
            relations: BTreeMap::new(),
            equality: None,
            neutral,
            metadata: BTreeMap::new(),
        })
    }

    pub fn with_p(mut self, p: u32) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_metadata(mut self, key: &str, value: &str) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    /// Add or replace a relation; its tracks are restricted to the domain.
    pub fn with_relation(mut self, name: &str, rel: RelationAutomaton) -> Result<Self> {
        self.insert_relation(name, rel)?;
        Ok(self)
    }

    pub fn insert_relation(&mut self, name: &str, rel: RelationAutomaton) -> Result<()> {
        if rel.base().size() != self.base.size() {
            return Err(Error::AlphabetMismatch { left: rel.base().size(), right: self.base.size() });
        }
        let rel = RelationAutomaton::new(self.base.clone(), rel.arity(), rel.dfa().clone())?.restrict(&self.domain);
        self.relations.insert(name.to_string(), rel);
        Ok(())
    }

    /// Expose a domain word as the singleton unary relation `name`.
    pub fn with_constant(mut self, name: &str, word: &[Symbol]) -> Result<Self> {
        if !self.domain.accepts(word)? {
            return Err(Error::NotInDomain(self.base.format_word(word)));
        }
        self.relations.insert(name.to_string(), relations::singleton(&self.base, word));
        Ok(self)
    }

    pub fn with_equality(mut self, eq: RelationAutomaton) -> Result<Self> {
        if eq.arity() != 2 || eq.base().size() != self.base.size() {
            return Err(Error::Signature("equality must be binary over the base alphabet".into()));
        }
        self.equality = Some(eq.restrict(&self.domain));
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn p(&self) -> Option<u32> {
        self.p
    }

    pub fn base(&self) -> &Alphabet {
        &self.base
    }

    pub fn domain(&self) -> &Dfa {
        &self.domain
    }

    pub fn neutral(&self) -> &[Symbol] {
        &self.neutral
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn relations(&self) -> &BTreeMap<String, RelationAutomaton> {
        &self.relations
    }

    pub fn equality(&self) -> Option<&RelationAutomaton> {
        self.equality.as_ref()
    }

    /// Look up a relation; `Eq` resolves to the equality relation when present
    /// and `Leq` to the length-lexicographic order unless overridden.
    pub fn relation(&self, name: &str) -> Option<RelationAutomaton> {
        if let Some(r) = self.relations.get(name) {
            return Some(r.clone());
        }
        match name {
            "Eq" => self.equality.clone(),
            "Leq" => Some(relations::lex_len_order(&self.base).restrict(&self.domain)),
            _ => None,
        }
    }

    pub fn arity_of(&self, name: &str) -> Option<usize> {
        match self.relations.get(name) {
            Some(r) => Some(r.arity()),
            None => match name {
                "Eq" => self.equality.as_ref().map(|_| 2),
                "Leq" => Some(2),
                _ => None,
            },
        }
    }

    pub fn op(&self) -> Result<&RelationAutomaton> {
        self.relations.get("Op").ok_or_else(|| Error::Signature(format!("{} has no Op relation", self.name)))
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        self.base.parse_word(text)
    }

    pub fn format_word(&self, w: &[Symbol]) -> String {
        self.base.format_word(w)
    }

    pub fn check_domain(&self, w: &[Symbol]) -> Result<()> {
        if self.domain.accepts(w)? {
            Ok(())
        } else {
            Err(Error::NotInDomain(self.base.format_word(w)))
        }
    }

    /// The product `x·y`: the word `z` with `Op(x, y, z)`.
    pub fn multiply(&self, x: &[Symbol], y: &[Symbol]) -> Result<Word> {
        self.check_domain(x)?;
        self.check_domain(y)?;
        let found = self.op()?.complete(&[x, y], 2, 1)?;
        found.into_iter().next().ok_or_else(|| {
            Error::NotFunctional(format!("no product for ({}, {})", self.format_word(x), self.format_word(y)))
        })
    }

    /// All domain words of length at most `max_len`, in length-lex order.
    pub fn elements(&self, max_len: usize) -> Vec<Word> {
        self.domain.enumerate(max_len)
    }

    /// Add a relation defined by a formula whose free variables are `params`.
    pub fn define(&mut self, name: &str, params: &[&str], formula: &str) -> Result<()> {
        let phi = Formula::parse(formula)?;
        let rel = fo::compile_with_order(&phi, self, params)?;
        self.relations.insert(name.to_string(), rel);
        Ok(())
    }

    /// Restrict to the length-lex least word of each equality class.
    pub fn canonicalize(&self) -> Result<Presentation> {
        let Some(eq) = &self.equality else {
            return Ok(self.clone());
        };
        let mut work = self.clone();
        work.relations.insert("__E".into(), eq.clone());
        let equivalence = "(and (forall x (__E x x)) \
             (forall (x y) (implies (__E x y) (__E y x))) \
             (forall (x y z) (implies (and (__E x y) (__E y z)) (__E x z))))";
        if !fo::decide(&Formula::parse(equivalence)?, &work)? {
            return Err(Error::Inconsistent("equality is not an equivalence relation".into()));
        }
        let least = fo::define_set(&Formula::parse("(forall y (implies (__E y x) (Leq x y)))")?, &work)?;
        let domain = self.domain.intersect(&least)?.minimize().with_alphabet(self.base.clone());
        let neutral = self
            .domain
            .enumerate(self.neutral.len())
            .into_iter()
            .find(|w| eq.contains(&[w, &self.neutral]).unwrap_or(false))
            .unwrap_or_else(|| self.neutral.clone());
        let mut out = Presentation::new(&self.name, self.base.clone(), domain, neutral)?;
        out.p = self.p;
        out.metadata = self.metadata.clone();
        for (name, rel) in &self.relations {
            out.relations.insert(name.clone(), rel.restrict(&out.domain));
        }
        Ok(out)
    }
}
