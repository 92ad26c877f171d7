//! Extensions of an automatic group `N` by a finite group `G`.
//!
//! An element `t_g·x` (coset representative `t_g`, `x ∈ N`) is written as the
//! tag symbol of `g` followed by the word of `x`. With `t_g t_h = t_{gh} c(g,h)`
//! and `φ_h(x) = t_h⁻¹ x t_h`, the product is
//! `(t_g x)(t_h y) = t_{gh} · c(g,h) φ_h(x) y`.

use crate::automata::{Alphabet, Dfa, Symbol, Word};
use crate::error::{Error, Result};
use crate::fo::{self, laws, Formula};
use crate::presentations::{FiniteGroupTable, Presentation};
use crate::relations::{equality_relation, singleton, RelationAutomaton};

/// Coset data for [`finite_index_extension`].
#[derive(Debug, Clone)]
pub struct FiniteIndexData {
    /// Multiplication table of `G/N`.
    pub quotient: FiniteGroupTable,
    /// Graph of `φ_h` for each `h`, a binary relation over `N`.
    pub action: Vec<RelationAutomaton>,
    /// `c(g, h)` as an `N`-word, indexed `[g][h]`.
    pub correction: Vec<Vec<Word>>,
}

/// Identity automorphisms, one per element of a quotient of order `order`.
pub fn trivial_action(n: &Presentation, order: usize) -> Vec<RelationAutomaton> {
    vec![equality_relation(n.base()).restrict(n.domain()); order]
}

fn decide_on(pres: &Presentation, text: &str) -> Result<bool> {
    fo::decide(&Formula::parse(text)?, pres)
}

/// Build the extension; the action must consist of total functions and the
/// result must satisfy the group axioms, otherwise [`Error::Inconsistent`].
pub fn finite_index_extension(n: &Presentation, data: &FiniteIndexData) -> Result<Presentation> {
    let t = &data.quotient;
    let order = t.order();
    if data.action.len() != order || data.correction.len() != order || data.correction.iter().any(|r| r.len() != order)
    {
        return Err(Error::Inconsistent(format!("action and correction data must cover all {order} cosets")));
    }
    let bn = n.base().size();
    let mut pieces = Vec::with_capacity(order * order);
    for g in 0..order {
        for h in 0..order {
            let phi = &data.action[h];
            if phi.arity() != 2 || phi.base().size() != bn {
                return Err(Error::Signature(format!("action of {} must be binary over N", t.labels()[h])));
            }
            let c = &data.correction[g][h];
            n.check_domain(c)?;
            let work = n.clone().with_relation("__phi", phi.clone())?.with_relation("__c", singleton(n.base(), c))?;
            if g == 0 {
                let total = decide_on(&work, "(forall x (exists y (__phi x y)))")?;
                let functional = decide_on(&work, "(forall (x y z) (implies (and (__phi x y) (__phi x z)) (= y z)))")?;
                if !total || !functional {
                    return Err(Error::Inconsistent(format!("action of {} is not a function on N", t.labels()[h])));
                }
            }
            let phi = Formula::parse("(exists (k u s) (and (__c k) (__phi x u) (Op k u s) (Op s y z)))")?;
            pieces.push(fo::compile_with_order(&phi, &work, &["x", "y", "z"])?);
        }
    }

    let tags = order as Symbol;
    let mut labels: Vec<String> = t.labels().iter().map(|l| format!("[{l}]")).collect();
    labels.extend((0..bn as Symbol).map(|s| n.base().label(s)));
    let base = Alphabet::with_labels(labels)?;
    let op = RelationAutomaton::from_scan(
        &base,
        3,
        None::<(usize, u32)>,
        |st, col| match st {
            None => {
                let (g, h, k) = (col[0]?, col[1]?, col[2]?);
                if g >= tags || h >= tags || k as usize != t.mul(g as usize, h as usize) {
                    return None;
                }
                let i = g as usize * order + h as usize;
                Some(Some((i, pieces[i].dfa().start())))
            }
            Some((i, q)) => {
                let pa = pieces[*i].padded();
                let local = col
                    .iter()
                    .map(|c| match c {
                        None => Some(pa.pad()),
                        Some(x) => x.checked_sub(tags),
                    })
                    .collect::<Option<Vec<Symbol>>>()?;
                Some(Some((*i, pieces[*i].dfa().next(*q, pa.pack(&local)?))))
            }
        },
        |st| matches!(st, Some((i, q)) if pieces[*i].dfa().is_accepting(*q)),
    );
    let dn = n.domain();
    let domain = Dfa::build(
        base.clone(),
        None,
        |st, x| match st {
            None => (x < tags).then_some(Some(dn.start())),
            Some(q) => (x >= tags).then(|| Some(dn.next(*q, x - tags))),
        },
        |st| matches!(st, Some(q) if dn.is_accepting(*q)),
    );
    let mut neutral = vec![t.identity() as Symbol];
    neutral.extend(n.neutral().iter().map(|s| s + tags));
    let pres = Presentation::new("finite-index", base, domain, neutral.clone())?
        .with_metadata("kernel", n.name())
        .with_relation("Op", op)?
        .with_constant("is_e", &neutral)?;
    for (law, text) in [("associativity", laws::associativity()), ("inverses", laws::inverses())] {
        if !decide_on(&pres, &text)? {
            return Err(Error::Inconsistent(format!("extension data violates {law}")));
        }
    }
    Ok(pres)
}
