//! Command implementations behind the `autgroups` binary.
//!
//! Each command is a plain function over a [`Presentation`] so it can be
//! tested without spawning a process; `main.rs` only parses arguments,
//! prints, and maps errors to exit codes.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::automata::{Symbol, Word};
use crate::cocycle::twisted_extension;
use crate::error::{Error, Result};
use crate::fo::{self, Formula};
use crate::oracle::NilElement;
use crate::presentations::{
    cyclic, ep_presentation, finite_group, finite_power, hp_presentation, load_bundle, nat_add, save_bundle, ut3,
    Manifest, Presentation,
};
use crate::relations::unary;

/// Seed used by sampling commands when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Presentations the `build` command knows how to construct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuildKind {
    NatAdd,
    Ep,
    Hp,
    /// Restricted direct power of ℤ/p.
    Power,
    /// The finite group of unitriangular 3×3 matrices over GF(p).
    Ut3,
    Twisted,
}

impl BuildKind {
    pub fn parse(name: &str) -> Result<BuildKind> {
        Ok(match name {
            "nat-add" => BuildKind::NatAdd,
            "ep" => BuildKind::Ep,
            "hp" => BuildKind::Hp,
            "power" => BuildKind::Power,
            "ut3" => BuildKind::Ut3,
            "twisted" => BuildKind::Twisted,
            other => return Err(Error::Parse(format!("unknown presentation '{other}'"))),
        })
    }
}

/// Construct a presentation in memory; `p` is required for all kinds but
/// `nat-add` and `twisted`.
pub fn build(kind: BuildKind, p: Option<u32>) -> Result<Presentation> {
    let need_p = || p.ok_or_else(|| Error::Parse("this presentation needs --p".into()));
    match kind {
        BuildKind::NatAdd => Ok(nat_add()),
        BuildKind::Ep => ep_presentation(need_p()?),
        BuildKind::Hp => hp_presentation(need_p()?),
        BuildKind::Power => {
            let p = need_p()?;
            if p < 2 {
                return Err(Error::InvalidGroup(format!("ℤ/{p} needs p ≥ 2")));
            }
            Ok(finite_power(&cyclic(p as usize)?).with_p(p))
        }
        BuildKind::Ut3 => {
            let p = need_p()?;
            Ok(finite_group(&ut3(p)?).with_p(p))
        }
        BuildKind::Twisted => Ok(twisted_extension()?.1),
    }
}

/// Build and write a bundle directory.
pub fn cmd_build(kind: BuildKind, p: Option<u32>, out: &Path) -> Result<Manifest> {
    save_bundle(&build(kind, p)?, out)
}

pub fn load(bundle: &Path) -> Result<Presentation> {
    load_bundle(bundle)
}

/// Truth value of a closed formula.
pub fn cmd_decide(pres: &Presentation, formula: &str) -> Result<bool> {
    fo::decide(&Formula::parse(formula)?, pres)
}

/// The product of two words given as text.
pub fn cmd_eval(pres: &Presentation, x: &str, y: &str) -> Result<String> {
    let (x, y) = (pres.parse_word(x)?, pres.parse_word(y)?);
    Ok(pres.format_word(&pres.multiply(&x, &y)?))
}

/// A pair whose automaton product disagrees with the oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub x: String,
    pub y: String,
    /// Automaton result, `None` when no product was found.
    pub automaton: Option<String>,
    pub oracle: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrosscheckReport {
    pub presentation: String,
    pub max_len: usize,
    pub pairs_checked: usize,
    pub counterexample: Option<Counterexample>,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    pub fn render(&self) -> String {
        match &self.counterexample {
            None => format!("PASS {}: {} pairs up to length {}", self.presentation, self.pairs_checked, self.max_len),
            Some(c) => format!(
                "FAIL {}: {} · {} gives {} but the oracle gives {}",
                self.presentation,
                c.x,
                c.y,
                c.automaton.as_deref().unwrap_or("nothing"),
                c.oracle
            ),
        }
    }
}

/// The oracle's product for presentations it understands.
fn oracle_product(pres: &Presentation, x: &[Symbol], y: &[Symbol], rank: usize) -> Result<Word> {
    match pres.name() {
        "nat-add" => {
            let n = |w: &[Symbol]| w.iter().rev().fold(BigUint::zero(), |acc, &b| acc * 2u32 + b);
            let mut sum = n(x) + n(y);
            let mut out = Vec::new();
            while !sum.is_zero() {
                out.push(if (&sum & BigUint::one()).is_one() { 1 } else { 0 });
                sum >>= 1;
            }
            Ok(out)
        }
        "ep" | "hp" => {
            let a = NilElement::decode(x, pres, rank)?;
            let b = NilElement::decode(y, pres, rank)?;
            a.multiply(&b)?.encode(pres)
        }
        other => Err(Error::Unsupported(format!("no oracle for presentation '{other}'"))),
    }
}

fn check_pair(pres: &Presentation, x: &Word, y: &Word, rank: usize) -> Result<Option<Counterexample>> {
    let want = oracle_product(pres, x, y, rank)?;
    let got = pres.multiply(x, y).ok();
    if got.as_ref() == Some(&want) {
        return Ok(None);
    }
    Ok(Some(Counterexample {
        x: pres.format_word(x),
        y: pres.format_word(y),
        automaton: got.map(|g| pres.format_word(&g)),
        oracle: pres.format_word(&want),
    }))
}

/// Compare `Op` with the oracle on all pairs of domain words of length at
/// most `max_len`. Pairs are checked in parallel; the reported
/// counterexample is the first failing pair in length-lex order.
pub fn crosscheck(pres: &Presentation, max_len: usize) -> Result<CrosscheckReport> {
    let elems = pres.elements(max_len);
    let pairs: Vec<(usize, usize)> = (0..elems.len()).flat_map(|i| (0..elems.len()).map(move |j| (i, j))).collect();
    run_crosscheck(pres, max_len, &elems, &pairs)
}

/// Like [`crosscheck`] on `samples` random pairs drawn with a seeded generator.
pub fn crosscheck_sampled(pres: &Presentation, max_len: usize, samples: usize, seed: u64) -> Result<CrosscheckReport> {
    let elems = pres.elements(max_len);
    if elems.is_empty() {
        return Err(Error::NotInDomain("no domain words in range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(usize, usize)> =
        (0..samples).map(|_| (rng.gen_range(0..elems.len()), rng.gen_range(0..elems.len()))).collect();
    pairs.sort_unstable();
    pairs.dedup();
    run_crosscheck(pres, max_len, &elems, &pairs)
}

fn run_crosscheck(
    pres: &Presentation,
    max_len: usize,
    elems: &[Word],
    pairs: &[(usize, usize)],
) -> Result<CrosscheckReport> {
    if !matches!(pres.name(), "nat-add" | "ep" | "hp") {
        return Err(Error::Unsupported(format!("no oracle for presentation '{}'", pres.name())));
    }
    let rank = max_len + 2;
    let failure = pairs
        .par_iter()
        .map(|&(i, j)| check_pair(pres, &elems[i], &elems[j], rank))
        .find_first(|r| !matches!(r, Ok(None)));
    let counterexample = match failure {
        None => None,
        Some(r) => r?,
    };
    Ok(CrosscheckReport { presentation: pres.name().to_string(), max_len, pairs_checked: pairs.len(), counterexample })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub length: usize,
    pub count: String,
    pub cumulative: String,
    /// `p^{n(n−1)/2}` at `n = length`, when `p` was given.
    pub demand: Option<String>,
}

/// Domain growth, compared with the number of elements the free class-2
/// exponent-`p` group needs on `n` generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub presentation: String,
    pub p: Option<u32>,
    pub rows: Vec<CensusRow>,
    /// Supply factor: words of length at most `c·n` are available for `n` generators.
    pub c: usize,
    /// Least `n` with `p^{n(n−1)/2}` above the number of domain words of length ≤ `c·n`.
    pub crossover: Option<usize>,
    #[serde(skip)]
    counts: Vec<BigUint>,
    #[serde(skip)]
    cumulative: Vec<BigUint>,
}

/// Largest `n` searched for the crossover.
const CROSSOVER_LIMIT: usize = 256;

pub fn demand(p: u32, n: usize) -> BigUint {
    BigUint::from(p).pow((n * n.saturating_sub(1) / 2) as u32)
}

pub fn cmd_census(pres: &Presentation, max_len: usize, p: Option<u32>, c: usize) -> Result<CensusReport> {
    if max_len == 0 {
        return Err(Error::Parse("max-len must be at least 1".into()));
    }
    let dom = pres.domain();
    let counts: Vec<BigUint> = (0..=max_len).map(|n| dom.count_words(n)).collect();
    let mut cumulative = Vec::with_capacity(counts.len());
    let mut acc = BigUint::zero();
    for k in &counts {
        acc += k;
        cumulative.push(acc.clone());
    }
    let rows = (0..=max_len)
        .map(|n| CensusRow {
            length: n,
            count: counts[n].to_string(),
            cumulative: cumulative[n].to_string(),
            demand: p.map(|p| demand(p, n).to_string()),
        })
        .collect();
    let crossover = match p {
        Some(p) if c > 0 => {
            let mut supply = cumulative.clone();
            let mut found = None;
            for n in 1..=CROSSOVER_LIMIT {
                while supply.len() <= c * n {
                    let next = supply.last().expect("nonempty") + dom.count_words(supply.len());
                    supply.push(next);
                }
                if demand(p, n) > supply[c * n] {
                    found = Some(n);
                    break;
                }
            }
            found
        }
        _ => None,
    };
    Ok(CensusReport { presentation: pres.name().to_string(), p, rows, c, crossover, counts, cumulative })
}

impl CensusReport {
    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn cumulative(&self) -> &[BigUint] {
        &self.cumulative
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let with_demand = self.p.is_some();
        let _ = write!(out, "{:>6} {:>20} {:>20}", "length", "count", "cumulative");
        if with_demand {
            let _ = write!(out, " {:>20}", "p^(n(n-1)/2)");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{:>6} {:>20} {:>20}", r.length, r.count, r.cumulative);
            if let Some(d) = &r.demand {
                let _ = write!(out, " {d:>20}");
            }
            out.push('\n');
        }
        if let Some(p) = self.p {
            match self.crossover {
                Some(n) => {
                    let _ = writeln!(
                        out,
                        "crossover: n = {n}, {p}^{} exceeds the {} domain words of length <= {}",
                        n * (n - 1) / 2,
                        self.supply_at(n).map_or_else(|| "?".into(), |s| s.to_string()),
                        self.c * n
                    );
                }
                None => {
                    let _ = writeln!(out, "crossover: none up to n = {CROSSOVER_LIMIT} for c = {}", self.c);
                }
            }
        }
        out
    }

    fn supply_at(&self, n: usize) -> Option<BigUint> {
        self.cumulative.get(self.c * n).cloned()
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Export format for [`cmd_export`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Dot,
}

impl ExportFormat {
    pub fn parse(s: &str) -> Result<ExportFormat> {
        match s {
            "json" => Ok(ExportFormat::Json),
            "dot" => Ok(ExportFormat::Dot),
            other => Err(Error::Parse(format!("unknown format '{other}'"))),
        }
    }
}

/// Render a relation (or `domain`) of the presentation.
pub fn cmd_export(pres: &Presentation, relation: &str, format: ExportFormat) -> Result<String> {
    let rel = if relation == "domain" {
        unary(pres.base(), pres.domain())
    } else {
        pres.relation(relation).ok_or_else(|| Error::Signature(format!("unknown relation {relation}")))?
    };
    Ok(match format {
        ExportFormat::Json => rel.to_json(),
        ExportFormat::Dot => rel.to_dot(relation),
    })
}

/// Exit code for an error: 2 for usage and input problems, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::Signature(_)
        | Error::FreeVariables(_)
        | Error::NotInDomain(_)
        | Error::NotOddPrime(_)
        | Error::SymbolOutOfRange { .. }
        | Error::Unsupported(_)
        | Error::Io(_) => 2,
        _ => 1,
    }
}

/// Count of pairs a full crosscheck will examine.
pub fn pair_count(pres: &Presentation, max_len: usize) -> usize {
    let n = (0..=max_len).map(|k| pres.domain().count_words(k)).sum::<BigUint>();
    let n = n.to_usize().unwrap_or(usize::MAX);
    n.saturating_mul(n)
}

#[cfg(test)]
mod tests;
