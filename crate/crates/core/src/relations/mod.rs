//! Regular relations of arbitrary arity over padded convolutions.
//!
//! A k-tuple of words is stacked column by column; shorter words are padded
//! with the filler symbol `◇`, whose code is `base.size()`. A column
//! `(c_0, .., c_{k-1})` is packed as `Σ c_i · (base+1)^i`. The all-pad column
//! never occurs in a convolution and has no code, so the packed alphabet has
//! `(base+1)^k - 1` symbols.

pub mod serial;

use std::collections::HashSet;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::automata::{determinize_with, Alphabet, AutomatonJson, Dfa, DfaDot, StateId, Symbol, Word};
use crate::error::{Error, Result};

pub const PAD_LABEL: &str = "◇";

/// The tuple alphabet for arity `k` over a base alphabet of size `base`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PaddedAlphabet {
    base: usize,
    arity: usize,
}

impl PaddedAlphabet {
    pub fn new(base: usize, arity: usize) -> Self {
        assert!(base >= 1 && arity >= 1);
        PaddedAlphabet { base, arity }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn pad(&self) -> Symbol {
        self.base as Symbol
    }

    fn radix(&self) -> usize {
        self.base + 1
    }

    pub fn packed_size(&self) -> usize {
        self.radix().pow(self.arity as u32) - 1
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::plain(self.packed_size())
    }

    /// Pack a column; `None` for the all-pad column.
    pub fn pack(&self, column: &[Symbol]) -> Option<Symbol> {
        debug_assert_eq!(column.len(), self.arity);
        let code = column.iter().rev().fold(0usize, |acc, &c| acc * self.radix() + c as usize);
        (code < self.packed_size()).then_some(code as Symbol)
    }

    pub fn unpack_into(&self, code: Symbol, out: &mut [Symbol]) {
        let mut c = code as usize;
        for slot in out.iter_mut() {
            *slot = (c % self.radix()) as Symbol;
            c /= self.radix();
        }
    }

    pub fn unpack(&self, code: Symbol) -> Vec<Symbol> {
        let mut out = vec![0; self.arity];
        self.unpack_into(code, &mut out);
        out
    }

    /// Column with `None` for pad components.
    pub fn column(&self, code: Symbol) -> Vec<Option<Symbol>> {
        self.unpack(code).into_iter().map(|c| (c != self.pad()).then_some(c)).collect()
    }

    pub fn column_label(&self, code: Symbol, base: &Alphabet) -> String {
        let parts: Vec<String> =
            self.column(code).iter().map(|c| c.map_or(PAD_LABEL.to_string(), |s| base.label(s))).collect();
        format!("({})", parts.join(","))
    }
}

/// Stack the words into one packed word of length `max |w_i|`.
pub fn convolve(base: usize, words: &[&[Symbol]]) -> Word {
    let pa = PaddedAlphabet::new(base, words.len());
    let len = words.iter().map(|w| w.len()).max().unwrap_or(0);
    let mut col = vec![0; words.len()];
    (0..len)
        .map(|i| {
            for (slot, w) in col.iter_mut().zip(words) {
                *slot = w.get(i).copied().unwrap_or(pa.pad());
            }
            pa.pack(&col).expect("column below max length has a non-pad entry")
        })
        .collect()
}

/// Inverse of [`convolve`]; rejects words where a track resumes after padding.
pub fn deconvolve(base: usize, arity: usize, packed: &[Symbol]) -> Result<Vec<Word>> {
    let pa = PaddedAlphabet::new(base, arity);
    let mut out = vec![Vec::new(); arity];
    let mut ended = vec![false; arity];
    for (pos, &code) in packed.iter().enumerate() {
        if code as usize >= pa.packed_size() {
            return Err(Error::SymbolOutOfRange { symbol: code, size: pa.packed_size() });
        }
        for (i, c) in pa.column(code).into_iter().enumerate() {
            match c {
                Some(s) if ended[i] => {
                    return Err(Error::IllFormed(format!("track {i} resumes with {s} at column {pos}")));
                }
                Some(s) => out[i].push(s),
                None => ended[i] = true,
            }
        }
    }
    Ok(out)
}

/// Automaton over the packed alphabet recognising a set of k-tuples of words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationAutomaton {
    arity: usize,
    base: Alphabet,
    dfa: Dfa,
}

impl RelationAutomaton {
    /// Wrap a packed-alphabet DFA, restricting it to well-formed convolutions.
    pub fn new(base: Alphabet, arity: usize, dfa: Dfa) -> Result<Self> {
        let pa = PaddedAlphabet::new(base.size(), arity);
        if dfa.alphabet().size() != pa.packed_size() {
            return Err(Error::AlphabetMismatch { left: dfa.alphabet().size(), right: pa.packed_size() });
        }
        let wf = well_formed_dfa(pa);
        let dfa = dfa.intersect(&wf)?.minimize();
        Ok(RelationAutomaton { arity, base, dfa })
    }

    /// Build from a column scanner. `step` sees each column with `None` for pads;
    /// returning `None` rejects.
    pub fn from_scan<S, F, A>(base: &Alphabet, arity: usize, init: S, step: F, accept: A) -> Self
    where
        S: Clone + Eq + Hash,
        F: Fn(&S, &[Option<Symbol>]) -> Option<S>,
        A: Fn(&S) -> bool,
    {
        let pa = PaddedAlphabet::new(base.size(), arity);
        let columns: Vec<Vec<Option<Symbol>>> = (0..pa.packed_size() as Symbol).map(|c| pa.column(c)).collect();
        let dfa = Dfa::build(pa.alphabet(), init, |s, a| step(s, &columns[a as usize]), accept);
        RelationAutomaton::new(base.clone(), arity, dfa).expect("alphabet sizes agree")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn base(&self) -> &Alphabet {
        &self.base
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn padded(&self) -> PaddedAlphabet {
        PaddedAlphabet::new(self.base.size(), self.arity)
    }

    pub fn contains(&self, tuple: &[&[Symbol]]) -> Result<bool> {
        if tuple.len() != self.arity {
            return Err(Error::InvalidTrack(format!("expected {} words, got {}", self.arity, tuple.len())));
        }
        for w in tuple {
            self.base.check(w)?;
        }
        self.dfa.accepts(&convolve(self.base.size(), tuple))
    }

    pub fn is_empty(&self) -> bool {
        self.dfa.is_empty()
    }

    pub fn equivalent(&self, other: &RelationAutomaton) -> Result<bool> {
        self.dfa.equivalent(&other.dfa)
    }

    fn same_shape(&self, other: &RelationAutomaton) -> Result<()> {
        if self.arity != other.arity || self.base.size() != other.base.size() {
            return Err(Error::AlphabetMismatch {
                left: self.dfa.alphabet().size(),
                right: other.dfa.alphabet().size(),
            });
        }
        Ok(())
    }

    pub fn intersect(&self, other: &RelationAutomaton) -> Result<RelationAutomaton> {
        self.same_shape(other)?;
        Ok(RelationAutomaton {
            arity: self.arity,
            base: self.base.clone(),
            dfa: self.dfa.intersect(&other.dfa)?.minimize(),
        })
    }

    pub fn union(&self, other: &RelationAutomaton) -> Result<RelationAutomaton> {
        self.same_shape(other)?;
        Ok(RelationAutomaton {
            arity: self.arity,
            base: self.base.clone(),
            dfa: self.dfa.union(&other.dfa)?.minimize(),
        })
    }

    /// Complement relative to the well-formed convolutions.
    pub fn complement(&self) -> RelationAutomaton {
        RelationAutomaton::new(self.base.clone(), self.arity, self.dfa.complement()).expect("same alphabet")
    }

    /// Restrict track `i` to words accepted by `domain`, for every `i`.
    pub fn restrict(&self, domain: &Dfa) -> RelationAutomaton {
        let mut dfa = self.dfa.clone();
        for i in 0..self.arity {
            let cyl = track_cylinder(&self.base, self.arity, i, domain);
            dfa = dfa.intersect(cyl.dfa()).expect("same alphabet").minimize();
        }
        RelationAutomaton { arity: self.arity, base: self.base.clone(), dfa }
    }

    /// Existential projection removing track `i`.
    pub fn project(&self, i: usize) -> Result<RelationAutomaton> {
        let k = self.arity;
        if k < 2 || i >= k {
            return Err(Error::InvalidTrack(format!("cannot project track {i} of an arity-{k} relation")));
        }
        let b = self.base.size();
        let old = self.padded();
        let new = PaddedAlphabet::new(b, k - 1);
        let radix = b + 1;
        let mut ins = vec![0 as Symbol; new.packed_size() * radix];
        let mut col = vec![0; k - 1];
        for c in 0..new.packed_size() as Symbol {
            new.unpack_into(c, &mut col);
            for x in 0..radix as Symbol {
                let mut full = col.clone();
                full.insert(i, x);
                ins[c as usize * radix + x as usize] = old.pack(&full).expect("non-pad column");
            }
        }
        // columns that are pad everywhere except on the erased track
        let tails: Vec<Symbol> = (0..b as Symbol)
            .map(|x| {
                let mut full = vec![old.pad(); k];
                full[i] = x;
                old.pack(&full).unwrap()
            })
            .collect();
        let acc = pad_closure(&self.dfa, &tails);
        let dfa = determinize_with(
            new.alphabet(),
            vec![self.dfa.start()],
            |q, a, out| {
                for x in 0..radix {
                    out.push(self.dfa.next(q, ins[a as usize * radix + x]));
                }
            },
            |q| acc[q as usize],
        );
        RelationAutomaton::new(self.base.clone(), k - 1, dfa)
    }

    /// Insert an unconstrained track at position `pos`.
    pub fn cylindrify(&self, pos: usize) -> Result<RelationAutomaton> {
        let k = self.arity;
        if pos > k {
            return Err(Error::InvalidTrack(format!("position {pos} out of range for arity {k}")));
        }
        let old = self.padded();
        let new = PaddedAlphabet::new(self.base.size(), k + 1);
        let maps: Vec<(Option<Symbol>, bool)> = (0..new.packed_size() as Symbol)
            .map(|c| {
                let mut cols = new.unpack(c);
                let x = cols.remove(pos);
                (old.pack(&cols), x == new.pad())
            })
            .collect();
        let dfa = Dfa::build(
            new.alphabet(),
            (self.dfa.start(), false, false),
            |&(q, old_done, new_ended), a| {
                let (old_code, is_pad) = maps[a as usize];
                if new_ended && !is_pad {
                    return None;
                }
                match old_code {
                    None => Some((q, true, new_ended || is_pad)),
                    Some(_) if old_done => None,
                    Some(c) => Some((self.dfa.next(q, c), false, new_ended || is_pad)),
                }
            },
            |&(q, _, _)| self.dfa.is_accepting(q),
        );
        RelationAutomaton::new(self.base.clone(), k + 1, dfa)
    }

    /// Permute tracks: track `i` of the result is track `perm[i]` of `self`.
    pub fn reorder(&self, perm: &[usize]) -> Result<RelationAutomaton> {
        let k = self.arity;
        let mut seen = vec![false; k];
        if perm.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidTrack(format!("{perm:?} is not a permutation of 0..{k}")));
        }
        let pa = self.padded();
        let map: Vec<Symbol> = (0..pa.packed_size() as Symbol)
            .map(|c| {
                let cols = pa.unpack(c);
                let mut old = vec![0; k];
                for (i, &p) in perm.iter().enumerate() {
                    old[p] = cols[i];
                }
                pa.pack(&old).unwrap()
            })
            .collect();
        let dfa = self.dfa.reindex(pa.alphabet(), |a| Some(map[a as usize])).minimize();
        Ok(RelationAutomaton { arity: k, base: self.base.clone(), dfa })
    }

    /// Words `w` for track `out` such that the tuple with the given other
    /// tracks is accepted; at most `limit` of them, in a deterministic order.
    pub fn complete(&self, others: &[&[Symbol]], out: usize, limit: usize) -> Result<Vec<Word>> {
        if others.len() + 1 != self.arity || out >= self.arity {
            return Err(Error::InvalidTrack(format!("need {} fixed words", self.arity - 1)));
        }
        for w in others {
            self.base.check(w)?;
        }
        let known_len = others.iter().map(|w| w.len()).max().unwrap_or(0);
        let dfa = &self.dfa;
        let sink = (0..dfa.state_count() as StateId)
            .find(|&q| !dfa.is_accepting(q) && (0..dfa.alphabet().size() as Symbol).all(|a| dfa.next(q, a) == q));
        let mut search = Completion {
            rel: self,
            pa: self.padded(),
            sink,
            out_weight: (self.base.size() + 1).pow(out as u32),
            packed_size: self.padded().packed_size(),
            others,
            out,
            limit,
            known_len,
            failed: HashSet::new(),
            path: Vec::with_capacity(known_len + 1),
            found: Vec::new(),
        };
        search.dfs(self.dfa.start(), 0, false);
        Ok(search.found)
    }

    /// Graphviz rendering with tuple labels such as `(1,◇,0)`.
    pub fn to_dot(&self, name: &str) -> String {
        let pa = self.padded();
        let f = |a: Symbol| pa.column_label(a, &self.base);
        DfaDot { dfa: &self.dfa, name, label: Some(&f) }.render()
    }

    pub fn to_json(&self) -> String {
        let wrapper = RelationJson {
            arity: self.arity,
            base_alphabet: self.base.size(),
            automaton: AutomatonJson::from(&self.dfa),
        };
        serde_json::to_string(&wrapper).expect("serializable")
    }

    /// Parse the JSON wrapper; `base` supplies labels and must match its size.
    pub fn from_json(text: &str, base: &Alphabet) -> Result<RelationAutomaton> {
        let w: RelationJson = serde_json::from_str(text)?;
        if w.base_alphabet != base.size() {
            return Err(Error::AlphabetMismatch { left: w.base_alphabet, right: base.size() });
        }
        if w.arity == 0 {
            return Err(Error::InvalidTrack("arity must be positive".into()));
        }
        RelationAutomaton::new(base.clone(), w.arity, w.automaton.to_dfa()?)
    }

    pub(crate) fn from_minimal_unchecked(base: Alphabet, arity: usize, dfa: Dfa) -> Self {
        RelationAutomaton { arity, base, dfa }
    }
}

/// Interchange form: an automaton over the packed alphabet plus its shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RelationJson {
    pub arity: usize,
    pub base_alphabet: usize,
    pub automaton: AutomatonJson,
}

struct Completion<'a> {
    rel: &'a RelationAutomaton,
    pa: PaddedAlphabet,
    sink: Option<StateId>,
    out_weight: usize,
    packed_size: usize,
    others: &'a [&'a [Symbol]],
    out: usize,
    limit: usize,
    known_len: usize,
    failed: HashSet<(StateId, usize, bool)>,
    path: Word,
    found: Vec<Word>,
}

impl Completion<'_> {
    /// Packed code of the fixed tracks at `pos`, with a zero on the output track.
    fn fixed_code(&self, pos: usize) -> usize {
        let pad = self.pa.pad();
        let mut it = self.others.iter();
        let (mut code, mut weight) = (0usize, 1usize);
        for i in 0..self.rel.arity {
            if i != self.out {
                code += it.next().unwrap().get(pos).copied().unwrap_or(pad) as usize * weight;
            }
            weight *= self.pa.radix();
        }
        code
    }

    fn dfs(&mut self, q: StateId, pos: usize, ended: bool) {
        if self.found.len() >= self.limit || (!self.failed.is_empty() && self.failed.contains(&(q, pos, ended))) {
            return;
        }
        let before = self.found.len();
        let dfa = self.rel.dfa();
        let bound = self.known_len + dfa.state_count();
        if pos >= self.known_len && dfa.is_accepting(q) {
            let w = if self.found.len() + 1 == self.limit { std::mem::take(&mut self.path) } else { self.path.clone() };
            self.found.push(w);
        }
        if pos < bound {
            let pad = self.pa.pad();
            let fixed = self.fixed_code(pos);
            for x in if ended { pad..=pad } else { 0..=pad } {
                if self.found.len() >= self.limit {
                    break;
                }
                let code = fixed + x as usize * self.out_weight;
                if code < self.packed_size {
                    let next = dfa.next(q, code as Symbol);
                    if Some(next) == self.sink {
                        continue;
                    }
                    if x != pad {
                        self.path.push(x);
                    }
                    self.dfs(next, pos + 1, x == pad);
                    if x != pad {
                        self.path.pop();
                    }
                }
            }
        }
        if self.found.len() == before {
            self.failed.insert((q, pos, ended));
        }
    }
}

fn well_formed_dfa(pa: PaddedAlphabet) -> Dfa {
    let k = pa.arity();
    let pad = pa.pad();
    Dfa::build(
        pa.alphabet(),
        0u64,
        |&ended, a| {
            let cols = pa.unpack(a);
            let mut next = ended;
            for (i, &c) in cols.iter().enumerate() {
                let bit = 1u64 << i;
                if c == pad {
                    next |= bit;
                } else if ended & bit != 0 {
                    return None;
                }
            }
            debug_assert!(k < 64);
            Some(next)
        },
        |_| true,
    )
}

/// States from which some sequence of `tails` columns reaches acceptance.
pub(crate) fn pad_closure(dfa: &Dfa, tails: &[Symbol]) -> Vec<bool> {
    let mut acc: Vec<bool> = (0..dfa.state_count() as StateId).map(|q| dfa.is_accepting(q)).collect();
    loop {
        let mut changed = false;
        for q in 0..dfa.state_count() as StateId {
            if !acc[q as usize] && tails.iter().any(|&t| acc[dfa.next(q, t) as usize]) {
                acc[q as usize] = true;
                changed = true;
            }
        }
        if !changed {
            return acc;
        }
    }
}

/// The language of all well-formed convolutions of arity `k`.
pub fn well_formed(base: &Alphabet, k: usize) -> RelationAutomaton {
    let pa = PaddedAlphabet::new(base.size(), k);
    RelationAutomaton { arity: k, base: base.clone(), dfa: well_formed_dfa(pa).minimize() }
}

/// All tuples whose track `track` is accepted by `domain`.
pub fn track_cylinder(base: &Alphabet, k: usize, track: usize, domain: &Dfa) -> RelationAutomaton {
    // None = the track has ended in an accepting state
    RelationAutomaton::from_scan(
        base,
        k,
        Some(domain.start()),
        |s, col| match (s, col[track]) {
            (Some(q), Some(a)) => Some(Some(domain.next(*q, a))),
            (Some(q), None) => domain.is_accepting(*q).then_some(None),
            (None, Some(_)) => None,
            (None, None) => Some(None),
        },
        |s| s.is_none_or(|q| domain.is_accepting(q)),
    )
}

/// `{(w, w)}` over all base words.
pub fn equality_relation(base: &Alphabet) -> RelationAutomaton {
    RelationAutomaton::from_scan(base, 2, (), |_, col| (col[0] == col[1]).then_some(()), |_| true)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum LexState {
    Equal,
    Less,
    Greater,
    Shorter,
}

/// The length-lexicographic order `≤_L` (reflexive).
pub fn lex_len_order(base: &Alphabet) -> RelationAutomaton {
    RelationAutomaton::from_scan(
        base,
        2,
        LexState::Equal,
        |&s, col| match (col[0], col[1]) {
            (None, Some(_)) => Some(LexState::Shorter),
            (Some(_), None) => None,
            (Some(a), Some(b)) => Some(match s {
                LexState::Equal if a < b => LexState::Less,
                LexState::Equal if a > b => LexState::Greater,
                other => other,
            }),
            (None, None) => unreachable!("all-pad column"),
        },
        |&s| s != LexState::Greater,
    )
}

/// A unary relation holding exactly the given word.
pub fn singleton(base: &Alphabet, word: &[Symbol]) -> RelationAutomaton {
    RelationAutomaton::from_minimal_unchecked(
        base.clone(),
        1,
        Dfa::singleton(Alphabet::plain(base.size()), word).minimize(),
    )
}

/// View a language over the base alphabet as a unary relation.
pub fn unary(base: &Alphabet, language: &Dfa) -> RelationAutomaton {
    let dfa = language.clone().with_alphabet(Alphabet::plain(base.size())).minimize();
    RelationAutomaton::from_minimal_unchecked(base.clone(), 1, dfa)
}
