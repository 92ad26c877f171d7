//! Finite automata over dense integer-coded alphabets.
//!
//! Symbols are `0..alphabet.size()`. A [`Dfa`] is always complete: every
//! `(state, symbol)` pair has a successor, with an explicit sink when needed,
//! so complementation is a flip of the accepting set.

mod json;
mod nfa;

pub use json::{AutomatonJson, DfaDot};
pub(crate) use nfa::determinize_with;
pub use nfa::Nfa;

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Symbol = u32;
pub type StateId = u32;
pub type Word = Vec<Symbol>;

/// An alphabet `{0, .., size-1}` with optional display labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    size: usize,
    labels: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidAutomaton("alphabet must be non-empty".into()));
        }
        Ok(Alphabet { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidAutomaton("alphabet must be non-empty".into()));
        }
        Ok(Alphabet { size: labels.len(), labels: Some(labels) })
    }

    /// Unlabelled alphabet; panics on zero size. For internal constructions.
    pub(crate) fn plain(size: usize) -> Self {
        assert!(size > 0);
        Alphabet { size, labels: None }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, s: Symbol) -> String {
        match &self.labels {
            Some(l) => l[s as usize].clone(),
            None => s.to_string(),
        }
    }

    pub fn check(&self, w: &[Symbol]) -> Result<()> {
        for &s in w {
            if s as usize >= self.size {
                return Err(Error::SymbolOutOfRange { symbol: s, size: self.size });
            }
        }
        Ok(())
    }

    /// Render a word. Single-character labels are concatenated, longer ones
    /// too (they are expected to be self-delimiting, like `(1,0)`); the empty
    /// word renders as `ε`.
    pub fn format_word(&self, w: &[Symbol]) -> String {
        if w.is_empty() {
            return "ε".to_string();
        }
        if let Some(l) = &self.labels {
            let mut out = String::with_capacity(w.len());
            for &s in w {
                out.push_str(&l[s as usize]);
            }
            out
        } else if self.size <= 10 {
            w.iter().map(|&s| char::from(b'0' + s as u8)).collect()
        } else {
            w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
        }
    }

    /// Inverse of [`Alphabet::format_word`]: greedy longest-label matching.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "ε" {
            return Ok(Vec::new());
        }
        let digits: Vec<String>;
        let labels: &[String] = match &self.labels {
            Some(l) => l,
            None if self.size <= 10 => {
                digits = (0..self.size).map(|i| i.to_string()).collect();
                &digits
            }
            None => {
                return text
                    .split(',')
                    .map(|t| {
                        let s: Symbol = t.trim().parse().map_err(|_| Error::Parse(format!("bad symbol {t:?}")))?;
                        self.check(&[s])?;
                        Ok(s)
                    })
                    .collect();
            }
        };
        if labels.iter().all(|l| l.len() == 1) {
            let mut out = Vec::with_capacity(text.len());
            for b in text.bytes() {
                match labels.iter().position(|l| l.as_bytes()[0] == b) {
                    Some(i) => out.push(i as Symbol),
                    None => return Err(Error::Parse(format!("cannot read word at {text:?}"))),
                }
            }
            return Ok(out);
        }
        let mut out = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let best = labels
                .iter()
                .enumerate()
                .filter(|(_, l)| !l.is_empty() && rest.starts_with(l.as_str()))
                .max_by_key(|(_, l)| l.len());
            match best {
                Some((i, l)) => {
                    out.push(i as Symbol);
                    rest = &rest[l.len()..];
                }
                None => return Err(Error::Parse(format!("cannot read word at {rest:?}"))),
            }
        }
        Ok(out)
    }
}

/// Complete deterministic finite automaton with a dense transition table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Alphabet,
    states: usize,
    start: StateId,
    accepting: Vec<bool>,
    delta: Vec<StateId>,
}

impl Dfa {
    /// Validated constructor; `delta[q * size + a]` is the successor of `q` on `a`.
    pub fn new(alphabet: Alphabet, start: StateId, accepting: Vec<bool>, delta: Vec<StateId>) -> Result<Self> {
        let states = accepting.len();
        if states == 0 {
            return Err(Error::InvalidAutomaton("no states".into()));
        }
        if start as usize >= states {
            return Err(Error::InvalidAutomaton(format!("start {start} out of range")));
        }
        if delta.len() != states * alphabet.size() {
            return Err(Error::InvalidAutomaton("transition table is not complete".into()));
        }
        if let Some(t) = delta.iter().find(|&&t| t as usize >= states) {
            return Err(Error::InvalidAutomaton(format!("target {t} out of range")));
        }
        Ok(Dfa { alphabet, states, start, accepting, delta })
    }

    /// Explore the automaton reachable from `init` under `step`.
    ///
    /// `step` returning `None` sends the run to a shared rejecting sink.
    /// States are numbered in BFS order with symbols visited in code order.
    pub fn build<S, F, A>(alphabet: Alphabet, init: S, mut step: F, accept: A) -> Dfa
    where
        S: Clone + Eq + Hash,
        F: FnMut(&S, Symbol) -> Option<S>,
        A: Fn(&S) -> bool,
    {
        let k = alphabet.size();
        let mut index: HashMap<S, StateId> = HashMap::new();
        let mut order: Vec<Option<S>> = Vec::new();
        let mut delta: Vec<StateId> = Vec::new();
        let mut sink: Option<StateId> = None;
        index.insert(init.clone(), 0);
        order.push(Some(init));
        let mut i = 0;
        while i < order.len() {
            let cur = order[i].clone();
            for a in 0..k as Symbol {
                let target = match cur.as_ref().and_then(|s| step(s, a)) {
                    Some(next) => match index.get(&next) {
                        Some(&id) => id,
                        None => {
                            let id = order.len() as StateId;
                            index.insert(next.clone(), id);
                            order.push(Some(next));
                            id
                        }
                    },
                    None => *sink.get_or_insert_with(|| {
                        order.push(None);
                        (order.len() - 1) as StateId
                    }),
                };
                delta.push(target);
            }
            i += 1;
        }
        let accepting = order.iter().map(|s| s.as_ref().is_some_and(&accept)).collect();
        Dfa { alphabet, states: order.len(), start: 0, accepting, delta }
    }

    /// The automaton accepting every word.
    pub fn universal(alphabet: Alphabet) -> Dfa {
        Dfa::build(alphabet, (), |_, _| Some(()), |_| true)
    }

    /// The automaton accepting no word.
    pub fn empty(alphabet: Alphabet) -> Dfa {
        Dfa::build(alphabet, (), |_, _| Some(()), |_| false)
    }

    /// Accepts exactly one word.
    pub fn singleton(alphabet: Alphabet, word: &[Symbol]) -> Dfa {
        let w = word.to_vec();
        let n = w.len();
        Dfa::build(alphabet, 0usize, move |&i, a| (i < n && w[i] == a).then_some(i + 1), move |&i| i == n)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q as usize]
    }

    pub fn accepting_states(&self) -> Vec<StateId> {
        (0..self.states as StateId).filter(|&q| self.is_accepting(q)).collect()
    }

    #[inline]
    pub fn next(&self, q: StateId, a: Symbol) -> StateId {
        self.delta[q as usize * self.alphabet.size + a as usize]
    }

    pub fn run(&self, w: &[Symbol]) -> StateId {
        w.iter().fold(self.start, |q, &a| self.next(q, a))
    }

    pub fn accepts(&self, w: &[Symbol]) -> Result<bool> {
        self.alphabet.check(w)?;
        Ok(self.is_accepting(self.run(w)))
    }

    pub(crate) fn with_alphabet(mut self, alphabet: Alphabet) -> Dfa {
        assert_eq!(alphabet.size(), self.alphabet.size());
        self.alphabet = alphabet;
        self
    }

    /// Retarget a single transition; used to build mutants in tests.
    pub fn retarget(&mut self, q: StateId, a: Symbol, target: StateId) -> Result<()> {
        if q as usize >= self.states || target as usize >= self.states {
            return Err(Error::InvalidAutomaton("state out of range".into()));
        }
        self.alphabet.check(&[a])?;
        self.delta[q as usize * self.alphabet.size + a as usize] = target;
        Ok(())
    }

    /// Reuse the automaton over a different alphabet: new symbol `a` behaves
    /// like `map(a)`, or leads to a rejecting sink when `map` returns `None`.
    pub fn reindex(&self, alphabet: Alphabet, map: impl Fn(Symbol) -> Option<Symbol>) -> Dfa {
        Dfa::build(alphabet, self.start, |&q, a| map(a).map(|b| self.next(q, b)), |&q| self.is_accepting(q))
    }

    pub fn complement(&self) -> Dfa {
        let mut d = self.clone();
        for x in d.accepting.iter_mut() {
            *x = !*x;
        }
        d
    }

    fn same_alphabet(&self, other: &Dfa) -> Result<()> {
        if self.alphabet.size() != other.alphabet.size() {
            return Err(Error::AlphabetMismatch { left: self.alphabet.size(), right: other.alphabet.size() });
        }
        Ok(())
    }

    /// Reachable product automaton with acceptance combined by `op`.
    pub fn product(&self, other: &Dfa, op: impl Fn(bool, bool) -> bool) -> Result<Dfa> {
        self.same_alphabet(other)?;
        let k = self.alphabet.size();
        let nb = other.states;
        let mut index: HashMap<u64, StateId> = HashMap::new();
        let mut pairs: Vec<(StateId, StateId)> = vec![(self.start, other.start)];
        index.insert(self.start as u64 * nb as u64 + other.start as u64, 0);
        let mut delta = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            for a in 0..k as Symbol {
                let np = self.next(p, a);
                let nq = other.next(q, a);
                let key = np as u64 * nb as u64 + nq as u64;
                let id = *index.entry(key).or_insert_with(|| {
                    pairs.push((np, nq));
                    (pairs.len() - 1) as StateId
                });
                delta.push(id);
            }
            i += 1;
        }
        let accepting = pairs.iter().map(|&(p, q)| op(self.is_accepting(p), other.is_accepting(q))).collect();
        Ok(Dfa { alphabet: self.alphabet.clone(), states: pairs.len(), start: 0, accepting, delta })
    }

    pub fn intersect(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |a, b| a && b)
    }

    pub fn union(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |a, b| a || b)
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states];
        let mut queue = vec![self.start];
        seen[self.start as usize] = true;
        while let Some(q) = queue.pop() {
            for a in 0..self.alphabet.size() as Symbol {
                let t = self.next(q, a);
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    queue.push(t);
                }
            }
        }
        seen
    }

    /// True iff no accepting state is reachable.
    pub fn is_empty(&self) -> bool {
        let r = self.reachable();
        !(0..self.states).any(|q| r[q] && self.accepting[q])
    }

    /// Shortest accepted word, length-lex least among the shortest.
    pub fn shortest_word(&self) -> Option<Word> {
        let mut parent: Vec<Option<(StateId, Symbol)>> = vec![None; self.states];
        let mut seen = vec![false; self.states];
        let mut queue = VecDeque::from([self.start]);
        seen[self.start as usize] = true;
        while let Some(q) = queue.pop_front() {
            if self.is_accepting(q) {
                let mut w = Vec::new();
                let mut cur = q;
                while let Some((p, a)) = parent[cur as usize] {
                    w.push(a);
                    cur = p;
                }
                w.reverse();
                return Some(w);
            }
            for a in 0..self.alphabet.size() as Symbol {
                let t = self.next(q, a);
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    parent[t as usize] = Some((q, a));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// A shortest word on which the two automata disagree.
    pub fn distinguishing_word(&self, other: &Dfa) -> Result<Option<Word>> {
        Ok(self.product(other, |a, b| a != b)?.shortest_word())
    }

    pub fn equivalent(&self, other: &Dfa) -> Result<bool> {
        Ok(self.product(other, |a, b| a != b)?.is_empty())
    }

    /// Number of accepted words of length exactly `n`.
    pub fn count_words(&self, n: usize) -> BigUint {
        // ways[q] = number of words of the remaining length leading from q to acceptance
        let mut ways: Vec<BigUint> =
            self.accepting.iter().map(|&a| if a { BigUint::one() } else { BigUint::zero() }).collect();
        for _ in 0..n {
            let mut next = vec![BigUint::zero(); self.states];
            for (q, slot) in next.iter_mut().enumerate() {
                for a in 0..self.alphabet.size() as Symbol {
                    *slot += &ways[self.next(q as StateId, a) as usize];
                }
            }
            ways = next;
        }
        ways[self.start as usize].clone()
    }

    /// `dist[q]` = length of the shortest accepted suffix from `q`.
    fn distance_to_accept(&self) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.states];
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); self.states];
        for q in 0..self.states as StateId {
            for a in 0..self.alphabet.size() as Symbol {
                rev[self.next(q, a) as usize].push(q);
            }
        }
        let mut queue = VecDeque::new();
        for q in 0..self.states {
            if self.accepting[q] {
                dist[q] = Some(0);
                queue.push_back(q);
            }
        }
        while let Some(q) = queue.pop_front() {
            let d = dist[q].unwrap();
            for &p in &rev[q] {
                if dist[p as usize].is_none() {
                    dist[p as usize] = Some(d + 1);
                    queue.push_back(p as usize);
                }
            }
        }
        dist
    }

    /// All accepted words of length at most `max_len`, in length-lex order.
    pub fn enumerate(&self, max_len: usize) -> Vec<Word> {
        let dist = self.distance_to_accept();
        let mut out = Vec::new();
        let mut level: Vec<(Word, StateId)> = Vec::new();
        if dist[self.start as usize].is_some() {
            level.push((Vec::new(), self.start));
        }
        for len in 0..=max_len {
            for (w, q) in &level {
                if self.is_accepting(*q) {
                    out.push(w.clone());
                }
            }
            if len == max_len {
                break;
            }
            let remaining = max_len - len - 1;
            let mut next = Vec::new();
            for (w, q) in &level {
                for a in 0..self.alphabet.size() as Symbol {
                    let t = self.next(*q, a);
                    if dist[t as usize].is_some_and(|d| d <= remaining) {
                        let mut w2 = w.clone();
                        w2.push(a);
                        next.push((w2, t));
                    }
                }
            }
            level = next;
        }
        out
    }

    /// Minimal complete DFA for the same language, states numbered by BFS
    /// from the start in symbol order.
    pub fn minimize(&self) -> Dfa {
        let k = self.alphabet.size();
        let reach = self.reachable();
        let live: Vec<StateId> = (0..self.states as StateId).filter(|&q| reach[q as usize]).collect();
        let mut class = vec![0u32; self.states];
        for &q in &live {
            class[q as usize] = self.accepting[q as usize] as u32;
        }
        let mut count = {
            let mut seen = [false; 2];
            live.iter().for_each(|&q| seen[class[q as usize] as usize] = true);
            seen.iter().filter(|&&b| b).count()
        };
        loop {
            let mut sigs: HashMap<Vec<u32>, u32> = HashMap::new();
            let mut next_class = vec![0u32; self.states];
            for &q in &live {
                let mut sig = Vec::with_capacity(k + 1);
                sig.push(class[q as usize]);
                let row = &self.delta[q as usize * k..(q as usize + 1) * k];
                sig.extend(row.iter().map(|&t| class[t as usize]));
                let n = sigs.len() as u32;
                next_class[q as usize] = *sigs.entry(sig).or_insert(n);
            }
            let new_count = sigs.len();
            class = next_class;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        // quotient, then canonical numbering
        let mut rep = vec![None; count];
        for &q in &live {
            rep[class[q as usize] as usize].get_or_insert(q);
        }
        let start = class[self.start as usize];
        Dfa::build(
            self.alphabet.clone(),
            start,
            |&c, a| Some(class[self.next(rep[c as usize].unwrap(), a) as usize]),
            |&c| self.accepting[rep[c as usize].unwrap() as usize],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn even_ones() -> Dfa {
        Dfa::new(Alphabet::plain(2), 0, vec![true, false], vec![0, 1, 1, 0]).unwrap()
    }

    fn ends_in_one() -> Dfa {
        Dfa::new(Alphabet::plain(2), 0, vec![false, true], vec![0, 1, 0, 1]).unwrap()
    }

    fn all_words(k: u32, max: usize) -> Vec<Word> {
        let mut out = vec![vec![]];
        let mut level = vec![vec![]];
        for _ in 0..max {
            let mut next = Vec::new();
            for w in &level {
                for a in 0..k {
                    let mut w2: Word = w.clone();
                    w2.push(a);
                    next.push(w2);
                }
            }
            out.extend(next.iter().cloned());
            level = next;
        }
        out
    }

    pub(crate) fn random_dfa(rng: &mut ChaCha8Rng, states: usize, k: usize) -> Dfa {
        let delta = (0..states * k).map(|_| rng.gen_range(0..states) as StateId).collect();
        let accepting = (0..states).map(|_| rng.gen_bool(0.4)).collect();
        Dfa::new(Alphabet::plain(k), 0, accepting, delta).unwrap()
    }

    #[test]
    fn accepts_basic() {
        assert!(even_ones().accepts(&[1, 0, 1, 0]).unwrap());
        assert!(even_ones().accepts(&[]).unwrap());
        assert!(!ends_in_one().accepts(&[]).unwrap());
        assert!(Dfa::universal(Alphabet::plain(2)).accepts(&[1, 1, 0]).unwrap());
        assert_eq!(even_ones().accepts(&[2]), Err(Error::SymbolOutOfRange { symbol: 2, size: 2 }));
    }

    #[test]
    fn minimize_merges_bisimilar_states() {
        // states 1 and 2 both accept everything
        let d = Dfa::new(Alphabet::plain(2), 0, vec![false, true, true], vec![1, 2, 1, 2, 2, 1]).unwrap();
        let m = d.minimize();
        assert!(m.state_count() < d.state_count());
        assert!(m.equivalent(&d).unwrap());
        let mm = m.minimize();
        assert_eq!(mm.state_count(), m.state_count());
    }

    #[test]
    fn count_and_enumerate() {
        assert_eq!(Dfa::universal(Alphabet::plain(2)).count_words(5), BigUint::from(32u32));
        let brute = all_words(2, 4).iter().filter(|w| w.len() == 4 && even_ones().accepts(w).unwrap()).count();
        assert_eq!(brute, 8);
        assert_eq!(even_ones().count_words(4), BigUint::from(8u32));
        assert_eq!(Dfa::empty(Alphabet::plain(3)).count_words(7), BigUint::zero());
        assert_eq!(Dfa::universal(Alphabet::plain(2)).enumerate(1), vec![vec![], vec![0], vec![1]]);
        assert_eq!(ends_in_one().enumerate(2), vec![vec![1], vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn equivalence_witness() {
        // 0*1(0|1)*
        let other = Dfa::new(Alphabet::plain(2), 0, vec![false, true], vec![0, 1, 1, 1]).unwrap();
        assert!(!ends_in_one().equivalent(&other).unwrap());
        let w = ends_in_one().distinguishing_word(&other).unwrap().unwrap();
        assert_ne!(ends_in_one().accepts(&w).unwrap(), other.accepts(&w).unwrap());
        // "10" separates them; "01" is accepted by both
        assert!(ends_in_one().accepts(&[0, 1]).unwrap() && other.accepts(&[0, 1]).unwrap());
        assert!(!ends_in_one().accepts(&[1, 0]).unwrap() && other.accepts(&[1, 0]).unwrap());
        assert!(Dfa::empty(Alphabet::plain(2)).is_empty());
        assert!(even_ones().equivalent(&even_ones().minimize()).unwrap());
    }

    #[test]
    fn alphabet_mismatch() {
        let a = Dfa::universal(Alphabet::plain(2));
        let b = Dfa::universal(Alphabet::plain(3));
        assert!(matches!(a.intersect(&b), Err(Error::AlphabetMismatch { .. })));
    }

    #[test]
    fn boolean_ops_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let k = rng.gen_range(1..=3);
            let (na, nb) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
            let a = random_dfa(&mut rng, na, k);
            let b = random_dfa(&mut rng, nb, k);
            let i = a.intersect(&b).unwrap();
            let u = a.union(&b).unwrap();
            let demorgan = a.complement().intersect(&b.complement()).unwrap().complement();
            assert!(u.equivalent(&demorgan).unwrap());
            assert!(a.complement().complement().equivalent(&a).unwrap());
            for w in all_words(k as u32, 6) {
                let (x, y) = (a.accepts(&w).unwrap(), b.accepts(&w).unwrap());
                assert_eq!(i.accepts(&w).unwrap(), x && y);
                assert_eq!(u.accepts(&w).unwrap(), x || y);
            }
        }
    }

    #[test]
    fn word_text_roundtrip() {
        let a = Alphabet::with_labels(vec!["(0,0)".into(), "(1,0)".into(), "(0,1)".into()]).unwrap();
        let w = vec![1, 0, 2];
        assert_eq!(a.parse_word(&a.format_word(&w)).unwrap(), w);
        assert_eq!(a.parse_word("ε").unwrap(), Vec::<Symbol>::new());
        assert!(a.parse_word("(2,2)").is_err());
    }
}
