use std::collections::HashMap;

use super::{Alphabet, Dfa, StateId, Symbol};
use crate::error::{Error, Result};

/// Nondeterministic automaton without epsilon moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Alphabet,
    start: Vec<StateId>,
    accepting: Vec<bool>,
    // delta[q * size + a] = successor set
    delta: Vec<Vec<StateId>>,
}

impl Nfa {
    pub fn new(alphabet: Alphabet, states: usize, start: Vec<StateId>, accepting: Vec<StateId>) -> Result<Self> {
        let mut acc = vec![false; states];
        for &q in start.iter().chain(&accepting) {
            if q as usize >= states {
                return Err(Error::InvalidAutomaton(format!("state {q} out of range")));
            }
        }
        for q in accepting {
            acc[q as usize] = true;
        }
        let delta = vec![Vec::new(); states * alphabet.size()];
        Ok(Nfa { alphabet, start, accepting: acc, delta })
    }

    pub fn add_transition(&mut self, from: StateId, a: Symbol, to: StateId) -> Result<()> {
        let n = self.state_count();
        if from as usize >= n || to as usize >= n {
            return Err(Error::InvalidAutomaton("state out of range".into()));
        }
        self.alphabet.check(&[a])?;
        let slot = &mut self.delta[from as usize * self.alphabet.size() + a as usize];
        if !slot.contains(&to) {
            slot.push(to);
        }
        Ok(())
    }

    pub fn from_dfa(d: &Dfa) -> Nfa {
        let k = d.alphabet().size();
        let mut n = Nfa::new(d.alphabet().clone(), d.state_count(), vec![d.start()], d.accepting_states()).unwrap();
        for q in 0..d.state_count() as StateId {
            for a in 0..k as Symbol {
                n.delta[q as usize * k + a as usize].push(d.next(q, a));
            }
        }
        n
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn successors(&self, q: StateId, a: Symbol) -> &[StateId] {
        &self.delta[q as usize * self.alphabet.size() + a as usize]
    }

    /// Direct subset simulation, independent of [`Nfa::determinize`].
    pub fn accepts(&self, w: &[Symbol]) -> Result<bool> {
        self.alphabet.check(w)?;
        let mut cur = vec![false; self.state_count()];
        for &q in &self.start {
            cur[q as usize] = true;
        }
        for &a in w {
            let mut next = vec![false; self.state_count()];
            for (q, _) in cur.iter().enumerate().filter(|(_, &on)| on) {
                for &t in self.successors(q as StateId, a) {
                    next[t as usize] = true;
                }
            }
            cur = next;
        }
        Ok(cur.iter().zip(&self.accepting).any(|(&c, &f)| c && f))
    }

    /// Subset construction; the empty subset becomes the sink.
    pub fn determinize(&self) -> Dfa {
        determinize_with(
            self.alphabet.clone(),
            self.start.clone(),
            |q, a, out| out.extend_from_slice(self.successors(q, a)),
            |q| self.accepting[q as usize],
        )
    }
}

/// Subset construction over an implicit NFA given by a successor function.
pub(crate) fn determinize_with(
    alphabet: Alphabet,
    start: Vec<StateId>,
    succ: impl Fn(StateId, Symbol, &mut Vec<StateId>),
    accepting: impl Fn(StateId) -> bool,
) -> Dfa {
    let k = alphabet.size();
    let norm = |mut v: Vec<StateId>| {
        v.sort_unstable();
        v.dedup();
        v
    };
    let mut index: HashMap<Vec<StateId>, StateId> = HashMap::new();
    let mut sets = vec![norm(start)];
    index.insert(sets[0].clone(), 0);
    let mut delta = Vec::new();
    let mut buf = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        for a in 0..k as Symbol {
            buf.clear();
            for &q in &sets[i] {
                succ(q, a, &mut buf);
            }
            let key = norm(buf.clone());
            let id = match index.get(&key) {
                Some(&id) => id,
                None => {
                    let id = sets.len() as StateId;
                    index.insert(key.clone(), id);
                    sets.push(key);
                    id
                }
            };
            delta.push(id);
        }
        i += 1;
    }
    let acc = sets.iter().map(|s| s.iter().any(|&q| accepting(q))).collect();
    Dfa::new(alphabet, 0, acc, delta).expect("subset construction is complete")
}
