//! Track-serialized relations used by the formula compiler.
//!
//! A column of `k` padded symbols is read as `k` consecutive steps over the
//! base alphabet plus pad, so the alphabet stays small regardless of arity.
//! Automata here are only required to be correct on serialized convolutions
//! of tuples from the domain, followed by any number of all-pad columns;
//! what they do on other inputs is irrelevant.

use crate::automata::{Alphabet, Dfa, StateId, Symbol};

use super::{PaddedAlphabet, RelationAutomaton};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct SerialAut {
    k: usize,
    dfa: Dfa,
}

impl SerialAut {
    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    fn pad(&self) -> Symbol {
        self.dfa.alphabet().size() as Symbol - 1
    }

    fn base(&self) -> usize {
        self.dfa.alphabet().size() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.dfa.is_empty()
    }

    pub fn from_dense(rel: &RelationAutomaton) -> SerialAut {
        #[derive(Clone, PartialEq, Eq, Hash)]
        enum T {
            Node(StateId, Vec<Symbol>),
            Tail(usize),
        }
        let k = rel.arity();
        let pa = rel.padded();
        let d = rel.dfa();
        let pad = pa.pad();
        let dfa = Dfa::build(
            Alphabet::plain(pa.base() + 1),
            T::Node(d.start(), Vec::new()),
            |t, s| match t {
                T::Node(q, prefix) => {
                    let mut col = prefix.clone();
                    col.push(s);
                    if col.len() < k {
                        return Some(T::Node(*q, col));
                    }
                    match pa.pack(&col) {
                        Some(code) => Some(T::Node(d.next(*q, code), Vec::new())),
                        None => d.is_accepting(*q).then_some(T::Tail(0)),
                    }
                }
                T::Tail(n) => (s == pad).then_some(T::Tail((n + 1) % k)),
            },
            |t| match t {
                T::Node(q, prefix) => prefix.is_empty() && d.is_accepting(*q),
                T::Tail(n) => *n == 0,
            },
        );
        SerialAut { k, dfa: dfa.minimize() }
    }

    /// Language of tuples whose track `j` is a domain word.
    pub fn domain_cylinder(base: usize, k: usize, j: usize, domain: &Dfa) -> SerialAut {
        let pad = base as Symbol;
        // None = the track has ended
        let dfa = Dfa::build(
            Alphabet::plain(base + 1),
            (0usize, Some(domain.start())),
            |&(layer, st), s| {
                let next = (layer + 1) % k;
                if layer != j {
                    return Some((next, st));
                }
                match (st, s == pad) {
                    (Some(q), true) => domain.is_accepting(q).then_some((next, None)),
                    (Some(q), false) => Some((next, Some(domain.next(q, s)))),
                    (None, true) => Some((next, None)),
                    (None, false) => None,
                }
            },
            |&(layer, st)| layer == 0 && st.is_none_or(|q| domain.is_accepting(q)),
        );
        SerialAut { k, dfa: dfa.minimize() }
    }

    /// Tuples whose tracks `i < j` carry the same word.
    pub fn tracks_equal(base: usize, k: usize, i: usize, j: usize) -> SerialAut {
        assert!(i < j && j < k);
        let dfa = Dfa::build(
            Alphabet::plain(base + 1),
            (0usize, 0 as Symbol),
            |&(layer, held), s| {
                let next = (layer + 1) % k;
                if layer == i {
                    Some((next, s))
                } else if layer == j {
                    (s == held).then_some((next, 0))
                } else {
                    Some((next, held))
                }
            },
            |&(layer, _)| layer == 0,
        );
        SerialAut { k, dfa: dfa.minimize() }
    }

    pub fn universal(base: usize, k: usize) -> SerialAut {
        let dfa = Dfa::build(Alphabet::plain(base + 1), 0usize, |&l, _| Some((l + 1) % k), |&l| l == 0);
        SerialAut { k, dfa: dfa.minimize() }
    }

    pub fn empty(base: usize, k: usize) -> SerialAut {
        SerialAut { k, dfa: Dfa::empty(Alphabet::plain(base + 1)) }
    }

    pub fn complement(&self) -> SerialAut {
        let k = self.k;
        let d = &self.dfa;
        let dfa = Dfa::build(
            d.alphabet().clone(),
            (d.start(), 0usize),
            |&(q, l), s| Some((d.next(q, s), (l + 1) % k)),
            |&(q, l)| l == 0 && !d.is_accepting(q),
        );
        SerialAut { k, dfa: dfa.minimize() }
    }

    pub fn intersect(&self, other: &SerialAut) -> SerialAut {
        assert_eq!(self.k, other.k);
        SerialAut { k: self.k, dfa: self.dfa.intersect(&other.dfa).expect("same alphabet").minimize() }
    }

    pub fn union(&self, other: &SerialAut) -> SerialAut {
        assert_eq!(self.k, other.k);
        SerialAut { k: self.k, dfa: self.dfa.union(&other.dfa).expect("same alphabet").minimize() }
    }

    /// Insert unconstrained tracks: the result has `keep.len()` tracks and
    /// those with `keep[i] == true` are the existing ones, in order.
    pub fn expand(&self, keep: &[bool]) -> SerialAut {
        assert_eq!(keep.iter().filter(|&&x| x).count(), self.k);
        if keep.len() == self.k {
            return self.clone();
        }
        let n = keep.len();
        let d = &self.dfa;
        let dfa = Dfa::build(
            d.alphabet().clone(),
            (d.start(), 0usize),
            |&(q, l), s| Some((if keep[l] { d.next(q, s) } else { q }, (l + 1) % n)),
            |&(q, l)| l == 0 && d.is_accepting(q),
        );
        SerialAut { k: n, dfa: dfa.minimize() }
    }

    /// `∃` over track `j` ranging over `domain`. Requires at least two tracks.
    pub fn exists(&self, j: usize, domain: &Dfa) -> SerialAut {
        let k = self.k;
        assert!(k >= 2 && j < k);
        let base = self.base();
        let body = self.intersect(&SerialAut::domain_cylinder(base, k, j, domain));
        let d = &body.dfa;
        let pad = self.pad();
        // accepting after some columns that are pad except on track j
        let mut acc: Vec<bool> = (0..d.state_count() as StateId).map(|q| d.is_accepting(q)).collect();
        loop {
            let mut changed = false;
            for q in 0..d.state_count() as StateId {
                if acc[q as usize] {
                    continue;
                }
                let hit = (0..=pad).any(|x| {
                    let t = (0..k).fold(q, |t, l| d.next(t, if l == j { x } else { pad }));
                    acc[t as usize]
                });
                if hit {
                    acc[q as usize] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let expand = |set: Vec<StateId>| -> Vec<StateId> {
            let mut out: Vec<StateId> = set.iter().flat_map(|&q| (0..=pad).map(move |c| d.next(q, c))).collect();
            out.sort_unstable();
            out.dedup();
            out
        };
        let any_acc = |set: &[StateId]| set.iter().any(|&q| acc[q as usize]);
        let start = vec![d.start()];
        let start_acc = any_acc(&start);
        let start = if j == 0 { expand(start) } else { start };
        let m = k - 1;
        let dfa = Dfa::build(
            d.alphabet().clone(),
            (0usize, start, start_acc),
            |(mu, set, _), s| {
                let mut next: Vec<StateId> = set.iter().map(|&q| d.next(q, s)).collect();
                next.sort_unstable();
                next.dedup();
                let read = if *mu < j { *mu } else { *mu + 1 };
                let mu2 = (mu + 1) % m;
                let boundary = mu2 == 0;
                let mut flag = false;
                if boundary && j == 0 {
                    flag = any_acc(&next);
                }
                if (read + 1) % k == j {
                    next = expand(next);
                }
                if boundary && j != 0 {
                    flag = any_acc(&next);
                }
                if next.is_empty() {
                    return None;
                }
                Some((mu2, next, flag))
            },
            |(_, _, flag)| *flag,
        );
        SerialAut { k: m, dfa: dfa.minimize() }
    }

    /// Whether some domain word satisfies a one-track automaton.
    pub fn exists_last(&self, domain: &Dfa) -> bool {
        assert_eq!(self.k, 1);
        !self.intersect(&SerialAut::domain_cylinder(self.base(), 1, 0, domain)).is_empty()
    }

    /// Read one full column starting from a column-boundary state.
    pub fn step_column(&self, q: StateId, column: &[Symbol]) -> StateId {
        column.iter().fold(q, |q, &s| self.dfa.next(q, s))
    }

    /// Restrict every track to the domain.
    pub fn cut(&self, domain: &Dfa) -> SerialAut {
        let mut cut = self.clone();
        for j in 0..self.k {
            cut = cut.intersect(&SerialAut::domain_cylinder(self.base(), self.k, j, domain));
        }
        cut
    }

    /// Restrict every track to the domain and convert to a packed relation.
    pub fn to_dense(&self, base: &Alphabet, domain: &Dfa) -> RelationAutomaton {
        let cut = self.cut(domain);
        let pa = PaddedAlphabet::new(base.size(), self.k);
        let d = &cut.dfa;
        let mut col = vec![0; self.k];
        let dfa = Dfa::build(
            pa.alphabet(),
            d.start(),
            |&q, a| {
                pa.unpack_into(a, &mut col);
                Some(cut.step_column(q, &col))
            },
            |&q| d.is_accepting(q),
        );
        RelationAutomaton::new(base.clone(), self.k, dfa).expect("alphabet sizes agree")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::{equality_relation, lex_len_order, track_cylinder};

    fn dom_ends_in_one() -> Dfa {
        // ε or last symbol 1
        Dfa::new(Alphabet::plain(2), 0, vec![true, false, true], vec![1, 2, 1, 2, 1, 2]).unwrap()
    }

    #[test]
    fn dense_roundtrip() {
        let base = Alphabet::plain(2);
        let dom = dom_ends_in_one();
        let le = lex_len_order(&base);
        let s = SerialAut::from_dense(&le);
        assert!(s.to_dense(&base, &dom).equivalent(&le.restrict(&dom)).unwrap());
        let c = s.complement().to_dense(&base, &dom);
        assert!(c.equivalent(&le.complement().restrict(&dom)).unwrap());
    }

    #[test]
    fn exists_matches_dense_projection() {
        let base = Alphabet::plain(2);
        let dom = dom_ends_in_one();
        let le = lex_len_order(&base).restrict(&dom);
        // strict order on the domain, then ∃ of each track
        let lt = le.intersect(&equality_relation(&base).complement()).unwrap();
        let s = SerialAut::from_dense(&lt);
        for j in 0..2 {
            let dense = lt.project(j).unwrap().restrict(&dom);
            let ser = s.exists(j, &dom).to_dense(&base, &dom);
            assert!(ser.equivalent(&dense).unwrap(), "track {j}");
        }
        // forall y. x <= y holds only for ε
        let le_s = SerialAut::from_dense(&le);
        let all_ge = le_s.complement().exists(1, &dom).complement().to_dense(&base, &dom);
        assert!(all_ge.contains(&[&[]]).unwrap());
        assert!(!all_ge.contains(&[&[1]]).unwrap());
    }

    #[test]
    fn expand_then_exists_is_identity() {
        let base = Alphabet::plain(2);
        let dom = dom_ends_in_one();
        let le = lex_len_order(&base).restrict(&dom);
        let s = SerialAut::from_dense(&le);
        for mask in [[false, true, true], [true, false, true], [true, true, false]] {
            let e = s.expand(&mask);
            let j = mask.iter().position(|&b| !b).unwrap();
            assert!(e.exists(j, &dom).to_dense(&base, &dom).equivalent(&le).unwrap());
        }
        let u = SerialAut::universal(2, 1);
        assert!(u.exists_last(&dom));
        let cyl = track_cylinder(&base, 1, 0, &dom);
        assert!(SerialAut::universal(2, 1).to_dense(&base, &dom).equivalent(&cyl).unwrap());
    }

    #[test]
    fn long_witness_needs_pad_closure() {
        // x has a domain successor two symbols longer
        let base = Alphabet::plain(2);
        let dom = dom_ends_in_one();
        let r = RelationAutomaton::from_scan(
            &base,
            2,
            0u8,
            |&s, col| match (s, col[0], col[1]) {
                (0, Some(a), Some(b)) if a == b => Some(0),
                (0, None, Some(_)) => Some(1),
                (1, None, Some(_)) => Some(2),
                _ => None,
            },
            |&s| s == 2,
        )
        .restrict(&dom);
        let ser = SerialAut::from_dense(&r).exists(1, &dom).to_dense(&base, &dom);
        assert!(ser.equivalent(&r.project(1).unwrap().restrict(&dom)).unwrap());
        assert!(ser.contains(&[&[0, 1]]).unwrap());
    }
}
