//! Central extensions `L_f` of an abelian group `Q` by an abelian group `A`,
//! built from an automatic cocycle `f: Q × Q → A`.
//!
//! Elements of `L_f` are pairs `(u, a)`, written as the convolution of the two
//! words over the pair alphabet. The product is
//! `(u, a)·(v, b) = (u + v, a + b + f(u, v))`.
//!
//! Properties of `f` are decided in a one-sorted structure whose alphabet is
//! two tag symbols followed by the symbols of `Q` and then those of `A`; a
//! `Q`-element `u` is the word `tagQ·u` and an `A`-element `a` is `tagA·a`.
//! Unary relations `IsQ` and `IsA` guard the sorts.

mod finite_index;
mod twisted;

pub use finite_index::{finite_index_extension, trivial_action, FiniteIndexData};
pub use twisted::{
    encode_integer, integers, twisted_cocycle, twisted_extension, twisted_kernel, twisted_quotient, TwistedElement,
};

use std::hash::Hash;

use crate::automata::{Alphabet, Dfa, Symbol, Word};
use crate::error::{Error, Result};
use crate::fo::{self, laws, Formula};
use crate::presentations::{cyclic, finite_group, finite_power, require_odd_prime, Presentation};
use crate::relations::{deconvolve, track_cylinder, unary, PaddedAlphabet, RelationAutomaton, PAD_LABEL};

const TAG_Q: Symbol = 0;
const TAG_A: Symbol = 1;

/// A cocycle `f` given by its graph, with tracks `(u, v, f(u, v))`.
///
/// The graph lives over the union alphabet: `Q` symbols keep their codes and
/// `A` symbols are shifted up by the size of `Q`'s alphabet.
#[derive(Debug, Clone)]
pub struct CocycleSpec {
    q: Presentation,
    a: Presentation,
    f: RelationAutomaton,
}

impl CocycleSpec {
    pub fn new(q: Presentation, a: Presentation, f: RelationAutomaton) -> Result<Self> {
        let union = q.base().size() + a.base().size();
        if f.arity() != 3 {
            return Err(Error::Signature(format!("cocycle graph must be ternary, got arity {}", f.arity())));
        }
        if f.base().size() != union {
            return Err(Error::AlphabetMismatch { left: f.base().size(), right: union });
        }
        q.op()?;
        a.op()?;
        let bq = q.base().size() as Symbol;
        let lift = |d: &Dfa, lo: Symbol| {
            let hi = lo + d.alphabet().size() as Symbol;
            Dfa::build(
                Alphabet::plain(union),
                d.start(),
                |&s, x| (x >= lo && x < hi).then(|| d.next(s, x - lo)),
                |&s| d.is_accepting(s),
            )
        };
        let (dq, da) = (lift(q.domain(), 0), lift(a.domain(), bq));
        let mut f = f;
        for (track, d) in [(0, &dq), (1, &dq), (2, &da)] {
            f = f.intersect(&track_cylinder(f.base(), 3, track, d))?;
        }
        Ok(CocycleSpec { q, a, f })
    }

    /// Build the graph from a column scanner that sees `Q` symbols on tracks
    /// 0 and 1 and `A` symbols on track 2, each in its own coding.
    pub fn from_scan<S, F, A>(q: Presentation, a: Presentation, init: S, step: F, accept: A) -> Result<Self>
    where
        S: Clone + Eq + Hash,
        F: Fn(&S, [Option<Symbol>; 3]) -> Option<S>,
        A: Fn(&S) -> bool,
    {
        let bq = q.base().size() as Symbol;
        let ba = a.base().size() as Symbol;
        let union = union_alphabet(&q, &a);
        let f = RelationAutomaton::from_scan(
            &union,
            3,
            init,
            |s, col| {
                let local = |x: Option<Symbol>, lo: Symbol, n: Symbol| match x {
                    None => Some(None),
                    Some(x) if x >= lo && x < lo + n => Some(Some(x - lo)),
                    Some(_) => None,
                };
                let c = [local(col[0], 0, bq)?, local(col[1], 0, bq)?, local(col[2], bq, ba)?];
                step(s, c)
            },
            accept,
        );
        CocycleSpec::new(q, a, f)
    }

    pub fn q(&self) -> &Presentation {
        &self.q
    }

    pub fn a(&self) -> &Presentation {
        &self.a
    }

    pub fn graph(&self) -> &RelationAutomaton {
        &self.f
    }

    /// `f(u, v)` as an `A`-word.
    pub fn value(&self, u: &[Symbol], v: &[Symbol]) -> Result<Word> {
        self.q.check_domain(u)?;
        self.q.check_domain(v)?;
        let shift = self.q.base().size() as Symbol;
        let found = self.f.complete(&[u, v], 2, 1)?;
        let w = found.into_iter().next().ok_or_else(|| {
            Error::NotFunctional(format!("f({}, {}) is undefined", self.q.format_word(u), self.q.format_word(v)))
        })?;
        Ok(w.iter().map(|&s| s - shift).collect())
    }

    /// The one-sorted structure `(Q ⊔ A, AddQ, AddA, F, IsQ, IsA)`, with
    /// `ZeroQ` and `ZeroA` naming the neutral elements.
    pub fn two_sorted(&self) -> Result<Presentation> {
        let bq = self.q.base().size() as Symbol;
        let base = tagged_alphabet(&self.q, &self.a);
        let (dq, da) = (self.q.domain(), self.a.domain());
        let n = base.size();
        let sorted = |tag: Symbol, lo: Symbol, d: &Dfa| {
            let hi = lo + d.alphabet().size() as Symbol;
            Dfa::build(
                Alphabet::plain(n),
                None,
                |s, x| match s {
                    None => (x == tag).then_some(Some(d.start())),
                    Some(q) => (x >= lo && x < hi).then(|| Some(d.next(*q, x - lo))),
                },
                |s| matches!(s, Some(q) if d.is_accepting(*q)),
            )
        };
        let in_q = sorted(TAG_Q, 2, dq);
        let in_a = sorted(TAG_A, 2 + bq, da);
        let domain = in_q.union(&in_a)?;
        let mut neutral = vec![TAG_Q];
        neutral.extend(self.q.neutral().iter().map(|s| s + 2));
        let mut zero_a = vec![TAG_A];
        zero_a.extend(self.a.neutral().iter().map(|s| s + 2 + bq));
        Presentation::new("two-sorted", base.clone(), domain, neutral.clone())?
            .with_relation("IsQ", unary(&base, &in_q))?
            .with_relation("IsA", unary(&base, &in_a))?
            .with_relation("AddQ", tag_relation(self.q.op()?, 2, &[TAG_Q; 3], &base))?
            .with_relation("AddA", tag_relation(self.a.op()?, 2 + bq, &[TAG_A; 3], &base))?
            .with_relation("F", tag_relation(&self.f, 2, &[TAG_Q, TAG_Q, TAG_A], &base))?
            .with_constant("ZeroQ", &neutral)?
            .with_constant("ZeroA", &zero_a)
    }

    /// Check that `Q` and `A` are commutative and `f` is a total function.
    fn check_invariants(&self, two: &Presentation) -> Result<()> {
        for (name, g) in [("Q", &self.q), ("A", &self.a)] {
            if !fo::decide(&Formula::parse(&laws::commutativity())?, g)? {
                return Err(Error::Inconsistent(format!("{name} is not commutative")));
            }
        }
        let missing = "(and (IsQ u) (IsQ v) (not (exists c (F u v c))))";
        let doubled = "(exists (c d) (and (F u v c) (F u v d) (not (= c d))))";
        for (what, text) in [("no value", missing), ("two values", doubled)] {
            let phi = Formula::parse(text)?;
            let bad = fo::compile_with_order(&phi, two, &["u", "v"])?;
            if let Some(packed) = bad.dfa().shortest_word() {
                let tuple = deconvolve(two.base().size(), 2, &packed)?;
                let show = |w: &Word| self.q.format_word(&w[1..].iter().map(|s| s - 2).collect::<Word>());
                return Err(Error::NotFunctional(format!(
                    "f has {what} at ({}, {})",
                    show(&tuple[0]),
                    show(&tuple[1])
                )));
            }
        }
        Ok(())
    }
}

/// Labels `Q` symbols first, then `A` symbols.
fn union_alphabet(q: &Presentation, a: &Presentation) -> Alphabet {
    let labels = (0..q.base().size() as Symbol)
        .map(|s| format!("q{}", q.base().label(s)))
        .chain((0..a.base().size() as Symbol).map(|s| format!("a{}", a.base().label(s))))
        .collect();
    Alphabet::with_labels(labels).expect("nonempty")
}

fn tagged_alphabet(q: &Presentation, a: &Presentation) -> Alphabet {
    let mut labels = vec!["Q".to_string(), "A".to_string()];
    labels.extend(union_alphabet(q, a).labels().expect("labelled").iter().cloned());
    Alphabet::with_labels(labels).expect("nonempty")
}

/// Re-encode a relation so that each track starts with a tag symbol and its
/// symbols are shifted by `offset`.
pub(crate) fn tag_relation(
    rel: &RelationAutomaton,
    offset: Symbol,
    tags: &[Symbol],
    tagged: &Alphabet,
) -> RelationAutomaton {
    let pa = rel.padded();
    let d = rel.dfa();
    let b = pa.base() as Symbol;
    RelationAutomaton::from_scan(
        tagged,
        rel.arity(),
        None,
        |s, col| match s {
            None => col.iter().zip(tags).all(|(c, t)| *c == Some(*t)).then_some(Some(d.start())),
            Some(q) => {
                let local = col
                    .iter()
                    .map(|c| match c {
                        None => Some(pa.pad()),
                        Some(x) => x.checked_sub(offset).filter(|&l| l < b),
                    })
                    .collect::<Option<Vec<Symbol>>>()?;
                Some(Some(d.next(*q, pa.pack(&local)?)))
            }
        },
        |s| matches!(s, Some(q) if d.is_accepting(*q)),
    )
}

/// Decide the cocycle identity `f(u,v) + f(u+v,w) = f(v,w) + f(u,v+w)`.
///
/// Fails with [`Error::NotFunctional`] (naming a witness pair) when `f` is
/// not the graph of a total function, and with [`Error::Inconsistent`] when
/// `Q` or `A` is not commutative.
pub fn verify_cocycle(spec: &CocycleSpec) -> Result<bool> {
    let two = spec.two_sorted()?;
    spec.check_invariants(&two)?;
    let identity = "(forall (u v w) (implies (and (IsQ u) (IsQ v) (IsQ w)) \
        (exists (s t a b c d e) (and (AddQ u v s) (AddQ v w t) (F u v a) (F s w b) \
        (F v w c) (F u t d) (AddA a b e) (AddA c d e)))))";
    fo::decide(&Formula::parse(identity)?, &two)
}

/// Decide `f(u, v) = f(v, u)` for all `u, v`.
pub fn is_symmetric(spec: &CocycleSpec) -> Result<bool> {
    let two = spec.two_sorted()?;
    let phi = Formula::parse("(forall (u v a b) (implies (and (F u v a) (F v u b)) (= a b)))")?;
    fo::decide(&phi, &two)
}

/// Pair alphabet codes: `q + (|Q|+1)·a` with pads at `|Q|` and `|A|`.
/// The code for two pads equals the pair alphabet size, i.e. its own pad.
fn pair_alphabet(q: &Presentation, a: &Presentation) -> Alphabet {
    let (bq, ba) = (q.base().size(), a.base().size());
    let label = |p: &Presentation, s: usize, n: usize| {
        if s == n {
            PAD_LABEL.to_string()
        } else {
            p.base().label(s as Symbol)
        }
    };
    let labels = (0..(bq + 1) * (ba + 1) - 1)
        .map(|c| format!("({},{})", label(q, c % (bq + 1), bq), label(a, c / (bq + 1), ba)))
        .collect();
    Alphabet::with_labels(labels).expect("nonempty")
}

/// The word of the extension element `(u, a)`.
pub fn pair_word(spec: &CocycleSpec, u: &[Symbol], a: &[Symbol]) -> Word {
    let (bq, ba) = (spec.q.base().size() as Symbol, spec.a.base().size() as Symbol);
    (0..u.len().max(a.len()))
        .map(|i| u.get(i).copied().unwrap_or(bq) + (bq + 1) * a.get(i).copied().unwrap_or(ba))
        .collect()
}

/// Split an extension word into its `Q` and `A` components.
pub fn split_word(spec: &CocycleSpec, w: &[Symbol]) -> Result<(Word, Word)> {
    let (bq, ba) = (spec.q.base().size() as Symbol, spec.a.base().size() as Symbol);
    let (mut u, mut a) = (Vec::new(), Vec::new());
    let (mut u_done, mut a_done) = (false, false);
    for &x in w {
        let (qs, as_) = (x % (bq + 1), x / (bq + 1));
        if as_ > ba || (qs == bq && as_ == ba) {
            return Err(Error::SymbolOutOfRange { symbol: x, size: ((bq + 1) * (ba + 1) - 1) as usize });
        }
        for (s, pad, out, done) in [(qs, bq, &mut u, &mut u_done), (as_, ba, &mut a, &mut a_done)] {
            if s == pad {
                *done = true;
            } else if *done {
                return Err(Error::IllFormed("a component resumes after its padding".into()));
            } else {
                out.push(s);
            }
        }
    }
    Ok((u, a))
}

/// Build the presentation of `L_f`.
///
/// The cocycle identity is decided first; an invalid cocycle is an
/// [`Error::Inconsistent`].
pub fn build_extension(spec: &CocycleSpec) -> Result<Presentation> {
    if !verify_cocycle(spec)? {
        return Err(Error::Inconsistent("f violates the cocycle identity".into()));
    }
    let two = spec.two_sorted()?;
    let phi = Formula::parse("(and (AddQ u v w) (exists (d e) (and (F u v d) (AddA a b e) (AddA e d c))))")?;
    let serial = fo::compile_serial(&phi, &two, &["u", "a", "v", "b", "w", "c"])?;

    let (bq, ba) = (spec.q.base().size() as Symbol, spec.a.base().size() as Symbol);
    let tpad = two.base().size() as Symbol;
    let base = pair_alphabet(&spec.q, &spec.a);
    let pa = PaddedAlphabet::new(base.size(), 3);
    let d = serial.dfa();
    let start = serial.step_column(d.start(), &[TAG_Q, TAG_A, TAG_Q, TAG_A, TAG_Q, TAG_A]);
    let mut col = vec![0; 3];
    let mut tagged = vec![0; 6];
    let op = Dfa::build(
        pa.alphabet(),
        start,
        |&q, x| {
            pa.unpack_into(x, &mut col);
            for (i, &c) in col.iter().enumerate() {
                let (qs, as_) = (c % (bq + 1), c / (bq + 1));
                tagged[2 * i] = if qs == bq { tpad } else { qs + 2 };
                tagged[2 * i + 1] = if as_ == ba { tpad } else { as_ + 2 + bq };
            }
            Some(serial.step_column(q, &tagged))
        },
        |&q| d.is_accepting(q),
    );
    let op = RelationAutomaton::new(base.clone(), 3, op)?;

    let (dq, da) = (spec.q.domain(), spec.a.domain());
    let domain = Dfa::build(
        base.clone(),
        (dq.start(), false, da.start(), false),
        |&(sq, q_done, sa, a_done), x| {
            let (qs, as_) = (x % (bq + 1), x / (bq + 1));
            let (sq, q_done) = match (qs == bq, q_done) {
                (true, _) => (sq, true),
                (false, true) => return None,
                (false, false) => (dq.next(sq, qs), false),
            };
            let (sa, a_done) = match (as_ == ba, a_done) {
                (true, _) => (sa, true),
                (false, true) => return None,
                (false, false) => (da.next(sa, as_), false),
            };
            Some((sq, q_done, sa, a_done))
        },
        |&(sq, _, sa, _)| dq.is_accepting(sq) && da.is_accepting(sa),
    );
    let neutral = pair_word(spec, spec.q.neutral(), spec.a.neutral());
    let mut pres = Presentation::new("extension", base, domain, neutral.clone())?
        .with_metadata("trackOrder", "q,a")
        .with_metadata("quotient", spec.q.name())
        .with_metadata("kernel", spec.a.name())
        .with_relation("Op", op)?
        .with_constant("is_e", &neutral)?;
    if let Some(p) = spec.q.p().or(spec.a.p()) {
        pres = pres.with_p(p);
    }
    Ok(pres)
}

/// The constant cocycle `f(u, v) = e_A`.
pub fn zero_cocycle(q: Presentation, a: Presentation) -> Result<CocycleSpec> {
    let e = a.neutral().to_vec();
    CocycleSpec::from_scan(
        q,
        a,
        0usize,
        move |&i, col| (col[2] == e.get(i).copied()).then_some((i + 1).min(e.len())),
        |_| true,
    )
}

/// The central subgroup of `H_p`: words `r` with `r₀ = 0` and no trailing
/// zeros, added componentwise.
pub fn centre_presentation(p: u32) -> Result<Presentation> {
    require_odd_prime(p)?;
    let base = cyclic(p as usize)?.alphabet();
    // 0 = ε, 1 = after r₀ or a zero, 2 = after a nonzero entry
    let domain = Dfa::build(
        base.clone(),
        0u8,
        |&s, x| match s {
            0 => (x == 0).then_some(1),
            _ => Some(if x == 0 { 1 } else { 2 }),
        },
        |&s| s != 1,
    );
    let op = RelationAutomaton::from_scan(
        &base,
        3,
        (),
        |_, col| {
            let g = |i: usize| col[i].unwrap_or(0);
            ((g(0) + g(1)) % p == g(2)).then_some(())
        },
        |_| true,
    );
    Presentation::new("centre", base, domain, vec![])?.with_p(p).with_relation("Op", op)?.with_constant("is_e", &[])
}

/// `E_p` as an extension of `(ℤ/p)^(ω)` by `ℤ/p`:
/// `f(α, β) = −Σ_k α_k Σ_{i<k} β_i`.
pub fn e_cocycle(p: u32) -> Result<CocycleSpec> {
    e_cocycle_with(p, false)
}

/// The `E_p` cocycle with an extra `+1` whenever `α₀ = 2` and `β₀ = 1`, which
/// breaks the cocycle identity. Used to check that verification can fail.
pub fn corrupted_e_cocycle(p: u32) -> Result<CocycleSpec> {
    e_cocycle_with(p, true)
}

fn e_cocycle_with(p: u32, corrupt: bool) -> Result<CocycleSpec> {
    require_odd_prime(p)?;
    let t = cyclic(p as usize)?;
    let m = p as i64;
    // None before the first column; then (r + Σ α_k S_k, S_k)
    CocycleSpec::from_scan(
        finite_power(&t),
        finite_group(&t),
        None::<(i64, i64)>,
        move |st, [x, y, r]| {
            let (a, b) = (x.unwrap_or(0) as i64, y.unwrap_or(0) as i64);
            match st {
                None => {
                    let extra = i64::from(corrupt && a == 2 && b == 1);
                    Some(Some(((r? as i64 + extra) % m, b)))
                }
                Some((acc, sum)) => {
                    if r.is_some() {
                        return None;
                    }
                    Some(Some(((acc + a * sum) % m, (sum + b) % m)))
                }
            }
        },
        |st| matches!(st, Some((0, _))),
    )
}

/// `H_p` as an extension of `(ℤ/p)^(ω)` by its centre:
/// `f(α, β)_k = −α_k Σ_{i<k} β_i`.
pub fn h_cocycle(p: u32) -> Result<CocycleSpec> {
    require_odd_prime(p)?;
    let t = cyclic(p as usize)?;
    CocycleSpec::from_scan(
        finite_power(&t),
        centre_presentation(p)?,
        0u32,
        move |&sum, [x, y, r]| {
            let (a, b, r) = (x.unwrap_or(0), y.unwrap_or(0), r.unwrap_or(0));
            ((r + a * sum) % p == 0).then_some((sum + b) % p)
        },
        |_| true,
    )
}

#[cfg(test)]
mod tests;
