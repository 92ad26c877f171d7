use super::*;
use crate::oracle::{Kind, NilElement, DEFAULT_RANK};
use crate::presentations::{ep_presentation, hp_presentation, hp_symbol, ut3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn z3_power() -> Presentation {
    finite_power(&cyclic(3).unwrap())
}

fn z3_group() -> Presentation {
    finite_group(&cyclic(3).unwrap())
}

fn decide(pres: &Presentation, text: &str) -> bool {
    fo::decide(&Formula::parse(text).unwrap(), pres).unwrap()
}

/// `x⁻¹` found by searching `Op(x, y, e)`.
fn inverse(pres: &Presentation, x: &[Symbol]) -> Word {
    pres.op().unwrap().complete(&[x, pres.neutral()], 1, 1).unwrap().remove(0)
}

#[test]
fn zero_cocycle_gives_direct_sum() {
    let spec = zero_cocycle(z3_power(), z3_group()).unwrap();
    assert!(verify_cocycle(&spec).unwrap());
    assert!(is_symmetric(&spec).unwrap());
    let ext = build_extension(&spec).unwrap();
    assert_eq!(ext.neutral(), &pair_word(&spec, &[], &[0])[..]);
    let (qs, as_) = (spec.q().elements(3), spec.a().elements(1));
    let sample: Vec<&Word> = qs.iter().step_by(2).collect();
    for u in &qs {
        for v in &sample {
            for a in &as_ {
                for b in &as_ {
                    let got = ext.multiply(&pair_word(&spec, u, a), &pair_word(&spec, v, b)).unwrap();
                    let want = pair_word(&spec, &spec.q().multiply(u, v).unwrap(), &spec.a().multiply(a, b).unwrap());
                    assert_eq!(got, want);
                }
            }
        }
    }
    assert!(decide(&ext, &laws::commutativity()));
}

#[test]
fn e_cocycle_values_and_verification() {
    let spec = e_cocycle(3).unwrap();
    assert_eq!(spec.value(&[1], &[0, 1]).unwrap(), vec![0]);
    assert_eq!(spec.value(&[0, 1], &[1]).unwrap(), vec![2]);
    assert_eq!(spec.value(&[0, 2], &[2]).unwrap(), vec![2]);
    assert!(verify_cocycle(&spec).unwrap());
    assert!(!is_symmetric(&spec).unwrap());
    assert!(verify_cocycle(&e_cocycle(5).unwrap()).unwrap());
}

#[test]
fn corrupted_cocycle_is_rejected() {
    let bad = corrupted_e_cocycle(3).unwrap();
    assert_eq!(bad.value(&[2], &[1]).unwrap(), vec![2]);
    assert!(!verify_cocycle(&bad).unwrap());
    assert!(matches!(build_extension(&bad), Err(Error::Inconsistent(_))));
}

#[test]
fn invariant_violations_are_errors() {
    // defined only at u = ε
    let partial = CocycleSpec::from_scan(
        z3_power(),
        z3_group(),
        0u8,
        |&i, [x, _, r]| (x.is_none() && r == (i == 0).then_some(0)).then_some(1),
        |_| true,
    )
    .unwrap();
    match verify_cocycle(&partial) {
        Err(Error::NotFunctional(msg)) => assert!(msg.contains("no value"), "{msg}"),
        other => panic!("expected a witness, got {other:?}"),
    }
    // two values everywhere
    let double = CocycleSpec::from_scan(
        z3_power(),
        z3_group(),
        false,
        |&seen, [_, _, r]| match (seen, r) {
            (false, Some(r)) if r < 2 => Some(true),
            (true, None) => Some(true),
            _ => None,
        },
        |&seen| seen,
    )
    .unwrap();
    assert!(matches!(verify_cocycle(&double), Err(Error::NotFunctional(_))));
    let nonabelian = finite_group(&ut3(3).unwrap());
    let spec = zero_cocycle(nonabelian, z3_group()).unwrap();
    assert!(matches!(verify_cocycle(&spec), Err(Error::Inconsistent(_))));
    assert!(CocycleSpec::new(z3_power(), z3_group(), spec.graph().project(0).unwrap()).is_err());
}

/// `z^a·ū ↔ (u, a)`: the `E_3` word is `a` followed by `u`.
#[test]
fn e_extension_matches_ep() {
    let spec = e_cocycle(3).unwrap();
    let ext = build_extension(&spec).unwrap();
    let ep = ep_presentation(3).unwrap();
    let to_ep = |w: &[Symbol]| {
        let (u, a) = split_word(&spec, w).unwrap();
        [a, u].concat()
    };
    assert_eq!(to_ep(ext.neutral()), ep.neutral());
    let mut elems = Vec::new();
    for u in spec.q().elements(3) {
        for a in spec.a().elements(1) {
            elems.push(pair_word(&spec, &u, &a));
        }
    }
    assert_eq!(elems.len(), 81);
    for x in &elems {
        for y in &elems {
            let got = ext.multiply(x, y).unwrap();
            assert_eq!(to_ep(&got), ep.multiply(&to_ep(x), &to_ep(y)).unwrap());
        }
    }
}

#[test]
fn h_extension_matches_hp_and_oracle() {
    let spec = h_cocycle(3).unwrap();
    assert!(verify_cocycle(&spec).unwrap());
    assert!(!is_symmetric(&spec).unwrap());
    let ext = build_extension(&spec).unwrap();
    let hp = hp_presentation(3).unwrap();
    let to_hp = |w: &[Symbol]| -> Word {
        let (u, r) = split_word(&spec, w).unwrap();
        (0..u.len().max(r.len()))
            .map(|i| hp_symbol(3, u.get(i).copied().unwrap_or(0), r.get(i).copied().unwrap_or(0)))
            .collect()
    };
    let mut elems = Vec::new();
    for u in spec.q().elements(3) {
        for r in spec.a().elements(3) {
            elems.push(pair_word(&spec, &u, &r));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1500 {
        let (x, y) = (&elems[rng.gen_range(0..elems.len())], &elems[rng.gen_range(0..elems.len())]);
        let got = to_hp(&ext.multiply(x, y).unwrap());
        assert_eq!(got, hp.multiply(&to_hp(x), &to_hp(y)).unwrap());
        let (ox, oy) = (
            NilElement::decode(&to_hp(x), &hp, DEFAULT_RANK).unwrap(),
            NilElement::decode(&to_hp(y), &hp, DEFAULT_RANK).unwrap(),
        );
        assert_eq!(ox.multiply(&oy).unwrap().encode(&hp).unwrap(), got);
    }
    assert_eq!(NilElement::decode(&to_hp(&elems[5]), &hp, DEFAULT_RANK).unwrap().kind(), Kind::H);
}

#[test]
fn built_extensions_are_groups() {
    for spec in [e_cocycle(3).unwrap(), h_cocycle(3).unwrap()] {
        let ext = build_extension(&spec).unwrap();
        assert!(decide(&ext, &laws::associativity()));
        assert!(decide(&ext, &laws::inverses()));
        assert!(decide(&ext, "(forall x (exists y (exists e (and (is_e e) (Op x y e)))))"));
        // abelian iff f is symmetric
        assert_eq!(decide(&ext, &laws::commutativity()), is_symmetric(&spec).unwrap());
        assert!(decide(&ext, &laws::class_two()));
    }
}

/// The inverse of `(u, a)` is `(−u, −a − f(u, −u))`.
#[test]
fn inverse_formula() {
    for spec in [e_cocycle(3).unwrap(), h_cocycle(3).unwrap(), twisted_cocycle().unwrap()] {
        let ext = build_extension(&spec).unwrap();
        let (q, a) = (spec.q(), spec.a());
        for x in ext.elements(3) {
            let (u, c) = split_word(&spec, &x).unwrap();
            let nu = inverse(q, &u);
            let second = inverse(a, &a.multiply(&c, &spec.value(&u, &nu).unwrap()).unwrap());
            let y = pair_word(&spec, &nu, &second);
            assert_eq!(ext.multiply(&x, &y).unwrap(), ext.neutral());
            assert_eq!(ext.multiply(&y, &x).unwrap(), ext.neutral());
        }
    }
}

#[test]
fn pair_words_split_back() {
    let spec = twisted_cocycle().unwrap();
    for u in spec.q().elements(3) {
        for a in spec.a().elements(2) {
            let w = pair_word(&spec, &u, &a);
            assert_eq!(split_word(&spec, &w).unwrap(), (u.clone(), a));
        }
    }
    // (q pad, a = 0) followed by a real Q symbol
    let bad = [2, 0];
    assert!(matches!(split_word(&spec, &bad), Err(Error::IllFormed(_))));
}

#[test]
fn integer_adder_matches_arithmetic() {
    let z = integers();
    for n in -40..=40i64 {
        assert!(z.domain().accepts(&encode(n)).unwrap(), "{n}");
    }
    assert!(!z.domain().accepts(&[1]).unwrap());
    assert!(!z.domain().accepts(&[0, 1, 0]).unwrap());
    for a in -25..=25i64 {
        for b in -25..=25i64 {
            assert_eq!(z.multiply(&encode(a), &encode(b)).unwrap(), encode(a + b), "{a} + {b}");
        }
    }
    assert!(decide(&z, &laws::commutativity()));
    assert!(decide(&z, &laws::associativity()));
    assert!(decide(&z, &laws::inverses()));
}

fn encode(n: i64) -> Word {
    twisted::encode_integer(n)
}

fn bits(n: u32, len: usize) -> Vec<bool> {
    (0..len).map(|i| n >> i & 1 == 1).collect()
}

#[test]
fn twisted_group_relations() {
    let x = TwistedElement::new(1, vec![], vec![]);
    let z0 = TwistedElement::new(0, vec![true], vec![]);
    let y0 = TwistedElement::new(0, vec![], vec![true]);
    // z₀⁻¹ x z₀ = x y₀
    assert_eq!(z0.inverse().multiply(&x).multiply(&z0), x.multiply(&y0));
    assert_eq!(y0.multiply(&y0), TwistedElement::identity());
    assert_eq!(z0.multiply(&z0), TwistedElement::identity());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut random =
        || TwistedElement::new(rng.gen_range(-5..5), bits(rng.gen_range(0..16), 4), bits(rng.gen_range(0..16), 4));
    for _ in 0..500 {
        let (a, b, c) = (random(), random(), random());
        assert_eq!(a.multiply(&b).multiply(&c), a.multiply(&b.multiply(&c)));
        assert_eq!(a.multiply(&a.inverse()), TwistedElement::identity());
        assert_eq!(a.multiply(&y0), y0.multiply(&a));
    }
}

#[test]
fn derived_cocycle_matches_transversal() {
    // c(q_{0,e₀}, q_{1,∅}) = y₀
    let c = TwistedElement::transversal_cocycle((false, &[true]), (true, &[]));
    assert_eq!(c, TwistedElement::new(0, vec![], vec![true]));
    let spec = twisted_cocycle().unwrap();
    assert_eq!(spec.value(&[0, 1], &[1]).unwrap(), c.kernel_word().unwrap());
    // x^{2st} ∏ y_i^{t·α_i}
    for s in [false, true] {
        for t in [false, true] {
            for ab in 0..64u32 {
                let (alpha, beta) = (bits(ab & 7, 3), bits(ab >> 3, 3));
                let c = TwistedElement::transversal_cocycle((s, &alpha), (t, &beta));
                let expected_gamma: Vec<bool> = alpha.iter().map(|&a| a && t).collect();
                assert_eq!(c, TwistedElement::new(if s && t { 2 } else { 0 }, vec![], expected_gamma));
                let (u, v) = (TwistedElement::quotient_word(s, &alpha), TwistedElement::quotient_word(t, &beta));
                assert_eq!(spec.value(&u, &v).unwrap(), c.kernel_word().unwrap());
                if !s && !t {
                    assert_eq!(c.n, 0);
                }
            }
        }
    }
    assert!(verify_cocycle(&spec).unwrap());
    assert!(!is_symmetric(&spec).unwrap());
}

#[test]
fn twisted_group() {
    let (spec, ext) = twisted_extension().unwrap();
    assert!(!decide(&ext, &laws::commutativity()));
    assert!(decide(&ext, "(exists (y s) (and (is_y0 y) (Op y y s) (is_e s)))"));
    // associativity is the cocycle identity, decided on the much smaller two-sorted structure
    assert!(verify_cocycle(&spec).unwrap());
    assert!(decide(&ext, "(forall x (exists (e y) (and (is_e e) (Op x e x) (Op e x x) (Op x y e) (Op y x e))))"));
    // z₀⁻¹ x z₀ = x y₀, i.e. x z₀ = z₀ x y₀
    assert!(decide(
        &ext,
        "(exists (x y z a b c) (and (is_x x) (is_y0 y) (is_z0 z) (Op x z a) (Op z x b) (Op b y c) (= a c)))"
    ));
    // x has infinite order: x² ≠ e and x² is central
    assert!(decide(&ext, "(exists (x s) (and (is_x x) (Op x x s) (not (is_e s))))"));
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut random =
        || TwistedElement::new(rng.gen_range(-4..4), bits(rng.gen_range(0..8), 3), bits(rng.gen_range(0..8), 3));
    for _ in 0..300 {
        let (a, b) = (random(), random());
        let got = ext.multiply(&a.extension_word(&spec).unwrap(), &b.extension_word(&spec).unwrap()).unwrap();
        assert_eq!(got, a.multiply(&b).extension_word(&spec).unwrap());
    }
}

#[test]
fn finite_index_trivial_quotient() {
    let n = finite_power(&cyclic(2).unwrap());
    let data =
        FiniteIndexData { quotient: cyclic(1).unwrap(), action: trivial_action(&n, 1), correction: vec![vec![vec![]]] };
    let ext = finite_index_extension(&n, &data).unwrap();
    let tag = |w: &Word| [vec![0], w.iter().map(|s| s + 1).collect()].concat();
    for x in n.elements(3) {
        for y in n.elements(3) {
            assert_eq!(ext.multiply(&tag(&x), &tag(&y)).unwrap(), tag(&n.multiply(&x, &y).unwrap()));
        }
    }
}

#[test]
fn finite_index_direct_product_and_twist() {
    let n = finite_power(&cyclic(2).unwrap());
    let z2 = cyclic(2).unwrap();
    let plain =
        FiniteIndexData { quotient: z2.clone(), action: trivial_action(&n, 2), correction: vec![vec![vec![]; 2]; 2] };
    let ext = finite_index_extension(&n, &plain).unwrap();
    let tag = |g: u32, w: &Word| [vec![g], w.iter().map(|s| s + 2).collect()].concat();
    for g in 0..2 {
        for h in 0..2 {
            for x in n.elements(2) {
                for y in n.elements(2) {
                    let want = tag(g ^ h, &n.multiply(&x, &y).unwrap());
                    assert_eq!(ext.multiply(&tag(g, &x), &tag(h, &y)).unwrap(), want);
                }
            }
        }
    }
    assert!(decide(&ext, &laws::commutativity()));
    assert!(decide(&ext, &laws::exponent(2)));

    let mut twisted = plain.clone();
    twisted.correction[1][1] = vec![1];
    let ext = finite_index_extension(&n, &twisted).unwrap();
    assert!(decide(&ext, "(exists (x y z) (and (Op x x y) (not (is_e y)) (Op y y z) (is_e z)))"));
    assert!(!decide(&ext, &laws::exponent(2)));
}

#[test]
fn finite_index_rejects_bad_action() {
    let n = finite_power(&cyclic(2).unwrap());
    let base = n.base().clone();
    // x ↦ e is a function but not an automorphism
    let collapse = RelationAutomaton::from_scan(&base, 2, (), |_, col| col[1].is_none().then_some(()), |_| true);
    let mut action = trivial_action(&n, 2);
    action[1] = collapse;
    let data = FiniteIndexData { quotient: cyclic(2).unwrap(), action, correction: vec![vec![vec![]; 2]; 2] };
    assert!(matches!(finite_index_extension(&n, &data), Err(Error::Inconsistent(_))));
    let mut empty = data.clone();
    empty.action[1] = RelationAutomaton::from_scan(&base, 2, (), |_, _| None, |_| false);
    assert!(matches!(finite_index_extension(&n, &empty), Err(Error::Inconsistent(_))));
    let mut short = data;
    short.correction.pop();
    assert!(finite_index_extension(&n, &short).is_err());
}
