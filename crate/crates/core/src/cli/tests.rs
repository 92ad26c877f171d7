use super::*;
use crate::fo::laws;
use crate::relations::{convolve, RelationAutomaton};

#[test]
fn build_kinds() {
    for name in ["nat-add", "ep", "hp", "power", "ut3", "twisted"] {
        let kind = BuildKind::parse(name).unwrap();
        let pres = build(kind, Some(3)).unwrap();
        pres.op().unwrap();
    }
    assert!(matches!(build(BuildKind::Ep, Some(2)), Err(Error::NotOddPrime(2))));
    assert_eq!(build(BuildKind::Ep, Some(2)).unwrap_err().to_string(), "p must be an odd prime (got 2)");
    assert!(build(BuildKind::Hp, None).is_err());
    assert!(BuildKind::parse("free").is_err());
    let ep = build(BuildKind::Ep, Some(3)).unwrap();
    assert!(ep.domain().accepts(&ep.parse_word("211").unwrap()).unwrap());
}

#[test]
fn decide_and_eval() {
    let nat = build(BuildKind::NatAdd, None).unwrap();
    assert!(cmd_decide(&nat, &laws::commutativity()).unwrap());
    assert_eq!(cmd_eval(&nat, "101", "11001").unwrap(), "00011");
    let ep = build(BuildKind::Ep, Some(3)).unwrap();
    assert_eq!(cmd_eval(&ep, "0", "211").unwrap(), "211");
    assert_eq!(cmd_eval(&ep, "001", "01").unwrap(), "211");
    assert!(cmd_decide(&ep, &laws::associativity()).unwrap());
    assert!(!cmd_decide(&ep, &laws::commutativity()).unwrap());
    let hp = build(BuildKind::Hp, Some(3)).unwrap();
    assert!(cmd_decide(&hp, &laws::commutator_is("is_x0", "is_x2", "is_z2")).unwrap());
    assert!(matches!(cmd_decide(&ep, "(Op x y z)"), Err(Error::FreeVariables(_))));
    assert!(matches!(cmd_decide(&ep, "(Op x y"), Err(Error::Parse(_))));
    assert!(matches!(cmd_eval(&ep, "010", "0"), Err(Error::NotInDomain(_))));
}

/// The returned product satisfies `Op(x, y, z)`.
#[test]
fn eval_agrees_with_op() {
    let ep = build(BuildKind::Ep, Some(3)).unwrap();
    for x in ep.elements(3).iter().step_by(3) {
        for y in ep.elements(3).iter().step_by(4) {
            let z = ep.parse_word(&cmd_eval(&ep, &ep.format_word(x), &ep.format_word(y)).unwrap()).unwrap();
            assert!(ep.op().unwrap().contains(&[x, y, &z]).unwrap());
        }
    }
}

#[test]
fn crosscheck_passes() {
    let ep = build(BuildKind::Ep, Some(3)).unwrap();
    let r = crosscheck(&ep, 3).unwrap();
    assert!(r.passed(), "{}", r.render());
    assert_eq!(r.pairs_checked, 729);
    assert_eq!(pair_count(&ep, 3), 729);
    let nat = build(BuildKind::NatAdd, None).unwrap();
    let r = crosscheck_sampled(&nat, 12, 5000, DEFAULT_SEED).unwrap();
    assert!(r.passed());
    assert!(r.pairs_checked > 4000);
    let hp = build(BuildKind::Hp, Some(3)).unwrap();
    assert!(crosscheck(&hp, 2).unwrap().passed());
    let power = build(BuildKind::Power, Some(3)).unwrap();
    assert!(matches!(crosscheck(&power, 2), Err(Error::Unsupported(_))));
}

#[test]
fn crosscheck_reports_smallest_counterexample() {
    let ep = build(BuildKind::Ep, Some(3)).unwrap();
    let op = ep.op().unwrap();
    // x₀·x₀ = x₀²: send the last column of (01, 01, 02) to a dead state
    let (x, y, z) = (vec![0, 1], vec![0, 1], vec![0, 2]);
    let packed = convolve(3, &[&x, &y, &z]);
    let mut dfa = op.dfa().clone();
    let q = dfa.run(&packed[..1]);
    let dead = (0..dfa.state_count() as u32)
        .find(|&s| !dfa.is_accepting(s) && (0..dfa.alphabet().size() as u32).all(|a| dfa.next(s, a) == s));
    let dead = dead.expect("minimal relation automata have a sink");
    dfa.retarget(q, packed[1], dead).unwrap();
    let broken = ep.clone().with_relation("Op", RelationAutomaton::new(op.base().clone(), 3, dfa).unwrap()).unwrap();
    let r = crosscheck(&broken, 3).unwrap();
    let c = r.counterexample.clone().expect("mutation is detected");
    assert_eq!((c.x.as_str(), c.y.as_str(), c.automaton, c.oracle.as_str()), ("01", "01", None, "02"));
    assert!(r.render().starts_with("FAIL"));
    // parallel search is order independent
    assert_eq!(crosscheck(&broken, 3).unwrap(), r);
}

#[test]
fn census_counts() {
    let ep = build(BuildKind::Ep, Some(3)).unwrap();
    let r = cmd_census(&ep, 8, Some(3), 1).unwrap();
    for m in 1..=8 {
        assert_eq!(r.cumulative()[m], BigUint::from(3u32).pow(m as u32));
        assert_eq!(r.rows[m].cumulative, r.cumulative()[m].to_string());
    }
    assert_eq!(r.rows[4].demand.as_deref(), Some("729"));
    // 3^{n(n-1)/2} > 3^{n} first at n = 4
    assert_eq!(r.crossover, Some(4));
    assert_eq!(cmd_census(&ep, 8, Some(3), 3).unwrap().crossover, Some(8));
    let table = r.render_table();
    assert!(table.contains("729") && table.contains("crossover: n = 4"));
    let json: serde_json::Value = serde_json::from_str(&r.render_json()).unwrap();
    assert_eq!(json["rows"][8]["cumulative"], "6561");
    let nat = build(BuildKind::NatAdd, None).unwrap();
    let r = cmd_census(&nat, 1, None, 1).unwrap();
    assert_eq!(r.cumulative()[1], BigUint::from(nat.elements(1).len()));
    assert_eq!(r.crossover, None);
    assert!(cmd_census(&nat, 0, None, 1).is_err());
}

#[test]
fn census_matches_enumeration() {
    let hp = build(BuildKind::Hp, Some(3)).unwrap();
    let r = cmd_census(&hp, 4, None, 1).unwrap();
    for m in 0..=4 {
        assert_eq!(r.cumulative()[m], BigUint::from(hp.elements(m).len()));
        let sum: BigUint = r.counts()[..=m].iter().sum();
        assert_eq!(sum, r.cumulative()[m]);
    }
    assert!(r.cumulative().windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn export_formats() {
    let nat = build(BuildKind::NatAdd, None).unwrap();
    let a = cmd_export(&nat, "Op", ExportFormat::Json).unwrap();
    assert_eq!(a, cmd_export(&build(BuildKind::NatAdd, None).unwrap(), "Op", ExportFormat::Json).unwrap());
    let back = RelationAutomaton::from_json(&a, nat.base()).unwrap();
    assert!(back.equivalent(nat.op().unwrap()).unwrap());
    let dot = cmd_export(&nat, "Op", ExportFormat::Dot).unwrap();
    let states = nat.op().unwrap().dfa().state_count();
    assert_eq!(dot.matches("shape=circle").count() + dot.matches("shape=doublecircle").count(), states);
    assert!(cmd_export(&nat, "domain", ExportFormat::Json).is_ok());
    assert!(matches!(cmd_export(&nat, "Nope", ExportFormat::Json), Err(Error::Signature(_))));
    assert!(ExportFormat::parse("svg").is_err());
    assert_eq!(exit_code(&Error::Parse("x".into())), 2);
    assert_eq!(exit_code(&Error::Inconsistent("x".into())), 1);
}
