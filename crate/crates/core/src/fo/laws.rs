//! Group laws as sentences over the `Op` relation.

pub fn totality() -> String {
    "(forall (x y) (exists z (Op x y z)))".into()
}

pub fn functionality() -> String {
    "(forall (x y z w) (implies (and (Op x y z) (Op x y w)) (= z w)))".into()
}

pub fn associativity() -> String {
    "(forall (x y z u v w) (implies (and (Op x y u) (Op u z v) (Op y z w)) (Op x w v)))".into()
}

pub fn two_sided_identity() -> String {
    "(exists e (forall x (and (Op x e x) (Op e x x))))".into()
}

pub fn inverses() -> String {
    "(exists e (and (forall x (and (Op x e x) (Op e x x))) \
     (forall x (exists y (and (Op x y e) (Op y x e))))))"
        .into()
}

/// `x^n = e` for all `x`, via the chain `y₁ = x·x, y₂ = y₁·x, ..`.
pub fn exponent(n: u32) -> String {
    assert!(n >= 2);
    let ys: Vec<String> = (1..n).map(|i| format!("y{i}")).collect();
    let mut steps = vec!["(Op x x y1)".to_string()];
    for i in 2..n {
        steps.push(format!("(Op y{} x y{i})", i - 1));
    }
    format!("(forall (x {}) (implies (and {}) (is_e y{})))", ys.join(" "), steps.join(" "), n - 1)
}

/// Every commutator `c = [x, y]` (characterised by `y·x·c = x·y`) is central.
pub fn class_two() -> String {
    "(forall (x y c m n) (implies (and (Op x y m) (Op y x n) (Op n c m)) \
     (forall (z s) (implies (Op c z s) (Op z c s)))))"
        .into()
}

pub fn commutativity() -> String {
    "(forall (x y) (exists z (and (Op x y z) (Op y x z))))".into()
}

/// `[a, b] = c` for the constants named by the three unary relations.
pub fn commutator_is(a: &str, b: &str, c: &str) -> String {
    format!("(exists (a b c m n) (and ({a} a) ({b} b) ({c} c) (Op a b m) (Op b a n) (Op n c m)))")
}

/// One free variable `x`: the centre.
pub fn centre() -> String {
    "(forall (y u v) (implies (and (Op x y u) (Op y x v)) (= u v)))".into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fo::Formula;

    #[test]
    fn all_laws_parse() {
        for s in [
            totality(),
            functionality(),
            associativity(),
            two_sided_identity(),
            inverses(),
            exponent(3),
            exponent(5),
            class_two(),
            commutativity(),
            commutator_is("is_x0", "is_x1", "is_z"),
        ] {
            let f = Formula::parse(&s).unwrap();
            assert!(f.free_vars().is_empty(), "{s}");
        }
        assert_eq!(Formula::parse(&centre()).unwrap().free_vars(), vec!["x"]);
        assert_eq!(exponent(3), "(forall (x y1 y2) (implies (and (Op x x y1) (Op y1 x y2)) (is_e y2)))");
    }
}
