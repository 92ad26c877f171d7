use crate::automata::{Alphabet, Dfa, Symbol, Word};
use crate::error::{Error, Result};
use crate::relations::RelationAutomaton;

use super::Presentation;

pub fn require_odd_prime(p: u32) -> Result<()> {
    if p < 3 || p.is_multiple_of(2) || (3..).step_by(2).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(())
}

/// Multiplication table of a finite group, checked against the group axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupTable {
    table: Vec<Vec<usize>>,
    identity: usize,
    labels: Vec<String>,
}

impl FiniteGroupTable {
    pub fn new(table: Vec<Vec<usize>>, identity: usize, labels: Vec<String>) -> Result<Self> {
        let n = table.len();
        let bad = |m: String| Err(Error::InvalidGroup(m));
        if n == 0 || labels.len() != n || identity >= n {
            return bad("table, labels and identity must agree in size".into());
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return bad("table is not square over 0..n".into());
        }
        for a in 0..n {
            if table[identity][a] != a || table[a][identity] != a {
                return bad(format!("{} is not neutral for {}", labels[identity], labels[a]));
            }
            if !(0..n).any(|b| table[a][b] == identity) {
                return bad(format!("{} has no inverse", labels[a]));
            }
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad(format!("not associative at ({}, {}, {})", labels[a], labels[b], labels[c]));
                    }
                }
            }
        }
        Ok(FiniteGroupTable { table, identity, labels })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.table[a][b] == self.identity).expect("checked at construction")
    }

    pub fn power(&self, a: usize, m: u64) -> usize {
        (0..m).fold(self.identity, |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..self.order()).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::with_labels(self.labels.clone()).expect("labels are nonempty")
    }
}

/// The cyclic group ℤ/n with labels `0..n-1`.
pub fn cyclic(n: usize) -> Result<FiniteGroupTable> {
    let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    FiniteGroupTable::new(table, 0, (0..n).map(|a| a.to_string()).collect())
}

/// Upper unitriangular 3×3 matrices over GF(p). Element `(a,b,c)` has index
/// `a + p·b + p²·c`, where `a`, `b` are the superdiagonal entries and `c` the
/// corner, so `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+a·b')`.
pub fn ut3(p: u32) -> Result<FiniteGroupTable> {
    require_odd_prime(p)?;
    let p = p as usize;
    let n = p * p * p;
    let split = |x: usize| (x % p, (x / p) % p, x / (p * p));
    let table = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    let ((a, b, c), (a2, b2, c2)) = (split(x), split(y));
                    (a + a2) % p + p * ((b + b2) % p) + p * p * ((c + c2 + a * b2) % p)
                })
                .collect()
        })
        .collect();
    let labels = (0..n)
        .map(|x| {
            let (a, b, c) = split(x);
            format!("({a},{b},{c})")
        })
        .collect();
    FiniteGroupTable::new(table, 0, labels)
}

fn digits(n: u32) -> Alphabet {
    Alphabet::with_labels((0..n).map(|d| d.to_string()).collect()).expect("nonempty")
}

/// Natural numbers under addition, binary least significant bit first.
pub fn nat_add() -> Presentation {
    let base = digits(2);
    // ε or ends in 1
    let domain = Dfa::build(base.clone(), true, |_, a| Some(a == 1), |&ok| ok);
    let op = RelationAutomaton::from_scan(
        &base,
        3,
        0u32,
        |&carry, col| {
            let v = |i: usize| col[i].unwrap_or(0);
            let sum = v(0) + v(1) + carry;
            (sum % 2 == v(2)).then_some(sum / 2)
        },
        |&carry| carry == 0,
    );
    Presentation::new("nat-add", base.clone(), domain, vec![])
        .and_then(|p| p.with_relation("Op", op))
        .and_then(|p| p.with_constant("is_e", &[]))
        .expect("static construction")
        .with_metadata("encoding", "binary, least significant bit first")
}

/// Domain of `E_p`: a central symbol `v` then `α`, empty or ending in nonzero.
fn ep_domain(base: &Alphabet) -> Dfa {
    // 0 = start, 1 = after v or a nonzero α entry, 2 = after a zero α entry
    Dfa::build(base.clone(), 0u8, |&s, a| Some(if s != 0 && a == 0 { 2 } else { 1 }), |&s| s == 1)
}

pub fn ep_presentation(p: u32) -> Result<Presentation> {
    require_odd_prime(p)?;
    let base = digits(p);
    let m = p as i64;
    // None before the first column; then (accumulator, Σβ so far)
    let op = RelationAutomaton::from_scan(
        &base,
        3,
        None::<(i64, i64)>,
        |st, col| match st {
            None => {
                let (v, w, r) = (col[0]?, col[1]?, col[2]?);
                Some(Some(((v as i64 + w as i64 - r as i64).rem_euclid(m), 0)))
            }
            Some((acc, sum)) => {
                let g = |i: usize| col[i].unwrap_or(0) as i64;
                let (a, b, c) = (g(0), g(1), g(2));
                if (a + b) % m != c {
                    return None;
                }
                Some(Some(((acc - a * sum).rem_euclid(m), (sum + b) % m)))
            }
        },
        |st| matches!(st, Some((0, _))),
    );
    let mut pres = Presentation::new("ep", base.clone(), ep_domain(&base), vec![0])?
        .with_p(p)
        .with_metadata("encoding", "central exponent v, then generator exponents")
        .with_relation("Op", op)?
        .with_constant("is_e", &[0])?
        .with_constant("is_z", &[1])?;
    for i in 0..4 {
        let mut w: Word = vec![0; i + 1];
        w.push(1);
        pres = pres.with_constant(&format!("is_x{i}"), &w)?;
    }
    Ok(pres)
}

/// Symbol of `H_p` for the position pair `(α, v)`.
pub fn hp_symbol(p: u32, alpha: u32, v: u32) -> Symbol {
    alpha + p * v
}

pub fn hp_presentation(p: u32) -> Result<Presentation> {
    require_odd_prime(p)?;
    let labels = (0..p * p).map(|c| format!("({},{})", c % p, c / p)).collect();
    let base = Alphabet::with_labels(labels)?;
    // 0 = empty, 1 = nonempty ending in (0,0), 2 = nonempty ending elsewhere
    let domain = Dfa::build(
        base.clone(),
        0u8,
        |&s, a| {
            if s == 0 && a / p != 0 {
                return None;
            }
            Some(if a == 0 { 1 } else { 2 })
        },
        |&s| s != 1,
    );
    let m = p as i64;
    let op = RelationAutomaton::from_scan(
        &base,
        3,
        0i64,
        |&sum, col| {
            let split = |i: usize| col[i].map_or((0, 0), |c| ((c % p) as i64, (c / p) as i64));
            let ((a, v), (b, w), (c, r)) = (split(0), split(1), split(2));
            if (a + b) % m != c || (v + w - a * sum - r).rem_euclid(m) != 0 {
                return None;
            }
            Some((sum + b) % m)
        },
        |_| true,
    );
    let mut pres = Presentation::new("hp", base.clone(), domain, vec![])?
        .with_p(p)
        .with_metadata("trackOrder", "alpha,v")
        .with_metadata("encoding", "symbol (alpha,v) has code alpha + p*v")
        .with_relation("Op", op)?
        .with_constant("is_e", &[])?;
    for i in 0..4 {
        let mut w: Word = vec![0; i];
        w.push(hp_symbol(p, 1, 0));
        pres = pres.with_constant(&format!("is_x{i}"), &w)?;
    }
    for k in 1..4 {
        let mut w: Word = vec![0; k];
        w.push(hp_symbol(p, 0, 1));
        pres = pres.with_constant(&format!("is_z{k}"), &w)?;
    }
    Ok(pres)
}

/// The restricted direct power: finitely supported sequences over the group.
pub fn finite_power(t: &FiniteGroupTable) -> Presentation {
    let base = t.alphabet();
    let e = t.identity() as Symbol;
    let domain = Dfa::build(base.clone(), true, |_, a| Some(a != e), |&ok| ok);
    let op = RelationAutomaton::from_scan(
        &base,
        3,
        (),
        |_, col| {
            let g = |i: usize| col[i].unwrap_or(e) as usize;
            (t.mul(g(0), g(1)) == g(2)).then_some(())
        },
        |_| true,
    );
    Presentation::new("power", base, domain, vec![])
        .and_then(|p| p.with_relation("Op", op))
        .and_then(|p| p.with_constant("is_e", &[]))
        .expect("static construction")
}

/// The finite group itself, each element a one-symbol word.
pub fn finite_group(t: &FiniteGroupTable) -> Presentation {
    let base = t.alphabet();
    let domain = Dfa::build(base.clone(), 0u8, |&n, _| (n == 0).then_some(1), |&n| n == 1);
    let op = RelationAutomaton::from_scan(
        &base,
        3,
        false,
        |&seen, col| {
            let (a, b, c) = (col[0]?, col[1]?, col[2]?);
            (!seen && t.mul(a as usize, b as usize) == c as usize).then_some(true)
        },
        |&seen| seen,
    );
    let e = t.identity() as Symbol;
    Presentation::new("group", base, domain, vec![e])
        .and_then(|p| p.with_relation("Op", op))
        .and_then(|p| p.with_constant("is_e", &[e]))
        .expect("static construction")
}
