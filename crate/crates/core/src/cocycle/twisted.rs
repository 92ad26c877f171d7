//! The group generated by `x, y_i, z_k` with `y_i² = z_k² = 1`, `y_i` central,
//! the `z_k` commuting, and `z_i⁻¹ x z_i = x y_i`.
//!
//! Its centre `A = ⟨x², y_i⟩ ≅ ℤ ⊕ (ℤ/2)^(ω)` has quotient
//! `Q ≅ ℤ/2 ⊕ (ℤ/2)^(ω)`, and the transversal `q_{s,α} ↦ x^s ∏ z_i^{α_i}`
//! gives an automatic cocycle.

use crate::automata::{Alphabet, Dfa, Symbol, Word};
use crate::error::{Error, Result};
use crate::presentations::Presentation;
use crate::relations::RelationAutomaton;

use super::{build_extension, pair_word, verify_cocycle, CocycleSpec};

fn labels(n: u32) -> Alphabet {
    Alphabet::with_labels((0..n).map(|d| d.to_string()).collect()).expect("nonempty")
}

/// Sign-magnitude addition `x + y = z`, one sign column then magnitude bits
/// least significant first.
///
/// Three magnitude equations run in parallel: `|x|+|y| = |z|` (equal signs),
/// `|z|+|y| = |x|` and `|z|+|x| = |y|` (opposite signs, the larger operand
/// fixing the sign of a nonzero result).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct SignedAdder {
    signs: [u32; 3],
    carry: [u32; 3],
    ok: [bool; 3],
    z_nonzero: bool,
}

impl SignedAdder {
    fn start(signs: [Option<Symbol>; 3]) -> Option<Self> {
        let s = [signs[0]?, signs[1]?, signs[2]?];
        s.iter().all(|&x| x < 2).then_some(SignedAdder { signs: s, carry: [0; 3], ok: [true; 3], z_nonzero: false })
    }

    fn step(mut self, [x, y, z]: [u32; 3]) -> Option<Self> {
        for (i, (a, b, c)) in [(x, y, z), (z, y, x), (z, x, y)].into_iter().enumerate() {
            if self.ok[i] {
                let s = a + b + self.carry[i];
                self.ok[i] = s % 2 == c;
                self.carry[i] = s / 2;
            }
        }
        self.z_nonzero |= z == 1;
        self.ok.iter().any(|&o| o).then_some(self)
    }

    fn accepts(&self) -> bool {
        let [sx, sy, sz] = self.signs;
        let done = |i: usize| self.ok[i] && self.carry[i] == 0;
        let sign_of = |s: u32| if self.z_nonzero { sz == s } else { sz == 0 };
        (done(0) && sx == sy && sz == sx)
            || (done(1) && sx != sy && sign_of(sx))
            || (done(2) && sx != sy && sign_of(sy))
    }
}

/// Encode an integer: sign symbol, then the magnitude in binary.
pub fn encode_integer(n: i64) -> Word {
    let mut w = vec![u32::from(n < 0)];
    let mut m = n.unsigned_abs();
    while m > 0 {
        w.push((m & 1) as u32);
        m >>= 1;
    }
    w
}

/// The integers under addition, sign-magnitude, least significant bit first.
pub fn integers() -> Presentation {
    let base = labels(2);
    // 0 start, 1 = "+" or ends in 1, 2 = "−" with empty magnitude, 3 = ends in 0
    let domain = Dfa::build(
        base.clone(),
        0u8,
        |&s, x| {
            Some(if s == 0 {
                if x == 0 {
                    1
                } else {
                    2
                }
            } else if x == 1 {
                1
            } else {
                3
            })
        },
        |&s| s == 1,
    );
    let op = RelationAutomaton::from_scan(
        &base,
        3,
        None::<SignedAdder>,
        |st, col| match st {
            None => Some(Some(SignedAdder::start([col[0], col[1], col[2]])?)),
            Some(add) => Some(Some(add.step([0, 1, 2].map(|i| col[i].unwrap_or(0)))?)),
        },
        |st| st.is_some_and(|a| a.accepts()),
    );
    Presentation::new("int", base, domain, vec![0])
        .and_then(|p| p.with_relation("Op", op))
        .and_then(|p| p.with_constant("is_e", &[0]))
        .expect("static construction")
        .with_metadata("encoding", "sign, then magnitude least significant bit first")
}

/// `ℤ/2 ⊕ (ℤ/2)^(ω)`: the bit `s` then the bit string `α` without trailing zeros.
pub fn twisted_quotient() -> Presentation {
    let base = labels(2);
    let domain = Dfa::build(base.clone(), 0u8, |&s, x| Some(if s != 0 && x == 0 { 2 } else { 1 }), |&s| s == 1);
    let op = RelationAutomaton::from_scan(
        &base,
        3,
        false,
        |&started, col| {
            if !started && col.iter().any(|c| c.is_none()) {
                return None;
            }
            let g = |i: usize| col[i].unwrap_or(0);
            (g(0) ^ g(1) == g(2)).then_some(true)
        },
        |&started| started,
    );
    Presentation::new("quotient", base, domain, vec![0])
        .and_then(|p| p.with_relation("Op", op))
        .and_then(|p| p.with_constant("is_e", &[0]))
        .expect("static construction")
        .with_metadata("encoding", "coefficient of v, then coefficients of w_i")
}

/// `ℤ ⊕ (ℤ/2)^(ω)`, the element `x^{2n} ∏ y_i^{γ_i}`: a sign symbol for `n`,
/// then symbols `m_i + 2·γ_i` pairing the bits of `|n|` with `γ`.
pub fn twisted_kernel() -> Presentation {
    let base = labels(4);
    // (sign, magnitude seen nonzero, last symbol nonzero); None before the sign
    let domain = Dfa::build(
        base.clone(),
        None::<(u32, bool, bool)>,
        |st, x| match st {
            None => (x < 2).then_some(Some((x, false, true))),
            Some((sign, mag, _)) => Some(Some((*sign, *mag || x % 2 == 1, x != 0))),
        },
        |st| matches!(st, Some((sign, mag, last)) if *last && (*sign == 0 || *mag)),
    );
    let op = RelationAutomaton::from_scan(
        &base,
        3,
        None::<SignedAdder>,
        |st, col| match st {
            None => Some(Some(SignedAdder::start([col[0], col[1], col[2]])?)),
            Some(add) => {
                let c = [0, 1, 2].map(|i| col[i].unwrap_or(0));
                if (c[0] / 2) ^ (c[1] / 2) != c[2] / 2 {
                    return None;
                }
                Some(Some(add.step(c.map(|x| x % 2))?))
            }
        },
        |st| st.is_some_and(|a| a.accepts()),
    );
    Presentation::new("kernel", base, domain, vec![0])
        .and_then(|p| p.with_relation("Op", op))
        .and_then(|p| p.with_constant("is_e", &[0]))
        .expect("static construction")
        .with_metadata("encoding", "sign of the x^2 exponent, then pairs (magnitude bit, y bit)")
}

/// An element `x^n ∏ z_i^{α_i} ∏ y_i^{γ_i}` in normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedElement {
    pub n: i64,
    pub alpha: Vec<bool>,
    pub gamma: Vec<bool>,
}

fn xor(a: &[bool], b: &[bool]) -> Vec<bool> {
    let mut out: Vec<bool> = (0..a.len().max(b.len()))
        .map(|i| a.get(i).copied().unwrap_or(false) ^ b.get(i).copied().unwrap_or(false))
        .collect();
    while out.last() == Some(&false) {
        out.pop();
    }
    out
}

impl TwistedElement {
    pub fn new(n: i64, alpha: Vec<bool>, gamma: Vec<bool>) -> Self {
        TwistedElement { n, alpha: xor(&alpha, &[]), gamma: xor(&gamma, &[]) }
    }

    pub fn identity() -> Self {
        TwistedElement::new(0, vec![], vec![])
    }

    /// Moving `z^α` right past `x^m` leaves `y^{m·α}` behind.
    pub fn multiply(&self, other: &TwistedElement) -> TwistedElement {
        let twist: &[bool] = if other.n.rem_euclid(2) == 1 { &self.alpha } else { &[] };
        TwistedElement {
            n: self.n + other.n,
            alpha: xor(&self.alpha, &other.alpha),
            gamma: xor(&xor(&self.gamma, &other.gamma), twist),
        }
    }

    pub fn inverse(&self) -> TwistedElement {
        let twist: &[bool] = if self.n.rem_euclid(2) == 1 { &self.alpha } else { &[] };
        TwistedElement { n: -self.n, alpha: self.alpha.clone(), gamma: xor(&self.gamma, twist) }
    }

    /// Coset representative `x^s ∏ z_i^{α_i}` of the quotient element `(s, α)`.
    pub fn transversal(s: bool, alpha: &[bool]) -> TwistedElement {
        TwistedElement::new(i64::from(s), alpha.to_vec(), vec![])
    }

    /// The image `(s, α)` in the quotient.
    pub fn quotient(&self) -> (bool, Vec<bool>) {
        (self.n.rem_euclid(2) == 1, self.alpha.clone())
    }

    /// `r(q₀)·r(q₁)·r(q₀ + q₁)⁻¹` for the transversal `r`; always central.
    pub fn transversal_cocycle(q0: (bool, &[bool]), q1: (bool, &[bool])) -> TwistedElement {
        let (a, b) = (Self::transversal(q0.0, q0.1), Self::transversal(q1.0, q1.1));
        let sum = Self::transversal(q0.0 ^ q1.0, &xor(q0.1, q1.1));
        a.multiply(&b).multiply(&sum.inverse())
    }

    /// Word of a central element `x^{2k} y^γ` in [`twisted_kernel`].
    pub fn kernel_word(&self) -> Result<Word> {
        if self.n % 2 != 0 || !self.alpha.is_empty() {
            return Err(Error::NotInDomain(format!("{self:?} is not central")));
        }
        let mag = encode_integer(self.n / 2);
        let len = (mag.len() - 1).max(self.gamma.len());
        let mut w = vec![mag[0]];
        for i in 0..len {
            let m = mag.get(i + 1).copied().unwrap_or(0);
            let g = u32::from(self.gamma.get(i).copied().unwrap_or(false));
            w.push(m + 2 * g);
        }
        Ok(w)
    }

    /// Word of `(s, α)` in [`twisted_quotient`].
    pub fn quotient_word(s: bool, alpha: &[bool]) -> Word {
        std::iter::once(u32::from(s)).chain(xor(alpha, &[]).into_iter().map(u32::from)).collect()
    }

    /// Word in the built extension: quotient image paired with the kernel part
    /// relative to the transversal.
    pub fn extension_word(&self, spec: &CocycleSpec) -> Result<Word> {
        let (s, alpha) = self.quotient();
        let rest = self.multiply(&Self::transversal(s, &alpha).inverse());
        // self = rest·r(q) with rest central
        Ok(pair_word(spec, &Self::quotient_word(s, &alpha), &rest.kernel_word()?))
    }
}

/// The cocycle of the transversal `q_{s,α} ↦ x^s ∏ z_i^{α_i}`:
/// `c(q_{s,α}, q_{t,β}) = x^{2st} ∏ y_i^{t·α_i}`.
pub fn twisted_cocycle() -> Result<CocycleSpec> {
    // None before the first column; then (t, st still to be written)
    CocycleSpec::from_scan(
        twisted_quotient(),
        twisted_kernel(),
        None::<(u32, bool)>,
        |st, [x, y, c]| match st {
            None => {
                let (s, t) = (x?, y?);
                (c? == 0).then_some(Some((t, s * t == 1)))
            }
            Some((t, owed)) => {
                let code = c.unwrap_or(0);
                let ok = (code % 2 == 1) == *owed && code / 2 == t * x.unwrap_or(0);
                ok.then_some(Some((*t, false)))
            }
        },
        |st| matches!(st, Some((_, false))),
    )
}

/// The Example-12 cocycle together with its verified extension, with
/// constants `is_x`, `is_y0`, `is_z0` for the generators.
pub fn twisted_extension() -> Result<(CocycleSpec, Presentation)> {
    let spec = twisted_cocycle()?;
    if !verify_cocycle(&spec)? {
        return Err(Error::Inconsistent("derived cocycle fails the cocycle identity".into()));
    }
    let mut pres = build_extension(&spec)?;
    let gens = [
        ("is_x", TwistedElement::new(1, vec![], vec![])),
        ("is_y0", TwistedElement::new(0, vec![], vec![true])),
        ("is_z0", TwistedElement::new(0, vec![true], vec![])),
    ];
    for (name, g) in gens {
        pres = pres.with_constant(name, &g.extension_word(&spec)?)?;
    }
    Ok((spec, pres.with_metadata("group", "x, y_i, z_k with z_i^-1 x z_i = x y_i")))
}
