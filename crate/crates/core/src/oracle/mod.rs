//! Normal-form arithmetic in class-2 groups of odd prime exponent.
//!
//! An element is `c · x₀^{α₀} x₁^{α₁} ⋯` with `c` central. Multiplication
//! collects `ᾱ · β̄ = (α+β)‾ · ∏_{i<k} [xᵢ, x_k]^{−α_k βᵢ}` and then maps the
//! commutators into the centre of the chosen group:
//! free: independent `[xᵢ, x_k]`; E: all equal to `z`; H: `[xᵢ, x_k] = z_k`.

use std::fmt;

use crate::automata::{Symbol, Word};
use crate::error::{Error, Result};
use crate::presentations::{require_odd_prime, Presentation};

pub const DEFAULT_RANK: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Free,
    E,
    H,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NilElement {
    kind: Kind,
    p: u32,
    alpha: Vec<u32>,
    /// Free: `v[k(k-1)/2 + i]` for `i < k`; E: one entry; H: entry `k` is the
    /// exponent of `z_k`, entry 0 stays 0.
    central: Vec<u32>,
}

fn pair_index(i: usize, k: usize) -> usize {
    debug_assert!(i < k);
    k * (k - 1) / 2 + i
}

fn central_len(kind: Kind, rank: usize) -> usize {
    match kind {
        Kind::Free => rank * rank.saturating_sub(1) / 2,
        Kind::E => 1,
        Kind::H => rank,
    }
}

impl NilElement {
    pub fn identity(kind: Kind, p: u32, rank: usize) -> Result<Self> {
        require_odd_prime(p)?;
        Ok(NilElement { kind, p, alpha: vec![0; rank], central: vec![0; central_len(kind, rank)] })
    }

    /// Build from raw exponents, reducing mod `p`.
    pub fn from_parts(kind: Kind, p: u32, alpha: Vec<u32>, central: Vec<u32>) -> Result<Self> {
        let mut e = NilElement::identity(kind, p, alpha.len())?;
        if central.len() != e.central.len() {
            return Err(Error::OracleMismatch(format!(
                "central part has {} entries, expected {}",
                central.len(),
                e.central.len()
            )));
        }
        if kind == Kind::H && central.first().is_some_and(|&v| v % p != 0) {
            return Err(Error::OracleMismatch("H has no z_0".into()));
        }
        e.alpha = alpha.into_iter().map(|a| a % p).collect();
        e.central = central.into_iter().map(|v| v % p).collect();
        Ok(e)
    }

    pub fn generator(kind: Kind, p: u32, rank: usize, i: usize) -> Result<Self> {
        let mut e = NilElement::identity(kind, p, rank)?;
        if i >= rank {
            return Err(Error::RankOverflow { needed: i + 1, rank });
        }
        e.alpha[i] = 1;
        Ok(e)
    }

    /// `z` in E, `z_k` in H, `[x_i, x_k]` (for `index = (i, k)`) in the free group.
    pub fn central_generator(kind: Kind, p: u32, rank: usize, index: (usize, usize)) -> Result<Self> {
        let mut e = NilElement::identity(kind, p, rank)?;
        let (i, k) = index;
        match kind {
            Kind::E => e.central[0] = 1,
            Kind::H if k >= 1 && k < rank => e.central[k] = 1,
            Kind::Free if i < k && k < rank => e.central[pair_index(i, k)] = 1,
            _ => return Err(Error::RankOverflow { needed: k + 1, rank }),
        }
        Ok(e)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[u32] {
        &self.alpha
    }

    pub fn central(&self) -> &[u32] {
        &self.central
    }

    pub fn is_identity(&self) -> bool {
        self.alpha.iter().chain(&self.central).all(|&x| x == 0)
    }

    pub fn is_central(&self) -> bool {
        self.alpha.iter().all(|&a| a == 0)
    }

    fn compatible(&self, other: &NilElement) -> Result<()> {
        if self.kind != other.kind || self.p != other.p || self.rank() != other.rank() {
            return Err(Error::OracleMismatch(format!(
                "{:?}/p={}/rank {} vs {:?}/p={}/rank {}",
                self.kind,
                self.p,
                self.rank(),
                other.kind,
                other.p,
                other.rank()
            )));
        }
        Ok(())
    }

    pub fn multiply(&self, other: &NilElement) -> Result<NilElement> {
        self.compatible(other)?;
        let p = self.p as u64;
        let (a, b) = (&self.alpha, &other.alpha);
        let mut out = self.clone();
        for (x, &y) in out.alpha.iter_mut().zip(b) {
            *x = ((*x as u64 + y as u64) % p) as u32;
        }
        for (x, &y) in out.central.iter_mut().zip(&other.central) {
            *x = ((*x as u64 + y as u64) % p) as u32;
        }
        let sub = |slot: &mut u32, amount: u64| *slot = ((*slot as u64 + p - amount % p) % p) as u32;
        let mut prefix = 0u64;
        for k in 0..self.rank() {
            if a[k] != 0 {
                match self.kind {
                    Kind::E => sub(&mut out.central[0], a[k] as u64 * prefix),
                    Kind::H => sub(&mut out.central[k], a[k] as u64 * prefix),
                    Kind::Free => {
                        for i in 0..k {
                            sub(&mut out.central[pair_index(i, k)], a[k] as u64 * b[i] as u64);
                        }
                    }
                }
            }
            prefix = (prefix + b[k] as u64) % p;
        }
        Ok(out)
    }

    pub fn inverse(&self) -> NilElement {
        let p = self.p;
        let mut b0 = self.clone();
        b0.alpha = self.alpha.iter().map(|&a| (p - a) % p).collect();
        b0.central.iter_mut().for_each(|v| *v = 0);
        // self · b0 is central; cancel it
        let mut c = self.multiply(&b0).expect("same shape");
        c.central = c.central.iter().map(|&v| (p - v) % p).collect();
        b0.multiply(&c).expect("same shape")
    }

    pub fn power(&self, m: u64) -> NilElement {
        let mut result =
            NilElement { alpha: vec![0; self.rank()], central: vec![0; self.central.len()], ..self.clone() };
        let mut base = self.clone();
        let mut m = m;
        while m > 0 {
            if m & 1 == 1 {
                result = result.multiply(&base).expect("same shape");
            }
            base = base.multiply(&base).expect("same shape");
            m >>= 1;
        }
        result
    }

    /// `[a, b] = a⁻¹ b⁻¹ a b`.
    pub fn commutator(&self, other: &NilElement) -> Result<NilElement> {
        self.compatible(other)?;
        self.inverse().multiply(&other.inverse())?.multiply(self)?.multiply(other)
    }

    /// Image in E: every `[xᵢ, x_k]` becomes `z`.
    pub fn to_e(&self) -> Result<NilElement> {
        self.quotient(Kind::E)
    }

    /// Image in H: `[xᵢ, x_k]` becomes `z_k`.
    pub fn to_h(&self) -> Result<NilElement> {
        self.quotient(Kind::H)
    }

    fn quotient(&self, target: Kind) -> Result<NilElement> {
        if self.kind != Kind::Free {
            return Err(Error::OracleMismatch("quotient maps start from the free group".into()));
        }
        let mut out = NilElement::identity(target, self.p, self.rank())?;
        out.alpha = self.alpha.clone();
        for k in 1..self.rank() {
            for i in 0..k {
                let v = self.central[pair_index(i, k)];
                let slot = if target == Kind::E { 0 } else { k };
                out.central[slot] = (out.central[slot] + v) % self.p;
            }
        }
        Ok(out)
    }

    /// The domain word of this element in an `ep` or `hp` presentation.
    pub fn encode(&self, pres: &Presentation) -> Result<Word> {
        let p = self.p;
        let expect = |kind: Kind| {
            if self.kind == kind && pres.p() == Some(p) {
                Ok(())
            } else {
                Err(Error::OracleMismatch(format!("cannot encode {:?}/p={p} in {}", self.kind, pres.name())))
            }
        };
        let trimmed = |v: &[u32]| v.iter().rposition(|&x| x != 0).map_or(0, |i| i + 1);
        match pres.name() {
            "ep" => {
                expect(Kind::E)?;
                let n = trimmed(&self.alpha);
                let mut w = vec![self.central[0]];
                w.extend_from_slice(&self.alpha[..n]);
                Ok(w)
            }
            "hp" => {
                expect(Kind::H)?;
                let n = trimmed(&self.alpha).max(trimmed(&self.central));
                Ok((0..n).map(|i| self.alpha[i] + p * self.central[i]).collect())
            }
            other => Err(Error::Unsupported(format!("no oracle encoding for {other}"))),
        }
    }

    /// Inverse of [`NilElement::encode`] at the given rank.
    pub fn decode(w: &[Symbol], pres: &Presentation, rank: usize) -> Result<NilElement> {
        pres.check_domain(w)?;
        let p = pres.p().ok_or_else(|| Error::Unsupported(format!("{} has no prime", pres.name())))?;
        match pres.name() {
            "ep" => {
                let alpha = &w[1..];
                if alpha.len() > rank {
                    return Err(Error::RankOverflow { needed: alpha.len(), rank });
                }
                let mut a = alpha.to_vec();
                a.resize(rank, 0);
                NilElement::from_parts(Kind::E, p, a, vec![w[0]])
            }
            "hp" => {
                if w.len() > rank {
                    return Err(Error::RankOverflow { needed: w.len(), rank });
                }
                let mut a: Vec<u32> = w.iter().map(|&s| s % p).collect();
                let mut v: Vec<u32> = w.iter().map(|&s| s / p).collect();
                a.resize(rank, 0);
                v.resize(rank, 0);
                NilElement::from_parts(Kind::H, p, a, v)
            }
            other => Err(Error::Unsupported(format!("no oracle encoding for {other}"))),
        }
    }

    /// Parse the text form, a product of factors such as `z^2 x0 x1`,
    /// `z1^2 x0`, `x0^2 x1 [x0,x1]^2` or `e`.
    pub fn parse(text: &str, kind: Kind, p: u32, rank: usize) -> Result<NilElement> {
        let mut acc = NilElement::identity(kind, p, rank)?;
        for tok in text.split_whitespace() {
            let (head, exp) = match tok.split_once('^') {
                Some((h, e)) => (h, e.parse::<u64>().map_err(|_| Error::Parse(format!("bad exponent in {tok}")))?),
                None => (tok, 1),
            };
            let index = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad index in {tok}")));
            let factor = if head == "e" {
                NilElement::identity(kind, p, rank)?
            } else if let Some(pair) = head.strip_prefix("[x").and_then(|s| s.strip_suffix(']')) {
                let (i, k) = pair.split_once(",x").ok_or_else(|| Error::Parse(format!("bad commutator {tok}")))?;
                let (gi, gk) = (
                    NilElement::generator(kind, p, rank, index(i)?)?,
                    NilElement::generator(kind, p, rank, index(k)?)?,
                );
                gi.commutator(&gk)?
            } else if let Some(i) = head.strip_prefix('x') {
                NilElement::generator(kind, p, rank, index(i)?)?
            } else if head == "z" && kind == Kind::E {
                NilElement::central_generator(kind, p, rank, (0, 0))?
            } else if let (Some(k), Kind::H) = (head.strip_prefix('z'), kind) {
                NilElement::central_generator(kind, p, rank, (0, index(k)?))?
            } else {
                return Err(Error::Parse(format!("unknown factor {tok}")));
            };
            acc = acc.multiply(&factor.power(exp))?;
        }
        Ok(acc)
    }
}

impl fmt::Display for NilElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let term = |name: String, e: u32| if e == 1 { name } else { format!("{name}^{e}") };
        match self.kind {
            Kind::E if self.central[0] != 0 => parts.push(term("z".into(), self.central[0])),
            Kind::H => {
                for (k, &v) in self.central.iter().enumerate().filter(|(_, &v)| v != 0) {
                    parts.push(term(format!("z{k}"), v));
                }
            }
            _ => {}
        }
        for (i, &a) in self.alpha.iter().enumerate().filter(|(_, &a)| a != 0) {
            parts.push(term(format!("x{i}"), a));
        }
        if self.kind == Kind::Free {
            for k in 1..self.rank() {
                for i in 0..k {
                    let v = self.central[pair_index(i, k)];
                    if v != 0 {
                        parts.push(term(format!("[x{i},x{k}]"), v));
                    }
                }
            }
        }
        if parts.is_empty() {
            write!(f, "e")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}
