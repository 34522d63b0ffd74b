//! Coefficient rings: prime fields `F_p`, extension fields `F_{p^m}` and the
//! integer rings `Z/p^l`.
//!
//! Every element is a single integer in `[0, q)`. For extension fields this is
//! the base-`p` little-endian packing of the coefficient vector of a
//! polynomial of degree `< m`, reduced modulo a fixed irreducible polynomial.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureKind {
    PrimeField,
    ExtensionField,
    IntegerRing,
}

/// An element of some [`Structure`], stored as its integer representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(pub u32);

impl Element {
    pub const ZERO: Element = Element(0);

    pub fn repr(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for Element {
    fn from(v: u32) -> Self {
        Element(v)
    }
}

#[derive(Debug)]
struct Inner {
    kind: StructureKind,
    p: u32,
    e: u32,
    q: u32,
    /// Little-endian coefficients of the monic modulus, leading 1 included.
    modulus: Vec<u32>,
    /// `p^i` for `i < e`.
    digit_weights: Vec<u32>,
    /// Discrete log tables for extension fields.
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// A finite coefficient ring. Cheap to clone and safe to share across threads.
#[derive(Clone)]
pub struct Structure {
    inner: Arc<Inner>,
}

impl fmt::Debug for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Structure({})", self.literal())
    }
}

impl PartialEq for Structure {
    fn eq(&self, other: &Self) -> bool {
        self.inner.kind == other.inner.kind && self.inner.p == other.inner.p && self.inner.e == other.inner.e
    }
}

impl Eq for Structure {}

pub fn is_odd_prime(n: u64) -> bool {
    if n < 3 || n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Polynomials over F_p as little-endian coefficient vectors.

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn inv_mod_prime(a: u32, p: u32) -> u32 {
    pow_mod(a as u64, (p - 2) as u64, p as u64) as u32
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Remainder of `a` modulo the nonzero polynomial `b`.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let mut b = b.to_vec();
    poly_trim(&mut b);
    let db = b.len() - 1;
    let lead_inv = inv_mod_prime(b[db], p) as u64;
    let p64 = p as u64;
    while r.len() > db {
        let dr = r.len() - 1;
        let factor = r[dr] as u64 * lead_inv % p64;
        let shift = dr - db;
        for (i, &bi) in b.iter().enumerate() {
            let sub = factor * bi as u64 % p64;
            r[shift + i] = ((r[shift + i] as u64 + p64 - sub) % p64) as u32;
        }
        poly_trim(&mut r);
    }
    r
}

/// Exhaustive irreducibility test: no monic factor of degree `1..=deg/2`.
pub(crate) fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    for fdeg in 1..=deg / 2 {
        let count = (p as u64).pow(fdeg as u32);
        let mut factor = vec![0u32; fdeg + 1];
        factor[fdeg] = 1;
        for packed in 0..count {
            let mut v = packed;
            for c in factor.iter_mut().take(fdeg) {
                *c = (v % p as u64) as u32;
                v /= p as u64;
            }
            if poly_rem(poly, &factor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lex-smallest monic irreducible polynomial of degree `m` over `F_p`.
///
/// Candidates `x^m + c_{m-1} x^{m-1} + ... + c_0` are visited in increasing
/// order of the packed value `c_0 + c_1 p + ... + c_{m-1} p^{m-1}`, i.e. the
/// coefficient vector is compared from the highest non-leading degree down.
pub fn lex_smallest_irreducible(p: u32, m: u32) -> Option<Vec<u32>> {
    let count = (p as u64).checked_pow(m)?;
    let m = m as usize;
    let mut poly = vec![0u32; m + 1];
    poly[m] = 1;
    for packed in 0..count {
        let mut v = packed;
        for c in poly.iter_mut().take(m) {
            *c = (v % p as u64) as u32;
            v /= p as u64;
        }
        if is_irreducible(&poly, p) {
            return Some(poly);
        }
    }
    None
}

impl Structure {
    pub fn new(kind: StructureKind, p: u64, e: u32) -> Result<Self> {
        Self::with_limits(kind, p, e, &Limits::default())
    }

    pub fn with_limits(kind: StructureKind, p: u64, e: u32, limits: &Limits) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if e < 1 || (kind == StructureKind::PrimeField && e != 1) {
            return Err(Error::BadExponent(e));
        }
        let q = p.checked_pow(e).unwrap_or(u64::MAX);
        if q > limits.max_q || q > u32::MAX as u64 / 2 {
            return Err(Error::StructureTooLarge { q, limit: limits.max_q });
        }
        let p = p as u32;
        let q = q as u32;
        let digit_weights = (0..e).map(|i| p.pow(i)).collect();
        let mut inner = Inner {
            kind,
            p,
            e,
            q,
            modulus: Vec::new(),
            digit_weights,
            exp: Vec::new(),
            log: Vec::new(),
        };
        if kind == StructureKind::ExtensionField {
            inner.modulus =
                lex_smallest_irreducible(p, e).ok_or(Error::NoIrreducible { p: p as u64, degree: e })?;
            build_log_tables(&mut inner);
        }
        Ok(Structure { inner: Arc::new(inner) })
    }

    pub fn prime_field(p: u64) -> Result<Self> {
        Self::new(StructureKind::PrimeField, p, 1)
    }

    pub fn extension_field(p: u64, m: u32) -> Result<Self> {
        Self::new(StructureKind::ExtensionField, p, m)
    }

    pub fn integer_ring(p: u64, l: u32) -> Result<Self> {
        Self::new(StructureKind::IntegerRing, p, l)
    }

    pub fn kind(&self) -> StructureKind {
        self.inner.kind
    }

    pub fn p(&self) -> u32 {
        self.inner.p
    }

    /// Extension degree for fields, exponent `l` for rings.
    pub fn e(&self) -> u32 {
        self.inner.e
    }

    pub fn q(&self) -> u32 {
        self.inner.q
    }

    pub fn is_field(&self) -> bool {
        self.inner.kind != StructureKind::IntegerRing
    }

    /// Monic modulus (little-endian, leading coefficient included) for
    /// extension fields.
    pub fn modulus(&self) -> Option<&[u32]> {
        (self.inner.kind == StructureKind::ExtensionField).then_some(self.inner.modulus.as_slice())
    }

    pub fn literal(&self) -> String {
        match self.inner.kind {
            StructureKind::PrimeField => format!("Fp:{}", self.inner.p),
            StructureKind::ExtensionField => format!("F:{}^{}", self.inner.p, self.inner.e),
            StructureKind::IntegerRing => format!("Z:{}^{}", self.inner.p, self.inner.e),
        }
    }

    pub fn element(&self, repr: u64) -> Result<Element> {
        if repr < self.inner.q as u64 {
            Ok(Element(repr as u32))
        } else {
            Err(Error::ElementOutOfRange { repr, q: self.inner.q as u64 })
        }
    }

    pub fn contains(&self, a: Element) -> bool {
        a.0 < self.inner.q
    }

    pub fn zero(&self) -> Element {
        Element(0)
    }

    pub fn one(&self) -> Element {
        Element(1)
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> {
        (0..self.inner.q).map(Element)
    }

    pub fn add(&self, a: Element, b: Element) -> Element {
        let s = &self.inner;
        match s.kind {
            StructureKind::ExtensionField => {
                let mut out = 0;
                let (mut x, mut y) = (a.0, b.0);
                for &w in &s.digit_weights {
                    out += (x % s.p + y % s.p) % s.p * w;
                    x /= s.p;
                    y /= s.p;
                }
                Element(out)
            }
            _ => Element((a.0 + b.0) % s.q),
        }
    }

    pub fn neg(&self, a: Element) -> Element {
        let s = &self.inner;
        match s.kind {
            StructureKind::ExtensionField => {
                let mut out = 0;
                let mut x = a.0;
                for &w in &s.digit_weights {
                    out += (s.p - x % s.p) % s.p * w;
                    x /= s.p;
                }
                Element(out)
            }
            _ => Element((s.q - a.0) % s.q),
        }
    }

    pub fn sub(&self, a: Element, b: Element) -> Element {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Element, b: Element) -> Element {
        let s = &self.inner;
        match s.kind {
            StructureKind::ExtensionField => {
                if a.0 == 0 || b.0 == 0 {
                    return Element(0);
                }
                let n = s.q - 1;
                let idx = (s.log[a.0 as usize] + s.log[b.0 as usize]) % n;
                Element(s.exp[idx as usize])
            }
            _ => Element((a.0 as u64 * b.0 as u64 % s.q as u64) as u32),
        }
    }

    pub fn pow(&self, a: Element, mut n: u64) -> Element {
        let mut acc = self.one();
        let mut base = a;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    pub fn is_unit(&self, a: Element) -> bool {
        match self.inner.kind {
            StructureKind::IntegerRing => a.0 % self.inner.p != 0,
            _ => a.0 != 0,
        }
    }

    pub fn inv(&self, a: Element) -> Result<Element> {
        if !self.is_unit(a) {
            return Err(Error::NotAUnit(a.0));
        }
        let s = &self.inner;
        Ok(match s.kind {
            StructureKind::ExtensionField => {
                let n = s.q - 1;
                Element(s.exp[((n - s.log[a.0 as usize]) % n) as usize])
            }
            _ => {
                // Units of Z/p^l form a group of order p^(l-1)(p-1).
                let order = (s.q / s.p) as u64 * (s.p as u64 - 1);
                Element(pow_mod(a.0 as u64, order - 1, s.q as u64) as u32)
            }
        })
    }

    pub fn unit_count(&self) -> u64 {
        match self.inner.kind {
            StructureKind::IntegerRing => (self.inner.q - self.inner.q / self.inner.p) as u64,
            _ => self.inner.q as u64 - 1,
        }
    }

    /// Standard bilinear dot product.
    pub fn dot(&self, x: &[Element], y: &[Element]) -> Result<Element> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
        }
        Ok(self.dot_unchecked(x, y))
    }

    pub(crate) fn dot_unchecked(&self, x: &[Element], y: &[Element]) -> Element {
        match self.inner.kind {
            StructureKind::ExtensionField => x
                .iter()
                .zip(y)
                .fold(Element(0), |acc, (&a, &b)| self.add(acc, self.mul(a, b))),
            _ => {
                let q = self.inner.q as u64;
                let s = x.iter().zip(y).fold(0u64, |acc, (a, b)| (acc + a.0 as u64 * b.0 as u64) % q);
                Element(s as u32)
            }
        }
    }

    /// Modulus `Q` of the root of unity `exp(2 pi i / Q)` used by the
    /// canonical additive character.
    pub fn character_modulus(&self) -> u32 {
        match self.inner.kind {
            StructureKind::IntegerRing => self.inner.q,
            _ => self.inner.p,
        }
    }

    /// Index `t` with `chi(a) = exp(2 pi i t / Q)`: the residue itself on
    /// `Z/p^l`, the absolute trace on fields.
    pub fn character_index(&self, a: Element) -> u32 {
        match self.inner.kind {
            StructureKind::ExtensionField => self.trace(a).0,
            _ => a.0,
        }
    }

    /// Absolute trace `a + a^p + ... + a^(p^(m-1))`; lands in the prime
    /// subfield, i.e. has representative `< p`.
    pub fn trace(&self, a: Element) -> Element {
        let mut acc = Element(0);
        let mut frob = a;
        for _ in 0..self.inner.e {
            acc = self.add(acc, frob);
            frob = self.pow(frob, self.inner.p as u64);
        }
        acc
    }
}

fn digits_of(v: u32, p: u32, m: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(m);
    let mut v = v;
    for _ in 0..m {
        out.push(v % p);
        v /= p;
    }
    out
}

fn pack(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Polynomial product reduced by the modulus, used only to build tables.
fn slow_mul(inner: &Inner, a: u32, b: u32) -> u32 {
    let m = inner.e as usize;
    let p = inner.p;
    let da = digits_of(a, p, m);
    let db = digits_of(b, p, m);
    let mut prod = vec![0u32; 2 * m];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    let r = poly_rem(&prod, &inner.modulus, p);
    pack(&r, p)
}

fn build_log_tables(inner: &mut Inner) {
    let q = inner.q;
    let n = (q - 1) as u64;
    let factors = prime_factors(n);
    let slow_pow = |inner: &Inner, a: u32, mut e: u64| {
        let mut acc = 1u32;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = slow_mul(inner, acc, base);
            }
            base = slow_mul(inner, base, base);
            e >>= 1;
        }
        acc
    };
    let generator = (1..q)
        .find(|&g| factors.iter().all(|&r| slow_pow(inner, g, n / r) != 1))
        .expect("multiplicative group of a finite field is cyclic");
    let mut exp = Vec::with_capacity(n as usize);
    let mut log = vec![0u32; q as usize];
    let mut cur = 1u32;
    for i in 0..n as u32 {
        exp.push(cur);
        log[cur as usize] = i;
        cur = slow_mul(inner, cur, generator);
    }
    inner.exp = exp;
    inner.log = log;
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.literal())
    }
}

impl FromStr for Structure {
    type Err = Error;

    /// Parses `Fp:<p>`, `F:<p>^<m>` or `Z:<p>^<l>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadStructureLiteral(s.to_string());
        let (tag, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let parse_pe = |rest: &str| -> Result<(u64, u32)> {
            let (p, e) = rest.split_once('^').ok_or_else(bad)?;
            Ok((p.parse().map_err(|_| bad())?, e.parse().map_err(|_| bad())?))
        };
        match tag {
            "Fp" => Structure::prime_field(rest.parse().map_err(|_| bad())?),
            "F" => {
                let (p, m) = parse_pe(rest)?;
                Structure::extension_field(p, m)
            }
            "Z" => {
                let (p, l) = parse_pe(rest)?;
                Structure::integer_ring(p, l)
            }
            _ => Err(bad()),
        }
    }
}
