//! Checkers for the one- and two-link character-sum bounds.
//!
//! Field bounds (`F_q`, `q = p^m`):
//!   one link:  `|sum_{s!=0} sum_{x,y in E} chi(s(x.y - g))| <= |E| q^{(d+1)/2} lambda(g)`
//!   two links: `|T(E)| <= C q^{d+1} |E| lambda(a) lambda(b)` with `C` unstated
//! Ring bounds (`Z/p^l`, units only):
//!   one link:  `|sum_{x in E} S_{E,g}(x)| <= 2 |E| q^{((d-1)/2)(2 - 1/l) + 1}`
//!   two links: `||S_a||_2 ||S_b||_2 <= 2 |E| q^{d(2l-1)/l + 1/l}` (norms over the whole space)
//!
//! Every exponent is rewritten as a half-integer power of `p`.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive};

use super::{s_l2, t_sum, Domain, HalfPower};
use crate::algebra::{Element, Structure, StructureKind};
use crate::chains::pair_count;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::pointsets::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LemmaKind {
    /// One link over a field.
    PairField,
    /// One link over `Z/p^l`.
    PairRing,
    /// Two consecutive links over a field.
    TsumField,
    /// Two links over `Z/p^l`, via whole-space L2 norms.
    TsumRing,
}

impl LemmaKind {
    pub fn name(self) -> &'static str {
        match self {
            LemmaKind::PairField => "1dp",
            LemmaKind::PairRing => "1dpR",
            LemmaKind::TsumField => "2dp",
            LemmaKind::TsumRing => "2dpR",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCheck {
    pub kind: LemmaKind,
    /// The summed quantity before taking absolute values, when it is an
    /// integer (all kinds except [`LemmaKind::TsumRing`]).
    pub lhs_signed: Option<BigInt>,
    /// Square of the left-hand side.
    pub lhs_squared: BigUint,
    /// Right-hand side, constant included.
    pub bound: HalfPower,
    pub constant: u32,
    /// `lhs / (bound / constant)`; display only.
    pub ratio: f64,
    pub pass: bool,
}

impl LemmaCheck {
    fn new(kind: LemmaKind, lhs_signed: Option<BigInt>, lhs_squared: BigUint, unit_bound: HalfPower, constant: u32) -> Self {
        let bound = unit_bound.times(constant);
        let pass = lhs_squared <= bound.squared();
        let lhs = lhs_squared.to_f64().unwrap_or(f64::INFINITY).sqrt();
        let denom = unit_bound.to_f64();
        let ratio = if denom == 0.0 {
            if lhs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            lhs / denom
        };
        LemmaCheck { kind, lhs_signed, lhs_squared, bound, constant, ratio, pass }
    }
}

/// `lambda(g) = 1` for `g != 0`, `sqrt(q)` for `g = 0`. Fields only.
pub fn lambda_factor(s: &Structure, gamma: Element) -> Result<HalfPower> {
    if !s.is_field() {
        return Err(Error::Precondition("lambda is only defined over fields".into()));
    }
    let b = if gamma.0 == 0 { s.e() } else { 0 };
    Ok(HalfPower::new(1u32, b, s.p()))
}

fn require_unit(s: &Structure, a: Element) -> Result<()> {
    if s.is_unit(a) {
        Ok(())
    } else {
        Err(Error::NotAUnit(a.0))
    }
}

/// One-link bound; dispatches on the structure kind.
pub fn check_pair_lemma(e: &PointSet, gamma: Element) -> Result<LemmaCheck> {
    let s = e.structure();
    let d = e.dim() as u32;
    let size = BigInt::from(e.len());
    let q = BigInt::from(s.q());
    // Both sides sum to q N_g - |E|^2.
    let signed = &q * BigInt::from(pair_count(e, gamma)) - &size * &size;
    let lhs_sq = signed.abs().to_biguint().expect("nonnegative");
    let sq = &lhs_sq * &lhs_sq;
    match s.kind() {
        StructureKind::IntegerRing => {
            require_unit(s, gamma)?;
            let l = s.e();
            let bound = HalfPower::new(BigUint::from(e.len()) * BigUint::from(s.q()), (d - 1) * (2 * l - 1), s.p());
            Ok(LemmaCheck::new(LemmaKind::PairRing, Some(signed), sq, bound, 2))
        }
        _ => {
            let m = s.e();
            let bound = HalfPower::new(e.len(), m * (d + 1), s.p()).mul(&lambda_factor(s, gamma)?);
            Ok(LemmaCheck::new(LemmaKind::PairField, Some(signed), sq, bound, 1))
        }
    }
}

/// Two-link bound. Over a field the constant is the caller's `c`; over a
/// ring it is fixed at 2 and `c` is ignored.
pub fn check_tsum_lemma(e: &PointSet, a: Element, b: Element, c: u32, limits: &Limits) -> Result<LemmaCheck> {
    let s = e.structure();
    let d = e.dim() as u32;
    match s.kind() {
        StructureKind::IntegerRing => {
            require_unit(s, a)?;
            require_unit(s, b)?;
            let l = s.e();
            let la: BigInt = s_l2(e, a, Domain::WholeSpace, limits)?;
            let lb: BigInt = s_l2(e, b, Domain::WholeSpace, limits)?;
            let product = (la * lb).to_biguint().expect("sums of squares");
            let bound = HalfPower::new(e.len(), 2 * (d * (2 * l - 1) + 1), s.p());
            Ok(LemmaCheck::new(LemmaKind::TsumRing, None, product, bound, 2))
        }
        _ => {
            let m = s.e();
            let t: BigInt = t_sum(e, a, b)?;
            let abs = t.abs().to_biguint().expect("nonnegative");
            let bound = HalfPower::new(e.len(), 2 * m * (d + 1), s.p())
                .mul(&lambda_factor(s, a)?)
                .mul(&lambda_factor(s, b)?);
            Ok(LemmaCheck::new(LemmaKind::TsumField, Some(t), &abs * &abs, bound, c))
        }
    }
}
