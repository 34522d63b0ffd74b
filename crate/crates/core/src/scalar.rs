//! Exact scalar layer.
//!
//! Counting and character-sum code is generic over the integer type that
//! carries exact results. `i64` is fast but overflows early, `i128` is the
//! default (see [`crate::Int`]), and `BigInt` never overflows.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};

use crate::error::{Error, Result};

/// Signed integer type with checked arithmetic, usable as an exact count.
pub trait ExactInt:
    Integer
    + Signed
    + Clone
    + Debug
    + Display
    + FromPrimitive
    + ToPrimitive
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + Into<BigInt>
    + Send
    + Sync
    + 'static
{
    fn lift(v: u64) -> Result<Self> {
        Self::from_u64(v).ok_or(Error::Overflow)
    }

    fn lift_u128(v: u128) -> Result<Self> {
        Self::from_u128(v).ok_or(Error::Overflow)
    }

    fn add_exact(&self, rhs: &Self) -> Result<Self> {
        self.checked_add(rhs).ok_or(Error::Overflow)
    }

    fn sub_exact(&self, rhs: &Self) -> Result<Self> {
        self.checked_sub(rhs).ok_or(Error::Overflow)
    }

    fn mul_exact(&self, rhs: &Self) -> Result<Self> {
        self.checked_mul(rhs).ok_or(Error::Overflow)
    }

    fn pow_exact(&self, exp: u32) -> Result<Self> {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc.mul_exact(self)?;
        }
        Ok(acc)
    }
}

impl<T> ExactInt for T where
    T: Integer
        + Signed
        + Clone
        + Debug
        + Display
        + FromPrimitive
        + ToPrimitive
        + CheckedAdd
        + CheckedSub
        + CheckedMul
        + Into<BigInt>
        + Send
        + Sync
        + 'static
{
}

/// Widen an exact ratio to arbitrary precision.
pub fn to_big_ratio<I: ExactInt>(r: &Ratio<I>) -> Ratio<BigInt> {
    Ratio::new(r.numer().clone().into(), r.denom().clone().into())
}

/// Lossy conversion for labelled convenience fields only.
pub fn ratio_to_f64<I: ExactInt>(r: &Ratio<I>) -> f64 {
    let big = to_big_ratio(r);
    let n = big.numer().to_f64().unwrap_or(f64::NAN);
    let d = big.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}
