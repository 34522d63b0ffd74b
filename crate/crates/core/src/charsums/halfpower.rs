use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// The nonnegative number `a * p^(b/2)`.
///
/// Comparisons never touch floating point: both sides are squared, which
/// turns every half-integer power of `p` into an integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfPower {
    pub a: BigUint,
    pub b: u32,
    pub p: u32,
}

impl HalfPower {
    pub fn new(a: impl Into<BigUint>, b: u32, p: u32) -> Self {
        HalfPower { a: a.into(), b, p }
    }

    pub fn one(p: u32) -> Self {
        HalfPower::new(1u32, 0, p)
    }

    /// `a^2 p^b`.
    pub fn squared(&self) -> BigUint {
        &self.a * &self.a * BigUint::from(self.p).pow(self.b)
    }

    pub fn times(&self, c: impl Into<BigUint>) -> Self {
        HalfPower { a: &self.a * c.into(), b: self.b, p: self.p }
    }

    /// Product of two half-powers over the same `p`.
    pub fn mul(&self, other: &HalfPower) -> Self {
        assert_eq!(self.p, other.p, "half-powers over different primes");
        HalfPower { a: &self.a * &other.a, b: self.b + other.b, p: self.p }
    }

    /// Compares `sqrt(square)` with this value.
    pub fn cmp_sqrt(&self, square: &BigUint) -> Ordering {
        square.cmp(&self.squared())
    }

    /// Compares the integer `n >= 0` with this value.
    pub fn cmp_int(&self, n: &BigUint) -> Ordering {
        self.cmp_sqrt(&(n * n))
    }

    /// Approximate value; display only.
    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::INFINITY) * (self.p as f64).powf(self.b as f64 / 2.0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero()
    }
}

impl PartialOrd for HalfPower {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        (self.p == other.p).then(|| self.squared().cmp(&other.squared()))
    }
}

impl fmt::Display for HalfPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b == 0 || self.a.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_one() {
            write!(f, "{}^({}/2)", self.p, self.b)
        } else {
            write!(f, "{}*{}^({}/2)", self.a, self.p, self.b)
        }
    }
}
