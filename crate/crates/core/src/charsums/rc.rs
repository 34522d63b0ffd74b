//! Row/column bound for bilinear forms:
//! `|sum c_jk z_j y_k| <= sqrt(R C) ||z|| ||y||` with `R` the largest row sum
//! and `C` the largest column sum of `|c_jk|`.
//!
//! Inputs are Gaussian rationals. Both sides are squared; the only
//! irrational quantities left are the moduli `|c_jk|`, which are bracketed
//! by rational intervals that shrink until the comparison is decided.

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{to_big_ratio, ExactInt};
use crate::BigRational;

/// `re + i im` with rational parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexQ<I: ExactInt> {
    pub re: Ratio<I>,
    pub im: Ratio<I>,
}

impl<I: ExactInt> ComplexQ<I> {
    pub fn new(re: Ratio<I>, im: Ratio<I>) -> Self {
        ComplexQ { re, im }
    }

    pub fn real(re: Ratio<I>) -> Self {
        ComplexQ { re, im: Ratio::zero() }
    }
}

#[derive(Debug, Clone, Copy)]
struct Cq<'a> {
    re: &'a BigRational,
    im: &'a BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RcCheck {
    /// `|sum c_jk z_j y_k|^2`, exact.
    pub lhs_squared: BigRational,
    /// `||z||^2 ||y||^2`, exact.
    pub norms_squared: BigRational,
    /// Approximate `R` and `C`; display only.
    pub row_max: f64,
    pub col_max: f64,
    /// Approximate `sqrt(R C) ||z|| ||y||`; display only.
    pub bound: f64,
    pub pass: bool,
    /// False only if the two sides could not be separated at the finest
    /// interval width tried, i.e. they agree to within 2^-1024.
    pub certified: bool,
}

/// Rational interval around `sqrt(r)` for `r >= 0`, of width at most `2^-bits`
/// relative to the denominator scale; exact when `r` is a rational square.
fn sqrt_interval(r: &BigRational, bits: u32) -> (BigRational, BigRational) {
    let n = r.numer().to_biguint().expect("nonnegative");
    let d = r.denom().to_biguint().expect("positive");
    let nd = &n * &d;
    let root = nd.sqrt();
    if &root * &root == nd {
        let v = Ratio::new(BigInt::from(root), BigInt::from(d));
        return (v.clone(), v);
    }
    let scale = BigUint::from(1u32) << (2 * bits as usize);
    let s = (&nd * &scale).sqrt();
    let den = BigInt::from(d) << bits as usize;
    (
        Ratio::new(BigInt::from(s.clone()), den.clone()),
        Ratio::new(BigInt::from(s + 1u32), den),
    )
}

fn modulus_squared(c: Cq<'_>) -> BigRational {
    c.re * c.re + c.im * c.im
}

pub fn check_rc<I: ExactInt>(c: &[Vec<ComplexQ<I>>], z: &[ComplexQ<I>], y: &[ComplexQ<I>]) -> Result<RcCheck> {
    let m = c.len();
    if m == 0 || z.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: z.len() });
    }
    let n = c[0].len();
    if n == 0 || y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    if let Some(row) = c.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: row.len() });
    }
    let widen = |v: &ComplexQ<I>| (to_big_ratio(&v.re), to_big_ratio(&v.im));
    let cb: Vec<Vec<(BigRational, BigRational)>> = c.iter().map(|r| r.iter().map(widen).collect()).collect();
    let zb: Vec<(BigRational, BigRational)> = z.iter().map(widen).collect();
    let yb: Vec<(BigRational, BigRational)> = y.iter().map(widen).collect();

    let mut sum_re = BigRational::zero();
    let mut sum_im = BigRational::zero();
    for (j, row) in cb.iter().enumerate() {
        for (k, cjk) in row.iter().enumerate() {
            // c * z_j
            let (zr, zi) = &zb[j];
            let cz_re = &cjk.0 * zr - &cjk.1 * zi;
            let cz_im = &cjk.0 * zi + &cjk.1 * zr;
            let (yr, yi) = &yb[k];
            sum_re += &cz_re * yr - &cz_im * yi;
            sum_im += &cz_re * yi + &cz_im * yr;
        }
    }
    let lhs_squared = &sum_re * &sum_re + &sum_im * &sum_im;
    let norm = |v: &[(BigRational, BigRational)]| {
        v.iter().fold(BigRational::zero(), |acc, (r, i)| acc + modulus_squared(Cq { re: r, im: i }))
    };
    let norms_squared = norm(&zb) * norm(&yb);

    let moduli: Vec<Vec<BigRational>> = cb
        .iter()
        .map(|r| r.iter().map(|(re, im)| modulus_squared(Cq { re, im })).collect())
        .collect();

    let mut bits = 64;
    loop {
        let intervals: Vec<Vec<(BigRational, BigRational)>> =
            moduli.iter().map(|r| r.iter().map(|v| sqrt_interval(v, bits)).collect()).collect();
        let row_sums: Vec<(BigRational, BigRational)> = intervals
            .iter()
            .map(|r| {
                r.iter().fold((BigRational::zero(), BigRational::zero()), |(lo, hi), (a, b)| (lo + a, hi + b))
            })
            .collect();
        let col_sums: Vec<(BigRational, BigRational)> = (0..n)
            .map(|k| {
                intervals
                    .iter()
                    .fold((BigRational::zero(), BigRational::zero()), |(lo, hi), r| (lo + &r[k].0, hi + &r[k].1))
            })
            .collect();
        let max_of = |v: &[(BigRational, BigRational)]| {
            let lo = v.iter().map(|x| x.0.clone()).max().expect("nonempty");
            let hi = v.iter().map(|x| x.1.clone()).max().expect("nonempty");
            (lo, hi)
        };
        let (r_lo, r_hi) = max_of(&row_sums);
        let (c_lo, c_hi) = max_of(&col_sums);
        let rhs_lo = &r_lo * &c_lo * &norms_squared;
        let rhs_hi = &r_hi * &c_hi * &norms_squared;
        let decided = if lhs_squared <= rhs_lo {
            Some(true)
        } else if lhs_squared > rhs_hi {
            Some(false)
        } else {
            None
        };
        if decided.is_some() || bits >= 1024 {
            let approx = |r: &BigRational| r.to_f64().unwrap_or(f64::NAN);
            let row_max = approx(&r_hi);
            let col_max = approx(&c_hi);
            return Ok(RcCheck {
                bound: (row_max * col_max * approx(&norms_squared)).sqrt(),
                lhs_squared,
                norms_squared,
                row_max,
                col_max,
                pass: decided.unwrap_or(true),
                certified: decided.is_some(),
            });
        }
        bits *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    type Q = ComplexQ<i64>;

    fn int(v: i64) -> Q {
        ComplexQ::real(Ratio::from_integer(v))
    }

    #[test]
    fn identity_is_tight() {
        let r = check_rc(&[vec![int(1)]], &[int(1)], &[int(1)]).unwrap();
        assert!(r.pass && r.certified);
        assert_eq!(r.lhs_squared, Ratio::from_integer(BigInt::from(1)));
    }

    #[test]
    fn all_ones_is_tight() {
        let c = vec![vec![int(1), int(1)], vec![int(1), int(1)]];
        let r = check_rc(&c, &[int(1), int(1)], &[int(1), int(1)]).unwrap();
        assert!(r.pass && r.certified);
        assert_eq!(r.lhs_squared, Ratio::from_integer(BigInt::from(16)));
        assert!((r.bound - 4.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_errors() {
        assert!(check_rc::<i64>(&[], &[], &[]).is_err());
        assert!(check_rc(&[vec![int(1)]], &[int(1), int(2)], &[int(1)]).is_err());
        assert!(check_rc(&[vec![int(1)], vec![int(1), int(1)]], &[int(1), int(2)], &[int(1)]).is_err());
    }

    #[test]
    fn irrational_moduli_are_bracketed() {
        // |1 + i| = sqrt(2): lhs^2 = |(1+i)|^2 = 2, rhs^2 = sqrt(2)^2 = 2. Equality
        // with an irrational R; the interval never separates the sides.
        let c = vec![vec![ComplexQ::new(Ratio::from_integer(1), Ratio::from_integer(1))]];
        let r = check_rc(&c, &[int(1)], &[int(1)]).unwrap();
        assert!(r.pass);
        // Strict case with irrational moduli.
        let c = vec![vec![
            ComplexQ::new(Ratio::from_integer(1), Ratio::from_integer(1)),
            ComplexQ::new(Ratio::from_integer(1), Ratio::from_integer(-1)),
        ]];
        let r = check_rc(&c, &[int(1)], &[int(1), int(1)]).unwrap();
        assert!(r.pass && r.certified);
    }

    #[test]
    fn sqrt_interval_brackets() {
        let two = Ratio::from_integer(BigInt::from(2));
        let (lo, hi) = sqrt_interval(&two, 64);
        assert!(&lo * &lo <= two && &hi * &hi >= two && lo < hi);
        let quarter = Ratio::new(BigInt::from(9), BigInt::from(4));
        let (lo, hi) = sqrt_interval(&quarter, 64);
        assert_eq!(lo, Ratio::new(BigInt::from(3), BigInt::from(2)));
        assert_eq!(lo, hi);
    }

    #[test]
    fn random_instances_pass() {
        let mut rng = SplitMix64::new(3);
        let draw = |rng: &mut SplitMix64| {
            let num = rng.below(11) as i64 - 5;
            let den = rng.range_inclusive(1, 4) as i64;
            Ratio::new(num, den)
        };
        for _ in 0..200 {
            let m = rng.range_inclusive(1, 8) as usize;
            let n = rng.range_inclusive(1, 8) as usize;
            let c: Vec<Vec<Q>> = (0..m)
                .map(|_| (0..n).map(|_| ComplexQ::new(draw(&mut rng), draw(&mut rng))).collect())
                .collect();
            let z: Vec<Q> = (0..m).map(|_| ComplexQ::new(draw(&mut rng), draw(&mut rng))).collect();
            let y: Vec<Q> = (0..n).map(|_| ComplexQ::new(draw(&mut rng), draw(&mut rng))).collect();
            assert!(check_rc(&c, &z, &y).unwrap().pass);
        }
    }
}
