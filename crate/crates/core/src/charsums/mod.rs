//! Character sums evaluated exactly through orthogonality.
//!
//! With `chi` the canonical additive character, `sum_{s} chi(s t) = q [t = 0]`
//! and `sum_{s != 0} chi(s t) = q [t = 0] - 1`. Every sum below is reduced to
//! point counts with these two identities, so the auxiliary variables are
//! never enumerated and every result is an exact integer.

mod halfpower;
mod lemmas;
mod rc;
mod terms;

use std::collections::{BTreeMap, HashMap};

use num_rational::Ratio;

pub use halfpower::HalfPower;
pub use lemmas::{check_pair_lemma, check_tsum_lemma, lambda_factor, LemmaCheck, LemmaKind};
pub use rc::{check_rc, ComplexQ, RcCheck};
pub use terms::{binary_tuples, term_structure, TermStructure};

use crate::algebra::{Element, Structure};
use crate::chains::{chain_count_dp, neighbor_count, pair_count, ChainSpec, Policy};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::pointsets::{space_points, Point, PointSet};
use crate::scalar::ExactInt;

/// Domain of summation for [`s_l2`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Set,
    WholeSpace,
}

/// `S_{E,alpha}(x) = sum_{s != 0} sum_{y in E} chi(s (x.y - alpha)) = q n_alpha(x) - |E|`.
pub fn s_sum<I: ExactInt>(e: &PointSet, x: &Point, alpha: Element) -> Result<I> {
    let n = neighbor_count(e, x, alpha)?;
    s_from_count(e.structure().q(), n, e.len())
}

fn s_from_count<I: ExactInt>(q: u32, n: u64, size: usize) -> Result<I> {
    I::lift(q as u64)?.mul_exact(&I::lift(n)?)?.sub_exact(&I::lift(size as u64)?)
}

/// `sum_x |S_{E,alpha}(x)|^2` over `E` or over the whole space.
pub fn s_l2<I: ExactInt>(e: &PointSet, alpha: Element, domain: Domain, limits: &Limits) -> Result<I> {
    let q = e.structure().q();
    let square = |x: &Point| -> Result<I> {
        let v: I = s_from_count(q, neighbor_count(e, x, alpha)?, e.len())?;
        v.mul_exact(&v)
    };
    match domain {
        Domain::Set => e.iter().try_fold(I::zero(), |acc, x| acc.add_exact(&square(x)?)),
        Domain::WholeSpace => {
            let pts = space_points(e.structure(), e.dim(), limits)?;
            if e.is_empty() {
                return Ok(I::zero());
            }
            pts.map(|x| square(&x)).try_fold(I::zero(), |acc, v| acc.add_exact(&v?))
        }
    }
}

/// `T(E) = sum_{s, s' != 0} sum_{x, y, z} chi(s (x.y - a)) chi(s' (y.z - b))`
/// `     = q^2 C_2 - q |E| (N_a + N_b) + |E|^3`
/// where `C_2` is the all-tuples 2-chain count of type `(a, b)`.
pub fn t_sum<I: ExactInt>(e: &PointSet, a: Element, b: Element) -> Result<I> {
    let q = I::lift(e.structure().q() as u64)?;
    let size = I::lift(e.len() as u64)?;
    let c2: I = chain_count_dp(e, &[a, b], Policy::AllTuples)?;
    let na = I::lift(pair_count(e, a))?;
    let nb = I::lift(pair_count(e, b))?;
    let first = q.mul_exact(&q)?.mul_exact(&c2)?;
    let second = q.mul_exact(&size)?.mul_exact(&na.add_exact(&nb)?)?;
    first.sub_exact(&second)?.add_exact(&size.pow_exact(3)?)
}

/// Remainder terms of the orthogonality expansion of a k-chain count.
///
/// Supports are bitmasks over the constraints: bit `i` set means the
/// auxiliary variable of the link `x_{i+1} . x_{i+2} = alpha_{i+1}` is
/// nonzero. Mask `0` carries the main term.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport<I: ExactInt> {
    pub k: usize,
    pub q: u32,
    pub set_size: usize,
    pub alphas: Vec<Element>,
    /// `q^k * count`, reconstructed as the sum of all scaled terms.
    pub scaled_total: I,
    /// `q^k * R_J` for every support `J`.
    pub scaled_terms: BTreeMap<u32, I>,
    /// `R_n = sum_{|J| = n} R_J` for `n = 0..=k`; `R_0` is the main term.
    pub grouped: Vec<Ratio<I>>,
    /// `|E|^{k+1}`, i.e. the scaled main term.
    pub scaled_main: I,
    /// `scaled_total / q^k`.
    pub count: I,
}

impl<I: ExactInt> DecompositionReport<I> {
    pub fn main_term(&self) -> &Ratio<I> {
        &self.grouped[0]
    }
}

/// Splits `q^k |Pi_alpha(E)|` by the support of the auxiliary variables.
///
/// For a support `J`, `q^k R_J = sum_{J' in J} (-1)^{|J \ J'|} F(J')` with
/// `F(J') = q^{|J'|} #{tuples satisfying the links in J'}`. The tuples of
/// `F(J')` factor over the maximal runs of consecutive links in `J'`, each
/// run counted with the transfer recurrence, times `|E|` per free point.
pub fn decompose<I: ExactInt>(e: &PointSet, spec: &ChainSpec, limits: &Limits) -> Result<DecompositionReport<I>> {
    if spec.policy != Policy::AllTuples {
        return Err(Error::UnsupportedPolicy(spec.policy.name()));
    }
    spec.validate(e.structure())?;
    let k = spec.k();
    if k > limits.max_decompose_k {
        return Err(Error::ChainTooLong { k, cap: limits.max_decompose_k });
    }
    let q = e.structure().q();
    let q_i = I::lift(q as u64)?;
    let size = I::lift(e.len() as u64)?;
    let full = 1u32 << k;

    let mut runs: HashMap<(usize, usize), I> = HashMap::new();
    let mut f = Vec::with_capacity(full as usize);
    for mask in 0..full {
        let mut value = I::one();
        let mut touched = 0usize;
        let mut i = 0;
        while i < k {
            if mask >> i & 1 == 0 {
                i += 1;
                continue;
            }
            let start = i;
            while i < k && mask >> i & 1 == 1 {
                i += 1;
            }
            touched += i - start + 1;
            if !runs.contains_key(&(start, i)) {
                let c = chain_count_dp::<I>(e, &spec.alphas[start..i], Policy::AllTuples)?;
                runs.insert((start, i), c);
            }
            value = value.mul_exact(&runs[&(start, i)])?;
        }
        let free = (k + 1 - touched) as u32;
        value = value.mul_exact(&size.pow_exact(free)?)?;
        value = value.mul_exact(&q_i.pow_exact(mask.count_ones())?)?;
        f.push(value);
    }

    // Moebius inversion over the subset lattice.
    let mut g = f;
    for bit in 0..k {
        for mask in 0..full {
            if mask >> bit & 1 == 1 {
                let lower = g[(mask ^ (1 << bit)) as usize].clone();
                g[mask as usize] = g[mask as usize].sub_exact(&lower)?;
            }
        }
    }

    let scaled_total = g.iter().try_fold(I::zero(), |acc, v| acc.add_exact(v))?;
    let qk = q_i.pow_exact(k as u32)?;
    let (count, rem) = scaled_total.div_rem(&qk);
    if !rem.is_zero() {
        return Err(Error::Precondition("scaled total not divisible by q^k".into()));
    }
    let mut grouped_num = vec![I::zero(); k + 1];
    for (mask, v) in g.iter().enumerate() {
        let n = (mask as u32).count_ones() as usize;
        grouped_num[n] = grouped_num[n].add_exact(v)?;
    }
    let grouped = grouped_num.into_iter().map(|n| Ratio::new(n, qk.clone())).collect();
    Ok(DecompositionReport {
        k,
        q,
        set_size: e.len(),
        alphas: spec.alphas.clone(),
        scaled_total,
        scaled_terms: g.into_iter().enumerate().map(|(m, v)| (m as u32, v)).collect(),
        grouped,
        scaled_main: size.pow_exact(k as u32 + 1)?,
        count,
    })
}

/// Direct evaluation of `sum_{s != 0} sum_{y in E} chi(s (x.y - alpha))` as a
/// complex number from character indices. Cross-validation only.
pub fn s_sum_by_characters(e: &PointSet, x: &Point, alpha: Element) -> (f64, f64) {
    let s: &Structure = e.structure();
    let big_q = s.character_modulus() as f64;
    let mut re = 0.0;
    let mut im = 0.0;
    for t in s.elements().filter(|t| t.0 != 0) {
        for y in e.iter() {
            let arg = s.mul(t, s.sub(s.dot_unchecked(x, y), alpha));
            let theta = std::f64::consts::TAU * s.character_index(arg) as f64 / big_q;
            re += theta.cos();
            im += theta.sin();
        }
    }
    (re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::count_chains_dp;
    use crate::pointsets::sample_uniform;
    use crate::rng::SplitMix64;
    use crate::Int;

    fn f3() -> Structure {
        Structure::prime_field(3).unwrap()
    }

    fn full_f3_2() -> PointSet {
        PointSet::full_space(f3(), 2, &Limits::default()).unwrap()
    }

    fn small_set() -> PointSet {
        PointSet::from_reprs(f3(), 2, &[&[1, 0], &[0, 1], &[1, 1]]).unwrap()
    }

    fn z9_line() -> PointSet {
        let z9 = Structure::integer_ring(3, 2).unwrap();
        PointSet::new(z9, 2, (0..9u32).map(|a| Point::from_reprs(&[a, (1 + 3 * a) % 9]))).unwrap()
    }

    #[test]
    fn s_sum_examples() {
        let full = full_f3_2();
        assert_eq!(s_sum::<Int>(&full, &Point::from_reprs(&[1, 0]), Element(1)).unwrap(), 0);
        assert_eq!(s_sum::<Int>(&full, &Point::zero(2), Element(1)).unwrap(), -9);
        assert_eq!(s_sum::<Int>(&z9_line(), &Point::from_reprs(&[3, 2]), Element(2)).unwrap(), 72);
    }

    #[test]
    fn s_sum_matches_root_of_unity_sums() {
        let structures = [
            Structure::prime_field(5).unwrap(),
            Structure::extension_field(3, 2).unwrap(),
            Structure::integer_ring(3, 2).unwrap(),
            Structure::integer_ring(5, 2).unwrap(),
        ];
        let mut rng = SplitMix64::new(11);
        for case in 0..100 {
            let s = &structures[case % structures.len()];
            let space = (s.q() as u64).pow(2);
            let n = rng.range_inclusive(0, space);
            let e = sample_uniform(s, 2, n, rng.next_u64(), &Limits::default()).unwrap();
            let x = Point::from_reprs(&[rng.below(s.q() as u64) as u32, rng.below(s.q() as u64) as u32]);
            let alpha = Element(rng.below(s.q() as u64) as u32);
            let exact: Int = s_sum(&e, &x, alpha).unwrap();
            let (re, im) = s_sum_by_characters(&e, &x, alpha);
            assert!((re - exact as f64).abs() < 1e-6, "{s} case {case}: {re} vs {exact}");
            assert!(im.abs() < 1e-6);
        }
    }

    #[test]
    fn s_l2_examples() {
        let l = Limits::default();
        let empty = PointSet::empty(f3(), 2);
        assert_eq!(s_l2::<Int>(&empty, Element(1), Domain::Set, &l).unwrap(), 0);
        assert_eq!(s_l2::<Int>(&empty, Element(1), Domain::WholeSpace, &l).unwrap(), 0);
        assert_eq!(s_l2::<Int>(&full_f3_2(), Element(1), Domain::WholeSpace, &l).unwrap(), 81);
        let one = PointSet::from_reprs(f3(), 2, &[&[1, 0]]).unwrap();
        assert_eq!(s_l2::<Int>(&one, Element(1), Domain::WholeSpace, &l).unwrap(), 18);
        let tight = Limits { max_space: 8, ..Limits::default() };
        assert!(matches!(
            s_l2::<Int>(&one, Element(1), Domain::WholeSpace, &tight),
            Err(Error::SpaceTooLarge { .. })
        ));
    }

    /// Brute-force T by enumerating the auxiliary variables as roots of unity.
    fn t_sum_by_characters(e: &PointSet, a: Element, b: Element) -> f64 {
        let s = e.structure();
        let big_q = s.character_modulus() as f64;
        let mut total = 0.0;
        for s1 in s.elements().filter(|t| t.0 != 0) {
            for s2 in s.elements().filter(|t| t.0 != 0) {
                for x in e.iter() {
                    for y in e.iter() {
                        for z in e.iter() {
                            let u = s.mul(s1, s.sub(s.dot_unchecked(x, y), a));
                            let v = s.mul(s2, s.sub(s.dot_unchecked(y, z), b));
                            let idx = s.character_index(s.add(u, v));
                            total += (std::f64::consts::TAU * idx as f64 / big_q).cos();
                        }
                    }
                }
            }
        }
        total
    }

    #[test]
    fn t_sum_examples() {
        let full = full_f3_2();
        assert_eq!(t_sum::<Int>(&full, Element(1), Element(1)).unwrap(), 81);
        assert_eq!(t_sum::<Int>(&PointSet::empty(f3(), 2), Element(1), Element(1)).unwrap(), 0);
        // C_2 for the three-point set, by enumeration of its 27 triples.
        let e = small_set();
        let pts = e.points();
        let mut c2 = 0;
        for x in pts {
            for y in pts {
                for z in pts {
                    if f3().dot_unchecked(x, y) == Element(1) && f3().dot_unchecked(y, z) == Element(1) {
                        c2 += 1;
                    }
                }
            }
        }
        assert_eq!(c2, 12);
        let expected = 9 * c2 - 3 * 3 * (6 + 6) + 27;
        assert_eq!(t_sum::<Int>(&e, Element(1), Element(1)).unwrap(), expected);
        assert_eq!(expected, 27);
    }

    #[test]
    fn t_sum_matches_character_enumeration() {
        let structures = [Structure::prime_field(3).unwrap(), Structure::extension_field(3, 2).unwrap()];
        let z9 = Structure::integer_ring(3, 2).unwrap();
        for (i, s) in structures.iter().chain(std::iter::once(&z9)).enumerate() {
            for seed in 0..4 {
                let e = sample_uniform(s, 2, 5, seed * 7 + i as u64, &Limits::default()).unwrap();
                for (a, b) in [(1, 1), (0, 2), (2, 0)] {
                    let exact: Int = t_sum(&e, Element(a), Element(b)).unwrap();
                    let direct = t_sum_by_characters(&e, Element(a), Element(b));
                    assert!((direct - exact as f64).abs() < 1e-6, "{s}: {direct} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn decompose_k1_full_space() {
        let r = decompose::<Int>(&full_f3_2(), &ChainSpec::all_tuples(&[1]).unwrap(), &Limits::default()).unwrap();
        assert_eq!(r.scaled_terms[&0], 81);
        assert_eq!(r.scaled_terms[&1], -9);
        assert_eq!(r.scaled_total, 72);
        assert_eq!(r.count, 24);
    }

    #[test]
    fn decompose_empty_and_errors() {
        let l = Limits::default();
        let r = decompose::<Int>(&PointSet::empty(f3(), 2), &ChainSpec::all_tuples(&[1, 2, 0]).unwrap(), &l).unwrap();
        assert!(r.scaled_terms.values().all(|v| *v == 0));
        let long = ChainSpec::all_tuples(&[1; 17]).unwrap();
        assert_eq!(
            decompose::<Int>(&small_set(), &long, &l).unwrap_err(),
            Error::ChainTooLong { k: 17, cap: 16 }
        );
        let adj = ChainSpec::all_tuples(&[1]).unwrap().with_policy(Policy::AdjacentDistinct);
        assert!(decompose::<Int>(&small_set(), &adj, &l).is_err());
    }

    /// Enumerates every auxiliary vector supported on `mask` and every tuple.
    fn scaled_term_by_characters(e: &PointSet, alphas: &[Element], mask: u32) -> f64 {
        let s = e.structure();
        let k = alphas.len();
        let big_q = s.character_modulus() as f64;
        let nonzero: Vec<Element> = s.elements().filter(|t| t.0 != 0).collect();
        let support: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let n = e.len();
        let mut total = 0.0;
        let mut choice = vec![0usize; support.len()];
        loop {
            let mut idx = vec![0usize; k + 1];
            'tuples: loop {
                let mut arg = Element(0);
                for (slot, &i) in support.iter().enumerate() {
                    let x = &e.points()[idx[i]];
                    let y = &e.points()[idx[i + 1]];
                    let diff = s.sub(s.dot_unchecked(x, y), alphas[i]);
                    arg = s.add(arg, s.mul(nonzero[choice[slot]], diff));
                }
                total += (std::f64::consts::TAU * s.character_index(arg) as f64 / big_q).cos();
                let mut pos = 0;
                loop {
                    if pos > k {
                        break 'tuples;
                    }
                    idx[pos] += 1;
                    if idx[pos] < n {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
            }
            let mut pos = 0;
            loop {
                if pos == support.len() {
                    return total;
                }
                choice[pos] += 1;
                if choice[pos] < nonzero.len() {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn decompose_terms_match_character_enumeration() {
        let cases = [
            (Structure::prime_field(3).unwrap(), vec![1u32, 2, 0]),
            (Structure::extension_field(3, 2).unwrap(), vec![1, 0]),
            (Structure::integer_ring(3, 2).unwrap(), vec![1, 2]),
        ];
        for (s, alphas) in cases {
            let e = sample_uniform(&s, 2, 4, 5, &Limits::default()).unwrap();
            let spec = ChainSpec::all_tuples(&alphas).unwrap();
            let r = decompose::<Int>(&e, &spec, &Limits::default()).unwrap();
            for (&mask, &v) in &r.scaled_terms {
                let direct = scaled_term_by_characters(&e, &spec.alphas, mask);
                assert!((direct - v as f64).abs() < 1e-6, "{s} mask {mask}: {direct} vs {v}");
            }
        }
    }

    #[test]
    fn decompose_matches_dp_and_closed_forms() {
        let z9 = Structure::integer_ring(3, 2).unwrap();
        let f5 = Structure::prime_field(5).unwrap();
        for (s, seed) in [(f3(), 1u64), (f5.clone(), 2), (z9, 3), (f5, 4)] {
            let space = (s.q() as u64).pow(2);
            let e = sample_uniform(&s, 2, space / 2, seed, &Limits::default()).unwrap();
            let spec = ChainSpec::all_tuples(&[1, 2, 1]).unwrap();
            let r = decompose::<Int>(&e, &spec, &Limits::default()).unwrap();
            let dp = count_chains_dp::<Int>(&e, &spec).unwrap().count;
            let q = s.q() as Int;
            let n = e.len() as Int;
            assert_eq!(r.scaled_total, q.pow(3) * dp);
            assert_eq!(r.scaled_terms[&0], n.pow(4));
            assert_eq!(r.grouped[0], Ratio::new(n.pow(4), q.pow(3)));
            let pair = |a: u32| q * pair_count(&e, Element(a)) as Int - n * n;
            // Single link: |E|^2 (q N - |E|^2).
            assert_eq!(r.scaled_terms[&0b001], n * n * pair(1));
            assert_eq!(r.scaled_terms[&0b010], n * n * pair(2));
            // Consecutive links: |E| T; separated links factor.
            assert_eq!(r.scaled_terms[&0b011], n * t_sum::<Int>(&e, Element(1), Element(2)).unwrap());
            assert_eq!(r.scaled_terms[&0b101], pair(1) * pair(1));
            let sum: Ratio<Int> = r.grouped.iter().sum();
            assert_eq!(sum, Ratio::from_integer(dp));
        }
    }
}
