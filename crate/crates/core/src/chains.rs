//! Pair counts, neighbour counts and k-chain counts.
//!
//! [`count_chains_dp`] runs the transfer recurrence
//! `c_1(x) = 1`, `c_{j+1}(y) = sum_{x : x.y = alpha_j} c_j(x)` and is the
//! production path. [`count_chains_brute`] enumerates tuples directly and is
//! the only path that honours [`Policy::PairwiseDistinct`].

use std::collections::HashMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Element, Structure};
use crate::error::{Error, Result};
use crate::pointsets::{Point, PointSet};
use crate::scalar::ExactInt;

/// Above this many ordered pairs the neighbour lists are not materialized.
const LINK_PAIR_LIMIT: usize = 1 << 26;

/// Which coincidences among the points of a chain are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    /// Every tuple of `E^{k+1}` counts.
    AllTuples,
    /// Consecutive points must differ.
    AdjacentDistinct,
    /// All `k + 1` points must differ.
    PairwiseDistinct,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::AllTuples => "all-tuples",
            Policy::AdjacentDistinct => "adjacent-distinct",
            Policy::PairwiseDistinct => "pairwise-distinct",
        }
    }
}

impl Default for Policy {
    fn default() -> Self {
        Policy::AllTuples
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" | "all-tuples" => Ok(Policy::AllTuples),
            "adjacent" | "adjacent-distinct" => Ok(Policy::AdjacentDistinct),
            "pairwise" | "pairwise-distinct" | "distinct" => Ok(Policy::PairwiseDistinct),
            _ => Err(Error::Precondition(format!("unknown policy {s:?}"))),
        }
    }
}

/// The chain type `alpha = (alpha_1, ..., alpha_k)` and distinctness policy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSpec {
    pub alphas: Vec<Element>,
    pub policy: Policy,
}

impl ChainSpec {
    pub fn new(alphas: Vec<Element>, policy: Policy) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::EmptyChain);
        }
        Ok(ChainSpec { alphas, policy })
    }

    pub fn all_tuples(alphas: &[u32]) -> Result<Self> {
        Self::new(alphas.iter().map(|&a| Element(a)).collect(), Policy::AllTuples)
    }

    pub fn with_policy(&self, policy: Policy) -> Self {
        ChainSpec { alphas: self.alphas.clone(), policy }
    }

    pub fn k(&self) -> usize {
        self.alphas.len()
    }

    pub fn reversed(&self) -> Self {
        ChainSpec { alphas: self.alphas.iter().rev().copied().collect(), policy: self.policy }
    }

    pub fn validate(&self, s: &Structure) -> Result<()> {
        match self.alphas.iter().find(|a| !s.contains(**a)) {
            Some(a) => Err(Error::ElementOutOfRange { repr: a.0 as u64, q: s.q() as u64 }),
            None => Ok(()),
        }
    }
}

/// Where a count came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub structure: String,
    pub dim: usize,
    pub set_size: usize,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn of(e: &PointSet) -> Self {
        Provenance {
            structure: e.structure().literal(),
            dim: e.dim(),
            set_size: e.len(),
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountReport<I: ExactInt> {
    pub count: I,
    /// `|E|^{k+1} / q^k`.
    pub main_term: Ratio<I>,
    /// `(count - main_term) / main_term`, zero when the main term is zero.
    pub relative_error: Ratio<I>,
    pub k: usize,
    pub alphas: Vec<Element>,
    pub policy: Policy,
    pub provenance: Provenance,
}

impl<I: ExactInt> CountReport<I> {
    pub fn build(e: &PointSet, spec: &ChainSpec, count: I) -> Result<Self> {
        let main_term = main_term::<I>(e.len() as u64, e.structure().q() as u64, spec.k())?;
        let relative_error = relative_error(&count, &main_term)?;
        Ok(CountReport {
            count,
            main_term,
            relative_error,
            k: spec.k(),
            alphas: spec.alphas.clone(),
            policy: spec.policy,
            provenance: Provenance::of(e),
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.provenance.seed = Some(seed);
        self
    }
}

/// `n^{k+1} / q^k` as an exact ratio.
pub fn main_term<I: ExactInt>(n: u64, q: u64, k: usize) -> Result<Ratio<I>> {
    let num = I::lift(n)?.pow_exact(k as u32 + 1)?;
    let den = I::lift(q)?.pow_exact(k as u32)?;
    Ok(Ratio::new(num, den))
}

pub fn relative_error<I: ExactInt>(count: &I, main: &Ratio<I>) -> Result<Ratio<I>> {
    if main.is_zero() {
        return Ok(Ratio::zero());
    }
    // (count * den - num) / num
    let num = count.mul_exact(main.denom())?.sub_exact(main.numer())?;
    Ok(Ratio::new(num, main.numer().clone()))
}

/// Ordered pairs `(x, y)` in `E^2` (with `x = y` allowed) with `x . y = gamma`.
pub fn pair_count(e: &PointSet, gamma: Element) -> u64 {
    let s = e.structure();
    e.points()
        .par_iter()
        .map(|x| e.iter().filter(|y| s.dot_unchecked(x, y) == gamma).count() as u64)
        .sum()
}

/// `n_gamma(x) = |{ y in E : x . y = gamma }|`.
pub fn neighbor_count(e: &PointSet, x: &Point, gamma: Element) -> Result<u64> {
    e.check_point(x)?;
    let s = e.structure();
    Ok(e.iter().filter(|y| s.dot_unchecked(x, y) == gamma).count() as u64)
}

/// `n_gamma(x)` for every `x` of `eval`, in the order of `eval`.
pub fn neighbor_counts(e: &PointSet, gamma: Element, eval: &PointSet) -> Result<Vec<(Point, u64)>> {
    e.check_compatible(eval)?;
    let s = e.structure();
    Ok(eval
        .points()
        .par_iter()
        .map(|x| (x.clone(), e.iter().filter(|y| s.dot_unchecked(x, y) == gamma).count() as u64))
        .collect())
}

/// For each distinct alpha, `links[y]` lists the `x` with `x . y = alpha`.
type Links = HashMap<Element, Vec<Vec<u32>>>;

fn build_links(e: &PointSet, alphas: &[Element]) -> Links {
    let s = e.structure();
    let n = e.len();
    let mut wanted: Vec<Element> = alphas.to_vec();
    wanted.sort_unstable();
    wanted.dedup();
    let rows: Vec<Vec<(usize, u32)>> = e
        .points()
        .par_iter()
        .map(|y| {
            e.iter()
                .enumerate()
                .filter_map(|(xi, x)| {
                    let d = s.dot_unchecked(x, y);
                    wanted.binary_search(&d).ok().map(|slot| (slot, xi as u32))
                })
                .collect()
        })
        .collect();
    let mut links: Links = wanted.iter().map(|&a| (a, vec![Vec::new(); n])).collect();
    for (yi, row) in rows.into_iter().enumerate() {
        for (slot, xi) in row {
            links.get_mut(&wanted[slot]).expect("slot")[yi].push(xi);
        }
    }
    links
}

/// Raw transfer-recurrence count.
pub fn chain_count_dp<I: ExactInt>(e: &PointSet, alphas: &[Element], policy: Policy) -> Result<I> {
    chain_count_dp_with(e, alphas, policy, LINK_PAIR_LIMIT)
}

fn chain_count_dp_with<I: ExactInt>(
    e: &PointSet,
    alphas: &[Element],
    policy: Policy,
    link_limit: usize,
) -> Result<I> {
    if alphas.is_empty() {
        return Err(Error::EmptyChain);
    }
    let skip_loops = match policy {
        Policy::AllTuples => false,
        Policy::AdjacentDistinct => true,
        Policy::PairwiseDistinct => return Err(Error::UnsupportedPolicy(policy.name())),
    };
    let n = e.len();
    if n == 0 {
        return Ok(I::zero());
    }
    let s = e.structure();
    let pts = e.points();
    let links = (n.saturating_mul(n) <= link_limit).then(|| build_links(e, alphas));
    let mut layer: Vec<I> = vec![I::one(); n];
    for &alpha in alphas {
        let next: Result<Vec<I>> = (0..n)
            .into_par_iter()
            .map(|yi| {
                let mut acc = I::zero();
                let mut add = |xi: usize| -> Result<()> {
                    if !(skip_loops && xi == yi) && !layer[xi].is_zero() {
                        acc = acc.add_exact(&layer[xi])?;
                    }
                    Ok(())
                };
                match &links {
                    Some(l) => {
                        for &xi in &l[&alpha][yi] {
                            add(xi as usize)?;
                        }
                    }
                    None => {
                        for xi in 0..n {
                            if s.dot_unchecked(&pts[xi], &pts[yi]) == alpha {
                                add(xi)?;
                            }
                        }
                    }
                }
                Ok(acc)
            })
            .collect();
        layer = next?;
    }
    layer.iter().try_fold(I::zero(), |acc, c| acc.add_exact(c))
}

/// Chain count by the transfer recurrence; all-tuples and adjacent-distinct
/// policies only. Cost `O(k |E|^2)`.
pub fn count_chains_dp<I: ExactInt>(e: &PointSet, spec: &ChainSpec) -> Result<CountReport<I>> {
    spec.validate(e.structure())?;
    let count = chain_count_dp::<I>(e, &spec.alphas, spec.policy)?;
    CountReport::build(e, spec, count)
}

/// Exhaustive tuple enumeration, pruned on the first failed constraint.
///
/// Refuses to run when `|E|^{k+1}` exceeds `budget`.
pub fn count_chains_brute<I: ExactInt>(e: &PointSet, spec: &ChainSpec, budget: u128) -> Result<CountReport<I>> {
    spec.validate(e.structure())?;
    let k = spec.k();
    if k == 0 {
        return Err(Error::EmptyChain);
    }
    let n = e.len() as u128;
    let required = (0..=k).try_fold(1u128, |acc, _| acc.checked_mul(n)).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let pts = e.points();
    let s = e.structure();
    let count: u64 = (0..pts.len())
        .into_par_iter()
        .map(|first| {
            let mut tuple = Vec::with_capacity(k + 1);
            tuple.push(first);
            extend(s, pts, &spec.alphas, spec.policy, &mut tuple)
        })
        .sum();
    CountReport::build(e, spec, I::lift(count)?)
}

fn extend(s: &Structure, pts: &[Point], alphas: &[Element], policy: Policy, tuple: &mut Vec<usize>) -> u64 {
    let j = tuple.len() - 1;
    if j == alphas.len() {
        return 1;
    }
    let last = tuple[j];
    let mut total = 0;
    for next in 0..pts.len() {
        if s.dot_unchecked(&pts[last], &pts[next]) != alphas[j] {
            continue;
        }
        let clash = match policy {
            Policy::AllTuples => false,
            Policy::AdjacentDistinct => next == last,
            Policy::PairwiseDistinct => tuple.contains(&next),
        };
        if clash {
            continue;
        }
        tuple.push(next);
        total += extend(s, pts, alphas, policy, tuple);
        tuple.pop();
    }
    total
}

/// Number of chains `x -> y` restricted to `x in A`, `y in B`, `z in C` for
/// a 2-chain of type `(alpha, beta)`.
pub fn restricted_two_chains(
    s: &Structure,
    a: &[Point],
    b: &[Point],
    c: &[Point],
    alpha: Element,
    beta: Element,
) -> u64 {
    let mut total = 0;
    for y in b {
        let left = a.iter().filter(|x| s.dot_unchecked(x, y) == alpha).count() as u64;
        let right = c.iter().filter(|z| s.dot_unchecked(y, z) == beta).count() as u64;
        total += left * right;
    }
    total
}
