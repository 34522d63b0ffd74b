//! Threshold catalog and seeded sampling experiments.
//!
//! A sweep samples uniform random sets at sizes tied to the threshold
//! `q^e` and compares the exact all-tuples count with the main term
//! `|E|^{k+1} / q^k`. Agreement "up to `1 + o(1)`" cannot be observed at
//! finite `q`; each cell instead carries a relative-error tolerance, which
//! is a reporting convention of this crate.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Element, Structure};
use crate::chains::{count_chains_brute, count_chains_dp, ChainSpec, CountReport, Policy};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::pointsets::{sample_uniform, PointSet};
use crate::rng::derive_seed;
use crate::scalar::{ratio_to_f64, to_big_ratio, ExactInt};
use crate::BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Setting {
    Field,
    Ring,
}

/// Which components of `alpha` may vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroPattern {
    AllZeroAllowed,
    SomeNonzero,
    AllNonzero,
}

impl ZeroPattern {
    /// The most specific pattern satisfied by `alphas`.
    pub fn of(alphas: &[Element]) -> Self {
        let nonzero = alphas.iter().filter(|a| a.0 != 0).count();
        if !alphas.is_empty() && nonzero == alphas.len() {
            ZeroPattern::AllNonzero
        } else if nonzero > 0 {
            ZeroPattern::SomeNonzero
        } else {
            ZeroPattern::AllZeroAllowed
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ZeroPattern::AllZeroAllowed => "all-zero-allowed",
            ZeroPattern::SomeNonzero => "some-nonzero",
            ZeroPattern::AllNonzero => "all-nonzero",
        }
    }
}

impl std::str::FromStr for ZeroPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-zero-allowed" | "any" => Ok(ZeroPattern::AllZeroAllowed),
            "some-nonzero" => Ok(ZeroPattern::SomeNonzero),
            "all-nonzero" | "nonzero" => Ok(ZeroPattern::AllNonzero),
            _ => Err(Error::Precondition(format!("unknown zero pattern {s:?}"))),
        }
    }
}

/// Size threshold `|E| ~ q^exponent` for the main-term asymptotic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub setting: Setting,
    pub d: u32,
    pub k: u32,
    /// Exponent of `p` in `q = p^l`; 1 for fields.
    pub l: u32,
    pub pattern: ZeroPattern,
    pub exponent: Ratio<i64>,
}

impl ThresholdSpec {
    /// `q^exponent` as a float; used only to choose sample sizes.
    pub fn threshold(&self, q: u32) -> f64 {
        (q as f64).powf(*self.exponent.numer() as f64 / *self.exponent.denom() as f64)
    }
}

/// Catalog of size thresholds.
///
/// Fields: `(d+k)/2`, or `(d+k-1)/2` when every `alpha_j` is nonzero. For
/// `k = 3` the sharper values `(d+3)/2`, `(d+2)/2`, `(d+1)/2` apply to no
/// nonzero component, at least one, and all three.
/// Rings `Z/p^l` with unit `alpha`: `(d(2l-1)+1)/(2l) + (k-2)/2`.
pub fn threshold_exponent(setting: Setting, d: u32, k: u32, l: u32, pattern: ZeroPattern) -> Result<ThresholdSpec> {
    if d == 0 {
        return Err(Error::Precondition("dimension must be positive".into()));
    }
    if k == 0 {
        return Err(Error::EmptyChain);
    }
    let (d64, k64) = (d as i64, k as i64);
    let exponent = match setting {
        Setting::Field => {
            let num = match (k, pattern) {
                (3, ZeroPattern::AllZeroAllowed) => d64 + 3,
                (3, ZeroPattern::SomeNonzero) => d64 + 2,
                (3, ZeroPattern::AllNonzero) => d64 + 1,
                (_, ZeroPattern::AllNonzero) => d64 + k64 - 1,
                _ => d64 + k64,
            };
            Ratio::new(num, 2)
        }
        Setting::Ring => {
            if l == 0 {
                return Err(Error::BadExponent(0));
            }
            if pattern != ZeroPattern::AllNonzero {
                return Err(Error::Precondition(
                    "the ring threshold needs every alpha_j to be a unit".into(),
                ));
            }
            let l64 = l as i64;
            Ratio::new(d64 * (2 * l64 - 1) + 1, 2 * l64) + Ratio::new(k64 - 2, 2)
        }
    };
    let l = if setting == Setting::Field { 1 } else { l };
    Ok(ThresholdSpec { setting, d, k, l, pattern, exponent })
}

/// Threshold for a concrete structure and type. Ring types must consist of
/// units.
pub fn threshold_for(s: &Structure, d: usize, alphas: &[Element]) -> Result<ThresholdSpec> {
    if s.is_field() {
        threshold_exponent(Setting::Field, d as u32, alphas.len() as u32, 1, ZeroPattern::of(alphas))
    } else {
        if let Some(a) = alphas.iter().find(|a| !s.is_unit(**a)) {
            return Err(Error::NotAUnit(a.0));
        }
        threshold_exponent(Setting::Ring, d as u32, alphas.len() as u32, s.e(), ZeroPattern::AllNonzero)
    }
}

/// All-tuples count against the main term.
pub fn ratio_report<I: ExactInt>(e: &PointSet, alphas: &[Element]) -> Result<CountReport<I>> {
    let spec = ChainSpec::new(alphas.to_vec(), Policy::AllTuples)?;
    count_chains_dp(e, &spec)
}

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSpec {
    pub structure: Structure,
    pub d: usize,
    pub alphas: Vec<Element>,
    pub size: u64,
}

impl CellSpec {
    /// Size `ceil(multiple * q^e)`, capped at `q^d`.
    pub fn at_threshold_multiple(structure: Structure, d: usize, alphas: Vec<Element>, multiple: f64) -> Result<Self> {
        let spec = threshold_for(&structure, d, &alphas)?;
        let space = (structure.q() as u64).saturating_pow(d as u32);
        let size = ((multiple * spec.threshold(structure.q())).ceil() as u64).min(space);
        Ok(CellSpec { structure, d, alphas, size })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub cells: Vec<CellSpec>,
    pub trials: u32,
    pub master_seed: u64,
    /// Largest admissible mean `|relative error|` per cell.
    pub tolerance: Ratio<i64>,
    /// Also count pairwise-distinct chains by brute force when
    /// `|E|^{k+1}` fits in `limits.brute_budget`.
    pub pairwise: bool,
    /// Cells whose estimated work `trials * k * |E|^2` exceeds this are skipped.
    pub cell_budget: u128,
    pub limits: Limits,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            cells: Vec::new(),
            trials: 1,
            master_seed: crate::rng::DEFAULT_SEED,
            tolerance: Ratio::new(1, 10),
            pairwise: false,
            cell_budget: 10_000_000_000,
            limits: Limits::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult<I: ExactInt> {
    pub trial: u32,
    pub seed: u64,
    pub count: I,
    pub main_term: Ratio<I>,
    pub relative_error: Ratio<I>,
    /// Pairwise-distinct count, when the brute-force budget allowed it.
    pub pairwise_count: Option<I>,
}

impl<I: ExactInt> TrialResult<I> {
    /// All-tuples count minus pairwise-distinct count.
    pub fn pairwise_delta(&self) -> Option<I> {
        self.pairwise_count.as_ref().map(|p| self.count.clone() - p.clone())
    }
}

/// Aggregates over the trials of a cell, exact.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub mean_error: BigRational,
    pub mean_abs_error: BigRational,
    pub min_error: BigRational,
    pub max_error: BigRational,
    /// `mean_abs_error <= tolerance`.
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult<I: ExactInt> {
    pub index: usize,
    pub structure: String,
    pub q: u32,
    pub d: usize,
    pub alphas: Vec<Element>,
    pub pattern: ZeroPattern,
    pub size: u64,
    /// `None` when no catalogued threshold applies (e.g. a non-unit ring type).
    pub threshold_exponent: Option<Ratio<i64>>,
    pub trials: Vec<TrialResult<I>>,
    pub summary: Option<CellSummary>,
    pub skipped: Option<String>,
}

impl<I: ExactInt> CellResult<I> {
    pub fn k(&self) -> usize {
        self.alphas.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport<I: ExactInt> {
    pub master_seed: u64,
    pub trials: u32,
    pub tolerance: Ratio<i64>,
    pub legend: String,
    pub cells: Vec<CellResult<I>>,
}

pub const SWEEP_LEGEND: &str = "relative error = (count - main) / main with main = |E|^(k+1) / q^k; \
a cell passes when the mean |relative error| over its trials is at most the tolerance. \
The tolerance is a finite-scale convention of this tool. Sizes are multiples of the \
threshold q^e, which is only meaningful up to constant factors.";

impl<I: ExactInt> SweepReport<I> {
    pub fn all_pass(&self) -> bool {
        self.cells.iter().all(|c| c.summary.as_ref().is_none_or(|s| s.pass))
    }

    /// One row per (cell, trial); skipped cells give one row with the reason.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "cell,structure,d,k,alphas,size,trial,seed,count,main_term,relative_error,pairwise_count,skipped\n",
        );
        for c in &self.cells {
            let alphas = c.alphas.iter().map(|a| a.0.to_string()).collect::<Vec<_>>().join(" ");
            let head = format!("{},{},{},{},{},{}", c.index, c.structure, c.d, c.k(), alphas, c.size);
            if let Some(reason) = &c.skipped {
                let _ = writeln!(out, "{head},,,,,,,{}", reason.replace(',', ";"));
                continue;
            }
            for t in &c.trials {
                let pw = t.pairwise_count.as_ref().map(|v| v.to_string()).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{head},{},{},{},{},{},{pw},",
                    t.trial, t.seed, t.count, t.main_term, t.relative_error
                );
            }
        }
        out
    }
}

fn summarize<I: ExactInt>(trials: &[TrialResult<I>], tolerance: &Ratio<i64>) -> CellSummary {
    let errs: Vec<BigRational> = trials.iter().map(|t| to_big_ratio(&t.relative_error)).collect();
    let n = BigRational::from_integer(BigInt::from(errs.len().max(1)));
    let sum: BigRational = errs.iter().cloned().sum();
    let abs_sum: BigRational = errs.iter().map(|e| e.abs()).sum();
    let mean_abs_error = abs_sum / &n;
    let tol = Ratio::new(BigInt::from(*tolerance.numer()), BigInt::from(*tolerance.denom()));
    CellSummary {
        mean_error: sum / &n,
        pass: mean_abs_error <= tol,
        mean_abs_error,
        min_error: errs.iter().min().cloned().unwrap_or_else(BigRational::zero),
        max_error: errs.iter().max().cloned().unwrap_or_else(BigRational::zero),
    }
}

fn run_trial<I: ExactInt>(cell: &CellSpec, config: &SweepConfig, trial: u32, seed: u64) -> Result<TrialResult<I>> {
    let e = sample_uniform(&cell.structure, cell.d, cell.size, seed, &config.limits)?;
    let report = ratio_report::<I>(&e, &cell.alphas)?;
    let mut pairwise_count = None;
    if config.pairwise {
        let spec = ChainSpec::new(cell.alphas.clone(), Policy::PairwiseDistinct)?;
        match count_chains_brute::<I>(&e, &spec, config.limits.brute_budget) {
            Ok(r) => pairwise_count = Some(r.count),
            Err(Error::BudgetExceeded { .. }) => {}
            Err(err) => return Err(err),
        }
    }
    Ok(TrialResult {
        trial,
        seed,
        count: report.count,
        main_term: report.main_term,
        relative_error: report.relative_error,
        pairwise_count,
    })
}

fn run_cell<I: ExactInt>(index: usize, cell: &CellSpec, config: &SweepConfig) -> CellResult<I> {
    let mut result = CellResult {
        index,
        structure: cell.structure.literal(),
        q: cell.structure.q(),
        d: cell.d,
        alphas: cell.alphas.clone(),
        pattern: ZeroPattern::of(&cell.alphas),
        size: cell.size,
        threshold_exponent: threshold_for(&cell.structure, cell.d, &cell.alphas).ok().map(|t| t.exponent),
        trials: Vec::new(),
        summary: None,
        skipped: None,
    };
    let work = (config.trials as u128)
        .saturating_mul(cell.alphas.len() as u128)
        .saturating_mul((cell.size as u128).saturating_mul(cell.size as u128));
    if work > config.cell_budget {
        result.skipped = Some(Error::BudgetExceeded { required: work, budget: config.cell_budget }.to_string());
        return result;
    }
    let trials: Result<Vec<TrialResult<I>>> = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(cell, config, t, derive_seed(config.master_seed, index as u64, t as u64)))
        .collect();
    match trials {
        Ok(trials) => {
            result.summary = Some(summarize(&trials, &config.tolerance));
            result.trials = trials;
        }
        Err(err) => result.skipped = Some(err.to_string()),
    }
    result
}

/// Runs every cell; cells that fail their budget or preconditions are
/// skipped with a reason and do not affect the others.
pub fn threshold_sweep<I: ExactInt>(config: &SweepConfig) -> Result<SweepReport<I>> {
    if config.trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let cells = config.cells.par_iter().enumerate().map(|(i, c)| run_cell(i, c, config)).collect();
    Ok(SweepReport {
        master_seed: config.master_seed,
        trials: config.trials,
        tolerance: config.tolerance,
        legend: SWEEP_LEGEND.to_string(),
        cells,
    })
}

/// `ceil(2(k+1)/3)`.
pub fn cap_exponent(k: usize) -> u32 {
    (2 * (k as u32 + 1)).div_ceil(3)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallSetReport<I: ExactInt> {
    pub k: usize,
    pub set_size: usize,
    pub count: I,
    pub cap_exponent: u32,
    /// `count / |E|^cap_exponent`.
    pub ratio: Ratio<I>,
    /// `count / |E|^2`, for `k = 2`.
    pub ratio_square: Option<Ratio<I>>,
}

impl<I: ExactInt> SmallSetReport<I> {
    pub fn ratio_f64(&self) -> f64 {
        ratio_to_f64(&self.ratio)
    }
}

/// Chain count of a planar set against `|E|^{ceil(2(k+1)/3)}`.
pub fn smallset_report<I: ExactInt>(e: &PointSet, alphas: &[Element]) -> Result<SmallSetReport<I>> {
    if e.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: e.dim() });
    }
    if !e.structure().is_field() {
        return Err(Error::Precondition("the small-set bound is stated over fields".into()));
    }
    if alphas.iter().any(|a| a.0 == 0) {
        return Err(Error::Precondition("every alpha_j must be nonzero".into()));
    }
    let report = ratio_report::<I>(e, alphas)?;
    let k = alphas.len();
    let cap = cap_exponent(k);
    let n = I::lift(e.len() as u64)?;
    let ratio_of = |exp: u32| -> Result<Ratio<I>> {
        let den = n.pow_exact(exp)?;
        Ok(if den.is_zero() { Ratio::zero() } else { Ratio::new(report.count.clone(), den) })
    };
    Ok(SmallSetReport {
        k,
        set_size: e.len(),
        cap_exponent: cap,
        ratio: ratio_of(cap)?,
        ratio_square: if k == 2 { Some(ratio_of(2)?) } else { None },
        count: report.count,
    })
}
