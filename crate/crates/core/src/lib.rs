//! Exact counting of dot-product k-chains.
//!
//! Given a set `E` of points in `F_q^d` or `(Z/p^l)^d` and a type
//! `alpha = (alpha_1, ..., alpha_k)`, a k-chain is a tuple
//! `(x_1, ..., x_{k+1})` of points of `E` with `x_j . x_{j+1} = alpha_j`.
//! This crate counts chains exactly, splits the count into the main term
//! `|E|^{k+1} / q^k` plus remainder terms indexed by the support of the
//! auxiliary character variables, checks the standard character-sum bounds
//! on those remainders, and generates the extremal configurations.

pub mod algebra;
pub mod chains;
pub mod charsums;
pub mod constructions;
pub mod error;
pub mod experiments;
pub mod limits;
pub mod pointsets;
pub mod rng;
pub mod scalar;

pub use algebra::{Element, Structure, StructureKind};
pub use chains::{ChainSpec, Policy};
pub use error::{Error, Result};
pub use limits::Limits;
pub use pointsets::{Point, PointSet};
pub use scalar::ExactInt;

/// Default exact integer.
pub type Int = i128;
/// Default exact rational.
pub type Rational = num_rational::Ratio<Int>;
/// Arbitrary-precision rational.
pub type BigRational = num_rational::Ratio<num_bigint::BigInt>;

pub type CountReport = chains::CountReport<Int>;
pub type DecompositionReport = charsums::DecompositionReport<Int>;
pub type SweepReport = experiments::SweepReport<Int>;
