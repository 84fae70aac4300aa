//! Exact combinatorial machinery for the Erdős matching problem in the regime
//! where the forbidden matching is almost perfect.
//!
//! The crate is organised bottom-up:
//!
//! * [`kset`], [`family`], [`scalar`]: ground-set bit-vectors, families with a
//!   canonical member order and a text format, and the scalar abstraction with
//!   exact binomials.
//! * [`matching`]: exact matching number by branch and bound.
//! * [`shifting`]: `(i, j)`-compressions and shiftedness.
//! * [`constructions`]: the two extremal candidates, their sizes, the
//!   crossover point, traces and saturation.
//! * [`weights`]: block frames, width and weight, and the counting quantities
//!   used to compare a family against the clique candidate block by block.
//! * [`transversals`]: full and almost-full transversals, cyclic-shift
//!   collections, masks and bad pairs, and the Q-family construction.
//! * [`audit`]: exact-rational verification of every bound in the proof chain.
//! * [`search`]: desk-scale exact maximisation and the special-set search.
//! * [`report`]: JSON and CSV rendering of audit reports.
//!
//! Weight formulas are generic over [`Scalar`]; the audits are pinned to
//! [`ExactScalar`].

pub mod audit;
pub mod constructions;
pub mod error;
pub mod family;
pub mod kset;
pub mod matching;
pub mod report;
pub mod scalar;
pub mod search;
pub mod shifting;
pub mod transversals;
pub mod weights;

pub use error::{Error, Result};
pub use family::Family;
pub use kset::{enumerate_ksets, precedes, KSet};
pub use scalar::{binom, Scalar};

/// Exact rational used for every identity and inequality.
pub type ExactScalar = num_rational::BigRational;
/// Arbitrary-precision integer.
pub type ExactInt = num_bigint::BigInt;
/// Floating instantiation for approximate summaries.
pub type ApproxScalar = f64;

/// Weight frame parameters instantiated exactly.
pub type ExactWeights = weights::WeightCalculus<ExactScalar>;
/// Weight frame parameters instantiated in `f64`.
pub type ApproxWeights = weights::WeightCalculus<ApproxScalar>;
