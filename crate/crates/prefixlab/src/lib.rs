//! Workbench for prefix-free machines treated as instantaneous codes.
//!
//! A *prefix-free machine* is a partial map from finite binary strings
//! (codewords) to finite binary strings (symbols) whose domain is a
//! prefix-free set. This crate works with *finite presentations* of such
//! machines — explicit ordered lists of `(codeword, symbol)` pairs — on
//! which every quantity of interest is exactly computable:
//!
//! - [`bitstring`]: bit-exact binary strings, their length-lexicographic
//!   rank bijection with the naturals, and a pairing function on strings.
//! - [`machine`]: machine graphs, prefix-freeness checking, evaluation,
//!   preimages, per-symbol minimal codeword lengths, and the text file
//!   format shared by all tools.
//! - [`dyadic`]: exact nonnegative dyadic rationals for Kraft sums and
//!   semi-measures. No floating point anywhere in the accounting paths.
//! - [`universal`]: a concrete self-delimiting universal interpreter with
//!   budgeted enumeration of its halting programs, complexity upper
//!   bounds, and semi-measure lower bounds.
//! - [`transform`]: graph-to-graph constructions — preimage bounding,
//!   preimage widening, census densification — plus the census-derived
//!   semi-measure with its exact reconciliation identity.
//! - [`census`]: codeword-count tables by symbol and length, domain
//!   counts, and the non-normative envelope report.
//!
//! All operations are deterministic: identical inputs produce
//! bit-identical outputs across runs and platforms.

pub mod bitstring;
pub mod census;
pub mod dyadic;
pub mod machine;
pub mod transform;
pub mod universal;

pub use bitstring::{pair, unpair, BitString, Rank};
pub use census::CensusTable;
pub use dyadic::Dyadic;
pub use machine::MachineGraph;
pub use transform::FinitePreimageResult;
pub use universal::BudgetedUniversal;
