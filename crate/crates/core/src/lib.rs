//! Relational algebra over semiring-annotated relations, with three pluggable
//! difference semantics and a laboratory for checking the algebraic laws they
//! induce.
//!
//! The crate is organized in four layers:
//!
//! * [`instances`]: the catalog of concrete annotation semirings (booleans,
//!   counting, tropical, security levels, provenance polynomials, ...), each
//!   with canonical element forms and a text grammar.
//! * [`algebra`]: generic machinery over any instance, covering the natural
//!   order, monus derivation, the law schemas A1..A13, and exhaustive or
//!   seeded sampled checking of those laws.
//! * [`krel`]: annotated relations and the query operators (union, join,
//!   projection, selection, renaming, difference), plus CSV input and output.
//! * [`lab`]: the experiments, from relation-level identity checking and
//!   per-instance law suites to the A13 classification table,
//!   finite-semiring enumeration, and counterexample shrinking.
//!
//! All checks are deterministic: a sampled run is a pure function of its seed,
//! independent of how many threads evaluate it. Parallel evaluation is enabled
//! by the `parallel` feature (on by default); disabling it yields the same
//! results on a single thread.

pub mod algebra;
pub mod instances;
pub mod krel;
pub mod lab;

mod par;
mod rng;

pub use rng::Rng;

/// Seed used by reproducible runs (CLI and CI) unless one is given explicitly.
pub const DEFAULT_SEED: u64 = 0x0005_eed1_ab50_fa13;
