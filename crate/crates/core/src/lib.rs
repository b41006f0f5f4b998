//! Exact densities of the primes `p` for which unions of arithmetic
//! progressions are sets of quadratic residues (or non-residues) of `p`,
//! together with the overlap-diagram geometry that drives them and an
//! empirical verifier.

pub mod arith;
mod bigjson;
pub mod density;
pub mod diagrams;
pub mod empirical;
pub mod error;
pub mod gf2;
pub mod indexset;
pub mod tuples;
mod union_find;

pub use density::{analyze, DensityAnalysis, Dyadic, FormulaPath};
pub use diagrams::{quotient_diagram, QuotientDiagram};
pub use empirical::{empirical_density, q_epsilon_count, EmpiricalReport, QCountReport};
pub use error::{Error, Result};
pub use indexset::IndexSet;
pub use tuples::{
    build_structure, kmax_direct, KMaxFamily, Rational, StandardTuple, TupleStructure,
};
