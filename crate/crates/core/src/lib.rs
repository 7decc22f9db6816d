//! Exact complexity measures of m-ary functions `f: T^n -> T` with `|T| = m`,
//! partitions of the Hamming graph `H(n, m)`, and the block-filter construction
//! that separates sensitivity from degree quadratically.
//!
//! Everything is exact: cyclotomic integers for unity-alphabet coefficients,
//! rationals for integer-alphabet ones, and big integers for counts.

pub mod construction;
pub mod error;
pub mod exact_arith;
pub mod formats;
pub mod functions;
pub mod hamming;
pub mod limits;
pub mod partitions;
pub mod representation;
pub mod search;

pub use construction::{BlockPartition, ConstructionReport, ResidueProfile, SeparationWitness};
pub use error::{Error, Result};
pub use exact_arith::{BigRational, CycInt, CycPolynomial};
pub use functions::{Alphabet, MAryFunction, ShiftBlock};
pub use hamming::HammingSpace;
pub use limits::Limits;
pub use partitions::{DegreeStats, ExtDegree, VertexPartition};
pub use representation::{RepresentingPolynomial, Scalar};
pub use search::{Constraint, SearchResult, SearchTask};
