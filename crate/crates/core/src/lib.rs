//! Exact randomized measurement of secant varieties.
//!
//! Dimensions are computed as ranks of tangent frames over large random prime
//! fields (Terracini's lemma), repeated over several trials and two primes.

pub mod catalog;
pub mod engine;
pub mod error;
pub mod field;
pub mod hilbert;
pub mod linalg;
pub mod mpoly;
pub mod parallel;
pub mod rng;
pub mod terracini;
pub mod upoly;
pub mod variety;

pub use engine::Engine;
pub use error::{Error, Result};
pub use field::{FieldElement, PrimeContext};
pub use linalg::Matrix;
pub use mpoly::IntPoly;
pub use variety::{Center, VarietySpec};
