//! Tensor-train linear algebra and rank-truncated eigensolvers.
//!
//! The crate stores vectors as tensor trains ([`TensorTrain`]) and operators
//! as matrix product operators ([`TTMatrix`]). On top of exact arithmetic it
//! provides three truncation operators ([`rounding`]), the test operators used
//! in the experiments ([`problems`]), Chebyshev-filtered subspace iteration
//! ([`solver`]), a truncated Lanczos baseline ([`lanczos`]) and dense
//! diagnostics for the convergence bounds ([`analysis`]).

extern crate openblas_src;

pub mod analysis;
pub mod canonical;
pub mod error;
pub mod lanczos;
pub mod linalg;
pub mod mpo;
pub mod problems;
pub mod rounding;
pub mod solver;
pub mod tt;

pub use canonical::{CanonicalForm, CoreTag};
pub use error::{Error, Result};
pub use linalg::C64;
pub use mpo::{expectation, TTMatrix};
pub use rounding::{LinearCombination, RoundingKind, RoundingStrategy};
pub use solver::{ChebFilter, FilterPolicy, SolverConfig, Target};
pub use tt::TensorTrain;
