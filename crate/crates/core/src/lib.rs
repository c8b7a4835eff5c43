//! Bounds on the eigenvalue moduli of matrix rational functions
//! `T(λ) = -B0 + λI + Σ Bi/(λ - αi)`, with a companion-matrix oracle to check them.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod mrf;
pub mod oracle;
pub mod problems;
pub mod report;
pub mod scalar_roots;

pub use bounds::{all_bounds, compute, BoundReport, Direction, Method};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, NormKind, C64};
pub use mrf::{MatrixPolynomial, MatrixRationalFunction, RationalTerm};
pub use oracle::{spectrum, verify_bounds, SpectrumResult, Verification};
pub use scalar_roots::PoleSumFunction;
