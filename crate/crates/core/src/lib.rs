//! Hermitian tensors: construction, partial traces, Hermitian eigenpairs,
//! decompositions, and separability analysis of mixed states.
//!
//! A Hermitian tensor over mode dims `[n_1..n_m]` is stored as its flattened
//! `n × n` Hermitian matrix (`n = ∏ n_k`, mode 1 slowest), so flattening and
//! folding are copies.

pub mod decomposition;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod heig;
pub mod json;
pub mod linalg;
pub mod ptrace;
pub mod quantum;
pub mod random;
pub mod tensor;

pub type C64 = num_complex::Complex64;

pub use error::{Error, Result};
pub use exec::Execution;
pub use linalg::{CMatrix, HermitianMatrix, MatrixSpectrum};
pub use tensor::{ComplexTensor, HermitianTensor, ModeVectorTuple};
