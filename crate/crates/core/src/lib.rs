//! Exact finite-dimensional workbench for reflexive spaces of operators.
//!
//! Everything is computed over the Gaussian rationals `Q(i)`, so every
//! equality of subspaces, operator spaces and lattices reported here is
//! exact.

pub mod bilattice;
pub mod cli;
pub mod error;
pub mod invariant;
pub mod laws;
pub mod matrix;
pub mod operator_space;
pub mod problem;
pub mod reflexivity;
pub mod sampling;
pub mod scalar;
pub mod subspace;

pub use error::{Error, Result};
pub use matrix::{Echelon, Matrix, Scalar, Vector};
pub use operator_space::OperatorSpace;
pub use scalar::GaussianRational;
pub use subspace::{ProjectionPair, Subspace};
