//! Exact finite-scale workbench for quantale-enriched categories.
//!
//! Everything is computed over finite carriers with lattice-exact tables:
//! quantales, V-matrices, V-categories, lax extensions of finitary Set-monads,
//! (T,V)-categories, and Lawvere completeness decided by exhaustive search.

pub mod completeness;
pub mod enriched;
pub mod error;
pub mod instances;
pub mod laxext;
pub mod monad;
pub mod quantale;
pub mod quniform;
pub mod relation;
pub mod suite;
pub mod tvcat;
pub mod vmatrix;

pub use error::{Budget, Error, Result};
