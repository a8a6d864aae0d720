//! Numerical toolkit for the non-commutative analytic Toeplitz algebra acting
//! on the full Fock space over `n` letters, truncated to words of bounded
//! length.

pub mod calculus;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod hardy;
pub mod linalg;
pub mod operators;
pub mod report;
pub mod series;
pub mod words;

pub use error::{FockError, Result};
pub use fock::{FockVector, C64};
pub use hardy::ScalarSeries;
pub use operators::{Side, TruncOp};
pub use series::FreeSeries;
pub use words::{BasisIndexer, Word};
