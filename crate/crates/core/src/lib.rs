//! Matrix-parameter generalized Wright series and related operations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fraccalc;
pub mod gammakit;
pub mod integralrep;
pub mod matcore;
pub mod quad;
pub mod relations;
pub mod scalar;
pub mod series;
pub mod special;

pub use error::{Error, Result};
pub use matcore::CMatrix;
