// `!(x > 0.0)` is used on purpose: it rejects NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angle;
pub mod averaging;
pub mod bounds;
pub mod config;
pub mod error;
pub mod lattice;
pub mod precision;
pub mod quadrature;
pub mod relation;
pub mod search;
pub mod spectrum;
pub mod structure;

pub use error::{Error, Result};
