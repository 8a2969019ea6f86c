//! Reordering noisy fragments of a long sequence: rate functions, a maximum-likelihood
//! reassembly decoder and Monte Carlo experiments around them.

// Negated float comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chart;
pub mod cli;
pub mod config;
pub mod decoder;
pub mod distances;
pub mod entropy;
pub mod error;
pub mod experiments;
pub mod fragments;
pub mod io;
pub mod model;
pub mod rates;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
