#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod chain;
pub mod cli;
pub mod embedding;
pub mod error;
pub mod measure;
pub mod models;
pub mod rng;
pub mod scale;
pub mod stats;

pub use error::{Error, Result};
