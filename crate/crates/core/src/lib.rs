//! Synthetic individual-level vehicle trips from historical trip records.
//!
//! Each historical traveller acts as a template. Trips are generated one by
//! one, in time order, from that traveller's slot preferences and OD counts,
//! while a per-type ledger of already generated trips steers the aggregate
//! temporal distribution back toward the historical one. Paths are drawn from
//! crowd-level frequencies so individual route choices stay hidden.
//!
//! The factor math and the validation metrics are generic over
//! [`Scalar`] (`f32` or `f64`); the aliases at the crate root fix `f64`.

pub mod corpus;
pub mod error;
pub mod generator;
pub mod ingest;
pub mod model;
pub mod sampling;
pub mod scalar;
pub mod validator;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type GenParams = generator::GenParams<f64>;
pub type Generator<'a> = generator::Generator<'a, f64>;
pub type Distribution = validator::Distribution<f64>;
pub type ValidationReport = validator::ValidationReport<f64>;
