//! Calogero–Moser dynamics, Nekrasov measures on colored partitions,
//! qq-characters and the spectral curves / Gaudin Lax operators built from them.
//!
//! Every formula is generic over [`scalar::Scalar`], so the same code runs in
//! exact rational arithmetic (the test oracles) and in complex doubles.

pub mod cmdyn;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod nekrasov;
pub mod partitions;
pub mod poly;
pub mod qqchar;
pub mod sample;
pub mod scalar;
pub mod series;
pub mod spectral;
pub mod specfun;

pub use error::{Error, Result};
