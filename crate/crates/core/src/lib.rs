//! Learned index structures.
//!
//! Range indexes built from staged CDF models ([`rmi`]), hash functions
//! derived from the same models ([`hash`]), and learned existence filters
//! ([`bloom`]), together with the classical structures they are measured
//! against ([`baselines`]). All positions are 0-based.

pub mod baselines;
pub mod bloom;
pub mod datasets;
pub mod error;
pub mod hash;
pub mod key;
pub mod models;
pub mod rmi;
pub mod search;

pub use datasets::Dataset;
pub use error::{Error, Result};
pub use key::IndexKey;
pub use models::CdfModel;
pub use rmi::{RmiConfig, RmiIndex};
