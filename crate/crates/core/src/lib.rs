//! Exact arithmetic for the Fermat equation over totally real fields.
//!
//! The crate checks the computable ingredients of the modular approach:
//! resultant towers bounding reducible mod-p representations, narrow and ray
//! class numbers, Frey curve invariants, and the newform obstruction B_{f,q}.

pub mod algebra;
pub mod arith;
pub mod data_io;
pub mod error;
pub mod frey;
pub mod newform;
pub mod numfield;
pub mod par;
pub mod report;
pub mod units;

pub use error::{Error, Result};
