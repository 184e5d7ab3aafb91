//! Finite-field toolkit for building `F_q` and `F_{q^2}`, evaluating families of
//! permutation-polynomial candidates, and checking closed-form permutation
//! criteria against exhaustive oracles.

pub mod cli;
pub mod criteria;
pub mod decompose;
pub mod directions;
pub mod error;
pub mod families;
pub mod gf;
pub mod oracle;
pub mod sweep;
pub mod tower;

pub use error::{Error, Result};
