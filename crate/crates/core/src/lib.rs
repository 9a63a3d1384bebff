//! Numerics for self-similar blowup of the equivariant Yang-Mills equation in
//! supercritical dimensions `d >= 5`.

// `!(x > 0.0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod inequality;
pub mod model;
pub mod physical;
pub mod radial;
pub mod similarity;
pub mod spectral;

pub use error::{Error, Result};
pub use model::{ModelParams, PotentialForm};
