//! Radial grids, fields, finite differences, Bessel functions, Hankel
//! transforms and Sobolev norms.

pub mod bessel;
pub mod diff;
pub mod field;
pub mod grid;
pub mod hankel;
pub mod random;
pub mod sobolev;

pub use field::RadialField;
pub use grid::{GridMap, RadialGrid};
pub use hankel::{HankelConfig, HankelPlan, Spectrum};
pub use sobolev::NormSpec;
