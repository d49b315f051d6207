//! Numerical tools for quasiconformal maps of ℝ² and ℝ³: dilatation, weak
//! quasisymmetry, local flatness, ring-modulus special functions and
//! Dini-integral rectifiability tests.

pub mod dini;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod generators;
pub mod geometry;
pub mod maps;
pub mod qs;
pub mod sampling;
pub mod special;

pub use error::{Error, Result};
pub use geometry::{Hyperplane, Point, PointSet};
pub use maps::MapSpec;
