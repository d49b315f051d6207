//! Analytic quasiconformal test maps and their maximal dilatation.

pub mod builtin;
pub mod dilatation;
pub mod spec;

pub use builtin::builtin_test_maps;
pub use dilatation::{annulus_dilatation_profile, dilatation, pointwise_dilatation, DilatationEstimate, Region};
pub use spec::{MapKind, MapSpec, MAPSPEC_SCHEMA};
