//! Points, finite point sets and the flatness quantities built on them.

pub mod flatness;
pub mod hausdorff;
pub mod hyperplane;
pub mod index;
pub mod point;
pub mod pointset;
pub mod profile;

pub use flatness::{hyperplane_distance_profile, jones_beta, local_flatness, Flatness, FlatnessConfig};
pub use hausdorff::{directed_hausdorff, hausdorff_distance};
pub use hyperplane::Hyperplane;
pub use index::GridIndex;
pub use point::Point;
pub use pointset::{sample_spacing, PointSet};
pub use profile::{reifenberg_profile, FlatnessProfile, MissingEntry, ProfileEntry};
