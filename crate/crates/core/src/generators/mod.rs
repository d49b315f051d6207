//! Test geometries: snowflake curves, sphere and annulus samples, box counting.

mod boxdim;
mod samplers;
mod snowflake;

pub use boxdim::{box_dimension, BoxDimension};
pub use samplers::{annulus_sampler, sphere_sampler};
pub use snowflake::{length_factor, polyline_length, snowflake, snowflake_closed, AngleSchedule, Angles, SnowflakeCurve};
