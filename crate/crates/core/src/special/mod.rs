//! Ring-modulus special functions and the constants built from them.

pub mod grotzsch;
pub mod threshold;

pub use grotzsch::{
    agm, distortion_phi, elliptic_k, gamma_bounds, gamma_n, grotzsch_gamma_2d, grotzsch_gamma_2d_inverse, ring_modulus_rho,
    surface_area, tau_from_gamma, Interval, LambdaMode, SpecialFnContext, Value,
};
pub use threshold::{
    calibrate_c, holder_constant_for, holder_envelope, qs_bound_evaluator, radius_threshold, ratio_bound, t0_constant,
    t0_from_a, HolderEnvelope, QsBound, ThresholdParams, DEFAULT_HOLDER_M,
};
