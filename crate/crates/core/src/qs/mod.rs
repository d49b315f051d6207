//! Weak quasisymmetry: sampled constants, standardisation and the K–H chain.

pub mod kh;
pub mod standardize;
pub mod weak;

pub use kh::{check_kh_inequality, KhReport, KH_TOLERANCE};
pub use standardize::{default_sphere_samples, extremal_quotient, standardize, Standardization};
pub use weak::{weak_qs_constant, weak_qs_nested, QsConfig, QsEstimate};
