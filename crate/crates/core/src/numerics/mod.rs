//! Numerical kernels shared by the analytic modules.

mod quadrature;
mod special;

pub use quadrature::{integrate, integrate_vec, QuadratureSpec};
pub use special::{
    ln_beta, ln_binomial, reg_incomplete_beta, std_normal_cdf, std_normal_hazard,
    std_normal_ln_pdf, std_normal_ln_sf, std_normal_pdf, std_normal_quantile, std_normal_sf,
};

pub(crate) use special::{binomial_cdf, inc_beta_pair};

/// Half-width of the standardized log-time window. Normal mass outside
/// `[-Z_TRUNCATION, Z_TRUNCATION]` is below 1e-16.
pub const Z_TRUNCATION: f64 = 8.5;
