//! Expected number of failures and expected duration of a UHCS test.
//!
//! Both are assembled from Type-I hybrid building blocks:
//! `N_k(T) = Σ_{i≤k} F_{i:n}(T)`, the expected count in `min(#{X ≤ T}, k)`,
//! and `C_k(T) = ∫₀^T (1 − F_{k:n}(x)) dx = E[X_{k:n} ∧ T]`.

use crate::error::{Error, Result};
use crate::lifetime::{order_stat_cdf_z, order_stat_mean, order_stat_survival_z, LogNormalParams, OrderStatIndex};
use crate::numerics::{integrate, std_normal_cdf, QuadratureSpec, Z_TRUNCATION};
use crate::scheme::SchemeParams;

/// `N_k(T)` for rank `k` out of `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridBlockN {
    pub rank: usize,
    pub t: f64,
    pub value: f64,
}

/// `C_k(T)` for rank `k` out of `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridBlockC {
    pub rank: usize,
    pub t: f64,
    pub value: f64,
}

fn check_block(rank: usize, t: f64, n: usize) -> Result<()> {
    OrderStatIndex::new(rank, n)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("threshold must be positive and finite, got {t}")));
    }
    Ok(())
}

/// `Σ_{i≤k} F_{i:n}` at standardized time `z`.
pub(crate) fn block_n_z(z: f64, rank: usize, n: usize) -> f64 {
    (1..=rank).map(|i| order_stat_cdf_z(z, i, n)).sum()
}

/// `∫₀^{x(z_t)} (1 − F_{k:n}) dx` evaluated on the z scale.
///
/// Below the window the survival is taken as one, so the left piece is just
/// `x(−8.5)`; above the moment window the integrand is negligible.
pub(crate) fn block_c_z(
    z_t: f64,
    rank: usize,
    n: usize,
    params: LogNormalParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let x_lo = params.time_at(-Z_TRUNCATION);
    if z_t <= -Z_TRUNCATION {
        return Ok(params.time_at(z_t));
    }
    let upper = z_t.min(params.z_upper_for_moments());
    let scale = 1.0 / params.tau().sqrt();
    let body = integrate(
        |z| order_stat_survival_z(z, rank, n) * params.time_at(z) * scale,
        -Z_TRUNCATION,
        upper,
        spec,
    )?;
    Ok(x_lo + body)
}

pub fn block_n(rank: usize, t: f64, n: usize, params: LogNormalParams) -> Result<HybridBlockN> {
    check_block(rank, t, n)?;
    let value = block_n_z(params.standardize(t), rank, n).clamp(0.0, rank as f64);
    Ok(HybridBlockN { rank, t, value })
}

pub fn block_c(
    rank: usize,
    t: f64,
    n: usize,
    params: LogNormalParams,
    spec: &QuadratureSpec,
) -> Result<HybridBlockC> {
    check_block(rank, t, n)?;
    let value = block_c_z(params.standardize(t), rank, n, params, spec)?.min(t);
    Ok(HybridBlockC { rank, t, value })
}

/// `E[D] = l + nF(T1) + N_r(T2) − N_l(T2) − N_r(T1)`, clamped to `[l, n]`.
pub fn expected_failures(scheme: &SchemeParams, params: LogNormalParams) -> Result<f64> {
    let s = scheme.validate()?;
    let value = failures_unclamped(&s, params.standardize(s.t1), params.standardize(s.t2));
    Ok(value.clamp(s.l as f64, s.n as f64))
}

pub(crate) fn failures_unclamped(s: &SchemeParams, z1: f64, z2: f64) -> f64 {
    s.l as f64 + s.n as f64 * std_normal_cdf(z1) + block_n_z(z2, s.r, s.n)
        - block_n_z(z2, s.l, s.n)
        - block_n_z(z1, s.r, s.n)
}

/// `E[ξ] = E[X_{l:n}] + T1 + C_r(T2) − C_l(T2) − C_r(T1)`.
pub fn expected_duration(
    scheme: &SchemeParams,
    params: LogNormalParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let s = scheme.validate()?;
    let z1 = params.standardize(s.t1);
    let z2 = params.standardize(s.t2);
    let mean_l = order_stat_mean(OrderStatIndex::new(s.l, s.n)?, params, spec)?;
    let value = mean_l + s.t1 + block_c_z(z2, s.r, s.n, params, spec)?
        - block_c_z(z2, s.l, s.n, params, spec)?
        - block_c_z(z1, s.r, s.n, params, spec)?;
    Ok(value)
}
