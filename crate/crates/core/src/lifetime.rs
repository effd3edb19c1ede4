//! Log-normal lifetime model LN(μ, τ) and its order statistics.
//!
//! `μ` is the location and `τ` the precision of `ln X`. Most quantities are
//! evaluated on the standardized scale `z = √τ (ln x − μ)`, where every
//! parameter value looks the same to the quadrature.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::{
    binomial_cdf, inc_beta_pair, integrate, ln_binomial, std_normal_cdf, std_normal_hazard,
    std_normal_ln_pdf, std_normal_ln_sf, std_normal_pdf, std_normal_quantile, std_normal_sf,
    QuadratureSpec, Z_TRUNCATION,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNormalParams {
    mu: f64,
    tau: f64,
}

impl LogNormalParams {
    pub fn new(mu: f64, tau: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::Domain(format!("mu must be finite, got {mu}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Domain(format!("tau must be positive and finite, got {tau}")));
        }
        Ok(Self { mu, tau })
    }

    #[inline]
    pub fn mu(&self) -> f64 {
        self.mu
    }

    #[inline]
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Standardized log-time `√τ (ln x − μ)`.
    #[inline]
    pub fn standardize(&self, x: f64) -> f64 {
        self.tau.sqrt() * (x.ln() - self.mu)
    }

    /// Inverse of [`standardize`](Self::standardize).
    #[inline]
    pub fn time_at(&self, z: f64) -> f64 {
        (self.mu + z / self.tau.sqrt()).exp()
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        Ok(self.time_at(std_normal_quantile(p)?))
    }

    /// Draws one lifetime as `exp(μ + Z/√τ)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        self.time_at(z)
    }

    /// Upper end of the z-window used for integrands that carry a factor `x`.
    ///
    /// `x φ(z)` is a normal density shifted by `1/√τ`, so the window is
    /// widened to cover that shift as well.
    pub(crate) fn z_upper_for_moments(&self) -> f64 {
        Z_TRUNCATION.max(1.0 / self.tau.sqrt() + Z_TRUNCATION)
    }
}

/// Rank `i` of an order statistic `X_{i:n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderStatIndex {
    i: usize,
    n: usize,
}

impl OrderStatIndex {
    pub fn new(i: usize, n: usize) -> Result<Self> {
        if n < 1 || i < 1 || i > n {
            return Err(Error::Domain(format!(
                "order statistic index needs 1 <= i <= n, got i = {i}, n = {n}"
            )));
        }
        Ok(Self { i, n })
    }

    #[inline]
    pub fn i(&self) -> usize {
        self.i
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }
}

fn check_time(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be positive and finite, got {x}")))
    }
}

pub fn pdf(x: f64, params: LogNormalParams) -> Result<f64> {
    check_time(x)?;
    let z = params.standardize(x);
    Ok(params.tau.sqrt() / x * std_normal_pdf(z))
}

pub fn cdf(x: f64, params: LogNormalParams) -> Result<f64> {
    check_time(x)?;
    Ok(std_normal_cdf(params.standardize(x)))
}

pub fn survival(x: f64, params: LogNormalParams) -> Result<f64> {
    check_time(x)?;
    Ok(std_normal_sf(params.standardize(x)))
}

/// ln h(x) = ln(√τ / x) + ln λ(z).
pub fn log_hazard(x: f64, params: LogNormalParams) -> Result<f64> {
    check_time(x)?;
    let z = params.standardize(x);
    Ok(0.5 * params.tau.ln() - x.ln() + std_normal_hazard(z).ln())
}

/// Gradient of ln h in (μ, τ) at standardized time `z`.
#[inline]
pub(crate) fn log_hazard_grad_z(z: f64, tau: f64) -> [f64; 2] {
    let lambda = std_normal_hazard(z);
    [
        tau.sqrt() * (z - lambda),
        (1.0 - z * z + z * lambda) / (2.0 * tau),
    ]
}

/// Gradient `(∂ ln h/∂μ, ∂ ln h/∂τ)` of the log-hazard.
pub fn log_hazard_grad(x: f64, params: LogNormalParams) -> Result<[f64; 2]> {
    check_time(x)?;
    Ok(log_hazard_grad_z(params.standardize(x), params.tau))
}

/// Gradient of ln f in (μ, τ) at standardized time `z`.
#[inline]
pub(crate) fn log_density_grad_z(z: f64, tau: f64) -> [f64; 2] {
    [tau.sqrt() * z, (1.0 - z * z) / (2.0 * tau)]
}

/// Gradient of ln(1 − F) in (μ, τ) at standardized time `z`.
#[inline]
pub(crate) fn log_survival_grad_z(z: f64, tau: f64) -> [f64; 2] {
    let lambda = std_normal_hazard(z);
    [tau.sqrt() * lambda, -z * lambda / (2.0 * tau)]
}

/// F_{i:n} on the z scale: P(at least i of n units failed) = I_Φ(z)(i, n − i + 1).
#[inline]
pub(crate) fn order_stat_cdf_z(z: f64, i: usize, n: usize) -> f64 {
    inc_beta_pair(std_normal_cdf(z), std_normal_sf(z), i as f64, (n - i + 1) as f64).0
}

/// 1 − F_{i:n} on the z scale: P(fewer than i of n units failed).
#[inline]
pub(crate) fn order_stat_survival_z(z: f64, i: usize, n: usize) -> f64 {
    inc_beta_pair(std_normal_cdf(z), std_normal_sf(z), i as f64, (n - i + 1) as f64).1
}

/// Density of the standardized `X_{i:n}` per unit z, computed in log space.
pub(crate) fn order_stat_density_z(z: f64, i: usize, n: usize) -> f64 {
    let ln_lower = std_normal_ln_sf(-z);
    let ln_upper = std_normal_ln_sf(z);
    let ln_w = (n as f64).ln()
        + ln_binomial(n - 1, i - 1)
        + (i - 1) as f64 * ln_lower
        + (n - i) as f64 * ln_upper
        + std_normal_ln_pdf(z);
    ln_w.exp()
}

/// `Σ_{i=1}^{k} f_{i:n}` per unit z, using Σ f_{i:n} = n f · P(Bin(n−1, F) ≤ k−1).
#[inline]
pub(crate) fn order_stat_density_sum_z(z: f64, k: usize, n: usize) -> f64 {
    let weight = if k >= n {
        1.0
    } else {
        binomial_cdf(k - 1, n - 1, std_normal_cdf(z), std_normal_sf(z))
    };
    n as f64 * std_normal_pdf(z) * weight
}

/// Distribution function of `X_{i:n}` via the regularized incomplete beta.
pub fn order_stat_cdf(x: f64, idx: OrderStatIndex, params: LogNormalParams) -> Result<f64> {
    check_time(x)?;
    Ok(order_stat_cdf_z(params.standardize(x), idx.i, idx.n))
}

/// Density of `X_{i:n}`; the binomial factor and powers are combined in log
/// space so large `n` does not overflow.
pub fn order_stat_pdf(x: f64, idx: OrderStatIndex, params: LogNormalParams) -> Result<f64> {
    check_time(x)?;
    let z = params.standardize(x);
    // dz/dx = √τ / x
    Ok(order_stat_density_z(z, idx.i, idx.n) * params.tau.sqrt() / x)
}

/// E[X_{i:n}] by quadrature on the z scale.
pub fn order_stat_mean(
    idx: OrderStatIndex,
    params: LogNormalParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let upper = params.z_upper_for_moments();
    integrate(
        |z| params.time_at(z) * order_stat_density_z(z, idx.i, idx.n),
        -Z_TRUNCATION,
        upper,
        spec,
    )
}
