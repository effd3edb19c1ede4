//! Fisher information about (μ, τ) under Type-II UHCS.
//!
//! Every block is an integral of the outer product of the log-hazard
//! gradient `g(z)` against a sum of order-statistic densities:
//! `H_k(T) = ∫_{z ≤ z_T} g gᵀ Σ_{i≤k} f_{i:n} dz`. The UHCS information is
//! `H_l(∞) + H_n(T1) + H_r(T2) − H_l(T2) − H_r(T1)`.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::lifetime::{log_hazard_grad_z, order_stat_density_sum_z, LogNormalParams, OrderStatIndex};
use crate::numerics::{integrate_vec, QuadratureSpec, Z_TRUNCATION};
use crate::scheme::SchemeParams;

/// Symmetric 2×2 information matrix in (μ, τ).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FisherMatrix {
    pub i_mm: f64,
    pub i_tt: f64,
    pub i_mt: f64,
}

impl FisherMatrix {
    pub const ZERO: FisherMatrix = FisherMatrix { i_mm: 0.0, i_tt: 0.0, i_mt: 0.0 };

    pub fn new(i_mm: f64, i_tt: f64, i_mt: f64) -> Self {
        Self { i_mm, i_tt, i_mt }
    }

    /// Information of `n` uncensored observations: `diag(nτ, n/(2τ²))`.
    pub fn complete_sample(n: usize, params: LogNormalParams) -> Self {
        let tau = params.tau();
        let n = n as f64;
        Self::new(n * tau, n / (2.0 * tau * tau), 0.0)
    }

    pub fn determinant(&self) -> f64 {
        self.i_mm * self.i_tt - self.i_mt * self.i_mt
    }

    pub fn trace(&self) -> f64 {
        self.i_mm + self.i_tt
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let half_tr = 0.5 * self.trace();
        let half_diff = 0.5 * (self.i_mm - self.i_tt);
        let radius = half_diff.hypot(self.i_mt);
        [half_tr - radius, half_tr + radius]
    }

    pub fn frobenius(&self) -> f64 {
        (self.i_mm * self.i_mm + self.i_tt * self.i_tt + 2.0 * self.i_mt * self.i_mt).sqrt()
    }

    fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// Projects onto the PSD cone when the most negative eigenvalue lies
    /// within `1e-9·max(1, trace)` of zero; larger violations are errors.
    pub fn clamp_psd(self) -> Result<Self> {
        let [lo, hi] = self.eigenvalues();
        if lo >= 0.0 {
            return Ok(self);
        }
        let slack = 1e-9 * self.trace().abs().max(1.0);
        if lo < -slack {
            return Err(Error::NotPositiveSemidefinite { eigenvalue: lo });
        }
        if hi <= 0.0 {
            return Ok(Self::ZERO);
        }
        // Keep only the top eigenpair.
        let (vx, vy) = if self.i_mt.abs() > 0.0 {
            (self.i_mt, hi - self.i_mm)
        } else if self.i_mm >= self.i_tt {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        let norm2 = vx * vx + vy * vy;
        Ok(Self::new(hi * vx * vx / norm2, hi * vy * vy / norm2, hi * vx * vy / norm2))
    }
}

impl Add for FisherMatrix {
    type Output = FisherMatrix;
    fn add(self, o: FisherMatrix) -> FisherMatrix {
        FisherMatrix::new(self.i_mm + o.i_mm, self.i_tt + o.i_tt, self.i_mt + o.i_mt)
    }
}

impl Sub for FisherMatrix {
    type Output = FisherMatrix;
    fn sub(self, o: FisherMatrix) -> FisherMatrix {
        FisherMatrix::new(self.i_mm - o.i_mm, self.i_tt - o.i_tt, self.i_mt - o.i_mt)
    }
}

impl Mul<f64> for FisherMatrix {
    type Output = FisherMatrix;
    fn mul(self, c: f64) -> FisherMatrix {
        FisherMatrix::new(self.i_mm * c, self.i_tt * c, self.i_mt * c)
    }
}

/// Components `(g_μ², g_τ², g_μ g_τ)` of the outer product at `z`.
#[inline]
pub(crate) fn hazard_outer_z(z: f64, tau: f64) -> [f64; 3] {
    let [a, b] = log_hazard_grad_z(z, tau);
    [a * a, b * b, a * b]
}

/// `∫ g gᵀ Σ_{i≤k} f_{i:n} dz` over `[z_from, z_to]`, limits clipped to the window.
fn weighted_block(
    z_from: f64,
    z_to: f64,
    rank: usize,
    n: usize,
    tau: f64,
    spec: &QuadratureSpec,
) -> Result<FisherMatrix> {
    let lo = z_from.max(-Z_TRUNCATION);
    let hi = z_to.min(Z_TRUNCATION);
    if hi <= lo {
        return Ok(FisherMatrix::ZERO);
    }
    let v = integrate_vec(
        |z| {
            let w = order_stat_density_sum_z(z, rank, n);
            hazard_outer_z(z, tau).map(|c| c * w)
        },
        lo,
        hi,
        spec,
    )?;
    Ok(FisherMatrix::from_array(v))
}

/// `H_k` up to standardized time `z_t`.
pub(crate) fn hybrid_block_z(
    z_t: f64,
    rank: usize,
    n: usize,
    tau: f64,
    spec: &QuadratureSpec,
) -> Result<FisherMatrix> {
    weighted_block(-Z_TRUNCATION, z_t, rank, n, tau, spec)
}

/// Information in the first `l` order statistics of `n`.
pub fn info_type2(l: usize, n: usize, params: LogNormalParams, spec: &QuadratureSpec) -> Result<FisherMatrix> {
    OrderStatIndex::new(l, n)?;
    hybrid_block_z(Z_TRUNCATION, l, n, params.tau(), spec)
}

/// Information in Type-I hybrid censored data, stopping at `min(X_{rank:n}, T)`.
pub fn info_hybrid(
    rank: usize,
    t: f64,
    n: usize,
    params: LogNormalParams,
    spec: &QuadratureSpec,
) -> Result<FisherMatrix> {
    OrderStatIndex::new(rank, n)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("threshold must be positive and finite, got {t}")));
    }
    hybrid_block_z(params.standardize(t), rank, n, params.tau(), spec)
}

/// Information of the whole sample Type-I censored at `T1`.
pub fn info_t1_full(t1: f64, n: usize, params: LogNormalParams, spec: &QuadratureSpec) -> Result<FisherMatrix> {
    info_hybrid(n, t1, n, params, spec)
}

/// UHCS information as the five-term block combination.
pub fn fisher_uhcs(scheme: &SchemeParams, params: LogNormalParams, spec: &QuadratureSpec) -> Result<FisherMatrix> {
    let s = scheme.validate()?;
    let tau = params.tau();
    let z1 = params.standardize(s.t1);
    let z2 = params.standardize(s.t2);
    let total = hybrid_block_z(Z_TRUNCATION, s.l, s.n, tau, spec)?
        + hybrid_block_z(z1, s.n, s.n, tau, spec)?
        + hybrid_block_z(z2, s.r, s.n, tau, spec)?
        - hybrid_block_z(z2, s.l, s.n, tau, spec)?
        - hybrid_block_z(z1, s.r, s.n, tau, spec)?;
    total.clamp_psd()
}

/// UHCS information from the disjoint partition of the z axis at `T1`, `T2`:
/// weight `Σ_{i≤n}` below `T1`, `Σ_{i≤r}` between, `Σ_{i≤l}` above.
pub fn fisher_uhcs_partitioned(
    scheme: &SchemeParams,
    params: LogNormalParams,
    spec: &QuadratureSpec,
) -> Result<FisherMatrix> {
    let s = scheme.validate()?;
    let tau = params.tau();
    let z1 = params.standardize(s.t1);
    let z2 = params.standardize(s.t2);
    let total = weighted_block(-Z_TRUNCATION, z1, s.n, s.n, tau, spec)?
        + weighted_block(z1, z2, s.r, s.n, tau, spec)?
        + weighted_block(z2, Z_TRUNCATION, s.l, s.n, tau, spec)?;
    total.clamp_psd()
}

/// `ln det I`.
pub fn log_det(m: &FisherMatrix) -> Result<f64> {
    let det = m.determinant();
    if det > 0.0 && det.is_finite() {
        Ok(det.ln())
    } else {
        Err(Error::DegenerateDesign { determinant: det })
    }
}
