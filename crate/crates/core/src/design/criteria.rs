use crate::design::prior::{CostModel, PriorSample};
use crate::error::Result;
use crate::expectations::{expected_duration, expected_failures};
use crate::fisher::{fisher_uhcs, log_det};
use crate::lifetime::LogNormalParams;
use crate::numerics::QuadratureSpec;
use crate::scheme::SchemeParams;

/// Prior-averaged design criteria.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Criteria {
    /// Mean of `ln det I(θ_i)`.
    pub psi: f64,
    /// Mean of `E[D | θ_i]`.
    pub psi_fail: f64,
    /// Mean of `E[ξ | θ_i]`.
    pub psi_dur: f64,
    /// Monte Carlo standard error of `psi`.
    pub psi_se: f64,
}

impl Criteria {
    pub fn cost(&self, cost: &CostModel) -> f64 {
        cost.cost(self.psi_fail, self.psi_dur)
    }
}

/// `(ln det I, E[D], E[ξ])` at a single parameter value.
pub fn evaluate_at(scheme: &SchemeParams, params: LogNormalParams, spec: &QuadratureSpec) -> Result<[f64; 3]> {
    let info = fisher_uhcs(scheme, params, spec)?;
    Ok([
        log_det(&info)?,
        expected_failures(scheme, params)?,
        expected_duration(scheme, params, spec)?,
    ])
}

/// Averages the criteria over the draws of `sample`. A degenerate Fisher
/// matrix at any draw is an error.
pub fn criteria(scheme: &SchemeParams, sample: &PriorSample, spec: &QuadratureSpec) -> Result<Criteria> {
    let scheme = scheme.validate()?;
    let mut sum = [0.0; 3];
    let mut sum_sq = 0.0;
    for &theta in sample.draws() {
        let v = evaluate_at(&scheme, theta, spec)?;
        for (s, x) in sum.iter_mut().zip(v) {
            *s += x;
        }
        sum_sq += v[0] * v[0];
    }
    let m = sample.n_draws() as f64;
    let psi = sum[0] / m;
    let psi_se = if sample.n_draws() > 1 {
        ((sum_sq / m - psi * psi).max(0.0) / (m - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(Criteria { psi, psi_fail: sum[1] / m, psi_dur: sum[2] / m, psi_se })
}

/// `c_f·ψ_Fail + c_t·ψ_Dur`.
pub fn expected_cost(
    scheme: &SchemeParams,
    sample: &PriorSample,
    cost: &CostModel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    Ok(criteria(scheme, sample, spec)?.cost(cost))
}
