use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::lifetime::LogNormalParams;
use crate::numerics::{std_normal_cdf, std_normal_quantile};
use crate::scheme::replicate_rng;

/// Normal-gamma prior: `τ ~ Gamma(a1, rate b1)`, `μ | τ ~ N(p2, 1/(q2 τ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalGammaPrior {
    a1: f64,
    b1: f64,
    p2: f64,
    q2: f64,
}

impl NormalGammaPrior {
    pub fn new(a1: f64, b1: f64, p2: f64, q2: f64) -> Result<Self> {
        if !(a1 > 1.0 && a1.is_finite()) {
            return Err(Error::Elicitation { a1 });
        }
        if !(b1 > 0.0 && b1.is_finite() && q2 > 0.0 && q2.is_finite() && p2.is_finite()) {
            return Err(Error::Domain(format!(
                "prior needs b1 > 0, q2 > 0 and finite p2, got b1 = {b1}, p2 = {p2}, q2 = {q2}"
            )));
        }
        Ok(Self { a1, b1, p2, q2 })
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn q2(&self) -> f64 {
        self.q2
    }

    /// Prior means `(E[μ], E[τ])`.
    pub fn mean(&self) -> LogNormalParams {
        LogNormalParams::new(self.p2, self.a1 / self.b1).expect("prior mean precision is positive")
    }

    fn draw<R: Rng + ?Sized>(&self, gamma: &Gamma<f64>, rng: &mut R) -> LogNormalParams {
        loop {
            let tau: f64 = gamma.sample(rng);
            if tau > 0.0 && tau.is_finite() {
                let z: f64 = StandardNormal.sample(rng);
                let mu = self.p2 + z / (self.q2 * tau).sqrt();
                return LogNormalParams::new(mu, tau).expect("positive precision");
            }
        }
    }
}

/// Matches the prior to the moments of μ and τ:
/// `a1 = m_τ²/v_τ`, `b1 = m_τ/v_τ`, `p2 = m_μ`, `q2 = b1/((a1 − 1) v_μ)`.
pub fn elicit(mean_mu: f64, var_mu: f64, mean_tau: f64, var_tau: f64) -> Result<NormalGammaPrior> {
    if !(var_mu > 0.0 && mean_tau > 0.0 && var_tau > 0.0) || !mean_mu.is_finite() {
        return Err(Error::Domain(format!(
            "moments need var_mu > 0, mean_tau > 0, var_tau > 0; got ({mean_mu}, {var_mu}, {mean_tau}, {var_tau})"
        )));
    }
    let a1 = mean_tau * mean_tau / var_tau;
    if a1 <= 1.0 {
        return Err(Error::Elicitation { a1 });
    }
    let b1 = mean_tau / var_tau;
    let q2 = b1 / ((a1 - 1.0) * var_mu);
    NormalGammaPrior::new(a1, b1, mean_mu, q2)
}

/// Fixed Monte Carlo draws from a prior, shared by every candidate design.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorSample {
    draws: Vec<LogNormalParams>,
    seed: u64,
}

impl PriorSample {
    /// Wraps explicit draws; `seed` is recorded for reporting only.
    pub fn from_draws(draws: Vec<LogNormalParams>, seed: u64) -> Result<Self> {
        if draws.is_empty() {
            return Err(Error::Domain("prior sample must contain at least one draw".into()));
        }
        Ok(Self { draws, seed })
    }

    pub fn draws(&self) -> &[LogNormalParams] {
        &self.draws
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_draws(&self) -> usize {
        self.draws.len()
    }

    /// Prior-predictive distribution function of a single lifetime.
    pub fn predictive_cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let sum: f64 = self.draws.iter().map(|p| std_normal_cdf(p.standardize(t))).sum();
        sum / self.draws.len() as f64
    }

    /// Prior-predictive quantile by bisection on `ln t`.
    pub fn predictive_quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile level must lie in (0, 1), got {p}")));
        }
        // The mixture quantile lies between the extreme component quantiles.
        let z = std_normal_quantile(p)?;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for d in &self.draws {
            let q = d.mu() + z / d.tau().sqrt();
            lo = lo.min(q);
            hi = hi.max(q);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.predictive_cdf(mid.exp()) < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-13 * (1.0 + mid.abs()) {
                break;
            }
        }
        Ok((0.5 * (lo + hi)).exp())
    }
}

/// Draws `n_draws` parameter pairs from stream 0 of `seed`.
pub fn sample_prior(prior: &NormalGammaPrior, n_draws: usize, seed: u64) -> Result<PriorSample> {
    if n_draws == 0 {
        return Err(Error::Domain("number of prior draws must be at least 1".into()));
    }
    let gamma = Gamma::new(prior.a1, 1.0 / prior.b1).map_err(|e| Error::Domain(e.to_string()))?;
    let mut rng = replicate_rng(seed, 0);
    let draws = (0..n_draws).map(|_| prior.draw(&gamma, &mut rng)).collect();
    PriorSample::from_draws(draws, seed)
}

/// Unit costs `c_f` per failure and `c_t` per unit time, and budget `c_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    c_f: f64,
    c_t: f64,
    c_b: f64,
}

impl CostModel {
    pub fn new(c_f: f64, c_t: f64, c_b: f64) -> Result<Self> {
        for (name, v) in [("c_f", c_f), ("c_t", c_t), ("c_b", c_b)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self { c_f, c_t, c_b })
    }

    pub fn c_f(&self) -> f64 {
        self.c_f
    }

    pub fn c_t(&self) -> f64 {
        self.c_t
    }

    pub fn c_b(&self) -> f64 {
        self.c_b
    }

    pub fn with_budget(&self, c_b: f64) -> Result<Self> {
        Self::new(self.c_f, self.c_t, c_b)
    }

    /// `c_f·ψ_Fail + c_t·ψ_Dur`.
    pub fn cost(&self, psi_fail: f64, psi_dur: f64) -> f64 {
        self.c_f * psi_fail + self.c_t * psi_dur
    }

    /// Budget check with `1e-6` relative slack.
    pub fn within_budget(&self, cost: f64) -> bool {
        cost <= self.c_b * (1.0 + 1e-6)
    }
}
