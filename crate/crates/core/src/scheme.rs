//! The Type-II unified hybrid censoring scheme (UHCS).
//!
//! A test starts with `n` units and stops at
//! `ξ = (X_{l:n} ∨ T2) ∧ (X_{r:n} ∨ T1)`: at least `l` failures are always
//! observed and, unless the `l`-th failure comes after `T2`, the test ends by
//! `T2`.
//!
//! Boundary ties follow the `≤` convention: a failure exactly at a threshold
//! counts as occurring before it.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result, SchemeViolation};
use crate::lifetime::{log_density_grad_z, log_survival_grad_z, LogNormalParams};
use crate::numerics::{std_normal_ln_pdf, std_normal_ln_sf};

/// Design `(n, r, l, T1, T2)` of a Type-II UHCS experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    pub n: usize,
    pub r: usize,
    pub l: usize,
    pub t1: f64,
    pub t2: f64,
}

impl SchemeParams {
    /// Builds and validates a scheme.
    pub fn new(n: usize, r: usize, l: usize, t1: f64, t2: f64) -> Result<Self> {
        Self { n, r, l, t1, t2 }.validate()
    }

    /// Returns the scheme unchanged if `1 ≤ l < r ≤ n`, `n ≥ 2` and
    /// `0 < T1 < T2`; otherwise reports every violated condition.
    pub fn validate(self) -> Result<Self> {
        let mut violations = Vec::new();
        if self.n < 2 {
            violations.push(SchemeViolation::SampleTooSmall(self.n));
        }
        if self.l < 1 {
            violations.push(SchemeViolation::FloorBelowOne(self.l));
        }
        if self.l >= self.r {
            violations.push(SchemeViolation::FloorNotBelowTarget { l: self.l, r: self.r });
        }
        if self.r > self.n {
            violations.push(SchemeViolation::TargetAboveSample { r: self.r, n: self.n });
        }
        let t1_ok = self.t1 > 0.0 && self.t1.is_finite();
        let t2_ok = self.t2 > 0.0 && self.t2.is_finite();
        if !t1_ok {
            violations.push(SchemeViolation::NonPositiveTime { name: "T1", value: self.t1 });
        }
        if !t2_ok {
            violations.push(SchemeViolation::NonPositiveTime { name: "T2", value: self.t2 });
        }
        if t1_ok && t2_ok && self.t1 >= self.t2 {
            violations.push(SchemeViolation::ThresholdsOutOfOrder { t1: self.t1, t2: self.t2 });
        }
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidScheme(violations))
        }
    }

    /// Test duration `(x_l ∨ T2) ∧ (x_r ∨ T1)` for given l-th and r-th failure times.
    #[inline]
    pub fn termination_time(&self, x_l: f64, x_r: f64) -> f64 {
        x_l.max(self.t2).min(x_r.max(self.t1))
    }
}

impl fmt::Display for SchemeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(n={}, r={}, l={}, T1={:.4}, T2={:.4})",
            self.n, self.r, self.l, self.t1, self.t2
        )
    }
}

/// The six ways a Type-II UHCS experiment can terminate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UhcsCase {
    /// `X_r ≤ T1`: stop at `T1`.
    I,
    /// `X_l ≤ T1 < X_r ≤ T2`: stop at `X_r`.
    II,
    /// `X_l ≤ T1`, `X_r > T2`: stop at `T2`.
    III,
    /// `T1 < X_l`, `X_r ≤ T2`: stop at `X_r`.
    IV,
    /// `T1 < X_l ≤ T2 < X_r`: stop at `T2`.
    V,
    /// `X_l > T2`: stop at `X_l`.
    VI,
}

impl UhcsCase {
    pub const ALL: [UhcsCase; 6] = [
        UhcsCase::I,
        UhcsCase::II,
        UhcsCase::III,
        UhcsCase::IV,
        UhcsCase::V,
        UhcsCase::VI,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            UhcsCase::I => "I",
            UhcsCase::II => "II",
            UhcsCase::III => "III",
            UhcsCase::IV => "IV",
            UhcsCase::V => "V",
            UhcsCase::VI => "VI",
        }
    }
}

impl fmt::Display for UhcsCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Observed data of one experiment: the failure count `d`, the duration `ξ`
/// and the ordered failure times up to `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct UhcsOutcome {
    pub case: UhcsCase,
    pub d: usize,
    pub xi: f64,
    pub failures: Vec<f64>,
}

impl UhcsOutcome {
    /// One-line record: `case_id,d,xi,t1;t2;...` with failure times
    /// separated by `;` so the record itself stays comma-delimited.
    pub fn to_record(&self) -> String {
        let times = self
            .failures
            .iter()
            .map(|t| format!("{t}"))
            .collect::<Vec<_>>()
            .join(";");
        format!("{},{},{},{}", self.case, self.d, self.xi, times)
    }
}

/// Classifies a complete ordered sample of `n` lifetimes.
pub fn classify(sorted_lifetimes: &[f64], scheme: &SchemeParams) -> Result<UhcsOutcome> {
    let scheme = scheme.validate()?;
    if sorted_lifetimes.len() != scheme.n {
        return Err(Error::Domain(format!(
            "expected {} lifetimes, got {}",
            scheme.n,
            sorted_lifetimes.len()
        )));
    }
    if let Some(bad) = sorted_lifetimes.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(Error::Domain(format!("lifetimes must be positive and finite, got {bad}")));
    }
    if sorted_lifetimes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Domain("lifetimes must be sorted ascending".into()));
    }

    let x = sorted_lifetimes;
    let x_l = x[scheme.l - 1];
    let x_r = x[scheme.r - 1];
    let count_upto = |t: f64| x.partition_point(|&v| v <= t);

    let (case, d, xi) = if x_r <= scheme.t1 {
        (UhcsCase::I, count_upto(scheme.t1), scheme.t1)
    } else if x_l <= scheme.t1 {
        if x_r <= scheme.t2 {
            (UhcsCase::II, scheme.r, x_r)
        } else {
            (UhcsCase::III, count_upto(scheme.t2), scheme.t2)
        }
    } else if x_r <= scheme.t2 {
        (UhcsCase::IV, scheme.r, x_r)
    } else if x_l <= scheme.t2 {
        (UhcsCase::V, count_upto(scheme.t2), scheme.t2)
    } else {
        (UhcsCase::VI, scheme.l, x_l)
    };

    Ok(UhcsOutcome {
        case,
        d,
        xi,
        failures: x[..d].to_vec(),
    })
}

/// Generator for replicate `stream` of `seed`. Streams are independent, so
/// replicate `k` is the same regardless of how replicates are scheduled.
pub fn replicate_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws `n` lifetimes into `buf` (resized as needed) and sorts them.
pub fn draw_sorted_lifetimes(
    n: usize,
    params: LogNormalParams,
    rng: &mut ChaCha20Rng,
    buf: &mut Vec<f64>,
) {
    buf.clear();
    buf.extend((0..n).map(|_| params.sample(rng)));
    buf.sort_by(f64::total_cmp);
}

/// Simulates one experiment from stream 0 of `seed`.
pub fn simulate(scheme: &SchemeParams, params: LogNormalParams, seed: u64) -> Result<UhcsOutcome> {
    simulate_stream(scheme, params, seed, 0)
}

/// Simulates one experiment from the given stream of `seed`.
pub fn simulate_stream(
    scheme: &SchemeParams,
    params: LogNormalParams,
    seed: u64,
    stream: u64,
) -> Result<UhcsOutcome> {
    let scheme = scheme.validate()?;
    let mut rng = replicate_rng(seed, stream);
    let mut buf = Vec::with_capacity(scheme.n);
    draw_sorted_lifetimes(scheme.n, params, &mut rng, &mut buf);
    classify(&buf, &scheme)
}

/// Right-censored sample: `failures` observed exactly, the remaining
/// `n − d` units known only to survive past `censor_time`.
#[derive(Debug, Clone, Copy)]
pub struct CensoredSample<'a> {
    pub n: usize,
    pub failures: &'a [f64],
    pub censor_time: f64,
}

impl CensoredSample<'_> {
    fn check(&self) -> Result<()> {
        if self.failures.len() > self.n {
            return Err(Error::Inconsistent(format!(
                "{} failures exceed sample size {}",
                self.failures.len(),
                self.n
            )));
        }
        if !(self.censor_time > 0.0 && self.censor_time.is_finite()) {
            return Err(Error::Inconsistent(format!(
                "censoring time must be positive, got {}",
                self.censor_time
            )));
        }
        if let Some(bad) = self.failures.iter().find(|&&x| !(x > 0.0) || x > self.censor_time) {
            return Err(Error::Inconsistent(format!(
                "failure time {bad} lies outside (0, {}]",
                self.censor_time
            )));
        }
        Ok(())
    }

    /// `Σ ln f(x_i) + (n − d) ln(1 − F(ξ))`, without the permutation constant.
    pub fn log_likelihood(&self, params: LogNormalParams) -> Result<f64> {
        self.check()?;
        let tau = params.tau();
        let observed: f64 = self
            .failures
            .iter()
            .map(|&x| {
                let z = params.standardize(x);
                0.5 * tau.ln() - x.ln() + std_normal_ln_pdf(z)
            })
            .sum();
        let censored = (self.n - self.failures.len()) as f64;
        let tail = if censored > 0.0 {
            censored * std_normal_ln_sf(params.standardize(self.censor_time))
        } else {
            0.0
        };
        Ok(observed + tail)
    }

    /// Analytic gradient of [`log_likelihood`](Self::log_likelihood) in (μ, τ).
    pub fn score(&self, params: LogNormalParams) -> Result<[f64; 2]> {
        self.check()?;
        let tau = params.tau();
        let mut s = [0.0; 2];
        for &x in self.failures {
            let g = log_density_grad_z(params.standardize(x), tau);
            s[0] += g[0];
            s[1] += g[1];
        }
        let censored = (self.n - self.failures.len()) as f64;
        if censored > 0.0 {
            let g = log_survival_grad_z(params.standardize(self.censor_time), tau);
            s[0] += censored * g[0];
            s[1] += censored * g[1];
        }
        Ok(s)
    }
}

fn check_outcome(outcome: &UhcsOutcome, scheme: &SchemeParams) -> Result<()> {
    let scheme = scheme.validate()?;
    if outcome.d != outcome.failures.len() {
        return Err(Error::Inconsistent(format!(
            "d = {} but {} failure times given",
            outcome.d,
            outcome.failures.len()
        )));
    }
    if outcome.d < scheme.l {
        return Err(Error::Inconsistent(format!(
            "d = {} is below the guaranteed floor l = {}",
            outcome.d, scheme.l
        )));
    }
    if outcome.d > scheme.n {
        return Err(Error::Inconsistent(format!(
            "d = {} exceeds n = {}",
            outcome.d, scheme.n
        )));
    }
    if outcome.failures.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Inconsistent("failure times are not sorted".into()));
    }
    Ok(())
}

/// Log-likelihood of UHCS data, up to the permutation constant.
pub fn log_likelihood(
    outcome: &UhcsOutcome,
    scheme: &SchemeParams,
    params: LogNormalParams,
) -> Result<f64> {
    check_outcome(outcome, scheme)?;
    CensoredSample {
        n: scheme.n,
        failures: &outcome.failures,
        censor_time: outcome.xi,
    }
    .log_likelihood(params)
}

/// Score vector `(∂/∂μ, ∂/∂τ)` of [`log_likelihood`].
pub fn score(
    outcome: &UhcsOutcome,
    scheme: &SchemeParams,
    params: LogNormalParams,
) -> Result<[f64; 2]> {
    check_outcome(outcome, scheme)?;
    CensoredSample {
        n: scheme.n,
        failures: &outcome.failures,
        censor_time: outcome.xi,
    }
    .score(params)
}

/// Summary of repeated simulation at fixed parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSummary {
    pub reps: u64,
    pub mean_d: f64,
    pub se_d: f64,
    pub mean_xi: f64,
    pub se_xi: f64,
    /// Counts per case, indexed by [`UhcsCase::index`].
    pub case_counts: [u64; 6],
}

impl SimulationSummary {
    pub fn case_frequencies(&self) -> [f64; 6] {
        let total = self.reps as f64;
        self.case_counts.map(|c| c as f64 / total)
    }
}

/// Runs `reps` experiments; replicate `k` uses stream `k` of `seed`.
pub fn simulate_summary(
    scheme: &SchemeParams,
    params: LogNormalParams,
    seed: u64,
    reps: u64,
) -> Result<SimulationSummary> {
    let scheme = scheme.validate()?;
    if reps == 0 {
        return Err(Error::Domain("at least one replication is required".into()));
    }
    let mut buf = Vec::with_capacity(scheme.n);
    let (mut sd, mut sd2, mut sx, mut sx2) = (0.0, 0.0, 0.0, 0.0);
    let mut case_counts = [0u64; 6];
    for k in 0..reps {
        let mut rng = replicate_rng(seed, k);
        draw_sorted_lifetimes(scheme.n, params, &mut rng, &mut buf);
        let out = classify(&buf, &scheme)?;
        let d = out.d as f64;
        sd += d;
        sd2 += d * d;
        sx += out.xi;
        sx2 += out.xi * out.xi;
        case_counts[out.case.index()] += 1;
    }
    let m = reps as f64;
    let se = |s: f64, s2: f64| {
        let mean = s / m;
        let var = (s2 / m - mean * mean).max(0.0) * m / (m - 1.0).max(1.0);
        (var / m).sqrt()
    };
    Ok(SimulationSummary {
        reps,
        mean_d: sd / m,
        se_d: se(sd, sd2),
        mean_xi: sx / m,
        se_xi: se(sx, sx2),
        case_counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifetime::pdf;
    use crate::numerics::std_normal_sf;
    use proptest::prelude::*;
    use rand::Rng;

    fn small_scheme() -> SchemeParams {
        SchemeParams::new(4, 2, 1, 1.0, 2.0).unwrap()
    }

    fn reference_plan() -> SchemeParams {
        SchemeParams::new(20, 13, 7, 0.7044, 1.4088).unwrap()
    }

    fn theta() -> LogNormalParams {
        LogNormalParams::new(-0.5, 1.5).unwrap()
    }

    #[test]
    fn validate_accepts_published_plan() {
        let s = SchemeParams { n: 20, r: 13, l: 7, t1: 0.7044, t2: 1.4088 };
        assert_eq!(s.validate().unwrap(), s);
    }

    #[test]
    fn validate_reports_each_violation() {
        let err = SchemeParams { n: 5, r: 3, l: 3, t1: 1.0, t2: 2.0 }.validate().unwrap_err();
        assert_eq!(
            err,
            Error::InvalidScheme(vec![SchemeViolation::FloorNotBelowTarget { l: 3, r: 3 }])
        );
        let err = SchemeParams { n: 5, r: 3, l: 1, t1: 2.0, t2: 1.0 }.validate().unwrap_err();
        assert_eq!(
            err,
            Error::InvalidScheme(vec![SchemeViolation::ThresholdsOutOfOrder { t1: 2.0, t2: 1.0 }])
        );
        let err = SchemeParams { n: 3, r: 4, l: 0, t1: -1.0, t2: 0.0 }.validate().unwrap_err();
        match err {
            Error::InvalidScheme(v) => {
                assert!(v.contains(&SchemeViolation::FloorBelowOne(0)));
                assert!(v.contains(&SchemeViolation::TargetAboveSample { r: 4, n: 3 }));
                assert_eq!(
                    v.iter()
                        .filter(|e| matches!(e, SchemeViolation::NonPositiveTime { .. }))
                        .count(),
                    2
                );
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn classify_published_examples() {
        let s = small_scheme();
        let out = classify(&[0.2, 0.5, 3.0, 4.0], &s).unwrap();
        assert_eq!((out.case, out.d, out.xi), (UhcsCase::I, 2, 1.0));
        let out = classify(&[0.2, 1.5, 3.0, 4.0], &s).unwrap();
        assert_eq!((out.case, out.d, out.xi), (UhcsCase::II, 2, 1.5));
        let out = classify(&[2.5, 3.0, 4.0, 5.0], &s).unwrap();
        assert_eq!((out.case, out.d, out.xi), (UhcsCase::VI, 1, 2.5));
        assert_eq!(out.failures, vec![2.5]);
    }

    #[test]
    fn classify_remaining_cases() {
        let s = SchemeParams::new(5, 3, 2, 1.0, 2.0).unwrap();
        let out = classify(&[0.1, 0.5, 2.5, 3.0, 4.0], &s).unwrap();
        assert_eq!((out.case, out.d, out.xi), (UhcsCase::III, 2, 2.0));
        let out = classify(&[0.5, 1.2, 1.5, 3.0, 4.0], &s).unwrap();
        assert_eq!((out.case, out.d, out.xi), (UhcsCase::IV, 3, 1.5));
        let out = classify(&[0.5, 1.2, 1.9, 2.5, 4.0], &s).unwrap();
        assert_eq!((out.case, out.d, out.xi), (UhcsCase::IV, 3, 1.9));
        let out = classify(&[1.1, 1.2, 2.5, 3.0, 4.0], &s).unwrap();
        assert_eq!((out.case, out.d, out.xi), (UhcsCase::V, 2, 2.0));
        // Case I keeps counting failures up to T1.
        let out = classify(&[0.1, 0.2, 0.3, 0.9, 4.0], &s).unwrap();
        assert_eq!((out.case, out.d, out.xi), (UhcsCase::I, 4, 1.0));
    }

    #[test]
    fn classify_ties_count_as_before() {
        let s = small_scheme();
        let out = classify(&[0.5, 1.0, 3.0, 4.0], &s).unwrap();
        assert_eq!((out.case, out.d, out.xi), (UhcsCase::I, 2, 1.0));
        let out = classify(&[2.0, 2.0, 3.0, 4.0], &s).unwrap();
        assert_eq!((out.case, out.d, out.xi), (UhcsCase::IV, 2, 2.0));
    }

    #[test]
    fn classify_rejects_malformed() {
        let s = small_scheme();
        assert!(classify(&[0.2, 0.5, 3.0], &s).is_err());
        assert!(classify(&[0.5, 0.2, 3.0, 4.0], &s).is_err());
        assert!(classify(&[0.0, 0.2, 3.0, 4.0], &s).is_err());
        assert!(classify(&[0.2, 0.5, 3.0, f64::NAN], &s).is_err());
    }

    #[test]
    fn simulate_is_deterministic() {
        let a = simulate(&reference_plan(), theta(), 42).unwrap();
        let b = simulate(&reference_plan(), theta(), 42).unwrap();
        assert_eq!(a, b);
        let c = simulate_stream(&reference_plan(), theta(), 42, 1).unwrap();
        assert_ne!(a.failures, c.failures);
    }

    #[test]
    fn simulate_huge_t1_is_complete() {
        let s = SchemeParams::new(20, 13, 7, 1e9, 2e9).unwrap();
        for seed in 0..50 {
            let out = simulate(&s, theta(), seed).unwrap();
            assert_eq!(out.case, UhcsCase::I);
            assert_eq!(out.d, 20);
        }
    }

    #[test]
    fn record_format() {
        let out = classify(&[0.2, 0.5, 3.0, 4.0], &small_scheme()).unwrap();
        assert_eq!(out.to_record(), "I,2,1,0.2;0.5");
    }

    #[test]
    fn complete_sample_log_likelihood() {
        let s = SchemeParams::new(3, 2, 1, 10.0, 20.0).unwrap();
        let p = theta();
        let out = classify(&[0.3, 0.7, 1.9], &s).unwrap();
        assert_eq!(out.d, 3);
        let direct: f64 = [0.3, 0.7, 1.9].iter().map(|&x| pdf(x, p).unwrap().ln()).sum();
        assert!((log_likelihood(&out, &s, p).unwrap() - direct).abs() < 1e-12);

        let sc = score(&out, &s, p).unwrap();
        let expected: f64 = [0.3f64, 0.7, 1.9].iter().map(|x| 1.5 * (x.ln() + 0.5)).sum();
        assert!((sc[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn empty_outcome_is_inconsistent() {
        let s = small_scheme();
        let out = UhcsOutcome { case: UhcsCase::III, d: 0, xi: 2.0, failures: vec![] };
        assert!(matches!(log_likelihood(&out, &s, theta()), Err(Error::Inconsistent(_))));
        let late = UhcsOutcome { case: UhcsCase::II, d: 2, xi: 1.5, failures: vec![0.2, 1.7] };
        assert!(matches!(score(&late, &s, theta()), Err(Error::Inconsistent(_))));
        let miscount = UhcsOutcome { case: UhcsCase::II, d: 3, xi: 1.5, failures: vec![0.2, 1.5] };
        assert!(matches!(score(&miscount, &s, theta()), Err(Error::Inconsistent(_))));
    }

    /// Second evaluation path: densities on the x scale, survival from erfc.
    fn log_likelihood_reference(out: &UhcsOutcome, n: usize, p: LogNormalParams) -> f64 {
        let obs: f64 = out.failures.iter().map(|&x| pdf(x, p).unwrap().ln()).sum();
        let z = p.standardize(out.xi);
        obs + (n - out.d) as f64 * std_normal_sf(z).ln()
    }

    #[test]
    fn log_likelihood_dual_path() {
        let s = reference_plan();
        for seed in 0..200 {
            let out = simulate(&s, theta(), seed).unwrap();
            let p = LogNormalParams::new(-0.3, 1.2).unwrap();
            let a = log_likelihood(&out, &s, p).unwrap();
            let b = log_likelihood_reference(&out, s.n, p);
            assert!((a - b).abs() < 1e-10, "seed {seed}: {a} vs {b}");
        }
    }

    #[test]
    fn score_matches_finite_differences() {
        let s = reference_plan();
        let h = 1e-6;
        for seed in 0..100 {
            let out = simulate(&s, theta(), 1000 + seed).unwrap();
            let p = theta();
            let g = score(&out, &s, p).unwrap();
            let ll = |mu: f64, tau: f64| {
                log_likelihood(&out, &s, LogNormalParams::new(mu, tau).unwrap()).unwrap()
            };
            let fd_mu = (ll(-0.5 + h, 1.5) - ll(-0.5 - h, 1.5)) / (2.0 * h);
            let fd_tau = (ll(-0.5, 1.5 + h) - ll(-0.5, 1.5 - h)) / (2.0 * h);
            assert!((g[0] - fd_mu).abs() < 1e-5, "seed {seed}: {} vs {fd_mu}", g[0]);
            assert!((g[1] - fd_tau).abs() < 1e-5, "seed {seed}: {} vs {fd_tau}", g[1]);
        }
    }

    #[test]
    fn score_has_zero_mean() {
        let s = reference_plan();
        let p = theta();
        let reps = 100_000u64;
        let mut buf = Vec::new();
        let mut sum = [0.0; 2];
        let mut sum_sq = [0.0; 2];
        for k in 0..reps {
            let mut rng = replicate_rng(99, k);
            draw_sorted_lifetimes(s.n, p, &mut rng, &mut buf);
            let out = classify(&buf, &s).unwrap();
            let g = score(&out, &s, p).unwrap();
            for c in 0..2 {
                sum[c] += g[c];
                sum_sq[c] += g[c] * g[c];
            }
        }
        let m = reps as f64;
        for c in 0..2 {
            let mean = sum[c] / m;
            let se = ((sum_sq[c] / m - mean * mean) / m).sqrt();
            assert!(mean.abs() < 3.0 * se, "component {c}: mean {mean}, se {se}");
        }
    }

    #[test]
    fn summary_frequencies_partition() {
        let sum = simulate_summary(&reference_plan(), theta(), 5, 2000).unwrap();
        let total: u64 = sum.case_counts.iter().sum();
        assert_eq!(total, 2000);
        let freq: f64 = sum.case_frequencies().iter().sum();
        assert!((freq - 1.0).abs() < 1e-12);
        assert!(simulate_summary(&reference_plan(), theta(), 5, 0).is_err());
    }

    /// Case predicates written straight from the six-way case display.
    fn matching_cases(x_l: f64, x_r: f64, t1: f64, t2: f64) -> Vec<UhcsCase> {
        let mut v = Vec::new();
        if x_r <= t1 {
            v.push(UhcsCase::I);
        }
        if x_l <= t1 && t1 < x_r && x_r <= t2 {
            v.push(UhcsCase::II);
        }
        if x_l <= t1 && x_r > t2 {
            v.push(UhcsCase::III);
        }
        if t1 < x_l && x_r <= t2 {
            v.push(UhcsCase::IV);
        }
        if t1 < x_l && x_l <= t2 && t2 < x_r {
            v.push(UhcsCase::V);
        }
        if x_l > t2 {
            v.push(UhcsCase::VI);
        }
        v
    }

    fn arb_case() -> impl Strategy<Value = (SchemeParams, Vec<f64>)> {
        (2usize..30, any::<u64>()).prop_map(|(n, seed)| {
            let mut rng = replicate_rng(seed, 0);
            let r = rng.random_range(2..=n);
            let l = rng.random_range(1..r);
            let t1 = rng.random_range(0.05..3.0);
            let t2 = t1 + rng.random_range(0.01..3.0);
            let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(0.001..6.0)).collect();
            x.sort_by(f64::total_cmp);
            (SchemeParams::new(n, r, l, t1, t2).unwrap(), x)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn classify_semantics((s, x) in arb_case()) {
            let out = classify(&x, &s).unwrap();
            let x_l = x[s.l - 1];
            let x_r = x[s.r - 1];
            let cases = matching_cases(x_l, x_r, s.t1, s.t2);
            prop_assert_eq!(cases, vec![out.case]);
            prop_assert_eq!(out.xi, x_l.max(s.t2).min(x_r.max(s.t1)));
            prop_assert!(out.d >= s.l);
            if out.case != UhcsCase::VI {
                prop_assert!(out.xi <= s.t2);
            }
            match out.case {
                UhcsCase::II | UhcsCase::IV => {
                    prop_assert_eq!(out.d, s.r);
                    prop_assert_eq!(x[out.d - 1], out.xi);
                }
                UhcsCase::VI => {
                    prop_assert_eq!(out.d, s.l);
                    prop_assert_eq!(x[out.d - 1], out.xi);
                }
                _ => prop_assert_eq!(out.d, x.iter().filter(|&&v| v <= out.xi).count()),
            }
            match out.case {
                UhcsCase::I => prop_assert!(out.d >= s.r),
                UhcsCase::III | UhcsCase::V => prop_assert!(out.d >= s.l && out.d < s.r),
                _ => {}
            }
            prop_assert_eq!(out.failures.len(), out.d);
        }
    }
}
