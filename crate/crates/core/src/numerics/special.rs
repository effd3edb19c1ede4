//! Standard-normal functions and the regularized incomplete beta function.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use libm::erfc;
use statrs::function::erf::erfc_inv;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_677_94;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_78;

/// Above this point the hazard switches to the Mills-ratio continued fraction.
const HAZARD_SWITCH: f64 = 6.0;

#[inline]
pub fn std_normal_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

#[inline]
pub fn std_normal_ln_pdf(z: f64) -> f64 {
    -LN_SQRT_2PI - 0.5 * z * z
}

/// Φ(z), evaluated through `erfc` so both tails keep relative accuracy.
#[inline]
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// 1 − Φ(z) without cancellation.
#[inline]
pub fn std_normal_sf(z: f64) -> f64 {
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

/// Φ⁻¹(p) for p in (0, 1).
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("normal quantile needs p in (0, 1), got {p}")));
    }
    let z = -SQRT_2 * erfc_inv(2.0 * p);
    // One Newton step against the accurate cdf, in the tail that keeps precision.
    let resid = if p < 0.5 {
        std_normal_cdf(z) - p
    } else {
        (1.0 - p) - std_normal_sf(z)
    };
    let pdf = std_normal_pdf(z);
    Ok(if pdf > 0.0 { z - resid / pdf } else { z })
}

/// Standard-normal hazard λ(z) = φ(z) / (1 − Φ(z)).
///
/// For z > 6 the ratio is taken from Laplace's continued fraction for the
/// Mills ratio, which avoids the vanishing denominator.
pub fn std_normal_hazard(z: f64) -> f64 {
    if z <= HAZARD_SWITCH {
        std_normal_pdf(z) / std_normal_sf(z)
    } else {
        // λ(z) = z + 1/(z + 2/(z + 3/(z + ...)))
        let mut t = z;
        for k in (1..=60).rev() {
            t = z + k as f64 / t;
        }
        t
    }
}

/// ln(1 − Φ(z)), finite for every finite z.
pub fn std_normal_ln_sf(z: f64) -> f64 {
    if z <= HAZARD_SWITCH {
        std_normal_sf(z).ln()
    } else {
        std_normal_ln_pdf(z) - std_normal_hazard(z).ln()
    }
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// ln C(n, k).
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=500 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Returns `(I_x(a, b), 1 − I_x(a, b))` given both `x` and `y = 1 − x`.
///
/// Passing `y` separately keeps full precision when `x` is within rounding
/// of 1, e.g. when `x` is a normal survival probability.
pub(crate) fn inc_beta_pair(x: f64, y: f64, a: f64, b: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if y <= 0.0 {
        return (1.0, 0.0);
    }
    let ln_front = a * x.ln() + b * y.ln() - ln_beta(a, b);
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        let lower = front * beta_continued_fraction(x, a, b) / a;
        (lower, 1.0 - lower)
    } else {
        let upper = front * beta_continued_fraction(y, b, a) / b;
        (1.0 - upper, upper)
    }
}

/// Regularized incomplete beta function I_p(a, b).
pub fn reg_incomplete_beta(p: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("incomplete beta needs p in [0, 1], got {p}")));
    }
    if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
        return Err(Error::Domain(format!(
            "incomplete beta needs a, b > 0, got a = {a}, b = {b}"
        )));
    }
    Ok(inc_beta_pair(p, 1.0 - p, a, b).0)
}

/// P(Bin(m, p) ≤ j) where `q = 1 − p` is supplied separately.
pub(crate) fn binomial_cdf(j: usize, m: usize, p: f64, q: f64) -> f64 {
    if j >= m {
        return 1.0;
    }
    // P(Bin(m, p) ≤ j) = I_q(m − j, j + 1)
    inc_beta_pair(q, p, (m - j) as f64, j as f64 + 1.0).0
}

#[cfg(test)]
mod tests {
    use super::*;

    /// erf by its Maclaurin series, independent of the library `erfc`.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let x2 = x * x;
        for n in 1..200 {
            term *= -x2 / n as f64;
            let add = term / (2 * n + 1) as f64;
            sum += add;
            if add.abs() < 1e-18 {
                break;
            }
        }
        2.0 / std::f64::consts::PI.sqrt() * sum
    }

    fn series_cdf(z: f64) -> f64 {
        0.5 * (1.0 + erf_series(z / SQRT_2))
    }

    fn binom_tail(n: usize, i: usize, p: f64) -> f64 {
        (i..=n)
            .map(|k| (ln_binomial(n, k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp())
            .sum()
    }

    #[test]
    fn cdf_symmetry_and_saturation() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert_eq!(std_normal_cdf(40.0), 1.0);
        assert_eq!(std_normal_cdf(-40.0), 0.0);
    }

    #[test]
    fn cdf_matches_bisection_on_erf_series() {
        // Invert the independent series at 0.975 by bisection.
        let (mut lo, mut hi) = (1.0, 3.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if series_cdf(mid) < 0.975 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let z = 0.5 * (lo + hi);
        assert!((z - 1.959964).abs() < 1e-6);
        assert!((std_normal_cdf(1.959964) - 0.975).abs() < 1e-6);
    }

    #[test]
    fn cdf_relative_accuracy_against_series() {
        for i in -40..=40 {
            let z = i as f64 * 0.1;
            let reference = series_cdf(z);
            let err = (std_normal_cdf(z) - reference).abs();
            // The series itself cancels in the lower tail; compare absolutely there.
            if reference > 0.02 {
                assert!(err / reference < 1e-13, "z = {z}: rel {}", err / reference);
            } else {
                assert!(err < 1e-14, "z = {z}: abs {err}");
            }
        }
    }

    #[test]
    fn cdf_monotone() {
        let mut prev = 0.0;
        for i in -800..=800 {
            let v = std_normal_cdf(i as f64 * 0.01);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn hazard_values() {
        assert!((std_normal_hazard(0.0) - 0.7978845608).abs() < 1e-9);
        let h10 = std_normal_hazard(10.0);
        assert!(h10 > 10.0 && h10 < 10.1 && h10.is_finite());
        // λ(2) from an extended series: φ(2)/(1 − Φ(2)) with
        // 1 − Φ(2) = 0.022750131948179207200282637166533437
        let reference = 0.053990966513188063 / 0.022750131948179207;
        assert!((std_normal_hazard(2.0) - reference).abs() < 1e-9);
    }

    #[test]
    fn hazard_branches_agree_at_switch() {
        let direct = std_normal_pdf(6.0) / std_normal_sf(6.0);
        let mut t = 6.0;
        for k in (1..=60).rev() {
            t = 6.0 + k as f64 / t;
        }
        assert!((direct - t).abs() / t < 1e-12);
        assert!(std_normal_hazard(6.0 + 1e-12) - std_normal_hazard(6.0) < 1e-9);
    }

    #[test]
    fn hazard_identity_and_bounds() {
        let mut prev = 0.0;
        for i in -600..=1200 {
            let z = i as f64 * 0.01;
            let h = std_normal_hazard(z);
            assert!(h >= z.max(0.0), "z = {z}");
            assert!(h > prev);
            prev = h;
            if z.abs() <= 6.0 {
                let lhs = h * std_normal_sf(z);
                let rel = (lhs - std_normal_pdf(z)).abs() / std_normal_pdf(z);
                assert!(rel < 1e-12, "z = {z}: rel {rel}");
            }
        }
    }

    #[test]
    fn ln_sf_continuous() {
        let a = std_normal_ln_sf(6.0);
        let b = std_normal_sf(6.0).ln();
        assert!((a - b).abs() < 1e-12);
        assert!(std_normal_ln_sf(50.0).is_finite());
    }

    #[test]
    fn incomplete_beta_closed_forms() {
        assert!((reg_incomplete_beta(0.5, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((reg_incomplete_beta(0.5, 1.0, 2.0).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(reg_incomplete_beta(0.0, 2.0, 3.0).unwrap(), 0.0);
        assert_eq!(reg_incomplete_beta(1.0, 2.0, 3.0).unwrap(), 1.0);
        let expected = binom_tail(7, 3, 0.3);
        assert!((reg_incomplete_beta(0.3, 3.0, 5.0).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn incomplete_beta_domain_errors() {
        assert!(reg_incomplete_beta(-0.1, 1.0, 1.0).is_err());
        assert!(reg_incomplete_beta(1.1, 1.0, 1.0).is_err());
        assert!(reg_incomplete_beta(0.5, 0.0, 1.0).is_err());
        assert!(reg_incomplete_beta(0.5, 1.0, -1.0).is_err());
    }

    #[test]
    fn incomplete_beta_is_binomial_tail() {
        for n in 1..=30 {
            for i in 1..=n {
                for pk in 0..=20 {
                    let p = pk as f64 / 20.0;
                    let expected = if p == 0.0 {
                        0.0
                    } else if p == 1.0 {
                        1.0
                    } else {
                        binom_tail(n, i, p)
                    };
                    let got = reg_incomplete_beta(p, i as f64, (n - i + 1) as f64).unwrap();
                    assert!((got - expected).abs() < 1e-10, "n={n} i={i} p={p}: {got} vs {expected}");
                }
            }
        }
    }

    #[test]
    fn incomplete_beta_monotone_in_p() {
        let mut prev = 0.0;
        for k in 0..=1000 {
            let v = reg_incomplete_beta(k as f64 / 1000.0, 4.0, 9.0).unwrap();
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn binomial_cdf_complement_precision() {
        // p within rounding of 1: P(Bin(5, p) ≤ 4) = 1 − p^5 ≈ 5q.
        let q = 1e-20;
        let v = binomial_cdf(4, 5, 1.0 - q, q);
        assert!((v - 5e-20).abs() / 5e-20 < 1e-10);
    }
}
