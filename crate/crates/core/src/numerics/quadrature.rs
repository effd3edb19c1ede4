//! Adaptive Gauss–Kronrod quadrature.
//!
//! Global adaptive bisection driven by the 10-point Gauss / 21-point Kronrod
//! pair. Integrands may be vector valued; every component shares the same
//! abscissae so that one subdivision decision serves all of them.

use crate::error::{Error, Result};

/// Tolerance policy for [`integrate`] and [`integrate_vec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-8,
            absolute_tolerance: 1e-12,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureSpec {
    pub fn new(
        relative_tolerance: f64,
        absolute_tolerance: f64,
        max_subdivisions: usize,
    ) -> Result<Self> {
        let spec = Self {
            relative_tolerance,
            absolute_tolerance,
            max_subdivisions,
        };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0) || !(self.absolute_tolerance > 0.0) {
            return Err(Error::Domain(format!(
                "quadrature tolerances must be positive (rel {}, abs {})",
                self.relative_tolerance, self.absolute_tolerance
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::Domain("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

// Gauss weights for the odd-indexed Kronrod abscissae.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

#[derive(Debug, Clone, Copy)]
struct Segment<const D: usize> {
    lower: f64,
    upper: f64,
    value: [f64; D],
    error: [f64; D],
}

impl<const D: usize> Segment<D> {
    fn worst_error(&self) -> f64 {
        self.error.iter().copied().fold(0.0, f64::max)
    }
}

fn eval_checked<const D: usize, F>(f: &mut F, x: f64) -> Result<[f64; D]>
where
    F: FnMut(f64) -> [f64; D],
{
    let y = f(x);
    if y.iter().any(|v| v.is_nan()) {
        return Err(Error::NanIntegrand { abscissa: x });
    }
    Ok(y)
}

/// One application of the G10/K21 pair on `[a, b]`, with QUADPACK's
/// error scaling.
fn gk21<const D: usize, F>(f: &mut F, a: f64, b: f64) -> Result<Segment<D>>
where
    F: FnMut(f64) -> [f64; D],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = eval_checked(f, center)?;
    let mut res_k = [0.0; D];
    let mut res_g = [0.0; D];
    let mut res_abs = [0.0; D];
    for c in 0..D {
        res_k[c] = fc[c] * WGK[10];
        res_abs[c] = fc[c].abs() * WGK[10];
    }

    let mut f1 = [[0.0; D]; 10];
    let mut f2 = [[0.0; D]; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let lo = eval_checked(f, center - dx)?;
        let hi = eval_checked(f, center + dx)?;
        for c in 0..D {
            let sum = lo[c] + hi[c];
            res_k[c] += WGK[j] * sum;
            res_abs[c] += WGK[j] * (lo[c].abs() + hi[c].abs());
            if j % 2 == 1 {
                res_g[c] += WG[j / 2] * sum;
            }
        }
        f1[j] = lo;
        f2[j] = hi;
    }

    let mut value = [0.0; D];
    let mut error = [0.0; D];
    for c in 0..D {
        let mean = res_k[c] * 0.5;
        let mut res_asc = WGK[10] * (fc[c] - mean).abs();
        for j in 0..10 {
            res_asc += WGK[j] * ((f1[j][c] - mean).abs() + (f2[j][c] - mean).abs());
        }
        let k = res_k[c] * half;
        let abs_k = res_abs[c] * half.abs();
        let asc = res_asc * half.abs();
        let mut err = ((res_k[c] - res_g[c]) * half).abs();
        if asc != 0.0 && err != 0.0 {
            err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
        }
        if abs_k > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * abs_k);
        }
        value[c] = k;
        error[c] = err;
    }
    Ok(Segment {
        lower: a,
        upper: b,
        value,
        error,
    })
}

/// Integrates a vector-valued function over `[lower, upper]`.
///
/// Converges once the largest component error estimate is below
/// `max(absolute_tolerance, relative_tolerance * max_c |I_c|)`. A zero-width
/// interval integrates to zero.
pub fn integrate_vec<const D: usize, F>(
    mut f: F,
    lower: f64,
    upper: f64,
    spec: &QuadratureSpec,
) -> Result<[f64; D]>
where
    F: FnMut(f64) -> [f64; D],
{
    spec.check()?;
    if !lower.is_finite() || !upper.is_finite() || lower > upper {
        return Err(Error::Domain(format!(
            "integration limits must be finite with lower <= upper (got [{lower}, {upper}])"
        )));
    }
    if lower == upper {
        return Ok([0.0; D]);
    }

    let mut segments = vec![gk21(&mut f, lower, upper)?];
    loop {
        let mut total = [0.0; D];
        let mut total_err = [0.0; D];
        for s in &segments {
            for c in 0..D {
                total[c] += s.value[c];
                total_err[c] += s.error[c];
            }
        }
        let scale = total.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let target = spec.absolute_tolerance.max(spec.relative_tolerance * scale);
        let worst = total_err.iter().copied().fold(0.0, f64::max);
        if worst <= target {
            return Ok(total);
        }
        if segments.len() >= spec.max_subdivisions {
            let (idx, _) = total_err
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, &e)| if e > acc.1 { (i, e) } else { acc });
            return Err(Error::QuadratureNonConvergence {
                estimate: total[idx],
                error_bound: worst,
                subdivisions: segments.len(),
            });
        }

        let (split, _) = segments
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, s)| {
                let e = s.worst_error();
                if e > acc.1 {
                    (i, e)
                } else {
                    acc
                }
            });
        let seg = segments.swap_remove(split);
        let mid = 0.5 * (seg.lower + seg.upper);
        if mid <= seg.lower || mid >= seg.upper {
            // Interval can no longer be bisected in floating point.
            return Err(Error::QuadratureNonConvergence {
                estimate: total[0],
                error_bound: worst,
                subdivisions: segments.len() + 1,
            });
        }
        segments.push(gk21(&mut f, seg.lower, mid)?);
        segments.push(gk21(&mut f, mid, seg.upper)?);
    }
}

/// Integrates a scalar function over `[lower, upper]`.
pub fn integrate<F>(mut f: F, lower: f64, upper: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate_vec(|x| [f(x)], lower, upper, spec).map(|[v]| v)
}
