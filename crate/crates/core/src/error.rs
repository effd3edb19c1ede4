use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A single violated constraint on a censoring scheme.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemeViolation {
    #[error("sample size n = {0} must be at least 2")]
    SampleTooSmall(usize),
    #[error("failure floor l = {0} must be at least 1")]
    FloorBelowOne(usize),
    #[error("failure floor l = {l} must be strictly below target r = {r}")]
    FloorNotBelowTarget { l: usize, r: usize },
    #[error("failure target r = {r} exceeds sample size n = {n}")]
    TargetAboveSample { r: usize, n: usize },
    #[error("time threshold {name} = {value} must be finite and positive")]
    NonPositiveTime { name: &'static str, value: f64 },
    #[error("first threshold T1 = {t1} must be strictly below T2 = {t2}")]
    ThresholdsOutOfOrder { t1: f64, t2: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid scheme: {}", format_violations(.0))]
    InvalidScheme(Vec<SchemeViolation>),

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {estimate:e}, error bound {error_bound:e})"
    )]
    QuadratureNonConvergence {
        estimate: f64,
        error_bound: f64,
        subdivisions: usize,
    },

    #[error("integrand returned NaN at abscissa {abscissa}")]
    NanIntegrand { abscissa: f64 },

    #[error("outcome inconsistent with scheme: {0}")]
    Inconsistent(String),

    #[error("degenerate design: Fisher determinant {determinant:e} is not positive")]
    DegenerateDesign { determinant: f64 },

    #[error("Fisher matrix has eigenvalue {eigenvalue:e} below the semidefinite slack")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    #[error("prior variance of mu undefined: a1 = {a1} must exceed 1 (need var_tau < mean_tau^2)")]
    Elicitation { a1: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// True for errors arising from numerical evaluation rather than from
    /// malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNonConvergence { .. }
                | Error::NanIntegrand { .. }
                | Error::DegenerateDesign { .. }
                | Error::NotPositiveSemidefinite { .. }
        )
    }
}

fn format_violations(v: &[SchemeViolation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
