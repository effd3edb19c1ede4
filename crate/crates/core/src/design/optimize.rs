use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use cobyla::{minimize, RhoBeg, StopTols};

use crate::design::criteria::{criteria, Criteria};
use crate::design::prior::{CostModel, PriorSample};
use crate::design::surface::{CellSurface, RankTables};
use crate::error::{Error, Result};
use crate::numerics::QuadratureSpec;
use crate::scheme::SchemeParams;

/// How `T2` is tied to `T1` during the search.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SearchMode {
    /// `T2 = T1 + δ` with `T1, δ > 0` free.
    #[default]
    Free,
    /// `T2 = κ·T1`.
    Linked { kappa: f64 },
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchMode::Free => f.write_str("free"),
            SearchMode::Linked { kappa } => write!(f, "linked:{kappa}"),
        }
    }
}

impl FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "free" {
            return Ok(SearchMode::Free);
        }
        if s == "linked" {
            return Ok(SearchMode::Linked { kappa: 2.0 });
        }
        if let Some(k) = s.strip_prefix("linked:") {
            let kappa: f64 = k
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("invalid linked ratio '{k}'")))?;
            if !(kappa > 1.0 && kappa.is_finite()) {
                return Err(Error::Config(format!("linked ratio must exceed 1, got {kappa}")));
            }
            return Ok(SearchMode::Linked { kappa });
        }
        Err(Error::Config(format!("search mode must be 'free' or 'linked:KAPPA', got '{s}'")))
    }
}

/// Sample sizes visited by [`algorithm_one`].
#[derive(Debug, Clone, PartialEq)]
pub enum SampleSizes {
    Fixed(usize),
    UpTo(usize),
}

impl SampleSizes {
    fn range(&self) -> Result<std::ops::RangeInclusive<usize>> {
        match *self {
            SampleSizes::Fixed(n) if n >= 2 => Ok(n..=n),
            SampleSizes::UpTo(n) if n >= 2 => Ok(2..=n),
            _ => Err(Error::Domain("sample size must be at least 2".into())),
        }
    }
}

/// Search controls.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSettings {
    pub mode: SearchMode,
    /// Fixed `l` instead of `⌈r/2⌉`; cells with `r ≤ l` are skipped.
    pub l_override: Option<usize>,
    pub max_evals: usize,
    pub quadrature: QuadratureSpec,
}

impl Default for SearchSettings {
    fn default() -> Self {
        Self {
            mode: SearchMode::Free,
            l_override: None,
            max_evals: 400,
            quadrature: QuadratureSpec::default(),
        }
    }
}

/// Result of a design search. Values other than `scheme.n`, `scheme.r`,
/// `scheme.l` are NaN when `feasible` is false.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSolution {
    pub scheme: SchemeParams,
    /// Prior-averaged `ln det I`.
    pub objective: f64,
    pub objective_se: f64,
    pub exp_failures: f64,
    pub exp_duration: f64,
    pub exp_cost: f64,
    pub feasible: bool,
}

impl DesignSolution {
    fn infeasible(n: usize, r: usize, l: usize) -> Self {
        Self {
            scheme: SchemeParams { n, r, l, t1: f64::NAN, t2: f64::NAN },
            objective: f64::NAN,
            objective_se: f64::NAN,
            exp_failures: f64::NAN,
            exp_duration: f64::NAN,
            exp_cost: f64::NAN,
            feasible: false,
        }
    }

    fn from_criteria(scheme: SchemeParams, c: &Criteria, cost: &CostModel) -> Self {
        let exp_cost = c.cost(cost);
        Self {
            scheme,
            objective: c.psi,
            objective_se: c.psi_se,
            exp_failures: c.psi_fail,
            exp_duration: c.psi_dur,
            exp_cost,
            feasible: cost.within_budget(exp_cost),
        }
    }

    /// Ordering used to pick the best plan: larger objective, then (within
    /// 1e-9) smaller cost, smaller `n`, smaller `r`. Infeasible plans rank last.
    fn better_than(&self, other: &DesignSolution) -> bool {
        match (self.feasible, other.feasible) {
            (true, false) => return true,
            (false, _) => return false,
            _ => {}
        }
        if (self.objective - other.objective).abs() > 1e-9 {
            return self.objective > other.objective;
        }
        let key = |s: &DesignSolution| (s.exp_cost, s.scheme.n, s.scheme.r);
        let (a, b) = (key(self), key(other));
        match a.0.partial_cmp(&b.0) {
            Some(Ordering::Less) if b.0 - a.0 > 1e-9 => true,
            Some(Ordering::Greater) if a.0 - b.0 > 1e-9 => false,
            _ => (a.1, a.2) < (b.1, b.2),
        }
    }
}

/// `l = ⌈r/2⌉` unless overridden.
pub fn floor_for(r: usize, settings: &SearchSettings) -> usize {
    settings.l_override.unwrap_or(r.div_ceil(2))
}

/// Search box and start points from prior-predictive quantiles.
struct TimeScale {
    t_min: f64,
    t_max: f64,
    delta_min: f64,
    starts: Vec<(f64, f64)>,
}

impl TimeScale {
    fn new(sample: &PriorSample, mode: SearchMode) -> Result<Self> {
        let q = |p: f64| sample.predictive_quantile(p);
        let starts = match mode {
            SearchMode::Free => {
                let mut v = Vec::with_capacity(25);
                for a in [0.1, 0.25, 0.4, 0.55, 0.7] {
                    let t1 = q(a)?;
                    for b in [0.1, 0.3, 0.5, 0.7, 0.9] {
                        v.push((t1, q(a + (1.0 - a) * b)?.max(t1 * 1.01)));
                    }
                }
                v
            }
            SearchMode::Linked { kappa } => (0..25)
                .map(|j| q((j as f64 + 0.5) / 25.0).map(|t1| (t1, kappa * t1)))
                .collect::<Result<_>>()?,
        };
        Ok(Self {
            t_min: q(1e-6)?,
            t_max: q(1.0 - 1e-10)?,
            delta_min: 1e-6 * q(0.5)?,
            starts,
        })
    }
}

/// Surface-level optimum of one cell for one budget.
struct CellOptimum {
    t1: f64,
    t2: f64,
    psi: f64,
}

fn search_cell(
    surface: &CellSurface<'_>,
    scale: &TimeScale,
    cost: &CostModel,
    settings: &SearchSettings,
) -> Option<CellOptimum> {
    let target = cost.c_b() * (1.0 - 1e-7);
    let decode = |u: &[f64]| -> (f64, f64) {
        match settings.mode {
            SearchMode::Free => {
                let t1 = u[0].exp();
                (t1, t1 + u[1].exp())
            }
            SearchMode::Linked { kappa } => {
                let t1 = u[0].exp();
                (t1, kappa * t1)
            }
        }
    };
    // One surface evaluation per point; the constraint reuses the cached value.
    let cache: RefCell<(Vec<f64>, f64, f64)> = RefCell::new((Vec::new(), 0.0, 0.0));
    let best: RefCell<Option<CellOptimum>> = RefCell::new(None);
    let eval = |u: &[f64]| -> (f64, f64) {
        {
            let c = cache.borrow();
            if c.0 == u {
                return (c.1, c.2);
            }
        }
        let (t1, t2) = decode(u);
        let p = surface.evaluate(t1, t2);
        let c = cost.cost(p.psi_fail, p.psi_dur);
        let psi = if p.degenerate || !p.psi.is_finite() { f64::NEG_INFINITY } else { p.psi };
        if c <= target && psi.is_finite() {
            let mut b = best.borrow_mut();
            if b.as_ref().is_none_or(|b| psi > b.psi) {
                *b = Some(CellOptimum { t1, t2, psi });
            }
        }
        *cache.borrow_mut() = (u.to_vec(), psi, c);
        (psi, c)
    };
    let objective = |u: &[f64], _: &mut ()| {
        let (psi, _) = eval(u);
        if psi.is_finite() {
            -psi
        } else {
            1e10
        }
    };
    let budget = |u: &[f64], _: &mut ()| {
        let (_, c) = eval(u);
        (target - c) / cost.c_b()
    };

    let (bounds, dims): (Vec<(f64, f64)>, usize) = match settings.mode {
        SearchMode::Free => (
            vec![(scale.t_min.ln(), scale.t_max.ln()), (scale.delta_min.ln(), scale.t_max.ln())],
            2,
        ),
        SearchMode::Linked { .. } => (vec![(scale.t_min.ln(), scale.t_max.ln())], 1),
    };
    for &(t1, t2) in &scale.starts {
        let x0: Vec<f64> = match settings.mode {
            SearchMode::Free => vec![t1.ln(), (t2 - t1).ln()],
            SearchMode::Linked { .. } => vec![t1.ln()],
        };
        let x0: Vec<f64> = x0.iter().zip(&bounds).map(|(x, (lo, hi))| x.clamp(*lo, *hi)).collect();
        let tols = StopTols { ftol_abs: 1e-6, xtol_abs: vec![1e-4; dims], ..StopTols::default() };
        // Any outcome is fine: the best feasible point seen is tracked in `eval`.
        let _ = minimize(&objective, &x0, &bounds, &[&budget], (), settings.max_evals, RhoBeg::All(0.5), Some(tols));
    }
    best.into_inner()
}

/// Shrinks `(T1, T2)` toward zero along its ray until the exact cost fits.
fn repair(
    scheme: SchemeParams,
    sample: &PriorSample,
    cost: &CostModel,
    spec: &QuadratureSpec,
) -> Result<Option<(SchemeParams, Criteria)>> {
    for step in [1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 5e-2] {
        let s = SchemeParams { t1: scheme.t1 * (1.0 - step), t2: scheme.t2 * (1.0 - step), ..scheme };
        let c = criteria(&s, sample, spec)?;
        if cost.within_budget(c.cost(cost)) {
            return Ok(Some((s, c)));
        }
    }
    Ok(None)
}

/// Exact criteria at a surface optimum, repairing tiny budget overshoots.
fn finalize(
    scheme: SchemeParams,
    sample: &PriorSample,
    cost: &CostModel,
    spec: &QuadratureSpec,
) -> Result<DesignSolution> {
    let c = criteria(&scheme, sample, spec)?;
    if cost.within_budget(c.cost(cost)) {
        return Ok(DesignSolution::from_criteria(scheme, &c, cost));
    }
    match repair(scheme, sample, cost, spec)? {
        Some((s, c)) => Ok(DesignSolution::from_criteria(s, &c, cost)),
        None => Ok(DesignSolution::infeasible(scheme.n, scheme.r, scheme.l)),
    }
}

/// Optimal `(T1, T2)` for fixed `(n, r, l)`.
pub fn optimize_times(
    n: usize,
    r: usize,
    l: usize,
    sample: &PriorSample,
    cost: &CostModel,
    settings: &SearchSettings,
) -> Result<DesignSolution> {
    if !(1 <= l && l < r && r <= n) {
        return Err(Error::Domain(format!("need 1 ≤ l < r ≤ n, got n={n}, r={r}, l={l}")));
    }
    let tables = RankTables::for_sample(n, sample);
    let scale = TimeScale::new(sample, settings.mode)?;
    let surface = CellSurface::new(&tables, r, l, sample);
    match search_cell(&surface, &scale, cost, settings) {
        Some(opt) => finalize(
            SchemeParams { n, r, l, t1: opt.t1, t2: opt.t2 },
            sample,
            cost,
            &settings.quadrature,
        ),
        None => Ok(DesignSolution::infeasible(n, r, l)),
    }
}

/// Grid search over `n` and `r` for each budget in `budgets` (sharing the
/// tabulated surfaces across budgets). Returns one solution per budget.
pub fn algorithm_one_budgets(
    sizes: &SampleSizes,
    sample: &PriorSample,
    costs: &[CostModel],
    settings: &SearchSettings,
) -> Result<Vec<DesignSolution>> {
    let scale = TimeScale::new(sample, settings.mode)?;
    // Surface optima per budget: (surface psi, n, r, l, t1, t2).
    let mut found: Vec<Vec<(f64, SchemeParams)>> = vec![Vec::new(); costs.len()];
    for n in sizes.range()? {
        let tables = RankTables::for_sample(n, sample);
        for r in 2..=n {
            let l = floor_for(r, settings);
            if l < 1 || l >= r {
                continue;
            }
            let surface = CellSurface::new(&tables, r, l, sample);
            let floor_time = surface.mean_floor_duration();
            for (b, cost) in costs.iter().enumerate() {
                // Cost is increasing in both thresholds and bounded below by
                // c_f·l + c_t·E[X_{l:n}].
                if cost.cost(l as f64, floor_time) > cost.c_b() {
                    continue;
                }
                if let Some(opt) = search_cell(&surface, &scale, cost, settings) {
                    found[b].push((opt.psi, SchemeParams { n, r, l, t1: opt.t1, t2: opt.t2 }));
                }
            }
        }
    }

    let fallback = |sizes: &SampleSizes| {
        let n = match *sizes {
            SampleSizes::Fixed(n) | SampleSizes::UpTo(n) => n,
        };
        DesignSolution::infeasible(n, 0, 0)
    };
    costs
        .iter()
        .zip(found)
        .map(|(cost, cells)| {
            let top = cells.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
            let mut best = fallback(sizes);
            // The surface is accurate to ~1e-6; cells far below the top cannot win.
            for (psi, scheme) in cells {
                if psi < top - 0.01 {
                    continue;
                }
                let sol = finalize(scheme, sample, cost, &settings.quadrature)?;
                if sol.better_than(&best) {
                    best = sol;
                }
            }
            Ok(best)
        })
        .collect()
}

/// Grid search over `n` and `r` with `l = ⌈r/2⌉` for a single budget.
pub fn algorithm_one(
    sizes: &SampleSizes,
    sample: &PriorSample,
    cost: &CostModel,
    settings: &SearchSettings,
) -> Result<DesignSolution> {
    Ok(algorithm_one_budgets(sizes, sample, std::slice::from_ref(cost), settings)?
        .pop()
        .expect("one budget"))
}
