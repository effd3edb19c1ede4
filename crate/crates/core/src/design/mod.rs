//! Bayesian planning: prior, prior-averaged criteria and the design search.

mod criteria;
mod optimize;
mod prior;
mod surface;

pub use criteria::{criteria, evaluate_at, expected_cost, Criteria};
pub use optimize::{
    algorithm_one, algorithm_one_budgets, floor_for, optimize_times, DesignSolution, SampleSizes, SearchMode,
    SearchSettings,
};
pub use prior::{elicit, sample_prior, CostModel, NormalGammaPrior, PriorSample};
pub use surface::{CellSurface, RankTables, SurfacePoint};
