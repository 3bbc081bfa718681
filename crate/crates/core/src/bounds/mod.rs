//! Uncertainty functionals, cumulative bounds `R_k`/`r_k` and entropic
//! reference bounds.

mod cumulative;
mod entropic;
mod functional;
mod stateset;

pub use cumulative::{
    check_relation_3, cumulative_bounds, device_independent_bounds, multi_observable_bounds,
    CumulativeBounds, LevelTrace, SandwichReport, MAX_GRID,
};
pub use entropic::{
    entropic_lower_bound, fgg_vector, h1, h3, overlap_grid, pair_lower_bound, pairwise_sum_bound,
    qubit_pair_with_overlap, sweep, vs_pair_bound, write_sweep_csv, BoundConfig, BoundKind,
    MiddleBand, SweepRow, MIDDLE_BAND_END,
};
pub use functional::{eval_f_grid, eval_f_table, FunctionalRegistry, UncertaintyFunctional};
pub use stateset::{Sense, StateKind, StateOptimum, StateSet};

pub(crate) use functional::table_values;
