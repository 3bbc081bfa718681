//! Bell-type relations written as majorization bounds on correlation tables.

mod chsh;
mod covariance;
mod svetlichny;
mod table;
mod witness;

pub use chsh::{
    check_chsh_relation, check_chsh_relation_with, chsh_f_vector, chsh_f_vector_masked, chsh_value, correlator,
    max_chsh_over_phi, pr_box, quantum_chsh_value, simulate_chsh_table, tsirelson_box, write_chsh_csv, CellMask,
    ChshLevel, ChshOptions, ChshReport, ChshRow, Convention,
};
pub use covariance::{covariance_bound_vector, covariance_chsh, CovarianceReport, OutcomeValues, COVARIANCE_BOUND};
pub use svetlichny::{
    ghz_state, ghz_table, optimize_ghz_svetlichny, svetlichny_box, svetlichny_check, svetlichny_check_with,
    svetlichny_f_vector, svetlichny_sign, svetlichny_value, LevelCheck, ParityMask, SvetlichnyLevel,
    SvetlichnyReport,
};
pub use table::{deterministic_boxes, CorrelationTable, SLICE_TOL};
pub use witness::{witness_uncertainty_relation, WitnessOperator, WitnessReport, RECONSTRUCTION_TOL};
