//! Photonic data: fixtures, count statistics, Poisson error bars and
//! two-qubit tomography.

mod analysis;
mod counts;
mod fixtures;
mod resample;
mod tomography;

pub use analysis::{
    chsh_analysis, coherence_from_scans, entropy_comparison, ideal_marginal, ideal_reduced_state, ChshAnalysis,
    EntropyRow, PoissonReport, SIGMA_LEVEL,
};
pub use counts::{count_tables, probs_from_counts, probs_from_records, CountTable};
pub use fixtures::{
    fixture_path, load_fixture, read_fixture, Basis, CoincidenceRecord, FidelityRecord, Fixture, FixtureKind,
    MarginalPair, MarginalRecord, ScanRecord, PAIR_SLACK,
};
pub use resample::{poisson_resample, resample_with, PValue, ResampleStats, DEFAULT_SAMPLES, MIN_SAMPLES};
pub use tomography::{pure_fidelity, tomography_reconstruct, two_qubit_projectors, TomographyEntry, TomographyInput};
