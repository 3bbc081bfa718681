//! Vector-majorization witnesses for uncertainty, coherence and Bell
//! nonlocality on small quantum systems.

pub mod bounds;
pub mod coherence;
pub mod entropy;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod majorization;
pub mod measurement;
pub mod nonlocality;
pub mod optimize;
pub mod state;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, HermitianEigen, C64};
pub use majorization::{majorizes, BoundVector};
pub use measurement::{born_probabilities, max_overlap, Measurement, Observable};
pub use state::{fidelity, DensityMatrix, PureState};
