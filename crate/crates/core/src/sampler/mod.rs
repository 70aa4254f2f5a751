//! Homodyne record simulation, the 128×256 histogram reduction and the
//! direct-sampling estimators.

pub mod estimate;
pub mod histogram;
pub mod record;

pub use estimate::{estimate_exponential_moments, estimate_number_moments, MeasurementData, MomentEstimate, MAX_PHASE_GAP};
pub use histogram::{histogram_records, vacuum_scale, QuadratureHistogram, AMPLITUDE_BINS, PHASE_BINS};
pub use record::{generate_records, generate_records_at_phase, FockSampler, HomodyneRecord, PhaseScheme, CHUNK_SIZE};
