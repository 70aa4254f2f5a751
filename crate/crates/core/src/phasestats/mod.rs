//! Canonical phase distribution, mean phase, phase uncertainty and the
//! number–phase uncertainty report.

pub mod distribution;
pub mod report;
pub mod statistics;

pub use distribution::{synthesis_std_error, synthesize_phase_distribution, uniform_phase_grid, PhaseDistribution, Window};
pub use report::{uncertainty_report, ReportRow, UncertaintyReport};
pub use statistics::{phase_statistics, PhaseStatistics, Product};
