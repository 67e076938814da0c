//! Analytic period predictions, period extraction from sampled series,
//! truncation convergence scans and the gap-dependent optical coupling.

mod convergence;
mod gap;
mod periods;
mod signal;

pub use convergence::{convergence_scan, ConvergenceReport, ScanRow, LEAK_THRESHOLD};
pub use gap::{gap_coupling, GapConfiguration, GapCouplingFit};
pub use periods::{
    period_mec, period_om, period_optical_bs, to_hz, CouplingHierarchy, PeriodKind,
    PeriodPrediction,
};
pub use signal::{
    envelope_period, extract_period, extract_period_with, fit_decay_rate, fit_envelope_decay,
    interpolated_maxima, moving_average, period_from_samples, PeakOptions, PeriodEstimate,
};
