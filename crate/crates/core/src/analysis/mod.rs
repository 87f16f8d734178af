//! Decay-rate fits, lower-bound ratios, energy audit and the other
//! verdicts computed from a [`NormSeries`].

mod checks;
mod fit;
mod report;
mod series;

pub use checks::{
    c_decay_check, energy_audit, fourier_split, interpolation_violations, linfty_decay_check,
    mass_drift, CDecayCheck, EnergyReport, C_EXCESS_BOUND, ENERGY_TOLERANCE,
};
pub use fit::{
    default_window, fit_decay, l2_exponent, least_squares, lower_bound_ratio, DecayFit, LineFit,
    Quantity, RatioCheck, Verdict, MIN_SAMPLES,
};
pub use report::{analyze, AnalysisConfig, Check, Report, RESIDUAL_SCHEMA, VERDICT_SCHEMA};
pub use series::{NormRow, NormSeries, SeriesMeta, SERIES_SCHEMA};
