//! Exact per-mode propagator of the linearized system and its test oracles.

mod eigen;
mod green;
mod matrix;
mod propagator;

pub use eigen::{
    char_eigenvalues, psi_functions, EigenTriple, LinearSystem, ModeCoefficients, Psi, Regime,
    CRITICAL_BAND, SERIES_THRESHOLD,
};
pub use green::{
    from_real_similarity, green_hat, spectral_projectors, write_green_csv, GREEN_CSV_SCHEMA,
    PROJECTOR_SEPARATION,
};
pub use matrix::{matrix_exp_oracle, real_matrix_exp, ModeMatrix, RealMatrix, EXP_NORM_GUARD};
pub use propagator::{propagate, PropagatorTable, SpectralState};
