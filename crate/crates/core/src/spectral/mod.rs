//! Periodic-box geometry, transforms, spectral calculus and Sobolev norms.

mod fft;
mod field;
mod grid;
mod ops;
mod snapshot;
mod sum;

pub use field::{ScalarField, SpectralScalar, SpectralVector, VectorField};
pub use grid::{Grid, WavenumberTable};
pub use ops::{
    dealias, forward_dft, inverse_dft, sobolev_seminorm, spectral_derivative, SpectralOps,
    HERMITIAN_TOLERANCE,
};
pub use snapshot::{
    load_snapshot, read_snapshot, save_snapshot, write_snapshot, Snapshot, SNAPSHOT_SCHEMA,
};
pub(crate) use sum::max_by;
pub use sum::{pairwise_sum, pairwise_sum_by};

#[cfg(test)]
mod tests;
