//! Topological recursion on the spectral curve `x = z^2/2`,
//! `y = z - 1/2 sum_k t_{2k+3} z^{2k+1}`, with exact rational arithmetic,
//! and the transforms that turn its correlators into Weil-Petersson volumes
//! and kappa/psi intersection numbers.

pub mod algebra;
pub mod checks;
pub mod curve;
pub mod error;
pub mod moduli;
pub mod recursion;
pub mod series;

pub use algebra::{Coefficient, Generator, Monomial, Rational};
pub use curve::{Preset, SpectralCurve, Time3};
pub use error::{Error, Result};
pub use moduli::{
    conjugate_times, inverse_conjugate_times, laplace_to_volume, mumford_compose,
    mumford_decompose, psi_oracle, volume_to_laplace, wp_volume, ConjugatedTimes,
    IntersectionTable, VolumePolynomial,
};
pub use recursion::{dimension, is_stable, stable_pairs, Correlator, Engine, FreeEnergy};
pub use series::TruncatedSeries;
