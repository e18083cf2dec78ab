//! Phase-space quantum mechanics on uniform grids.
//!
//! The crate connects four descriptions of a one-dimensional quantum
//! state: the wavefunction, the density matrix in midpoint coordinates,
//! the Wigner function and Moyal's characteristic function. It evolves
//! them with three independent engines and realizes the Weyl algebra and
//! von Neumann's Gaussian idempotent in a truncated Fock space.
//!
//! Units are `hbar = 1`; the mass defaults to 1.

pub mod dynamics;
pub mod error;
mod fft;
pub mod grid;
pub mod moments;
pub mod potential;
pub mod state;
pub mod transforms;
pub mod weyl;

pub use error::{Error, Result};
pub use grid::{GridSpec1D, PhaseGridSpec};
pub use moments::{moments_from_wigner, Moments};
pub use potential::PotentialSpec;
pub use state::{make_cat, make_fock, make_gaussian, Wavefunction};
pub use transforms::{CharacteristicFunction, DensityMatrix, MidpointDensity, WignerFunction};
pub use dynamics::{compare_evolutions, ComparisonReport, Discrepancy, EvolutionConfig, Method};
pub use weyl::{build_fock_rep, CMatrix, FockOperator, FockRep, QuadratureBox};
