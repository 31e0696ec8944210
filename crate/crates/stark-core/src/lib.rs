//! Numerical laboratory for two-body quantum dynamics in a uniform electric
//! field along the first axis.
//!
//! The crate simulates wave-packet evolution under `H = |p|^2/2 - x_1 + V(x)`
//! on a periodic spectral grid, forms high-velocity matrix elements of the
//! (optionally Dollard-modified) scattering operator in a comoving boosted
//! gauge, verifies the decay orders of the underlying propagation integrals,
//! and recovers the interaction potential from commutator data via
//! filtered backprojection of the line-integral transform of its gradient.
//!
//! Modules map onto the pipeline stages:
//! - [`grid`]: periodic-grid wavefunctions, spectral momentum operators,
//!   boosts, weighted position moments.
//! - [`potentials`]: phantom potentials by decay class, envelope validation,
//!   exact line-integral (X-ray) oracles.
//! - [`propagators`]: exact free-field propagator, split-step comoving and
//!   lab-frame evolution, Dollard and Graf modifier phases.
//! - [`scattering`]: finite-horizon scattering-operator action and boosted
//!   commutator matrix elements with Cauchy convergence control.
//! - [`estimates`]: propagation-integral measurements and velocity-order
//!   slope fits.
//! - [`reconstruct`]: reconstruction-identity references, high-velocity
//!   extraction, X-ray dataset assembly, filtered backprojection inversion.
//!
//! All operations on shared state are pure; sweeps parallelize over
//! independent jobs when the `parallel` feature (default) is enabled. Grid
//! reductions use a fixed-shape pairwise tree, so results are bit-identical
//! across thread counts and with the sequential fallback.

pub mod error;
pub mod estimates;
pub mod grid;
pub mod par;
pub mod potentials;
pub mod propagators;
pub mod quadrature;
pub mod reconstruct;
pub mod scattering;

pub use error::{CoreError, Result};
pub use grid::{Axis, GridSpec, MomentumCutoff, WaveFunction};
pub use potentials::{CompositePotential, PotentialClassTag, PotentialSpec};
