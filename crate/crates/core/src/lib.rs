//! Which-way information and generalized visibility for interferometers whose
//! particle carries an internal (spin or polarization) degree of freedom.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense complex matrices, Jacobi eigen/singular value
//!   decompositions, trace norm, fidelity.
//! - [`channels`]: path-preserving channels stored as Kraus pairs, their Choi
//!   states and Stinespring dilations, plus the worked example channels.
//! - [`duality`]: distinguishability `D`, generalized visibility `V_G` and the
//!   `D² + V_G² ≤ 1` check, with a brute-force unitary maximization oracle.
//! - [`bounds`]: fractional visibilities, coefficient certificates and the
//!   measurable lower bounds on `V_G`.
//! - [`interferometer`]: Monte Carlo simulation of the noisy Mach-Zehnder
//!   experiment and sinusoidal fringe fitting.

pub mod bounds;
pub mod channels;
pub mod duality;
mod error;
pub mod interferometer;
pub mod linalg;

pub use error::{Error, Result};
