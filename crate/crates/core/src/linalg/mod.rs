//! Small dense complex linear algebra.

mod decomp;
mod matrix;
pub mod random;
mod states;

pub use decomp::{
    complete_orthonormal, eigh, matrix_sqrt, polar_unitary, psd_sqrt_pinv, svd, trace_norm,
    HermitianEigen, Svd, PSD_CLAMP,
};
pub use matrix::{basis_vector, inner, kron_vec, vec_norm, CMatrix, C64, I, ONE, ZERO};
pub use states::{fidelity, MaxEntangledState, SpinState, STRUCT_TOL};
