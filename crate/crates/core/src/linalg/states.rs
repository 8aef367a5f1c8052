use super::decomp::{eigh, matrix_sqrt, trace_norm};
use super::matrix::{basis_vector, kron_vec, vec_norm, CMatrix, C64};
use crate::error::{dim_err, Error, Result};

/// Structural tolerance for Hermiticity, positivity and normalization.
pub const STRUCT_TOL: f64 = 1e-10;

/// A normalized density operator on a `d`-dimensional system.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinState {
    matrix: CMatrix,
}

impl SpinState {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, STRUCT_TOL)
    }

    pub fn with_tolerance(matrix: CMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(dim_err(format!(
                "state must be square, got {:?}",
                matrix.shape()
            )));
        }
        let herm = matrix.hermiticity_error();
        if herm > tol {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = eigh(&matrix)?.min();
        if min < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    pub fn pure(psi: &[C64]) -> Result<Self> {
        let n = vec_norm(psi);
        if (n - 1.0).abs() > STRUCT_TOL {
            return Err(Error::InvalidState(format!("ket norm {n} is not 1")));
        }
        Self::new(CMatrix::projector(psi))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn sqrt(&self) -> CMatrix {
        matrix_sqrt(&self.matrix).expect("validated state has a square root")
    }
}

/// Uhlmann fidelity `|| sqrt(rho) sqrt(sigma) ||_1`.
pub fn fidelity(rho: &SpinState, sigma: &SpinState) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(dim_err(format!(
            "fidelity of {}-dim and {}-dim states",
            rho.dim(),
            sigma.dim()
        )));
    }
    trace_norm(&(&rho.sqrt() * &sigma.sqrt()))
}

/// `(Σ_l |l⟩|l⟩)/√d` on two copies of a `d`-dimensional system.
#[derive(Clone, Debug)]
pub struct MaxEntangledState {
    dim: usize,
    vector: Vec<C64>,
}

impl MaxEntangledState {
    pub fn new(dim: usize) -> Self {
        let norm = 1.0 / (dim as f64).sqrt();
        let mut vector = vec![C64::new(0.0, 0.0); dim * dim];
        for l in 0..dim {
            let e = basis_vector(dim, l);
            for (x, y) in vector.iter_mut().zip(kron_vec(&e, &e)) {
                *x += y * norm;
            }
        }
        Self { dim, vector }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self) -> &[C64] {
        &self.vector
    }

    pub fn projector(&self) -> CMatrix {
        CMatrix::projector(&self.vector)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_density_matrix, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn h() -> Vec<C64> {
        basis_vector(2, 0)
    }

    fn v() -> Vec<C64> {
        basis_vector(2, 1)
    }

    #[test]
    fn fidelity_fixed_cases() {
        let hs = SpinState::pure(&h()).unwrap();
        let vs = SpinState::pure(&v()).unwrap();
        assert!((fidelity(&hs, &hs).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&hs, &vs).unwrap().abs() < 1e-12);
        // diag(1,0) and diag(½,½): ||diag(1,0)·diag(1/√2,1/√2)|| = 1/√2
        let mixed = SpinState::maximally_mixed(2);
        assert!((fidelity(&hs, &mixed).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        let a = SpinState::maximally_mixed(2);
        let b = SpinState::maximally_mixed(3);
        assert!(matches!(fidelity(&a, &b), Err(Error::Dimension(_))));
    }

    #[test]
    fn state_validation() {
        assert!(SpinState::new(CMatrix::identity(2)).is_err());
        assert!(SpinState::new(CMatrix::diag_real(&[1.5, -0.5])).is_err());
        let nonherm = CMatrix::from_rows(&[
            &[C64::new(0.5, 0.0), C64::new(0.1, 0.0)],
            &[C64::new(0.2, 0.0), C64::new(0.5, 0.0)],
        ]);
        assert!(SpinState::new(nonherm).is_err());
        assert!(SpinState::pure(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn max_entangled_is_normalized() {
        for d in 1..5 {
            let phi = MaxEntangledState::new(d);
            assert!((vec_norm(phi.vector()) - 1.0).abs() < 1e-12);
            // partial trace of |Φ+⟩⟨Φ+| is maximally mixed
            let red = phi.projector().partial_trace_second(d, d).unwrap();
            assert!(red.max_abs_diff(SpinState::maximally_mixed(d).matrix()) < 1e-14);
        }
    }

    #[test]
    fn fidelity_unitary_invariance() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let rho = random_density_matrix(3, &mut rng);
        let sigma = random_density_matrix(3, &mut rng);
        let u = random_unitary(3, &mut rng);
        let conj = |m: &CMatrix| SpinState::new(&(&u * m) * &u.adjoint()).unwrap();
        let f1 = fidelity(
            &SpinState::new(rho.clone()).unwrap(),
            &SpinState::new(sigma.clone()).unwrap(),
        )
        .unwrap();
        let f2 = fidelity(&conj(&rho), &conj(&sigma)).unwrap();
        assert!((f1 - f2).abs() < 1e-9);
    }
}
