//! Seeded random matrices and states.

use rand::Rng;
use rand_distr::StandardNormal;

use super::decomp::complete_orthonormal;
use super::matrix::{inner, vec_norm, CMatrix, C64};

pub fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian_c64(rng))
}

/// Uniformly distributed unit vector.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| gaussian_c64(rng)).collect();
    let n = vec_norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// Haar-distributed unitary via Gram-Schmidt on Ginibre columns.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = random_matrix(dim, dim, rng);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for c in 0..dim {
        let mut col = g.column_vec(c);
        for _ in 0..2 {
            for b in &basis {
                let ov = inner(b, &col);
                for (x, y) in col.iter_mut().zip(b) {
                    *x -= ov * y;
                }
            }
        }
        let n = vec_norm(&col);
        basis.push(col.into_iter().map(|z| z / n).collect());
    }
    let basis = complete_orthonormal(basis, dim);
    let mut u = CMatrix::zeros(dim, dim);
    for (c, col) in basis.iter().enumerate() {
        u.set_column(c, col);
    }
    u
}

/// Full-rank density matrix `G G^dagger / Tr(G G^dagger)` (Hilbert-Schmidt measure).
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = random_matrix(dim, dim, rng);
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    w.scale_real(1.0 / tr).hermitian_part()
}

/// Density matrix of rank `rank`.
pub fn random_density_matrix_rank<R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    rng: &mut R,
) -> CMatrix {
    let g = random_matrix(dim, rank, rng);
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    w.scale_real(1.0 / tr).hermitian_part()
}
