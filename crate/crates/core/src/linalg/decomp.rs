//! Jacobi-type decompositions for small dense complex matrices.
//!
//! Both routines rotate one index pair at a time with a 2x2 unitary
//! `[[c, s], [-s e^{-iφ}, c e^{-iφ}]]`; the phase makes the coupling real,
//! after which the rotation is the classical real Jacobi one.

use super::matrix::{inner, vec_norm, CMatrix, C64, ONE, ZERO};
use crate::error::{dim_err, Error, Result};

const MAX_SWEEPS: usize = 80;

/// Eigendecomposition `m = V diag(values) V^dagger` of a Hermitian matrix,
/// eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Rebuilds `V f(Λ) V^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        CMatrix::from_fn(n, n, |r, c| {
            (0..n)
                .map(|k| v[(r, k)] * v[(c, k)].conj() * f(self.values[k]))
                .sum()
        })
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Jacobi-rotation parameters `(c, s, e^{-iφ})` annihilating the coupling
/// `g` between diagonal entries `a` and `b`.
fn rotation(a: f64, b: f64, g: C64) -> (f64, f64, C64) {
    let g_abs = g.norm();
    let phase = (g / g_abs).conj();
    let tau = (b - a) / (2.0 * g_abs);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, phase)
}

/// Right-multiplies columns `p`, `q` of `m` by the rotation.
fn rotate_columns(m: &mut CMatrix, p: usize, q: usize, c: f64, s: f64, phase: C64) {
    for k in 0..m.rows() {
        let mp = m[(k, p)];
        let mq = m[(k, q)] * phase;
        m[(k, p)] = mp * c - mq * s;
        m[(k, q)] = mp * s + mq * c;
    }
}

/// Left-multiplies rows `p`, `q` of `m` by the adjoint rotation.
fn rotate_rows(m: &mut CMatrix, p: usize, q: usize, c: f64, s: f64, phase: C64) {
    let phase_c = phase.conj();
    for k in 0..m.cols() {
        let mp = m[(p, k)];
        let mq = m[(q, k)] * phase_c;
        m[(p, k)] = mp * c - mq * s;
        m[(q, k)] = mp * s + mq * c;
    }
}

/// Cyclic Jacobi eigensolver. The antihermitian part of the input is dropped.
pub fn eigh(m: &CMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(dim_err(format!(
            "eigh needs a square matrix, got {:?}",
            m.shape()
        )));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-17 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = a[(p, q)];
                if g.norm() <= 1e-300 {
                    continue;
                }
                let (c, s, phase) = rotation(a[(p, p)].re, a[(q, q)].re, g);
                rotate_columns(&mut a, p, q, c, s, phase);
                rotate_rows(&mut a, p, q, c, s, phase);
                rotate_columns(&mut v, p, q, c, s, phase);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Singular value decomposition `m = U diag(s) V^dagger`, `s` descending,
/// `U` and `V` unitary.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

/// One-sided (Hestenes) Jacobi SVD of a square matrix. Singular values come
/// out as column norms, which keeps small ones accurate in absolute terms.
pub fn svd(m: &CMatrix) -> Result<Svd> {
    if !m.is_square() {
        return Err(dim_err(format!(
            "svd needs a square matrix, got {:?}",
            m.shape()
        )));
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                for k in 0..n {
                    let (x, y) = (a[(k, p)], a[(k, q)]);
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                if gamma.norm() <= 1e-300 || gamma.norm() <= 1e-16 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let (c, s, phase) = rotation(alpha, beta, gamma);
                rotate_columns(&mut a, p, q, c, s, phase);
                rotate_columns(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| vec_norm(&a.column_vec(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let v = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    let cutoff = s.first().copied().unwrap_or(0.0) * 1e-14;
    let mut u_cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        if s[k] > cutoff && s[k] > 0.0 {
            let col = a.column_vec(j);
            u_cols.push(col.iter().map(|z| z / s[k]).collect());
        }
    }
    let u_cols = complete_orthonormal(u_cols, n);
    let mut u = CMatrix::zeros(n, n);
    for (c, col) in u_cols.iter().enumerate() {
        u.set_column(c, col);
    }
    Ok(Svd { u, s, v })
}

/// Extends an orthonormal set of vectors in `C^n` to a full basis.
pub fn complete_orthonormal(mut basis: Vec<Vec<C64>>, n: usize) -> Vec<Vec<C64>> {
    let mut k = 0;
    while basis.len() < n && k < n {
        let mut cand = vec![ZERO; n];
        cand[k] = ONE;
        // two Gram-Schmidt passes
        for _ in 0..2 {
            for b in &basis {
                let ov = inner(b, &cand);
                for (x, y) in cand.iter_mut().zip(b) {
                    *x -= ov * y;
                }
            }
        }
        let norm = vec_norm(&cand);
        if norm > 1e-6 {
            basis.push(cand.iter().map(|z| z / norm).collect());
        }
        k += 1;
    }
    basis
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    Ok(svd(m)?.s.iter().sum())
}

/// Unitary factor `W` of the polar decomposition `m = W P`.
pub fn polar_unitary(m: &CMatrix) -> Result<CMatrix> {
    let Svd { u, v, .. } = svd(m)?;
    u.matmul(&v.adjoint())
}

/// Eigenvalues at or above this are treated as round-off and clamped to zero.
pub const PSD_CLAMP: f64 = -1e-8;

fn check_hermitian(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(dim_err(format!(
            "expected a square matrix, got {:?}",
            m.shape()
        )));
    }
    let herm = m.hermiticity_error();
    if herm > 1e-8 * m.max_abs().max(1.0) {
        return Err(Error::InvalidInput(format!(
            "matrix is not Hermitian (deviation {herm:e})"
        )));
    }
    Ok(())
}

/// Principal square root of a Hermitian positive semidefinite matrix.
pub fn matrix_sqrt(m: &CMatrix) -> Result<CMatrix> {
    check_hermitian(m)?;
    let eig = eigh(m)?;
    if eig.min() < PSD_CLAMP {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min(),
        });
    }
    // round-off eigenvalues would otherwise contribute their square root
    let floor = eig.max().max(0.0) * m.rows() as f64 * 8.0 * f64::EPSILON;
    Ok(eig.map(|x| if x > floor { x.sqrt() } else { 0.0 }))
}

/// For a PSD `m`, returns `(sqrt(m)^+, P)` where `P` projects onto the
/// support of `m`. Eigenvalues below `rel_tol * λ_max` count as zero.
pub fn psd_sqrt_pinv(m: &CMatrix, rel_tol: f64) -> Result<(CMatrix, CMatrix)> {
    check_hermitian(m)?;
    let eig = eigh(m)?;
    if eig.min() < PSD_CLAMP {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min(),
        });
    }
    let cut = eig.max().max(0.0) * rel_tol;
    let keep = |x: f64| x > cut && x > 0.0;
    let pinv = eig.map(|x| if keep(x) { 1.0 / x.sqrt() } else { 0.0 });
    let proj = eig.map(|x| if keep(x) { 1.0 } else { 0.0 });
    Ok((pinv, proj))
}
