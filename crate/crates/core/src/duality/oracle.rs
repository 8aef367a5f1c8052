//! Brute-force `V_G` as `max_U |Tr(U N)|` over unitaries `U` on the two spin
//! replicas, with `N` the visibility operator.
//!
//! The maximization avoids the SVD used by the closed form: it runs
//! coordinate ascent over 2x2 unitary rotations of index pairs, each step
//! solved exactly by the closed-form 2x2 polar factor, from several random
//! starting unitaries.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use super::visibility_operator;
use crate::channels::{PathChannel, Preparation};
use crate::error::{Error, Result};
use crate::linalg::random::random_unitary;
use crate::linalg::{inner, vec_norm, CMatrix, C64};

#[derive(Clone, Copy, Debug)]
pub struct BruteForceOptions {
    pub restarts: usize,
    pub max_sweeps: usize,
    /// Relative stationarity tolerance: at a maximum `U N` is Hermitian.
    pub tol: f64,
    pub seed: u64,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_sweeps: 2000,
            tol: 1e-10,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BruteForceResult {
    pub value: f64,
    pub converged: bool,
    pub sweeps: usize,
    pub best_unitary: CMatrix,
}

/// Unitary polar factor of a 2x2 matrix `c = W P`:
/// `W = (c + e^{iα} adj(c)^†) / (σ1 + σ2)` with `e^{iα} = det c / |det c|`.
fn polar_2x2(c: [[C64; 2]; 2]) -> Option<[[C64; 2]; 2]> {
    let det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
    let phase = if det.norm() > 0.0 {
        det / det.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    // adj(c)^† = [[c11*, −c10*], [−c01*, c00*]]
    let s = [
        [
            c[0][0] + phase * c[1][1].conj(),
            c[0][1] - phase * c[1][0].conj(),
        ],
        [
            c[1][0] - phase * c[0][1].conj(),
            c[1][1] + phase * c[0][0].conj(),
        ],
    ];
    let fro: f64 = s.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if fro < 1e-300 {
        return None;
    }
    let scale = std::f64::consts::SQRT_2 / fro;
    Some([
        [s[0][0] * scale, s[0][1] * scale],
        [s[1][0] * scale, s[1][1] * scale],
    ])
}

fn reorthonormalize(u: &mut CMatrix) {
    let n = u.rows();
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(n);
    for c in 0..n {
        let mut col = u.column_vec(c);
        for b in &basis {
            let ov = inner(b, &col);
            for (x, y) in col.iter_mut().zip(b) {
                *x -= ov * y;
            }
        }
        let norm = vec_norm(&col);
        basis.push(col.into_iter().map(|z| z / norm).collect());
    }
    for (c, col) in basis.iter().enumerate() {
        u.set_column(c, col);
    }
}

fn ascend(n_op: &CMatrix, mut u: CMatrix, opts: &BruteForceOptions) -> (f64, bool, usize, CMatrix) {
    let n = n_op.rows();
    let scale = n_op.max_abs().max(1e-300);
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let mut c = &u * n_op;
        for p in 0..n {
            for q in p + 1..n {
                let block = [[c[(p, p)], c[(p, q)]], [c[(q, p)], c[(q, q)]]];
                let Some(w) = polar_2x2(block) else { continue };
                // left-multiply rows p, q of U and C by g = w^†
                let g = [
                    [w[0][0].conj(), w[1][0].conj()],
                    [w[0][1].conj(), w[1][1].conj()],
                ];
                for m in [&mut u, &mut c] {
                    for k in 0..n {
                        let (a, b) = (m[(p, k)], m[(q, k)]);
                        m[(p, k)] = g[0][0] * a + g[0][1] * b;
                        m[(q, k)] = g[1][0] * a + g[1][1] * b;
                    }
                }
            }
        }
        reorthonormalize(&mut u);
        let c = &u * n_op;
        if c.hermiticity_error() <= opts.tol * scale {
            converged = true;
            break;
        }
    }
    let value = (&u * n_op).trace().norm();
    (value, converged, sweeps, u)
}

/// Multi-start maximization of `|Tr(U N)|`; restarts run in parallel with
/// ChaCha streams derived from `opts.seed`.
pub fn vg_bruteforce(
    ch: &PathChannel,
    prep: &Preparation,
    opts: BruteForceOptions,
) -> Result<BruteForceResult> {
    if ch.spin_dim() > 4 {
        return Err(Error::InvalidInput(format!(
            "brute force limited to spin dimension 4, got {}",
            ch.spin_dim()
        )));
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidInput("need at least one restart".into()));
    }
    let n_op = visibility_operator(ch, prep)?;
    let dim = n_op.rows();
    let runs: Vec<_> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
            rng.set_stream(r as u64);
            let start = random_unitary(dim, &mut rng);
            ascend(&n_op, start, &opts)
        })
        .collect();
    let sweeps = runs.iter().map(|r| r.2).max().unwrap_or(0);
    let best = runs
        .into_iter()
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one restart");
    Ok(BruteForceResult {
        value: best.0,
        converged: best.1,
        sweeps,
        best_unitary: best.3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{identity_channel, random_path_channel, transpose_channel};
    use crate::duality::generalized_visibility;
    use crate::linalg::random::{random_matrix, random_pure_state};
    use crate::linalg::trace_norm;
    use crate::linalg::{basis_vector, ZERO};

    #[test]
    fn polar_2x2_maximizes_trace() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..50 {
            let m = random_matrix(2, 2, &mut rng);
            let c = [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]];
            let w = polar_2x2(c).unwrap();
            let wm = CMatrix::from_rows(&[&w[0], &w[1]]);
            assert!(wm.is_unitary(1e-12));
            let p = &wm.adjoint() * &m;
            assert!((p.trace().re - trace_norm(&m).unwrap()).abs() < 1e-12);
        }
        // rank one
        let c = [
            [C64::new(1.0, 0.0), C64::new(2.0, 0.0)],
            [C64::new(2.0, 0.0), C64::new(4.0, 0.0)],
        ];
        let w = polar_2x2(c).unwrap();
        assert!(CMatrix::from_rows(&[&w[0], &w[1]]).is_unitary(1e-12));
        assert!(polar_2x2([[ZERO; 2]; 2]).is_none());
    }

    #[test]
    fn identity_pure_prep() {
        let prep = Preparation::pure(basis_vector(2, 0), basis_vector(2, 1)).unwrap();
        let r = vg_bruteforce(&identity_channel(2), &prep, BruteForceOptions::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6);
        assert!(r.converged);
    }

    #[test]
    fn transpose_pure_prep() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let prep = Preparation::pure(
            random_pure_state(2, &mut rng),
            random_pure_state(2, &mut rng),
        )
        .unwrap();
        let r = vg_bruteforce(&transpose_channel(2), &prep, BruteForceOptions::default()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-6);
    }

    #[test]
    fn random_channel_matches_closed_form() {
        let ch = random_path_channel(2, 3, 77).unwrap();
        let prep = Preparation::maximally_mixed(2);
        let r = vg_bruteforce(
            &ch,
            &prep,
            BruteForceOptions {
                seed: 5,
                ..Default::default()
            },
        )
        .unwrap();
        let closed = generalized_visibility(&ch, &prep).unwrap();
        assert!((r.value - closed).abs() < 1e-6);
        assert!(r.value <= closed + 1e-6);
    }

    #[test]
    fn rejects_large_dimension() {
        let prep = Preparation::maximally_mixed(5);
        assert!(vg_bruteforce(&identity_channel(5), &prep, BruteForceOptions::default()).is_err());
    }
}
