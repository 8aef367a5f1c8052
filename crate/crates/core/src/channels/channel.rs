use std::collections::BTreeMap;

use super::state::PathSpinState;
use crate::error::{dim_err, Error, Result};
use crate::linalg::{basis_vector, CMatrix};

/// Tolerance on `Σ_k K_k^† K_k = 1`.
pub const TP_TOL: f64 = 1e-9;

/// Which interferometer arm.
pub type Path = usize;

/// A channel that never moves the particle between arms. Each Kraus
/// operator is `|0⟩⟨0| ⊗ A_k + |1⟩⟨1| ⊗ B_k`, stored as the pair `(A_k, B_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathChannel {
    spin_dim: usize,
    kraus_pairs: Vec<(CMatrix, CMatrix)>,
    metadata: BTreeMap<String, String>,
}

impl PathChannel {
    pub fn new(kraus_pairs: Vec<(CMatrix, CMatrix)>) -> Result<Self> {
        let first = kraus_pairs
            .first()
            .ok_or_else(|| Error::InvalidChannel("no Kraus pairs".into()))?;
        let d = first.0.rows();
        for (a, b) in &kraus_pairs {
            if a.shape() != (d, d) || b.shape() != (d, d) {
                return Err(dim_err(format!(
                    "Kraus pair of shapes {:?}, {:?} in spin dimension {d}",
                    a.shape(),
                    b.shape()
                )));
            }
        }
        let channel = Self {
            spin_dim: d,
            kraus_pairs,
            metadata: BTreeMap::new(),
        };
        for arm in 0..2 {
            let dev = channel.completeness_error(arm);
            if dev > TP_TOL {
                return Err(Error::InvalidChannel(format!(
                    "arm {arm} Kraus operators are not trace preserving (deviation {dev:e})"
                )));
            }
        }
        Ok(channel)
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn spin_dim(&self) -> usize {
        self.spin_dim
    }

    pub fn kraus_pairs(&self) -> &[(CMatrix, CMatrix)] {
        &self.kraus_pairs
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub(crate) fn metadata_mut(&mut self) -> &mut BTreeMap<String, String> {
        &mut self.metadata
    }

    /// Kraus operator of pair `k` acting in `arm`.
    pub fn arm_kraus(&self, k: usize, arm: Path) -> &CMatrix {
        let (a, b) = &self.kraus_pairs[k];
        if arm == 0 {
            a
        } else {
            b
        }
    }

    /// `max |Σ_k K_k^† K_k − 1|` for one arm.
    pub fn completeness_error(&self, arm: Path) -> f64 {
        let d = self.spin_dim;
        let mut sum = CMatrix::zeros(d, d);
        for k in 0..self.kraus_pairs.len() {
            let kk = self.arm_kraus(k, arm);
            sum = &sum + &(&kk.adjoint() * kk);
        }
        sum.max_abs_diff(&CMatrix::identity(d))
    }

    /// `Λ_ij(σ) = Σ_k K_k^(i) σ K_k^(j)†`.
    pub fn block_map(&self, i: Path, j: Path, sigma: &CMatrix) -> Result<CMatrix> {
        if i > 1 || j > 1 {
            return Err(Error::InvalidInput(format!(
                "path indices ({i}, {j}) out of range"
            )));
        }
        let d = self.spin_dim;
        if sigma.shape() != (d, d) {
            return Err(dim_err(format!(
                "operator {:?} on spin dimension {d}",
                sigma.shape()
            )));
        }
        let mut out = CMatrix::zeros(d, d);
        for k in 0..self.kraus_pairs.len() {
            let left = self.arm_kraus(k, i);
            let right = self.arm_kraus(k, j);
            out = &out + &(&(left * sigma) * &right.adjoint());
        }
        Ok(out)
    }

    /// Applies the channel blockwise.
    pub fn apply(&self, state: &PathSpinState) -> Result<PathSpinState> {
        if state.spin_dim() != self.spin_dim {
            return Err(dim_err(format!(
                "state of spin dimension {} through channel of spin dimension {}",
                state.spin_dim(),
                self.spin_dim
            )));
        }
        let blocks = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                self.block_map(i, j, state.block(i, j))
                    .expect("dimensions checked")
            })
        });
        Ok(PathSpinState::from_blocks_unchecked(blocks))
    }

    /// Matrix `S` with `vec(Λ_ij(σ)) = S vec(σ)`, row-major vectorization.
    pub fn superoperator(&self, i: Path, j: Path) -> CMatrix {
        let d = self.spin_dim;
        let mut s = CMatrix::zeros(d * d, d * d);
        for c in 0..d {
            for e in 0..d {
                let unit = CMatrix::outer(&basis_vector(d, c), &basis_vector(d, e));
                let img = self
                    .block_map(i, j, &unit)
                    .expect("unit operator has spin shape");
                for a in 0..d {
                    for b in 0..d {
                        s[(a * d + b, c * d + e)] = img[(a, b)];
                    }
                }
            }
        }
        s
    }

    /// `(I ⊗ Λ_ij)(|Φ+⟩⟨Φ+|)` on two spin replicas, `d² x d²`.
    pub fn block_choi(&self, i: Path, j: Path) -> CMatrix {
        let d = self.spin_dim;
        let mut m = CMatrix::zeros(d * d, d * d);
        let inv_d = 1.0 / d as f64;
        for k in 0..d {
            for l in 0..d {
                let unit = CMatrix::outer(&basis_vector(d, k), &basis_vector(d, l));
                let img = self
                    .block_map(i, j, &unit)
                    .expect("unit operator has spin shape");
                let term = unit.kron(&img).scale_real(inv_d);
                m = &m + &term;
            }
        }
        m
    }

    /// `(I ⊗ Λ)(|Φ+⟩⟨Φ+|)` over the full path ⊗ spin system, ordering
    /// `Q S Q' S'`; a `4d² x 4d²` density matrix.
    pub fn choi_state(&self) -> CMatrix {
        let d = self.spin_dim;
        let n = 2 * d;
        let mut choi = CMatrix::zeros(n * n, n * n);
        for a in 0..n {
            for b in 0..n {
                let (i, l) = (a / d, a % d);
                let (j, m) = (b / d, b % d);
                let unit = CMatrix::outer(&basis_vector(d, l), &basis_vector(d, m));
                let img = self
                    .block_map(i, j, &unit)
                    .expect("unit operator has spin shape");
                // |a⟩⟨b| ⊗ |i⟩⟨j| ⊗ Λ_ij(|l⟩⟨m|)
                for s in 0..d {
                    for t in 0..d {
                        choi[(a * n + i * d + s, b * n + j * d + t)] = img[(s, t)];
                    }
                }
            }
        }
        choi.scale_real(1.0 / n as f64)
    }

    /// Channel action through the Choi state: `2d Tr_QS[Λ̂ (ρ^T ⊗ 1)]`.
    pub fn apply_via_choi(choi: &CMatrix, state: &PathSpinState) -> Result<PathSpinState> {
        let n = 2 * state.spin_dim();
        if choi.shape() != (n * n, n * n) {
            return Err(dim_err("Choi state does not match the input state"));
        }
        let rho_t = state.assemble().transpose().kron(&CMatrix::identity(n));
        let out = choi
            .matmul(&rho_t)?
            .partial_trace_first(n, n)?
            .scale_real(n as f64);
        let d = state.spin_dim();
        let b = |i: usize, j: usize| out.block(i * d, j * d, d, d);
        Ok(PathSpinState::from_blocks_unchecked([
            [b(0, 0), b(0, 1)],
            [b(1, 0), b(1, 1)],
        ]))
    }
}
