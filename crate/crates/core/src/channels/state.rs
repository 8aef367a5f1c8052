use crate::error::{dim_err, Error, Result};
use crate::linalg::{basis_vector, eigh, vec_norm, CMatrix, SpinState, C64, STRUCT_TOL};

/// Joint path ⊗ spin density operator held as its 2x2 grid of `d x d`
/// blocks, block `(i, j) = ⟨i|ρ_QS|j⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSpinState {
    spin_dim: usize,
    blocks: [[CMatrix; 2]; 2],
}

impl PathSpinState {
    /// Validates positivity, unit trace and equiprobable paths.
    pub fn new(blocks: [[CMatrix; 2]; 2]) -> Result<Self> {
        let d = blocks[0][0].rows();
        for row in &blocks {
            for b in row {
                if b.shape() != (d, d) {
                    return Err(dim_err(format!(
                        "block shape {:?}, expected {d}x{d}",
                        b.shape()
                    )));
                }
            }
        }
        let state = Self {
            spin_dim: d,
            blocks,
        };
        SpinState::new(state.assemble())?;
        for i in 0..2 {
            let p = state.blocks[i][i].trace().re;
            if (p - 0.5).abs() > 1e-9 {
                return Err(Error::InvalidState(format!(
                    "path {i} has probability {p}, expected 1/2"
                )));
            }
        }
        Ok(state)
    }

    /// Splits a `2d x 2d` matrix (path index major) into blocks.
    pub fn from_matrix(m: &CMatrix, spin_dim: usize) -> Result<Self> {
        if m.shape() != (2 * spin_dim, 2 * spin_dim) {
            return Err(dim_err(format!(
                "{:?} is not 2d x 2d for d = {spin_dim}",
                m.shape()
            )));
        }
        let d = spin_dim;
        let b = |i: usize, j: usize| m.block(i * d, j * d, d, d);
        Self::new([[b(0, 0), b(0, 1)], [b(1, 0), b(1, 1)]])
    }

    /// Builds without validation; used for channel outputs of validated inputs.
    pub(crate) fn from_blocks_unchecked(blocks: [[CMatrix; 2]; 2]) -> Self {
        let spin_dim = blocks[0][0].rows();
        Self { spin_dim, blocks }
    }

    pub fn spin_dim(&self) -> usize {
        self.spin_dim
    }

    pub fn block(&self, i: usize, j: usize) -> &CMatrix {
        &self.blocks[i][j]
    }

    pub fn assemble(&self) -> CMatrix {
        let d = self.spin_dim;
        let mut m = CMatrix::zeros(2 * d, 2 * d);
        for i in 0..2 {
            for j in 0..2 {
                m.set_block(i * d, j * d, &self.blocks[i][j]);
            }
        }
        m
    }

    /// Normalized spin state in arm `i`, `2⟨i|ρ|i⟩`.
    pub fn arm_state(&self, i: usize) -> Result<SpinState> {
        SpinState::with_tolerance(self.blocks[i][i].scale_real(2.0).hermitian_part(), 1e-9)
    }
}

/// Spin preparation for the two arms: either a single pure pair
/// `(|ψ0⟩, |ψ1⟩)` or a weighted ensemble of such pairs.
#[derive(Clone, Debug, PartialEq)]
pub enum Preparation {
    Pure {
        psi0: Vec<C64>,
        psi1: Vec<C64>,
    },
    Ensemble {
        weights: Vec<f64>,
        pairs: Vec<(Vec<C64>, Vec<C64>)>,
    },
}

fn check_ket(psi: &[C64], d: usize) -> Result<()> {
    if psi.len() != d {
        return Err(dim_err(format!(
            "ket of length {} in dimension {d}",
            psi.len()
        )));
    }
    let n = vec_norm(psi);
    if (n - 1.0).abs() > STRUCT_TOL {
        return Err(Error::InvalidState(format!("ket norm {n} is not 1")));
    }
    Ok(())
}

impl Preparation {
    pub fn pure(psi0: Vec<C64>, psi1: Vec<C64>) -> Result<Self> {
        check_ket(&psi0, psi0.len())?;
        check_ket(&psi1, psi0.len())?;
        Ok(Self::Pure { psi0, psi1 })
    }

    pub fn ensemble(weights: Vec<f64>, pairs: Vec<(Vec<C64>, Vec<C64>)>) -> Result<Self> {
        if weights.len() != pairs.len() || pairs.is_empty() {
            return Err(Error::InvalidInput(format!(
                "{} weights for {} pairs",
                weights.len(),
                pairs.len()
            )));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidInput(
                "ensemble weights must be positive".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > STRUCT_TOL {
            return Err(Error::InvalidInput(format!(
                "ensemble weights sum to {total}"
            )));
        }
        let d = pairs[0].0.len();
        for (a, b) in &pairs {
            check_ket(a, d)?;
            check_ket(b, d)?;
        }
        Ok(Self::Ensemble { weights, pairs })
    }

    /// Product ensemble reproducing arbitrary arm states `rho0`, `rho1`
    /// (eigenvectors of each, weights the products of eigenvalues).
    pub fn from_states(rho0: &SpinState, rho1: &SpinState) -> Result<Self> {
        if rho0.dim() != rho1.dim() {
            return Err(dim_err("arm states of different dimension"));
        }
        let spectral = |rho: &SpinState| -> Result<Vec<(f64, Vec<C64>)>> {
            let eig = eigh(rho.matrix())?;
            Ok(eig
                .values
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 1e-15)
                .map(|(k, &w)| (w, eig.vectors.column_vec(k)))
                .collect())
        };
        let (s0, s1) = (spectral(rho0)?, spectral(rho1)?);
        let mut weights = Vec::new();
        let mut pairs = Vec::new();
        for (w0, a) in &s0 {
            for (w1, b) in &s1 {
                weights.push(w0 * w1);
                pairs.push((a.clone(), b.clone()));
            }
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Self::ensemble(weights, pairs)
    }

    /// `ρ0 = ρ1 = 1/d`, realised as the ensemble of pairs `(|k⟩, |k⟩)`.
    pub fn maximally_mixed(d: usize) -> Self {
        let pairs = (0..d)
            .map(|k| (basis_vector(d, k), basis_vector(d, k)))
            .collect();
        Self::Ensemble {
            weights: vec![1.0 / d as f64; d],
            pairs,
        }
    }

    pub fn spin_dim(&self) -> usize {
        match self {
            Self::Pure { psi0, .. } => psi0.len(),
            Self::Ensemble { pairs, .. } => pairs[0].0.len(),
        }
    }

    /// Weighted pure pairs; a pure preparation is a one-element ensemble.
    pub fn components(&self) -> Vec<(f64, &[C64], &[C64])> {
        match self {
            Self::Pure { psi0, psi1 } => vec![(1.0, psi0.as_slice(), psi1.as_slice())],
            Self::Ensemble { weights, pairs } => weights
                .iter()
                .zip(pairs)
                .map(|(&w, (a, b))| (w, a.as_slice(), b.as_slice()))
                .collect(),
        }
    }

    fn arm_matrix(&self, arm: usize) -> CMatrix {
        let d = self.spin_dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, a, b) in self.components() {
            let ket = if arm == 0 { a } else { b };
            m = &m + &CMatrix::projector(ket).scale_real(w);
        }
        m
    }

    pub fn rho0(&self) -> SpinState {
        SpinState::with_tolerance(self.arm_matrix(0), 1e-9).expect("validated preparation")
    }

    pub fn rho1(&self) -> SpinState {
        SpinState::with_tolerance(self.arm_matrix(1), 1e-9).expect("validated preparation")
    }

    pub fn rho(&self, arm: usize) -> SpinState {
        if arm == 0 {
            self.rho0()
        } else {
            self.rho1()
        }
    }

    /// `Σ_m q_m |ψ^m⟩⟨ψ^m|` with `|ψ^m⟩ = (|0⟩|ψ0^m⟩ + |1⟩|ψ1^m⟩)/√2`.
    pub fn path_spin_state(&self) -> PathSpinState {
        let d = self.spin_dim();
        let mut blocks: [[CMatrix; 2]; 2] =
            std::array::from_fn(|_| std::array::from_fn(|_| CMatrix::zeros(d, d)));
        for (w, a, b) in self.components() {
            let kets = [a, b];
            for i in 0..2 {
                for j in 0..2 {
                    let term = CMatrix::outer(kets[i], kets[j]).scale_real(0.5 * w);
                    blocks[i][j] = &blocks[i][j] + &term;
                }
            }
        }
        PathSpinState::from_blocks_unchecked(blocks)
    }
}
