use super::channel::{Path, PathChannel};
use crate::error::{dim_err, Error, Result};
use crate::linalg::{CMatrix, MaxEntangledState, C64};

/// Stinespring isometries `V_i : spin → spin ⊗ environment`, one per arm,
/// rows indexed `spin * env_dim + env`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dilation {
    spin_dim: usize,
    env_dim: usize,
    v0: CMatrix,
    v1: CMatrix,
}

impl Dilation {
    pub fn new(spin_dim: usize, env_dim: usize, v0: CMatrix, v1: CMatrix) -> Result<Self> {
        let shape = (spin_dim * env_dim, spin_dim);
        if v0.shape() != shape || v1.shape() != shape {
            return Err(dim_err(format!(
                "isometries {:?}, {:?}; expected {shape:?}",
                v0.shape(),
                v1.shape()
            )));
        }
        for (arm, v) in [(0, &v0), (1, &v1)] {
            let dev = (&v.adjoint() * v).max_abs_diff(&CMatrix::identity(spin_dim));
            if dev > 1e-9 {
                return Err(Error::InvalidChannel(format!(
                    "arm {arm} map is not an isometry (deviation {dev:e})"
                )));
            }
        }
        Ok(Self {
            spin_dim,
            env_dim,
            v0,
            v1,
        })
    }

    /// Canonical dilation: one environment state per Kraus pair,
    /// `V_i = Σ_n K_n^(i) ⊗ |e_n⟩`.
    pub fn from_channel(ch: &PathChannel) -> Self {
        let d = ch.spin_dim();
        let env = ch.kraus_pairs().len();
        let mut v = [CMatrix::zeros(d * env, d), CMatrix::zeros(d * env, d)];
        for (n, pair) in ch.kraus_pairs().iter().enumerate() {
            for (arm, k) in [&pair.0, &pair.1].into_iter().enumerate() {
                for s in 0..d {
                    for l in 0..d {
                        v[arm][(s * env + n, l)] = k[(s, l)];
                    }
                }
            }
        }
        let [v0, v1] = v;
        Self {
            spin_dim: d,
            env_dim: env,
            v0,
            v1,
        }
    }

    /// Reads the Kraus pairs back out of the isometries.
    pub fn to_channel(&self) -> PathChannel {
        let (d, env) = (self.spin_dim, self.env_dim);
        let pairs = (0..env)
            .map(|n| {
                let extract = |v: &CMatrix| CMatrix::from_fn(d, d, |s, l| v[(s * env + n, l)]);
                (extract(&self.v0), extract(&self.v1))
            })
            .collect();
        PathChannel::new(pairs).expect("isometry yields trace-preserving Kraus pairs")
    }

    pub fn spin_dim(&self) -> usize {
        self.spin_dim
    }

    pub fn env_dim(&self) -> usize {
        self.env_dim
    }

    pub fn isometry(&self, arm: Path) -> &CMatrix {
        if arm == 0 {
            &self.v0
        } else {
            &self.v1
        }
    }

    /// `Λ_ij(σ) = Tr_E[V_i σ V_j^†]`.
    pub fn block_map(&self, i: Path, j: Path, sigma: &CMatrix) -> Result<CMatrix> {
        if sigma.shape() != (self.spin_dim, self.spin_dim) {
            return Err(dim_err("operator does not match spin dimension"));
        }
        let joint = &(self.isometry(i) * sigma) * &self.isometry(j).adjoint();
        joint.partial_trace_second(self.spin_dim, self.env_dim)
    }

    /// Environment state left behind when arm `arm` carries spin state `rho`:
    /// `Tr_S[V ρ V^†]`.
    pub fn environment_state(&self, arm: Path, rho: &CMatrix) -> Result<CMatrix> {
        if rho.shape() != (self.spin_dim, self.spin_dim) {
            return Err(dim_err("state does not match spin dimension"));
        }
        let v = self.isometry(arm);
        let joint = &(v * rho) * &v.adjoint();
        joint.partial_trace_first(self.spin_dim, self.env_dim)
    }

    /// Purification `|Λ_i⟩ = (1 ⊗ V_i)|Φ+⟩` on `S ⊗ S' ⊗ E`.
    pub fn purified_state(&self, arm: Path) -> Vec<C64> {
        let d = self.spin_dim;
        let phi = MaxEntangledState::new(d);
        let lift = CMatrix::identity(d).kron(self.isometry(arm));
        let out = &lift * &CMatrix::column(phi.vector());
        out.column_vec(0)
    }

    /// Applies `1_S ⊗ W` to both isometries, with `W` an isometry from the
    /// environment into a (possibly larger) environment. Leaves every
    /// `Λ_ij` unchanged.
    pub fn rotate_environment(&self, w: &CMatrix) -> Result<Self> {
        if w.cols() != self.env_dim {
            return Err(dim_err("environment isometry has wrong input dimension"));
        }
        let lift = CMatrix::identity(self.spin_dim).kron(w);
        Self::new(self.spin_dim, w.rows(), &lift * &self.v0, &lift * &self.v1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::builders::{
        erasure_dilation, identity_channel, pauli_mixture_channel, random_path_channel,
    };
    use crate::linalg::basis_vector;
    use crate::linalg::random::{random_matrix, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn same_blocks(a: &PathChannel, b: &PathChannel) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max(a.superoperator(i, j).max_abs_diff(&b.superoperator(i, j)));
            }
        }
        worst
    }

    #[test]
    fn identity_dilation_is_trivial() {
        let dil = Dilation::from_channel(&identity_channel(3));
        assert_eq!(dil.env_dim(), 1);
        assert_eq!(dil.isometry(0), &CMatrix::identity(3));
        assert_eq!(dil.isometry(1), &CMatrix::identity(3));
    }

    #[test]
    fn pauli_dilation_recovers_blocks() {
        let ch = pauli_mixture_channel();
        let dil = Dilation::from_channel(&ch);
        assert_eq!(dil.env_dim(), 4);
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let sigma = random_matrix(2, 2, &mut rng);
        for i in 0..2 {
            for j in 0..2 {
                let a = dil.block_map(i, j, &sigma).unwrap();
                let b = ch.block_map(i, j, &sigma).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-12);
            }
        }
        // environment ket n tags Pauli pair n: input h in arm 0 → spin (K_n|h⟩) ⊗ e_n
        let h = basis_vector(2, 0);
        let out = &dil.isometry(0).clone() * &CMatrix::column(&h);
        for n in 0..4 {
            let k = &ch.kraus_pairs()[n].0;
            for s in 0..2 {
                assert!((out[(s * 4 + n, 0)] - k[(s, 0)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn erasure_round_trips_through_kraus_pairs() {
        let erasure = erasure_dilation();
        let ch = erasure.to_channel();
        let again = Dilation::from_channel(&ch);
        assert!(same_blocks(&again.to_channel(), &ch) < 1e-12);
        assert_eq!(again, erasure);
        let tr = crate::channels::builders::transpose_channel(2);
        assert!(same_blocks(&ch, &tr) < 1e-12);
    }

    #[test]
    fn erasure_arms_are_completely_depolarized() {
        let ch = erasure_dilation().to_channel();
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let s = random_matrix(2, 2, &mut rng);
        let target = CMatrix::identity(2).scale(s.trace() * 0.5);
        assert!(ch.block_map(0, 0, &s).unwrap().max_abs_diff(&target) < 1e-12);
        assert!(ch.block_map(1, 1, &s).unwrap().max_abs_diff(&target) < 1e-12);
    }

    #[test]
    fn environment_rotation_preserves_blocks() {
        let ch = random_path_channel(2, 3, 99).unwrap();
        let dil = Dilation::from_channel(&ch);
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let u = random_unitary(5, &mut rng);
        let w = u.block(0, 0, 5, 3);
        let rotated = dil.rotate_environment(&w).unwrap();
        assert_eq!(rotated.env_dim(), 5);
        assert!(same_blocks(&rotated.to_channel(), &ch) < 1e-12);
    }

    #[test]
    fn non_isometry_rejected() {
        let v = CMatrix::zeros(4, 2);
        assert!(Dilation::new(2, 2, v.clone(), v).is_err());
        assert!(Dilation::new(2, 2, CMatrix::zeros(3, 2), CMatrix::zeros(4, 2)).is_err());
    }

    #[test]
    fn purified_state_is_normalized() {
        let dil = erasure_dilation();
        for arm in 0..2 {
            let p = dil.purified_state(arm);
            assert_eq!(p.len(), 2 * 2 * 4);
            assert!((crate::linalg::vec_norm(&p) - 1.0).abs() < 1e-12);
        }
    }
}
