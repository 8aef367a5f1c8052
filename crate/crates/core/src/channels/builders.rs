//! Constructors for the worked example channels and for random test corpora.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::channel::PathChannel;
use super::dilation::Dilation;
use crate::error::{Error, Result};
use crate::linalg::random::random_matrix;
use crate::linalg::{basis_vector, eigh, CMatrix, SpinState, C64, I, ONE, ZERO};

/// Identifier written into the metadata of every random channel so corpora
/// can be regenerated elsewhere.
pub const RNG_ALGORITHM: &str = "chacha20/rand_chacha-0.9/seed_from_u64";

fn unit(d: usize, k: usize, l: usize) -> CMatrix {
    CMatrix::outer(&basis_vector(d, k), &basis_vector(d, l))
}

/// No interaction: `Λ_ij = id`.
pub fn identity_channel(d: usize) -> PathChannel {
    PathChannel::new(vec![(CMatrix::identity(d), CMatrix::identity(d))])
        .expect("identity is trace preserving")
        .with_metadata("name", "identity")
}

/// Spin swapped into the environment and replaced by `sigma0` in both arms,
/// giving `Λ_01(σ) = σ0 Tr σ`.
///
/// With `σ0 = Σ_r λ_r |r⟩⟨r|` the pairs are `A = B = √λ_r |r⟩⟨l|` over all `r, l`.
/// Only states admit this completely positive extension, so `sigma0` must be
/// a valid density matrix.
pub fn replace_channel(sigma0: &CMatrix) -> Result<PathChannel> {
    let state = SpinState::new(sigma0.clone())
        .map_err(|e| Error::InvalidChannel(format!("replacement operator is not a state: {e}")))?;
    let d = state.dim();
    let eig = eigh(state.matrix())?;
    let mut pairs = Vec::new();
    for (r, &lambda) in eig.values.iter().enumerate() {
        if lambda <= 1e-15 {
            continue;
        }
        let ket = eig.vectors.column_vec(r);
        for l in 0..d {
            let k = CMatrix::outer(&ket, &basis_vector(d, l)).scale_real(lambda.sqrt());
            pairs.push((k.clone(), k));
        }
    }
    Ok(PathChannel::new(pairs)?.with_metadata("name", "replace"))
}

/// `Λ_01(σ) = σ^T / d`, both arms completely depolarized.
///
/// Pairs `A = |k⟩⟨l|/√d`, `B = |l⟩⟨k|/√d`, ordered with `k` fastest; for
/// `d = 2` this is the environment labelling `e1..e4` of the explicit
/// polarization example.
pub fn transpose_channel(d: usize) -> PathChannel {
    let s = 1.0 / (d as f64).sqrt();
    let mut pairs = Vec::with_capacity(d * d);
    for l in 0..d {
        for k in 0..d {
            pairs.push((unit(d, k, l).scale_real(s), unit(d, l, k).scale_real(s)));
        }
    }
    PathChannel::new(pairs)
        .expect("transpose family is trace preserving")
        .with_metadata("name", "transpose")
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::diag(&[ONE, -ONE])
}

/// The four unitary pairs `(1,1)`, `(X,X)`, `(Y,−Y)`, `(Z,Z)` of the
/// polarization noise, unweighted.
pub fn pauli_pairs() -> [(CMatrix, CMatrix); 4] {
    [
        (CMatrix::identity(2), CMatrix::identity(2)),
        (pauli_x(), pauli_x()),
        (pauli_y(), -&pauli_y()),
        (pauli_z(), pauli_z()),
    ]
}

/// Equal mixture of the four Pauli pairs; realizes `Λ_01(σ) = σ^T / 2`.
pub fn pauli_mixture_channel() -> PathChannel {
    let pairs = pauli_pairs()
        .into_iter()
        .map(|(a, b)| (a.scale_real(0.5), b.scale_real(0.5)))
        .collect();
    PathChannel::new(pairs)
        .expect("Pauli mixture is trace preserving")
        .with_metadata("name", "pauli_mixture")
}

/// The explicit polarization-environment isometry with four orthogonal
/// environment states `e1..e4`:
///
/// - arm 0: `|h⟩ → (|h e1⟩ + |v e2⟩)/√2`, `|v⟩ → (|h e3⟩ + |v e4⟩)/√2`
/// - arm 1: `|h⟩ → (|h e1⟩ + |v e3⟩)/√2`, `|v⟩ → (|h e2⟩ + |v e4⟩)/√2`
pub fn erasure_dilation() -> Dilation {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // rows indexed spin * 4 + env, columns by input spin
    let mut v0 = CMatrix::zeros(8, 2);
    let mut v1 = CMatrix::zeros(8, 2);
    let (h, v) = (0, 1);
    let at = |spin: usize, env: usize| spin * 4 + env;
    v0[(at(h, 0), h)] = C64::new(s, 0.0);
    v0[(at(v, 1), h)] = C64::new(s, 0.0);
    v0[(at(h, 2), v)] = C64::new(s, 0.0);
    v0[(at(v, 3), v)] = C64::new(s, 0.0);
    v1[(at(h, 0), h)] = C64::new(s, 0.0);
    v1[(at(v, 2), h)] = C64::new(s, 0.0);
    v1[(at(h, 1), v)] = C64::new(s, 0.0);
    v1[(at(v, 3), v)] = C64::new(s, 0.0);
    Dilation::new(2, 4, v0, v1).expect("explicit isometry")
}

/// Random path-preserving channel with `n_kraus` pairs.
///
/// Each arm draws Ginibre matrices `G_k` and normalizes them as
/// `G_k S^{-1/2}` with `S = Σ_k G_k^† G_k`. Deterministic in `seed`; the
/// generator is recorded under the `rng` metadata key.
pub fn random_path_channel(d: usize, n_kraus: usize, seed: u64) -> Result<PathChannel> {
    if d == 0 || n_kraus == 0 {
        return Err(Error::InvalidInput(
            "need d ≥ 1 and at least one Kraus pair".into(),
        ));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut arms: [Vec<CMatrix>; 2] = [Vec::new(), Vec::new()];
    for arm in arms.iter_mut() {
        let raw: Vec<CMatrix> = (0..n_kraus)
            .map(|_| random_matrix(d, d, &mut rng))
            .collect();
        let mut s = CMatrix::zeros(d, d);
        for g in &raw {
            s = &s + &(&g.adjoint() * g);
        }
        let inv_sqrt = eigh(&s)?.map(|x| 1.0 / x.sqrt());
        *arm = raw.iter().map(|g| g * &inv_sqrt).collect();
    }
    let [a, b] = arms;
    let mut ch = PathChannel::new(a.into_iter().zip(b).collect())?;
    let meta = ch.metadata_mut();
    meta.insert("name".into(), "random".into());
    meta.insert("rng".into(), RNG_ALGORITHM.into());
    meta.insert("seed".into(), seed.to_string());
    Ok(ch)
}

/// Channel whose coherence block multiplies each basis component by a
/// phase: Kraus pair `(1, diag(e^{iφ_k}))`. Keeps full coherence between the
/// arms while shifting components by different phases.
pub fn phase_channel(phases: &[f64]) -> PathChannel {
    let d = phases.len();
    let diag: Vec<C64> = phases.iter().map(|&p| C64::from_polar(1.0, p)).collect();
    PathChannel::new(vec![(CMatrix::identity(d), CMatrix::diag(&diag))])
        .expect("diagonal unitary")
        .with_metadata("name", "phase")
}
