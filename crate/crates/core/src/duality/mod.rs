//! Distinguishability, generalized visibility and the duality relation
//! `D² + V_G² ≤ 1` between them.

mod oracle;

pub use oracle::{vg_bruteforce, BruteForceOptions, BruteForceResult};

use crate::channels::{dilate, Dilation, PathChannel, Preparation};
use crate::error::{dim_err, Result};
use crate::linalg::{basis_vector, trace_norm, CMatrix, SpinState};

/// Slack below which `D² + V_G² ≤ 1` counts as violated.
pub const INEQUALITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct DualityReport {
    pub distinguishability: f64,
    pub generalized_visibility: f64,
    /// `1 − D² − V_G²`
    pub slack: f64,
    pub channel_id: String,
    pub preparation_id: String,
}

impl DualityReport {
    pub fn holds(&self) -> bool {
        self.slack >= -INEQUALITY_TOL
    }

    /// Upper bound on `D` implied by `V_G` alone.
    pub fn distinguishability_bound(&self) -> f64 {
        (1.0 - self.generalized_visibility.powi(2)).max(0.0).sqrt()
    }
}

fn check_dims(spin_dim: usize, prep: &Preparation) -> Result<()> {
    if prep.spin_dim() != spin_dim {
        return Err(dim_err(format!(
            "preparation of spin dimension {} for a channel on spin dimension {spin_dim}",
            prep.spin_dim()
        )));
    }
    Ok(())
}

/// Environment states correlated with arm 0 and arm 1, `Tr_S[V_i ρ_i V_i^†]`.
pub fn environment_states(dil: &Dilation, prep: &Preparation) -> Result<(SpinState, SpinState)> {
    check_dims(dil.spin_dim(), prep)?;
    let e = |arm: usize| -> Result<SpinState> {
        let m = dil.environment_state(arm, prep.rho(arm).matrix())?;
        SpinState::with_tolerance(m.hermitian_part(), 1e-9)
    };
    Ok((e(0)?, e(1)?))
}

/// Same states through the purification: `d Tr_SS'[|Λ_i⟩⟨Λ_i| (ρ_i^T ⊗ 1)]`
/// with `|Λ_i⟩ = (1 ⊗ V_i)|Φ+⟩`.
pub fn environment_states_via_purification(
    dil: &Dilation,
    prep: &Preparation,
) -> Result<(CMatrix, CMatrix)> {
    check_dims(dil.spin_dim(), prep)?;
    let d = dil.spin_dim();
    let rest = d * dil.env_dim();
    let e = |arm: usize| -> Result<CMatrix> {
        let lam = CMatrix::projector(&dil.purified_state(arm));
        let rho_t = prep
            .rho(arm)
            .matrix()
            .transpose()
            .kron(&CMatrix::identity(rest));
        let traced_s = (&lam * &rho_t).partial_trace_first(d, rest)?;
        Ok(traced_s
            .partial_trace_first(d, dil.env_dim())?
            .scale_real(d as f64))
    };
    Ok((e(0)?, e(1)?))
}

/// `½ ||e0 − e1||_1`
pub fn distinguishability(e0: &SpinState, e1: &SpinState) -> Result<f64> {
    if e0.dim() != e1.dim() {
        return Err(dim_err(format!(
            "environment states of dimension {} and {}",
            e0.dim(),
            e1.dim()
        )));
    }
    Ok(0.5 * trace_norm(&(e0.matrix() - e1.matrix()))?)
}

/// Distinguishability of the canonical dilation of `ch`.
pub fn channel_distinguishability(ch: &PathChannel, prep: &Preparation) -> Result<f64> {
    let (e0, e1) = environment_states(&dilate(ch), prep)?;
    distinguishability(&e0, &e1)
}

/// `V_G = d ||(I ⊗ Λ_01)((1 ⊗ √ρ0)|Φ+⟩⟨Φ+|(1 ⊗ √ρ1))||_1`.
pub fn generalized_visibility(ch: &PathChannel, prep: &Preparation) -> Result<f64> {
    check_dims(ch.spin_dim(), prep)?;
    let d = ch.spin_dim();
    let (s0, s1) = (prep.rho0().sqrt(), prep.rho1().sqrt());
    // (1⊗√ρ0)|Φ+⟩⟨Φ+|(1⊗√ρ1) = (1/d) Σ_kl |k⟩⟨l| ⊗ √ρ0|k⟩⟨l|√ρ1
    let mut op = CMatrix::zeros(d * d, d * d);
    for k in 0..d {
        for l in 0..d {
            let unit = CMatrix::outer(&basis_vector(d, k), &basis_vector(d, l));
            let inner = &(&s0 * &unit) * &s1;
            let mapped = ch.block_map(0, 1, &inner)?;
            op = &op + &unit.kron(&mapped);
        }
    }
    // the 1/d of |Φ+⟩⟨Φ+| cancels the leading d
    Ok(trace_norm(&op)?.clamp(0.0, 1.0))
}

/// `V_G = d ||(√ρ0^T ⊗ 1) M (√ρ1^T ⊗ 1)||_1` with `M = (I ⊗ Λ_01)(|Φ+⟩⟨Φ+|)`.
pub fn generalized_visibility_choi_form(ch: &PathChannel, prep: &Preparation) -> Result<f64> {
    Ok(trace_norm(&visibility_operator(ch, prep)?)?.clamp(0.0, 1.0))
}

/// `d (√ρ0^T ⊗ 1) M (√ρ1^T ⊗ 1)`, whose trace norm is `V_G`.
pub fn visibility_operator(ch: &PathChannel, prep: &Preparation) -> Result<CMatrix> {
    check_dims(ch.spin_dim(), prep)?;
    let d = ch.spin_dim();
    let id = CMatrix::identity(d);
    let left = prep.rho0().sqrt().transpose().kron(&id);
    let right = prep.rho1().sqrt().transpose().kron(&id);
    let m = ch.block_choi(0, 1);
    Ok((&(&left * &m) * &right).scale_real(d as f64))
}

fn preparation_id(prep: &Preparation) -> String {
    match prep {
        Preparation::Pure { .. } => "pure".to_string(),
        Preparation::Ensemble { weights, .. } => format!("ensemble[{}]", weights.len()),
    }
}

/// Computes `D` from the canonical dilation and `V_G` from the channel and
/// reports the slack of `D² + V_G² ≤ 1`.
pub fn verify_inequality(ch: &PathChannel, prep: &Preparation) -> Result<DualityReport> {
    let distinguishability = channel_distinguishability(ch, prep)?;
    let generalized_visibility = generalized_visibility(ch, prep)?;
    Ok(DualityReport {
        distinguishability,
        generalized_visibility,
        slack: 1.0 - distinguishability.powi(2) - generalized_visibility.powi(2),
        channel_id: ch
            .metadata()
            .get("name")
            .cloned()
            .unwrap_or_else(|| "unnamed".into()),
        preparation_id: preparation_id(prep),
    })
}
