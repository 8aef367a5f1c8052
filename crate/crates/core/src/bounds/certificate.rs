use std::fmt::Write as _;

use super::records::{find_record, FractionalVisibilityRecord};
use super::{rank_one_term, FilterPair, PreparationPair};
use crate::error::{dim_err, Error, Result};
use crate::linalg::{eigh, inner, psd_sqrt_pinv, CMatrix, SpinState, C64};

/// Default tolerance for support leakage (relative) and contraction slack.
pub const CERT_TOL: f64 = 1e-8;

/// Relative eigenvalue cutoff when inverting `√ρ^T`.
const SUPPORT_CUTOFF: f64 = 1e-9;

/// `(μ, ν)` pairs of the four-term swap family.
pub const SWAP_TERMS: [(&str, &str); 4] = [("hh", "hh"), ("hv", "vh"), ("vh", "hv"), ("vv", "vv")];

#[derive(Clone, Debug, PartialEq)]
pub struct Coefficient {
    pub mu: String,
    pub nu: String,
    pub alpha: C64,
}

impl Coefficient {
    pub fn new(mu: &str, nu: &str, alpha: C64) -> Self {
        Self {
            mu: mu.to_string(),
            nu: nu.to_string(),
            alpha,
        }
    }
}

/// A coefficient set together with the operator `Û` that factors
/// `L = Σ α (|ψ0⟩⟨ψ1|)^T ⊗ |χ1⟩⟨χ0|` as `(√ρ1^T ⊗ 1) Û (√ρ0^T ⊗ 1)`.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub coefficients: Vec<Coefficient>,
    pub u_hat: CMatrix,
    /// `λ_max(Û^†Û) − 1`
    pub contraction_slack: f64,
    /// `‖L − P1 L P0‖_F / ‖L‖_F`
    pub support_leakage: f64,
}

#[derive(Clone, Debug)]
pub struct BoundCertificate {
    pub coefficients: Vec<Coefficient>,
    pub u_hat: CMatrix,
    pub contraction_slack: f64,
    pub vg_lower: f64,
    pub sigma_vg: f64,
    pub d_upper: f64,
    pub sigma_d: f64,
}

impl BoundCertificate {
    /// Plain-text report of the coefficients and the resulting bounds.
    pub fn report(&self) -> String {
        let mut s = String::new();
        writeln!(s, "coefficients:").unwrap();
        for c in &self.coefficients {
            writeln!(
                s,
                "  mu={} nu={} alpha={:.6}{:+.6}i",
                c.mu,
                c.nu,
                c.alpha.re + 0.0,
                c.alpha.im + 0.0
            )
            .unwrap();
        }
        writeln!(s, "contraction_slack = {:.3e}", self.contraction_slack).unwrap();
        writeln!(
            s,
            "vg_lower = {:.4} +/- {:.4}",
            self.vg_lower, self.sigma_vg
        )
        .unwrap();
        writeln!(s, "d_upper = {:.4} +/- {:.4}", self.d_upper, self.sigma_d).unwrap();
        s
    }
}

fn lookup<'a, T>(
    items: &'a [T],
    label: &str,
    get: impl Fn(&T) -> &str,
    kind: &str,
) -> Result<&'a T> {
    items
        .iter()
        .find(|x| get(x) == label)
        .ok_or_else(|| Error::InvalidInput(format!("no {kind} labelled {label:?}")))
}

/// `L = Σ α_μν (|ψ0^μ⟩⟨ψ1^μ|)^T ⊗ |χ1^ν⟩⟨χ0^ν|`.
pub fn certificate_operator(
    coefficients: &[Coefficient],
    preps: &[PreparationPair],
    filters: &[FilterPair],
) -> Result<CMatrix> {
    let d = preps
        .first()
        .map(PreparationPair::dim)
        .ok_or_else(|| Error::InvalidInput("no preparations".into()))?;
    let mut l = CMatrix::zeros(d * d, d * d);
    for c in coefficients {
        let prep = lookup(preps, &c.mu, |p| &p.label, "preparation")?;
        let filter = lookup(filters, &c.nu, |f| &f.label, "filter")?;
        if prep.dim() != d || filter.dim() != d {
            return Err(dim_err("preparations and filters of mixed dimension"));
        }
        l = &l + &rank_one_term(prep, filter).scale(c.alpha);
    }
    Ok(l)
}

/// Reconstructs `Û = ((√ρ1^T)^+ ⊗ 1) L ((√ρ0^T)^+ ⊗ 1)` after checking that
/// `L` lives on the supports of the square-root factors. The contraction
/// condition itself is not enforced.
pub fn contraction(
    coefficients: &[Coefficient],
    preps: &[PreparationPair],
    filters: &[FilterPair],
    rho0: &SpinState,
    rho1: &SpinState,
    tol: f64,
) -> Result<Contraction> {
    let l = certificate_operator(coefficients, preps, filters)?;
    let d = rho0.dim();
    if rho1.dim() != d || l.rows() != d * d {
        return Err(dim_err("arm states do not match the certificate dimension"));
    }
    let id = CMatrix::identity(d);
    let (pinv0, proj0) = psd_sqrt_pinv(&rho0.matrix().transpose(), SUPPORT_CUTOFF)?;
    let (pinv1, proj1) = psd_sqrt_pinv(&rho1.matrix().transpose(), SUPPORT_CUTOFF)?;
    let projected = &(&proj1.kron(&id) * &l) * &proj0.kron(&id);
    let norm = l.frobenius_norm();
    let support_leakage = if norm > 0.0 {
        (&l - &projected).frobenius_norm() / norm
    } else {
        0.0
    };
    if support_leakage > tol {
        return Err(Error::SupportViolation {
            leakage: support_leakage,
            tolerance: tol,
        });
    }
    let u_hat = &(&pinv1.kron(&id) * &l) * &pinv0.kron(&id);
    let gram = (&u_hat.adjoint() * &u_hat).hermitian_part();
    let contraction_slack = eigh(&gram)?.max() - 1.0;
    Ok(Contraction {
        coefficients: coefficients.to_vec(),
        u_hat,
        contraction_slack,
        support_leakage,
    })
}

/// Checks that the coefficients define a valid certificate:
/// `L = (√ρ1^T ⊗ 1) Û (√ρ0^T ⊗ 1)` with `Û^†Û ≤ 1 ⊗ 1` up to `tol`.
pub fn verify_alpha_constraint(
    coefficients: &[Coefficient],
    preps: &[PreparationPair],
    filters: &[FilterPair],
    rho0: &SpinState,
    rho1: &SpinState,
    tol: f64,
) -> Result<Contraction> {
    let c = contraction(coefficients, preps, filters, rho0, rho1, tol)?;
    if c.contraction_slack > tol {
        return Err(Error::ConstraintViolated {
            slack: c.contraction_slack,
            tolerance: tol,
        });
    }
    Ok(c)
}

/// `V_G ≥ |Σ α V|` and `D ≤ √(1 − V_G²)` for a verified coefficient set.
///
/// `sigma_vg = Σ |α| σ_V`; `sigma_d` is the rise of `d_upper` when
/// `vg_lower` drops by `sigma_vg`.
pub fn bound_from_visibilities(
    contraction: &Contraction,
    records: &[FractionalVisibilityRecord],
) -> Result<BoundCertificate> {
    let mut sum = C64::new(0.0, 0.0);
    let mut sigma_vg = 0.0;
    for c in &contraction.coefficients {
        let r = find_record(records, &c.mu, &c.nu)?;
        sum += c.alpha * r.v;
        sigma_vg += c.alpha.norm() * r.sigma_v;
    }
    let vg_lower = sum.norm().clamp(0.0, 1.0);
    let d_of = |v: f64| (1.0 - v * v).max(0.0).sqrt();
    let d_upper = d_of(vg_lower);
    let sigma_d = d_of((vg_lower - sigma_vg).max(0.0)) - d_upper;
    Ok(BoundCertificate {
        coefficients: contraction.coefficients.clone(),
        u_hat: contraction.u_hat.clone(),
        contraction_slack: contraction.contraction_slack,
        vg_lower,
        sigma_vg,
        d_upper,
        sigma_d,
    })
}

/// Unit phase cancelling the argument of `v` (1 when `v = 0`).
fn aligning_phase(v: C64) -> C64 {
    if v.norm() > 0.0 {
        v.conj() / v.norm()
    } else {
        C64::new(1.0, 0.0)
    }
}

fn check_orthonormal(kets: &[&[C64]], what: &str) -> Result<()> {
    let d = kets.first().map_or(0, |k| k.len());
    if kets.len() != d {
        return Err(Error::InvalidInput(format!(
            "{} {what} kets cannot form a basis of dimension {d}",
            kets.len()
        )));
    }
    for (a, x) in kets.iter().enumerate() {
        for (b, y) in kets.iter().enumerate() {
            let target = if a == b { 1.0 } else { 0.0 };
            if (inner(x, y) - C64::new(target, 0.0)).norm() > 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "{what} kets are not an orthonormal basis"
                )));
            }
        }
    }
    Ok(())
}

fn check_filter_bases(filters: &[FilterPair]) -> Result<()> {
    let chi0: Vec<&[C64]> = filters.iter().map(|f| f.chi0.as_slice()).collect();
    let chi1: Vec<&[C64]> = filters.iter().map(|f| f.chi1.as_slice()).collect();
    check_orthonormal(&chi0, "arm-0 filter")?;
    check_orthonormal(&chi1, "arm-1 filter")
}

/// `Σ_ν |V^ν|` for one preparation `mu` filtered in complete orthonormal
/// bases, clamped to `[0, 1]`.
pub fn orthonormal_filter_bound(
    mu: &str,
    filters: &[FilterPair],
    records: &[FractionalVisibilityRecord],
) -> Result<f64> {
    check_filter_bases(filters)?;
    let mut total = 0.0;
    for f in filters {
        total += find_record(records, mu, &f.label)?.v.norm();
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Certificate for a single pure preparation and orthonormal filter bases
/// with phases `α_ν = e^{-i arg V^ν}`.
pub fn single_preparation_certificate(
    prep: &PreparationPair,
    filters: &[FilterPair],
    records: &[FractionalVisibilityRecord],
    tol: f64,
) -> Result<BoundCertificate> {
    check_filter_bases(filters)?;
    let coefficients = filters
        .iter()
        .map(|f| {
            let r = find_record(records, &prep.label, &f.label)?;
            Ok(Coefficient::new(&prep.label, &f.label, aligning_phase(r.v)))
        })
        .collect::<Result<Vec<_>>>()?;
    let rho0 = SpinState::pure(&prep.psi0)?;
    let rho1 = SpinState::pure(&prep.psi1)?;
    let c = verify_alpha_constraint(
        &coefficients,
        std::slice::from_ref(prep),
        filters,
        &rho0,
        &rho1,
        tol,
    )?;
    bound_from_visibilities(&c, records)
}

/// `½(|V^{hh,hh}| + |V^{hv,vh}| + |V^{vh,hv}| + |V^{vv,vv}|)`, clamped to `[0, 1]`.
pub fn swap_estimate(records: &[FractionalVisibilityRecord]) -> Result<f64> {
    let mut total = 0.0;
    for (mu, nu) in SWAP_TERMS {
        total += find_record(records, mu, nu)?.v.norm();
    }
    Ok((0.5 * total).clamp(0.0, 1.0))
}

/// Swap-family certificate `α = ½ e^{-i arg V}` on the four swap terms for
/// maximally mixed polarization.
pub fn swap_certificate(
    records: &[FractionalVisibilityRecord],
    tol: f64,
) -> Result<BoundCertificate> {
    let coefficients = SWAP_TERMS
        .iter()
        .map(|&(mu, nu)| {
            let r = find_record(records, mu, nu)?;
            Ok(Coefficient::new(mu, nu, aligning_phase(r.v) * 0.5))
        })
        .collect::<Result<Vec<_>>>()?;
    let mixed = SpinState::maximally_mixed(2);
    let c = verify_alpha_constraint(
        &coefficients,
        &super::rectilinear_preparations(),
        &super::rectilinear_filters(),
        &mixed,
        &mixed,
        tol,
    )?;
    bound_from_visibilities(&c, records)
}
