//! Measurable lower bounds on the generalized visibility: fractional
//! visibilities of filtered fringes, α-coefficient certificates and the
//! bounds they imply.

mod certificate;
mod records;

pub use certificate::{
    bound_from_visibilities, certificate_operator, contraction, orthonormal_filter_bound,
    single_preparation_certificate, swap_certificate, swap_estimate, verify_alpha_constraint,
    BoundCertificate, Coefficient, Contraction, CERT_TOL, SWAP_TERMS,
};
pub use records::{
    find_record, measured_records, read_records_csv, read_records_file, records_from_csv_str,
    records_to_csv_string, write_records_csv, FractionalVisibilityRecord,
};

use crate::channels::PathChannel;
use crate::error::{dim_err, Error, Result};
use crate::linalg::{kron_vec, vec_norm, CMatrix, C64, STRUCT_TOL};

/// Polarization kets: `h = |0⟩`, `v = |1⟩`, `d/a = (h ± v)/√2`,
/// `r/l = (h ± i v)/√2`.
pub fn polarization_ket(c: char) -> Option<Vec<C64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let ket = match c {
        'h' => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        'v' => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        'd' => [C64::new(s, 0.0), C64::new(s, 0.0)],
        'a' => [C64::new(s, 0.0), C64::new(-s, 0.0)],
        'r' => [C64::new(s, 0.0), C64::new(0.0, s)],
        'l' => [C64::new(s, 0.0), C64::new(0.0, -s)],
        _ => return None,
    };
    Some(ket.to_vec())
}

fn two_letter_kets(label: &str) -> Result<(Vec<C64>, Vec<C64>)> {
    let chars: Vec<char> = label.chars().collect();
    match chars.as_slice() {
        [a, b] => match (polarization_ket(*a), polarization_ket(*b)) {
            (Some(x), Some(y)) => Ok((x, y)),
            _ => Err(Error::Parse(format!(
                "unknown polarization in label {label:?}"
            ))),
        },
        _ => Err(Error::Parse(format!(
            "polarization label {label:?} must have two letters"
        ))),
    }
}

fn check_unit(v: &[C64], what: &str) -> Result<()> {
    let n = vec_norm(v);
    if (n - 1.0).abs() > STRUCT_TOL {
        return Err(Error::InvalidInput(format!(
            "{what} has norm {n}, expected 1"
        )));
    }
    Ok(())
}

/// Pure preparation `μ`: spin `ψ0` in arm 0 and `ψ1` in arm 1.
#[derive(Clone, Debug, PartialEq)]
pub struct PreparationPair {
    pub label: String,
    pub psi0: Vec<C64>,
    pub psi1: Vec<C64>,
}

impl PreparationPair {
    pub fn new(label: impl Into<String>, psi0: Vec<C64>, psi1: Vec<C64>) -> Result<Self> {
        if psi0.len() != psi1.len() {
            return Err(dim_err("preparation kets of different dimension"));
        }
        check_unit(&psi0, "ψ0")?;
        check_unit(&psi1, "ψ1")?;
        Ok(Self {
            label: label.into(),
            psi0,
            psi1,
        })
    }

    /// Two-letter polarization label, first letter for arm 0.
    pub fn polarization(label: &str) -> Result<Self> {
        let (a, b) = two_letter_kets(label)?;
        Self::new(label, a, b)
    }

    pub fn dim(&self) -> usize {
        self.psi0.len()
    }
}

/// Filter `ν`: spin component `χ0` is kept in arm 0 and `χ1` in arm 1.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterPair {
    pub label: String,
    pub chi0: Vec<C64>,
    pub chi1: Vec<C64>,
}

impl FilterPair {
    pub fn new(label: impl Into<String>, chi0: Vec<C64>, chi1: Vec<C64>) -> Result<Self> {
        if chi0.len() != chi1.len() {
            return Err(dim_err("filter kets of different dimension"));
        }
        check_unit(&chi0, "χ0")?;
        check_unit(&chi1, "χ1")?;
        Ok(Self {
            label: label.into(),
            chi0,
            chi1,
        })
    }

    pub fn polarization(label: &str) -> Result<Self> {
        let (a, b) = two_letter_kets(label)?;
        Self::new(label, a, b)
    }

    pub fn dim(&self) -> usize {
        self.chi0.len()
    }
}

/// The four labels `hh, hv, vh, vv`.
pub const RECTILINEAR: [&str; 4] = ["hh", "hv", "vh", "vv"];

pub fn rectilinear_preparations() -> Vec<PreparationPair> {
    RECTILINEAR
        .iter()
        .map(|l| PreparationPair::polarization(l).expect("valid label"))
        .collect()
}

pub fn rectilinear_filters() -> Vec<FilterPair> {
    RECTILINEAR
        .iter()
        .map(|l| FilterPair::polarization(l).expect("valid label"))
        .collect()
}

/// `p± = ½[p ± Re(V e^{iφ})]`.
pub fn detection_probabilities(p: f64, v: C64, phi: f64) -> Result<(f64, f64)> {
    if !(-1e-12..=1.0 + 1e-12).contains(&p) {
        return Err(Error::InvalidInput(format!(
            "probability {p} outside [0, 1]"
        )));
    }
    if v.norm() > p + 1e-12 {
        return Err(Error::InvalidInput(format!(
            "fractional visibility |V| = {} exceeds p = {p}",
            v.norm()
        )));
    }
    let fringe = (v * C64::from_polar(1.0, phi)).re;
    Ok(((0.5 * (p + fringe)).max(0.0), (0.5 * (p - fringe)).max(0.0)))
}

fn check_dims(ch: &PathChannel, prep: &PreparationPair, filter: &FilterPair) -> Result<()> {
    let d = ch.spin_dim();
    if prep.dim() != d || filter.dim() != d {
        return Err(dim_err(format!(
            "channel on dimension {d}, preparation {}, filter {}",
            prep.dim(),
            filter.dim()
        )));
    }
    Ok(())
}

fn sandwich(bra: &[C64], m: &CMatrix, ket: &[C64]) -> C64 {
    let mk = m * &CMatrix::column(ket);
    bra.iter()
        .zip(mk.as_slice())
        .map(|(b, x)| b.conj() * x)
        .sum()
}

/// Theory record for preparation `prep` and filter `filter`:
/// `V = ⟨χ0|Λ01(|ψ0⟩⟨ψ1|)|χ1⟩` and
/// `p = ½[⟨χ0|Λ00(|ψ0⟩⟨ψ0|)|χ0⟩ + ⟨χ1|Λ11(|ψ1⟩⟨ψ1|)|χ1⟩]`.
pub fn fractional_visibility(
    ch: &PathChannel,
    prep: &PreparationPair,
    filter: &FilterPair,
) -> Result<FractionalVisibilityRecord> {
    check_dims(ch, prep, filter)?;
    let coherence = ch.block_map(0, 1, &CMatrix::outer(&prep.psi0, &prep.psi1))?;
    let arm0 = ch.block_map(0, 0, &CMatrix::projector(&prep.psi0))?;
    let arm1 = ch.block_map(1, 1, &CMatrix::projector(&prep.psi1))?;
    let v = sandwich(&filter.chi0, &coherence, &filter.chi1);
    let p = 0.5
        * (sandwich(&filter.chi0, &arm0, &filter.chi0).re
            + sandwich(&filter.chi1, &arm1, &filter.chi1).re);
    Ok(FractionalVisibilityRecord {
        mu: prep.label.clone(),
        nu: filter.label.clone(),
        p,
        v,
        sigma_p: 0.0,
        sigma_v: 0.0,
    })
}

/// `(|ψ0⟩⟨ψ1|)^T ⊗ |χ1⟩⟨χ0|`, the rank-one operator paired with `V^{μν}`.
pub fn rank_one_term(prep: &PreparationPair, filter: &FilterPair) -> CMatrix {
    let left = CMatrix::outer(&prep.psi0, &prep.psi1).transpose();
    left.kron(&CMatrix::outer(&filter.chi1, &filter.chi0))
}

/// `V = d Tr{[(|ψ0⟩⟨ψ1|)^T ⊗ |χ1⟩⟨χ0|] (I ⊗ Λ01)(|Φ+⟩⟨Φ+|)}`.
pub fn fractional_visibility_tensor(
    ch: &PathChannel,
    prep: &PreparationPair,
    filter: &FilterPair,
) -> Result<C64> {
    check_dims(ch, prep, filter)?;
    let d = ch.spin_dim();
    let ket = kron_vec(
        &prep.psi1.iter().map(|z| z.conj()).collect::<Vec<_>>(),
        &filter.chi1,
    );
    let bra = kron_vec(
        &prep.psi0.iter().map(|z| z.conj()).collect::<Vec<_>>(),
        &filter.chi0,
    );
    // A = |ket⟩⟨bra|, so Tr(A M) = ⟨bra|M|ket⟩
    let m = ch.block_choi(0, 1);
    Ok(sandwich(&bra, &m, &ket) * d as f64)
}

/// Theory records for every pair of `preps × filters`.
pub fn theory_records(
    ch: &PathChannel,
    preps: &[PreparationPair],
    filters: &[FilterPair],
) -> Result<Vec<FractionalVisibilityRecord>> {
    let mut out = Vec::with_capacity(preps.len() * filters.len());
    for prep in preps {
        for filter in filters {
            out.push(fractional_visibility(ch, prep, filter)?);
        }
    }
    Ok(out)
}
