//! Channel sources and the preparation / filter mini-language.
//!
//! Kets are written as a polarization letter (`h v d a r l`, spin dimension 2
//! only) or as a basis index (`0`, `1`, ...). Preparations:
//!
//! - `pure:A,B`: ket `A` in arm 0 and ket `B` in arm 1
//! - `mixed`: both arms maximally mixed
//! - `ensemble:w*A,B;w*A,B;...`: weighted pure pairs, weights summing to 1
//!
//! Pair lists (for records and filters) are `rectilinear` or comma-separated
//! labels: two letters (`hv`) or two indices joined by a colon (`0:2`).

use std::path::Path;

use whichway::bounds::{polarization_ket, FilterPair, PreparationPair, RECTILINEAR};
use whichway::channels::{
    erasure_dilation, file, identity_channel, pauli_mixture_channel, phase_channel,
    random_path_channel, replace_channel, transpose_channel, PathChannel, Preparation,
};
use whichway::interferometer::{verify_noise_program, NoiseProgram, PlateLayout};
use whichway::linalg::{basis_vector, CMatrix, C64};
use whichway::{Error, Result};

pub const CHANNEL_HELP: &str = "identity, transpose, pauli, erasure, plates, replace[:KET], \
    phase:P1,P2,..., random:SEED[:KRAUS], or a channel file path";

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Resolves `--channel`. Builder names take precedence over file paths.
pub fn channel(source: &str, d: Option<usize>) -> Result<PathChannel> {
    let (name, arg) = match source.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (source, None),
    };
    let dim = d.unwrap_or(2);
    let need_qubit = |what: &str| {
        if dim != 2 {
            Err(bad(format!(
                "channel {what} acts on spin dimension 2, got --d {dim}"
            )))
        } else {
            Ok(())
        }
    };
    let ch = match (name, arg) {
        ("identity", None) => identity_channel(dim),
        ("transpose", None) => transpose_channel(dim),
        ("pauli" | "pauli_mixture", None) => {
            need_qubit(name)?;
            pauli_mixture_channel()
        }
        ("erasure", None) => {
            need_qubit(name)?;
            erasure_dilation().to_channel()
        }
        ("plates", None) => {
            need_qubit(name)?;
            let prog = NoiseProgram::pauli_mixture();
            let check = verify_noise_program(&prog, PlateLayout::SharedQuarterWave, 1e-9)?;
            prog.channel(check.convention, check.layout)?
        }
        ("replace", None) => replace_channel(&CMatrix::identity(dim).scale_real(1.0 / dim as f64))?,
        ("replace", Some(k)) => replace_channel(&CMatrix::projector(&ket(k, dim)?))?,
        ("phase", Some(list)) => {
            let phases = list
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|_| bad(format!("bad phase '{p}'")))
                })
                .collect::<Result<Vec<_>>>()?;
            if d.is_some_and(|d| d != phases.len()) {
                return Err(bad(format!("{} phases for --d {dim}", phases.len())));
            }
            phase_channel(&phases)
        }
        ("random", Some(spec)) => {
            let (seed, kraus) = match spec.split_once(':') {
                Some((s, k)) => (s, k),
                None => (spec, "2"),
            };
            let seed = seed
                .parse()
                .map_err(|_| bad(format!("bad random channel seed '{seed}'")))?;
            let kraus = kraus
                .parse()
                .map_err(|_| bad(format!("bad Kraus count '{kraus}'")))?;
            random_path_channel(dim, kraus, seed)?
        }
        _ if Path::new(source).is_file() => {
            let ch = file::read(source)?;
            if d.is_some_and(|d| d != ch.spin_dim()) {
                return Err(bad(format!(
                    "channel file has spin dimension {}, --d is {dim}",
                    ch.spin_dim()
                )));
            }
            ch
        }
        _ => {
            return Err(bad(format!(
                "unknown channel '{source}' (expected {CHANNEL_HELP})"
            )))
        }
    };
    Ok(ch)
}

/// One ket token in spin dimension `d`.
pub fn ket(token: &str, d: usize) -> Result<Vec<C64>> {
    let token = token.trim();
    if let Ok(k) = token.parse::<usize>() {
        if k >= d {
            return Err(bad(format!(
                "basis index {k} out of range for dimension {d}"
            )));
        }
        return Ok(basis_vector(d, k));
    }
    let mut chars = token.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => {
            let v = polarization_ket(c).ok_or_else(|| bad(format!("unknown ket '{token}'")))?;
            if d != 2 {
                return Err(bad(format!(
                    "polarization ket '{token}' needs dimension 2, got {d}"
                )));
            }
            Ok(v)
        }
        _ => Err(bad(format!("unknown ket '{token}'"))),
    }
}

fn ket_pair(text: &str, d: usize) -> Result<(Vec<C64>, Vec<C64>)> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| bad(format!("expected two kets 'A,B', got '{text}'")))?;
    Ok((ket(a, d)?, ket(b, d)?))
}

/// Parses `--prep` into a preparation on spin dimension `d`.
pub fn preparation(text: &str, d: usize) -> Result<Preparation> {
    let text = text.trim();
    if text == "mixed" {
        return Ok(Preparation::maximally_mixed(d));
    }
    if let Some(rest) = text.strip_prefix("pure:") {
        let (a, b) = ket_pair(rest, d)?;
        return Preparation::pure(a, b);
    }
    if let Some(rest) = text.strip_prefix("ensemble:") {
        let mut weights = Vec::new();
        let mut pairs = Vec::new();
        for term in rest.split(';').filter(|t| !t.trim().is_empty()) {
            let (w, kets) = term
                .split_once('*')
                .ok_or_else(|| bad(format!("ensemble term '{term}' is not 'w*A,B'")))?;
            weights.push(
                w.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("bad weight '{w}'")))?,
            );
            pairs.push(ket_pair(kets, d)?);
        }
        return Preparation::ensemble(weights, pairs);
    }
    Err(bad(format!(
        "unknown preparation '{text}' (expected pure:A,B, mixed or ensemble:w*A,B;...)"
    )))
}

type LabeledPair = (String, Vec<C64>, Vec<C64>);

fn pair_labels(text: &str, d: usize) -> Result<Vec<LabeledPair>> {
    let labels: Vec<String> = if text.trim() == "rectilinear" {
        RECTILINEAR.iter().map(|s| s.to_string()).collect()
    } else {
        text.split(',').map(|s| s.trim().to_string()).collect()
    };
    labels
        .into_iter()
        .map(|label| {
            let (a, b) = match label.split_once(':') {
                Some((a, b)) => (ket(a, d)?, ket(b, d)?),
                None => {
                    let chars: Vec<char> = label.chars().collect();
                    if chars.len() != 2 {
                        return Err(bad(format!("pair label '{label}' is not two kets")));
                    }
                    (
                        ket(&chars[0].to_string(), d)?,
                        ket(&chars[1].to_string(), d)?,
                    )
                }
            };
            Ok((label, a, b))
        })
        .collect()
}

/// Pure preparation pairs for record-level commands. Accepts a pair list or
/// a single `pure:A,B`.
pub fn preparation_pairs(text: &str, d: usize) -> Result<Vec<PreparationPair>> {
    if let Some(rest) = text.trim().strip_prefix("pure:") {
        let (a, b) = ket_pair(rest, d)?;
        let label: String = rest.split(',').map(str::trim).collect();
        return Ok(vec![PreparationPair::new(label, a, b)?]);
    }
    pair_labels(text, d)?
        .into_iter()
        .map(|(l, a, b)| PreparationPair::new(l, a, b))
        .collect()
}

pub fn filter_pairs(text: &str, d: usize) -> Result<Vec<FilterPair>> {
    pair_labels(text, d)?
        .into_iter()
        .map(|(l, a, b)| FilterPair::new(l, a, b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kets_by_letter_and_index() {
        assert_eq!(ket("v", 2).unwrap(), basis_vector(2, 1));
        assert_eq!(ket("2", 3).unwrap(), basis_vector(3, 2));
        assert!(ket("3", 3).is_err());
        assert!(ket("h", 3).is_err());
        assert!(ket("hv", 2).is_err());
    }

    #[test]
    fn preparations_parse() {
        assert!(matches!(
            preparation("pure:h,v", 2).unwrap(),
            Preparation::Pure { .. }
        ));
        assert_eq!(
            preparation("mixed", 3).unwrap(),
            Preparation::maximally_mixed(3)
        );
        let ens = preparation("ensemble:0.5*h,h;0.5*v,v", 2).unwrap();
        assert_eq!(
            ens.rho0().matrix(),
            Preparation::maximally_mixed(2).rho0().matrix()
        );
        assert!(preparation("ensemble:0.5*h,h", 2).is_err());
        assert!(preparation("pure:h", 2).is_err());
        assert!(preparation("thermal", 2).is_err());
    }

    #[test]
    fn pair_lists_parse() {
        let f = filter_pairs("rectilinear", 2).unwrap();
        assert_eq!(f.len(), 4);
        let p = preparation_pairs("0:2,1:1", 3).unwrap();
        assert_eq!(p[0].label, "0:2");
        assert_eq!(p[0].psi1, basis_vector(3, 2));
        assert_eq!(preparation_pairs("pure:d,a", 2).unwrap()[0].label, "da");
        assert!(filter_pairs("hvh", 2).is_err());
    }

    #[test]
    fn channel_sources() {
        assert_eq!(channel("identity", Some(3)).unwrap().spin_dim(), 3);
        assert_eq!(channel("phase:0,1,2", None).unwrap().spin_dim(), 3);
        assert!(channel("pauli", Some(3)).is_err());
        assert!(channel("random:x", None).is_err());
        assert!(matches!(
            channel("no-such-channel", None),
            Err(Error::Parse(_))
        ));
        let plates = channel("plates", None).unwrap();
        let pauli = channel("pauli", None).unwrap();
        assert!(
            plates
                .superoperator(0, 1)
                .max_abs_diff(&pauli.superoperator(0, 1))
                < 1e-12
        );
    }
}
