//! Channel spec files.
//!
//! A channel file is TOML:
//!
//! ```toml
//! spin_dim = 2
//!
//! [metadata]          # optional, string values only
//! name = "pauli_mixture"
//!
//! [[kraus]]           # one table per Kraus pair
//! a = [[0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [0.5, 0.0]]   # row-major [re, im]
//! b = [[0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [0.5, 0.0]]
//! ```
//!
//! Floats are written in shortest round-trip form, so write → read → write
//! reproduces the same text.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::channel::PathChannel;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

#[derive(Serialize, Deserialize)]
struct ChannelFile {
    spin_dim: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
    kraus: Vec<KrausEntry>,
}

#[derive(Serialize, Deserialize)]
struct KrausEntry {
    a: Vec<[f64; 2]>,
    b: Vec<[f64; 2]>,
}

fn encode(m: &CMatrix) -> Vec<[f64; 2]> {
    m.as_slice().iter().map(|z| [z.re, z.im]).collect()
}

fn decode(d: usize, entries: &[[f64; 2]]) -> Result<CMatrix> {
    CMatrix::from_vec(
        d,
        d,
        entries.iter().map(|&[re, im]| C64::new(re, im)).collect(),
    )
    .map_err(|e| Error::Parse(format!("Kraus operator: {e}")))
}

pub fn to_string(ch: &PathChannel) -> String {
    let file = ChannelFile {
        spin_dim: ch.spin_dim(),
        metadata: ch.metadata().clone(),
        kraus: ch
            .kraus_pairs()
            .iter()
            .map(|(a, b)| KrausEntry {
                a: encode(a),
                b: encode(b),
            })
            .collect(),
    };
    toml::to_string(&file).expect("channel file is serializable")
}

pub fn from_str(text: &str) -> Result<PathChannel> {
    let file: ChannelFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.spin_dim == 0 {
        return Err(Error::Parse("spin_dim must be positive".into()));
    }
    let pairs = file
        .kraus
        .iter()
        .map(|k| Ok((decode(file.spin_dim, &k.a)?, decode(file.spin_dim, &k.b)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut ch = PathChannel::new(pairs)?;
    for (k, v) in file.metadata {
        ch = ch.with_metadata(k, v);
    }
    Ok(ch)
}

pub fn write(ch: &PathChannel, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_string(ch))?;
    Ok(())
}

pub fn read(path: impl AsRef<Path>) -> Result<PathChannel> {
    from_str(&std::fs::read_to_string(path)?)
}
