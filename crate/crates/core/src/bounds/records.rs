use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Filtering probability `p` and fractional visibility `V` for preparation
/// `mu` and filter `nu`, with one-standard-deviation uncertainties (zero for
/// theory values).
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalVisibilityRecord {
    pub mu: String,
    pub nu: String,
    pub p: f64,
    pub v: C64,
    pub sigma_p: f64,
    pub sigma_v: f64,
}

impl FractionalVisibilityRecord {
    pub fn new(mu: &str, nu: &str, p: f64, v: C64, sigma_p: f64, sigma_v: f64) -> Self {
        Self {
            mu: mu.to_string(),
            nu: nu.to_string(),
            p,
            v,
            sigma_p,
            sigma_v,
        }
    }

    /// `|V| ≤ p` up to three combined standard deviations.
    pub fn is_consistent(&self) -> bool {
        self.v.norm() <= self.p + 3.0 * (self.sigma_p + self.sigma_v) + 1e-10
    }
}

#[derive(Serialize, Deserialize)]
struct Row {
    mu: String,
    nu: String,
    p: f64,
    #[serde(rename = "re_V")]
    re_v: f64,
    #[serde(rename = "im_V")]
    im_v: f64,
    sigma_p: f64,
    #[serde(rename = "sigma_V")]
    sigma_v: f64,
}

impl From<&FractionalVisibilityRecord> for Row {
    fn from(r: &FractionalVisibilityRecord) -> Self {
        Row {
            mu: r.mu.clone(),
            nu: r.nu.clone(),
            p: r.p,
            re_v: r.v.re,
            im_v: r.v.im,
            sigma_p: r.sigma_p,
            sigma_v: r.sigma_v,
        }
    }
}

impl TryFrom<Row> for FractionalVisibilityRecord {
    type Error = Error;

    fn try_from(row: Row) -> Result<Self> {
        let values = [row.p, row.re_v, row.im_v, row.sigma_p, row.sigma_v];
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::Parse(format!(
                "non-finite value in record ({}, {})",
                row.mu, row.nu
            )));
        }
        if row.sigma_p < 0.0 || row.sigma_v < 0.0 {
            return Err(Error::Parse(format!(
                "negative uncertainty in record ({}, {})",
                row.mu, row.nu
            )));
        }
        if !(0.0..=1.0).contains(&row.p) {
            return Err(Error::Parse(format!(
                "p = {} outside [0, 1] in record ({}, {})",
                row.p, row.mu, row.nu
            )));
        }
        Ok(FractionalVisibilityRecord {
            mu: row.mu,
            nu: row.nu,
            p: row.p,
            v: C64::new(row.re_v, row.im_v),
            sigma_p: row.sigma_p,
            sigma_v: row.sigma_v,
        })
    }
}

/// Writes records as CSV with header `mu,nu,p,re_V,im_V,sigma_p,sigma_V`.
pub fn write_records_csv<W: Write>(out: W, records: &[FractionalVisibilityRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(Row::from(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<FractionalVisibilityRecord>> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    r.deserialize::<Row>()
        .map(|row| row.map_err(|e| Error::Parse(e.to_string()))?.try_into())
        .collect()
}

pub fn records_to_csv_string(records: &[FractionalVisibilityRecord]) -> String {
    let mut buf = Vec::new();
    write_records_csv(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

pub fn records_from_csv_str(text: &str) -> Result<Vec<FractionalVisibilityRecord>> {
    read_records_csv(text.as_bytes())
}

pub fn read_records_file(path: impl AsRef<Path>) -> Result<Vec<FractionalVisibilityRecord>> {
    read_records_csv(std::fs::File::open(path)?)
}

pub fn find_record<'a>(
    records: &'a [FractionalVisibilityRecord],
    mu: &str,
    nu: &str,
) -> Result<&'a FractionalVisibilityRecord> {
    records
        .iter()
        .find(|r| r.mu == mu && r.nu == nu)
        .ok_or_else(|| Error::MissingRecord {
            mu: mu.to_string(),
            nu: nu.to_string(),
        })
}

/// Measured filtering probabilities and fractional visibilities from the
/// single-photon experiment, with the quoted 0.003 uncertainty on every value.
pub fn measured_records() -> Vec<FractionalVisibilityRecord> {
    const DATA: [(&str, &str, f64, f64); 8] = [
        ("hh", "hh", 0.489, 0.476),
        ("hv", "vh", 0.513, 0.488),
        ("vh", "hv", 0.511, 0.479),
        ("vv", "vv", 0.489, 0.478),
        ("hh", "vv", 0.512, 0.104),
        ("hv", "hv", 0.490, 0.039),
        ("vh", "vh", 0.490, 0.032),
        ("vv", "hh", 0.512, 0.100),
    ];
    DATA.iter()
        .map(|&(mu, nu, p, v)| {
            FractionalVisibilityRecord::new(mu, nu, p, C64::new(v, 0.0), 0.003, 0.003)
        })
        .collect()
}
