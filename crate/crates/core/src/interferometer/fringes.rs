use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{detection_probabilities, fractional_visibility, FilterPair, PreparationPair};
use crate::channels::PathChannel;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

/// Detector order used for efficiencies: `D+`, `D−`, `D0`, `D1`.
pub const DETECTORS: [&str; 4] = ["D+", "D-", "D0", "D1"];

/// Phases `kπ/6` for `k = 0..=12`.
pub fn default_phases() -> Vec<f64> {
    (0..=12)
        .map(|k| k as f64 * std::f64::consts::PI / 6.0)
        .collect()
}

/// Photon counts per phase at the two interfering outputs and the two
/// reference detectors that see the filtered-out components.
#[derive(Clone, Debug, PartialEq)]
pub struct FringeDataset {
    pub phases: Vec<f64>,
    pub counts_plus: Vec<u64>,
    pub counts_minus: Vec<u64>,
    pub counts_ref: Vec<[u64; 2]>,
    pub shots_per_phase: u64,
    pub seed: u64,
    pub efficiencies: [f64; 4],
}

#[derive(Serialize)]
struct CsvRow {
    phase: f64,
    n_plus: u64,
    n_minus: u64,
    n_ref0: u64,
    n_ref1: u64,
}

impl FringeDataset {
    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// Counts summed over all four detectors at phase index `k`.
    pub fn total(&self, k: usize) -> u64 {
        self.counts_plus[k] + self.counts_minus[k] + self.counts_ref[k][0] + self.counts_ref[k][1]
    }

    /// CSV with header `phase,n_plus,n_minus,n_ref0,n_ref1`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for k in 0..self.len() {
            w.serialize(CsvRow {
                phase: self.phases[k],
                n_plus: self.counts_plus[k],
                n_minus: self.counts_minus[k],
                n_ref0: self.counts_ref[k][0],
                n_ref1: self.counts_ref[k][1],
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }
}

/// Parameters shared by every fringe simulation.
#[derive(Clone, Debug)]
pub struct FringeSettings {
    pub phases: Vec<f64>,
    pub shots_per_phase: u64,
    pub efficiencies: [f64; 4],
    /// Multiplies every fractional visibility; 1 is an ideal interferometer.
    pub contrast: f64,
    pub seed: u64,
}

impl FringeSettings {
    pub fn new(shots_per_phase: u64, contrast: f64, seed: u64) -> Self {
        Self {
            phases: default_phases(),
            shots_per_phase,
            efficiencies: [1.0; 4],
            contrast,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.contrast > 0.0 && self.contrast <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "contrast {} outside (0, 1]",
                self.contrast
            )));
        }
        if let Some(e) = self.efficiencies.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
            return Err(Error::InvalidInput(format!(
                "efficiency {e} outside (0, 1]"
            )));
        }
        if self.phases.iter().any(|p| !p.is_finite())
            || self.phases.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::InvalidInput(
                "phases must be finite and strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p)
        .expect("valid binomial parameters")
        .sample(rng)
}

/// Splits `n` shots over outcomes with probabilities `probs` (summing to 1)
/// by sequential conditional binomials.
fn multinomial<R: Rng + ?Sized, const K: usize>(n: u64, probs: [f64; K], rng: &mut R) -> [u64; K] {
    let mut out = [0; K];
    let mut left = n;
    let mut mass = 1.0;
    for k in 0..K - 1 {
        let q = if mass > 0.0 {
            (probs[k] / mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        out[k] = binomial(left, q, rng);
        left -= out[k];
        mass -= probs[k];
    }
    out[K - 1] = left;
    out
}

fn sandwich(bra: &[C64], m: &CMatrix) -> f64 {
    let mk = m * &CMatrix::column(bra);
    bra.iter()
        .zip(mk.as_slice())
        .map(|(b, x)| (b.conj() * x).re)
        .sum()
}

/// Exact outcome probabilities `[p+, p−, p0, p1]` at each phase in `phases`.
pub fn outcome_probabilities(
    ch: &PathChannel,
    prep: &PreparationPair,
    filter: &FilterPair,
    contrast: f64,
    phases: &[f64],
) -> Result<Vec<[f64; 4]>> {
    let record = fractional_visibility(ch, prep, filter)?;
    let kept0 = sandwich(
        &filter.chi0,
        &ch.block_map(0, 0, &CMatrix::projector(&prep.psi0))?,
    );
    let kept1 = sandwich(
        &filter.chi1,
        &ch.block_map(1, 1, &CMatrix::projector(&prep.psi1))?,
    );
    let refs = [
        (0.5 * (1.0 - kept0)).max(0.0),
        (0.5 * (1.0 - kept1)).max(0.0),
    ];
    phases
        .iter()
        .map(|&phi| {
            let (plus, minus) =
                detection_probabilities(record.p.clamp(0.0, 1.0), record.v * contrast, phi)?;
            Ok([plus, minus, refs[0], refs[1]])
        })
        .collect()
}

/// Stream id of phase `k` within simulation cell `cell`.
pub(crate) fn stream_id(cell: u64, k: usize) -> u64 {
    (cell << 20) ^ k as u64
}

pub(crate) fn simulate_cell(
    ch: &PathChannel,
    prep: &PreparationPair,
    filter: &FilterPair,
    settings: &FringeSettings,
    cell: u64,
) -> Result<FringeDataset> {
    settings.validate()?;
    let probs = outcome_probabilities(ch, prep, filter, settings.contrast, &settings.phases)?;
    let counts: Vec<[u64; 4]> = probs
        .par_iter()
        .enumerate()
        .map(|(k, p)| {
            let mut rng = ChaCha20Rng::seed_from_u64(settings.seed);
            rng.set_stream(stream_id(cell, k));
            let raw = multinomial(settings.shots_per_phase, *p, &mut rng);
            std::array::from_fn(|d| binomial(raw[d], settings.efficiencies[d], &mut rng))
        })
        .collect();
    Ok(FringeDataset {
        phases: settings.phases.clone(),
        counts_plus: counts.iter().map(|c| c[0]).collect(),
        counts_minus: counts.iter().map(|c| c[1]).collect(),
        counts_ref: counts.iter().map(|c| [c[2], c[3]]).collect(),
        shots_per_phase: settings.shots_per_phase,
        seed: settings.seed,
        efficiencies: settings.efficiencies,
    })
}

/// Simulated fringe counts for preparation `prep` and filter `filter`.
/// Deterministic in `settings.seed`; phase `k` draws from its own ChaCha
/// stream.
pub fn simulate_fringes(
    ch: &PathChannel,
    prep: &PreparationPair,
    filter: &FilterPair,
    settings: &FringeSettings,
) -> Result<FringeDataset> {
    simulate_cell(ch, prep, filter, settings, 0)
}

/// Keeps resampling streams apart from simulation streams under a shared seed.
const RESAMPLE_STREAM: u64 = 1 << 63;

/// Thins every detector's counts so that all detectors share the efficiency
/// `reference`.
pub fn binomial_resample(ds: &FringeDataset, reference: f64, seed: u64) -> Result<FringeDataset> {
    if !(reference > 0.0) {
        return Err(Error::InvalidInput(format!(
            "reference efficiency {reference} must be positive"
        )));
    }
    if let Some((d, e)) = ds
        .efficiencies
        .iter()
        .enumerate()
        .find(|(_, &e)| reference > e + 1e-12)
    {
        return Err(Error::InvalidInput(format!(
            "reference efficiency {reference} above {} efficiency {e}",
            DETECTORS[d]
        )));
    }
    let ratios = ds.efficiencies.map(|e| (reference / e).min(1.0));
    let mut out = ds.clone();
    for k in 0..ds.len() {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(RESAMPLE_STREAM | k as u64);
        out.counts_plus[k] = binomial(ds.counts_plus[k], ratios[0], &mut rng);
        out.counts_minus[k] = binomial(ds.counts_minus[k], ratios[1], &mut rng);
        out.counts_ref[k] = [
            binomial(ds.counts_ref[k][0], ratios[2], &mut rng),
            binomial(ds.counts_ref[k][1], ratios[3], &mut rng),
        ];
    }
    out.efficiencies = [reference; 4];
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::pauli_mixture_channel;

    fn hh() -> (PreparationPair, FilterPair) {
        (
            PreparationPair::polarization("hh").unwrap(),
            FilterPair::polarization("hh").unwrap(),
        )
    }

    #[test]
    fn probabilities_sum_to_one() {
        let (prep, filter) = hh();
        let all = outcome_probabilities(
            &pauli_mixture_channel(),
            &prep,
            &filter,
            0.9,
            &default_phases(),
        )
        .unwrap();
        for p in all {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(((p[0] + p[1]) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_shots_give_zero_counts() {
        let (prep, filter) = hh();
        let ds = simulate_fringes(
            &pauli_mixture_channel(),
            &prep,
            &filter,
            &FringeSettings::new(0, 1.0, 1),
        )
        .unwrap();
        assert!(ds
            .counts_plus
            .iter()
            .chain(&ds.counts_minus)
            .all(|&c| c == 0));
        assert!(ds.counts_ref.iter().all(|c| c == &[0, 0]));
    }

    #[test]
    fn deterministic_and_bounded() {
        let (prep, filter) = hh();
        let ch = pauli_mixture_channel();
        let s = FringeSettings::new(5000, 0.96, 42);
        let a = simulate_fringes(&ch, &prep, &filter, &s).unwrap();
        let b = simulate_fringes(&ch, &prep, &filter, &s).unwrap();
        assert_eq!(a.to_csv_string(), b.to_csv_string());
        assert!((0..a.len()).all(|k| a.total(k) == 5000));
        let c =
            simulate_fringes(&ch, &prep, &filter, &FringeSettings::new(5000, 0.96, 43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_settings_rejected() {
        let (prep, filter) = hh();
        let ch = pauli_mixture_channel();
        for contrast in [0.0, 1.1, f64::NAN] {
            assert!(
                simulate_fringes(&ch, &prep, &filter, &FringeSettings::new(10, contrast, 0))
                    .is_err()
            );
        }
        let mut s = FringeSettings::new(10, 1.0, 0);
        s.phases = vec![0.0, 0.0];
        assert!(simulate_fringes(&ch, &prep, &filter, &s).is_err());
        let mut s = FringeSettings::new(10, 1.0, 0);
        s.efficiencies[2] = 0.0;
        assert!(simulate_fringes(&ch, &prep, &filter, &s).is_err());
    }

    #[test]
    fn multinomial_conserves_shots() {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let out = multinomial(1000, [0.5, 0.0, 0.25, 0.25], &mut rng);
        assert_eq!(out.iter().sum::<u64>(), 1000);
        assert_eq!(out[1], 0);
        assert_eq!(multinomial(7, [0.0, 0.0, 1.0, 0.0], &mut rng), [0, 0, 7, 0]);
    }

    #[test]
    fn csv_header() {
        let (prep, filter) = hh();
        let ds = simulate_fringes(
            &pauli_mixture_channel(),
            &prep,
            &filter,
            &FringeSettings::new(10, 1.0, 0),
        )
        .unwrap();
        let text = ds.to_csv_string();
        assert!(text.starts_with("phase,n_plus,n_minus,n_ref0,n_ref1\n"));
        assert_eq!(text.lines().count(), 14);
    }

    #[test]
    fn resample_rules() {
        let (prep, filter) = hh();
        let mut s = FringeSettings::new(1000, 1.0, 3);
        s.efficiencies = [0.9, 0.6, 0.9, 0.6];
        let ds = simulate_fringes(&pauli_mixture_channel(), &prep, &filter, &s).unwrap();
        assert!(binomial_resample(&ds, 0.7, 0).is_err());
        let out = binomial_resample(&ds, 0.6, 0).unwrap();
        assert_eq!(out.efficiencies, [0.6; 4]);
        assert_eq!(out.counts_minus, ds.counts_minus);
        let zero = FringeDataset {
            counts_plus: vec![0; ds.len()],
            counts_minus: vec![0; ds.len()],
            counts_ref: vec![[0, 0]; ds.len()],
            ..ds
        };
        let out = binomial_resample(&zero, 0.5, 1).unwrap();
        assert!(out.counts_plus.iter().all(|&c| c == 0));
    }
}
