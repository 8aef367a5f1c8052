use rayon::prelude::*;

use super::fit::{fit_fringes, FitResult};
use super::fringes::{binomial_resample, simulate_cell, FringeDataset, FringeSettings};
use crate::bounds::{FilterPair, FractionalVisibilityRecord, PreparationPair};
use crate::channels::PathChannel;
use crate::error::Result;

/// One simulated `(μ, ν)` combination.
#[derive(Clone, Debug)]
pub struct ExperimentCell {
    pub mu: String,
    pub nu: String,
    /// Counts after equalizing detector efficiencies.
    pub dataset: FringeDataset,
    pub fit: FitResult,
}

impl ExperimentCell {
    pub fn record(&self) -> FractionalVisibilityRecord {
        FractionalVisibilityRecord::new(
            &self.mu,
            &self.nu,
            self.fit.p_hat,
            self.fit.v_hat,
            self.fit.sigma_p,
            self.fit.sigma_v,
        )
    }
}

/// 32-bit FNV-1a of the cell labels, so a cell's random stream does not
/// depend on which other cells are requested.
fn cell_id(mu: &str, nu: &str) -> u64 {
    let mut h: u32 = 0x811c_9dc5;
    for b in mu.bytes().chain(*b"|").chain(nu.bytes()) {
        h ^= b as u32;
        h = h.wrapping_mul(0x0100_0193);
    }
    h as u64 + 1
}

/// Simulates, equalizes and fits every `(μ, ν)` in `preps × filters`.
/// Cells run in parallel; each draws from streams keyed by its labels.
pub fn simulate_experiment(
    ch: &PathChannel,
    preps: &[PreparationPair],
    filters: &[FilterPair],
    settings: &FringeSettings,
) -> Result<Vec<ExperimentCell>> {
    let pairs: Vec<(&PreparationPair, &FilterPair)> = preps
        .iter()
        .flat_map(|p| filters.iter().map(move |f| (p, f)))
        .collect();
    let reference = settings.efficiencies.iter().copied().fold(1.0, f64::min);
    pairs
        .par_iter()
        .map(|&(prep, filter)| {
            let id = cell_id(&prep.label, &filter.label);
            let raw = simulate_cell(ch, prep, filter, settings, id)?;
            let dataset = binomial_resample(&raw, reference, settings.seed ^ id)?;
            let fit = fit_fringes(&dataset)?;
            Ok(ExperimentCell {
                mu: prep.label.clone(),
                nu: filter.label.clone(),
                dataset,
                fit,
            })
        })
        .collect()
}

/// Fitted records for every `(μ, ν)` in `preps × filters`.
pub fn run_experiment(
    ch: &PathChannel,
    preps: &[PreparationPair],
    filters: &[FilterPair],
    settings: &FringeSettings,
) -> Result<Vec<FractionalVisibilityRecord>> {
    Ok(simulate_experiment(ch, preps, filters, settings)?
        .iter()
        .map(ExperimentCell::record)
        .collect())
}
