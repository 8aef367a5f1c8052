//! Monte Carlo model of the noisy Mach-Zehnder experiment: wave-plate
//! optics, photon counting with detector efficiencies, and fringe fitting.

mod experiment;
mod fit;
mod fringes;
mod optics;

pub use experiment::{run_experiment, simulate_experiment, ExperimentCell};
pub use fit::{fit_fringes, FitResult};
pub use fringes::{
    binomial_resample, default_phases, outcome_probabilities, simulate_fringes, FringeDataset,
    FringeSettings, DETECTORS,
};
pub use optics::{
    check_noise_program, jones_matrix, jones_matrix_with, row_unitaries, verify_noise_program,
    JonesConvention, NoiseProgram, NoiseRow, PlateKind, PlateLayout, ProgramCheck, RowCheck,
    WavePlateSetting,
};
