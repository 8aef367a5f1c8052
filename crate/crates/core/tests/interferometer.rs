mod common;

use common::filters;
use whichway::bounds::{
    fractional_visibility, rectilinear_filters, rectilinear_preparations, swap_estimate,
    PreparationPair,
};
use whichway::channels::pauli_mixture_channel;
use whichway::interferometer::{
    binomial_resample, fit_fringes, run_experiment, simulate_experiment, simulate_fringes,
    verify_noise_program, FringeSettings, JonesConvention, NoiseProgram, PlateLayout,
};
use whichway::Error;

#[test]
fn per_arm_quarter_wave_layout_fails() {
    let prog = NoiseProgram::pauli_mixture();
    let shared = verify_noise_program(&prog, PlateLayout::SharedQuarterWave, 1e-9).unwrap();
    assert_eq!(shared.convention, JonesConvention::Standard);
    assert!(matches!(
        verify_noise_program(&prog, PlateLayout::PerArm, 1e-9),
        Err(Error::Convention(_))
    ));
}

#[test]
fn plate_average_equals_pauli_mixture() {
    let plates = NoiseProgram::pauli_mixture()
        .channel(JonesConvention::Standard, PlateLayout::SharedQuarterWave)
        .unwrap();
    let target = pauli_mixture_channel();
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        assert!(
            plates
                .superoperator(i, j)
                .max_abs_diff(&target.superoperator(i, j))
                < 1e-12
        );
    }
}

#[test]
fn resampling_scales_counts_by_efficiency_ratio() {
    let prep = PreparationPair::polarization("hh").unwrap();
    let filter = &filters(&["hh"])[0];
    let mut settings = FringeSettings::new(20_000, 1.0, 1);
    settings.efficiencies = [0.9, 0.6, 0.9, 0.6];
    let raw = simulate_fringes(&pauli_mixture_channel(), &prep, filter, &settings).unwrap();
    let before: u64 = raw.counts_plus.iter().sum();
    let mut after = 0.0;
    let seeds = 100;
    for seed in 0..seeds {
        let ds = binomial_resample(&raw, 0.6, seed).unwrap();
        assert_eq!(ds.counts_minus, raw.counts_minus);
        assert_eq!(ds.efficiencies, [0.6; 4]);
        after += ds.counts_plus.iter().sum::<u64>() as f64;
    }
    let ratio = after / seeds as f64 / before as f64;
    assert!((ratio - 2.0 / 3.0).abs() < 0.003, "ratio {ratio}");
    assert!(binomial_resample(&raw, 0.7, 0).is_err());
}

#[test]
fn simulation_is_deterministic_in_seed() {
    let ch = pauli_mixture_channel();
    let prep = PreparationPair::polarization("hv").unwrap();
    let filter = &filters(&["vh"])[0];
    let a = simulate_fringes(&ch, &prep, filter, &FringeSettings::new(5000, 0.96, 42)).unwrap();
    let b = simulate_fringes(&ch, &prep, filter, &FringeSettings::new(5000, 0.96, 42)).unwrap();
    let c = simulate_fringes(&ch, &prep, filter, &FringeSettings::new(5000, 0.96, 43)).unwrap();
    assert_eq!(a.to_csv_string(), b.to_csv_string());
    assert_ne!(a.to_csv_string(), c.to_csv_string());
    assert!(a
        .to_csv_string()
        .starts_with("phase,n_plus,n_minus,n_ref0,n_ref1"));
}

#[test]
fn fitted_visibility_stays_below_probability() {
    let ch = pauli_mixture_channel();
    for seed in 0..20 {
        let settings = FringeSettings::new(2000, 1.0, seed);
        for cell in simulate_experiment(
            &ch,
            &rectilinear_preparations(),
            &rectilinear_filters(),
            &settings,
        )
        .unwrap()
        {
            assert!(
                cell.fit.is_consistent(),
                "seed {seed} {}/{}",
                cell.mu,
                cell.nu
            );
        }
    }
}

#[test]
fn simulated_cells_match_theory() {
    let ch = pauli_mixture_channel();
    let preps = [PreparationPair::polarization("hh").unwrap()];
    let bases = filters(&["hh", "hv"]);
    let settings = FringeSettings::new(50_000, 1.0, 9);
    let records = run_experiment(&ch, &preps, &bases, &settings).unwrap();
    let hh = &records[0];
    let hv = &records[1];
    assert!((hh.v.norm() - 0.5).abs() < 3.0 * hh.sigma_v, "{hh:?}");
    assert!(hv.v.norm() < 3.0 * hv.sigma_v + 1e-12, "{hv:?}");
}

#[test]
fn probability_estimate_converges() {
    let ch = pauli_mixture_channel();
    let prep = PreparationPair::polarization("hv").unwrap();
    let filter = &filters(&["dd"])[0];
    let exact = fractional_visibility(&ch, &prep, filter).unwrap().p;
    let mut errors = Vec::new();
    for shots in [1_000, 100_000, 10_000_000] {
        let ds = simulate_fringes(&ch, &prep, filter, &FringeSettings::new(shots, 1.0, 5)).unwrap();
        let fit = fit_fringes(&ds).unwrap();
        assert!((fit.p_hat - exact).abs() < 4.0 * fit.sigma_p);
        errors.push(fit.sigma_p);
    }
    assert!(errors.windows(2).all(|w| w[1] < w[0] / 5.0));
}

#[test]
fn subset_request_returns_exactly_those_cells() {
    let ch = pauli_mixture_channel();
    let preps = [PreparationPair::polarization("vh").unwrap()];
    let bases = filters(&["hv", "vv"]);
    let settings = FringeSettings::new(3000, 1.0, 77);
    let subset = run_experiment(&ch, &preps, &bases, &settings).unwrap();
    let labels: Vec<_> = subset
        .iter()
        .map(|r| (r.mu.as_str(), r.nu.as_str()))
        .collect();
    assert_eq!(labels, [("vh", "hv"), ("vh", "vv")]);
    // a cell's counts do not depend on the other requested cells
    let full = run_experiment(
        &ch,
        &rectilinear_preparations(),
        &rectilinear_filters(),
        &settings,
    )
    .unwrap();
    let same = full.iter().find(|r| r.mu == "vh" && r.nu == "hv").unwrap();
    assert_eq!(same, &subset[0]);
}

#[test]
fn reduced_contrast_reduces_swap_estimate() {
    let ch = pauli_mixture_channel();
    let settings = FringeSettings::new(100_000, 0.96, 2024);
    let records = run_experiment(
        &ch,
        &rectilinear_preparations(),
        &rectilinear_filters(),
        &settings,
    )
    .unwrap();
    let swap = swap_estimate(&records).unwrap();
    assert!((swap - 0.96).abs() < 0.02, "swap {swap}");
}

#[test]
fn invalid_settings_rejected() {
    let ch = pauli_mixture_channel();
    let prep = PreparationPair::polarization("hh").unwrap();
    let filter = &filters(&["hh"])[0];
    let mut s = FringeSettings::new(100, 1.2, 0);
    assert!(simulate_fringes(&ch, &prep, filter, &s).is_err());
    s.contrast = 1.0;
    s.efficiencies[2] = 0.0;
    assert!(simulate_fringes(&ch, &prep, filter, &s).is_err());
}
