mod common;

use common::{ensemble, filters, random_filters, random_preps, rng};
use whichway::bounds::{
    bound_from_visibilities, contraction, fractional_visibility, orthonormal_filter_bound,
    single_preparation_certificate, theory_records, verify_alpha_constraint, Coefficient,
    FractionalVisibilityRecord, PreparationPair, CERT_TOL,
};
use whichway::channels::{phase_channel, random_path_channel, Preparation};
use whichway::duality::{channel_distinguishability, generalized_visibility};
use whichway::linalg::random::gaussian_c64;
use whichway::linalg::C64;

/// Random coefficients rescaled onto the contraction boundary, then bounds
/// from the exact visibilities of `seed`'s channel.
fn random_certificate(seed: u64) -> (f64, f64, f64, f64) {
    let mut rng = rng(1000 + seed);
    let d = 2 + (seed % 2) as usize;
    let ch = random_path_channel(d, 1 + (seed % 3) as usize, seed).unwrap();
    let preps = random_preps(d, 3, &mut rng);
    let filters = random_filters(d, 3, &mut rng);
    let prep = ensemble(&preps, &[0.6, 0.3, 0.1]);
    let coeffs: Vec<_> = preps
        .iter()
        .flat_map(|p| {
            filters
                .iter()
                .map(move |f| (p.label.clone(), f.label.clone()))
        })
        .map(|(mu, nu)| Coefficient::new(&mu, &nu, gaussian_c64(&mut rng)))
        .collect();
    let (rho0, rho1) = (prep.rho0(), prep.rho1());
    let raw = contraction(&coeffs, &preps, &filters, &rho0, &rho1, CERT_TOL).unwrap();
    let scale = 1.0 / (1.0 + raw.contraction_slack).sqrt();
    let coeffs: Vec<_> = coeffs
        .into_iter()
        .map(|c| Coefficient {
            alpha: c.alpha * scale,
            ..c
        })
        .collect();
    let verified =
        verify_alpha_constraint(&coeffs, &preps, &filters, &rho0, &rho1, CERT_TOL).unwrap();
    let records = theory_records(&ch, &preps, &filters).unwrap();
    let cert = bound_from_visibilities(&verified, &records).unwrap();
    let vg = generalized_visibility(&ch, &prep).unwrap();
    let dist = channel_distinguishability(&ch, &prep).unwrap();
    (cert.vg_lower, vg, cert.d_upper, dist)
}

#[test]
fn certified_bounds_are_sound() {
    for seed in 0..500 {
        let (vg_lower, vg, d_upper, dist) = random_certificate(seed);
        assert!(vg_lower <= vg + 1e-8, "seed {seed}: {vg_lower} > {vg}");
        assert!(d_upper >= dist - 1e-8, "seed {seed}: {d_upper} < {dist}");
    }
}

#[test]
fn oversized_coefficients_are_rejected() {
    let mut rng = rng(5);
    let preps = random_preps(2, 2, &mut rng);
    let filters = random_filters(2, 2, &mut rng);
    let prep = ensemble(&preps, &[0.5, 0.5]);
    let coeffs: Vec<_> = preps
        .iter()
        .flat_map(|p| {
            filters
                .iter()
                .map(move |f| Coefficient::new(&p.label, &f.label, C64::new(10.0, 0.0)))
        })
        .collect();
    let res = verify_alpha_constraint(
        &coeffs,
        &preps,
        &filters,
        &prep.rho0(),
        &prep.rho1(),
        CERT_TOL,
    );
    assert!(res.is_err());
}

#[test]
fn bound_ignores_global_phase_of_records() {
    let ch = random_path_channel(2, 2, 11).unwrap();
    let prep = PreparationPair::polarization("hv").unwrap();
    let bases = filters(&["hh", "vv"]);
    let records = theory_records(&ch, std::slice::from_ref(&prep), &bases).unwrap();
    let base = single_preparation_certificate(&prep, &bases, &records, CERT_TOL).unwrap();
    for theta in [0.3, 1.7, -2.9] {
        let turned: Vec<FractionalVisibilityRecord> = records
            .iter()
            .map(|r| FractionalVisibilityRecord {
                v: r.v * C64::from_polar(1.0, theta),
                ..r.clone()
            })
            .collect();
        let cert = single_preparation_certificate(&prep, &bases, &turned, CERT_TOL).unwrap();
        assert!((cert.vg_lower - base.vg_lower).abs() < 1e-12);
    }
}

#[test]
fn optimal_phases_match_orthonormal_filter_sum() {
    for seed in 0..50 {
        let ch = random_path_channel(2, 1 + (seed % 4) as usize, seed).unwrap();
        for label in ["hh", "hv", "da"] {
            let prep = PreparationPair::polarization(label).unwrap();
            for basis in [["hh", "vv"], ["hv", "vh"], ["dd", "aa"], ["rl", "lr"]] {
                let bases = filters(&basis);
                let records = theory_records(&ch, std::slice::from_ref(&prep), &bases).unwrap();
                let cert =
                    single_preparation_certificate(&prep, &bases, &records, CERT_TOL).unwrap();
                let sum = orthonormal_filter_bound(label, &bases, &records).unwrap();
                assert!(
                    (cert.vg_lower - sum).abs() < 1e-12,
                    "seed {seed} {label} {basis:?}"
                );
                let pure = Preparation::pure(prep.psi0.clone(), prep.psi1.clone()).unwrap();
                assert!(sum <= generalized_visibility(&ch, &pure).unwrap() + 1e-9);
            }
        }
    }
}

#[test]
fn non_orthonormal_filters_are_rejected() {
    let records = theory_records(
        &phase_channel(&[0.0, 0.0]),
        &[PreparationPair::polarization("hh").unwrap()],
        &filters(&["hh", "dd"]),
    )
    .unwrap();
    assert!(orthonormal_filter_bound("hh", &filters(&["hh", "dd"]), &records).is_err());
    assert!(orthonormal_filter_bound("hh", &filters(&["hh"]), &records).is_err());
}

#[test]
fn fractional_visibility_below_probability() {
    let mut rng = rng(21);
    for seed in 0..200 {
        let d = 2 + (seed % 3) as usize;
        let ch = random_path_channel(d, 1 + (seed % 4) as usize, seed).unwrap();
        let preps = random_preps(d, 2, &mut rng);
        let filters = random_filters(d, 2, &mut rng);
        for r in theory_records(&ch, &preps, &filters).unwrap() {
            assert!(
                r.v.norm() <= r.p + 1e-12,
                "seed {seed}: |V| = {} > p = {}",
                r.v.norm(),
                r.p
            );
        }
    }
}

#[test]
fn coherent_phase_channel_certifies_full_visibility() {
    let ch = phase_channel(&[0.4, -1.3]);
    let prep = PreparationPair::polarization("hv").unwrap();
    let bases = filters(&["hv", "vh"]);
    let records = theory_records(&ch, std::slice::from_ref(&prep), &bases).unwrap();
    let cert = single_preparation_certificate(&prep, &bases, &records, CERT_TOL).unwrap();
    assert!((cert.vg_lower - 1.0).abs() < 1e-12);
    assert!(cert.d_upper.abs() < 1e-6);
    let pure = Preparation::pure(prep.psi0.clone(), prep.psi1.clone()).unwrap();
    assert!((generalized_visibility(&ch, &pure).unwrap() - 1.0).abs() < 1e-9);
    let r = fractional_visibility(&ch, &prep, &bases[0]).unwrap();
    assert!((r.v.norm() - 1.0).abs() < 1e-12);
}
