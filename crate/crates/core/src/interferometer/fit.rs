//! Joint sinusoidal fit of the two interfering outputs.
//!
//! With `N_k` the total count over all four detectors at phase `φ_k`, the
//! model is `n±_k = N_k ½[p ± (B cos φ_k + C sin φ_k)]`, linear in
//! `(p, B, C)`. Since `Re(V e^{iφ}) = Re V cos φ − Im V sin φ`, the
//! fractional visibility is `V = B − iC`. The fit is weighted least squares
//! with Poisson weights taken from the previous iterate.

use std::f64::consts::{PI, TAU};

use super::fringes::FringeDataset;
use crate::error::{Error, Result};
use crate::linalg::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub p_hat: f64,
    pub v_hat: C64,
    pub sigma_p: f64,
    /// Uncertainty of `|V̂|`.
    pub sigma_v: f64,
    /// Root mean square of the Pearson residuals.
    pub residual_rms: f64,
}

impl FitResult {
    pub fn is_consistent(&self) -> bool {
        self.v_hat.norm() <= self.p_hat + 3.0 * (self.sigma_p + self.sigma_v)
    }
}

const REWEIGHT_PASSES: usize = 3;

fn check_coverage(phases: &[f64]) -> Result<()> {
    let mut wrapped: Vec<f64> = phases.iter().map(|p| p.rem_euclid(TAU)).collect();
    wrapped.sort_by(f64::total_cmp);
    wrapped.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    if wrapped.len() > 1 && (wrapped[0] + TAU - wrapped[wrapped.len() - 1]) < 1e-9 {
        wrapped.pop();
    }
    if wrapped.len() < 4 {
        return Err(Error::Fit(format!(
            "need at least 4 distinct phases modulo 2π, got {}",
            wrapped.len()
        )));
    }
    let mut gap = wrapped[0] + TAU - wrapped[wrapped.len() - 1];
    for w in wrapped.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    if gap > PI + 1e-9 {
        return Err(Error::Fit(format!(
            "phases leave a gap of {gap:.3} rad; they must cover the full period"
        )));
    }
    Ok(())
}

fn invert3(a: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let cof =
        |r0: usize, r1: usize, c0: usize, c1: usize| a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0];
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    let det = a[0][0] * adj[0][0] + a[0][1] * adj[1][0] + a[0][2] * adj[2][0];
    let scale = a[0][0].abs() * a[1][1].abs() * a[2][2].abs();
    if !(det.abs() > 1e-12 * scale) || scale == 0.0 {
        return None;
    }
    Some(adj.map(|row| row.map(|x| x / det)))
}

struct Row {
    x: [f64; 3],
    y: f64,
}

fn design(ds: &FringeDataset) -> Vec<Row> {
    let mut rows = Vec::with_capacity(2 * ds.len());
    for k in 0..ds.len() {
        let n = ds.total(k) as f64;
        if n == 0.0 {
            continue;
        }
        let (s, c) = ds.phases[k].sin_cos();
        let h = 0.5 * n;
        rows.push(Row {
            x: [h, h * c, h * s],
            y: ds.counts_plus[k] as f64,
        });
        rows.push(Row {
            x: [h, -h * c, -h * s],
            y: ds.counts_minus[k] as f64,
        });
    }
    rows
}

fn predict(row: &Row, theta: &[f64; 3]) -> f64 {
    row.x.iter().zip(theta).map(|(a, b)| a * b).sum()
}

fn solve(rows: &[Row], weights: &[f64]) -> Result<([f64; 3], [[f64; 3]; 3])> {
    let mut a = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for (row, &w) in rows.iter().zip(weights) {
        for i in 0..3 {
            b[i] += w * row.x[i] * row.y;
            for j in 0..3 {
                a[i][j] += w * row.x[i] * row.x[j];
            }
        }
    }
    let inv = invert3(&a).ok_or_else(|| Error::Fit("degenerate design matrix".into()))?;
    let theta = std::array::from_fn(|i| (0..3).map(|j| inv[i][j] * b[j]).sum());
    Ok((theta, inv))
}

/// Fits `p`, `|V|` and the fringe phase jointly to both outputs.
pub fn fit_fringes(ds: &FringeDataset) -> Result<FitResult> {
    check_coverage(&ds.phases)?;
    let rows = design(ds);
    if rows.len() < 6 {
        return Err(Error::Fit("too few phases with nonzero counts".into()));
    }
    let (mut theta, _) = solve(&rows, &vec![1.0; rows.len()])?;
    let mut cov = [[0.0; 3]; 3];
    let mut weights = Vec::new();
    for _ in 0..REWEIGHT_PASSES {
        weights = rows
            .iter()
            .map(|r| 1.0 / predict(r, &theta).max(1.0))
            .collect();
        (theta, cov) = solve(&rows, &weights)?;
    }
    let chi2: f64 = rows
        .iter()
        .zip(&weights)
        .map(|(r, w)| w * (r.y - predict(r, &theta)).powi(2))
        .sum();
    let [p, b, c] = theta;
    let v_hat = C64::new(b, -c);
    let mag = v_hat.norm();
    let sigma_v = if mag > 0.0 {
        let g = [b / mag, c / mag];
        (g[0] * g[0] * cov[1][1] + 2.0 * g[0] * g[1] * cov[1][2] + g[1] * g[1] * cov[2][2])
            .max(0.0)
            .sqrt()
    } else {
        (0.5 * (cov[1][1] + cov[2][2])).max(0.0).sqrt()
    };
    Ok(FitResult {
        p_hat: p.max(0.0),
        v_hat,
        sigma_p: cov[0][0].max(0.0).sqrt(),
        sigma_v,
        residual_rms: (chi2 / rows.len() as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interferometer::fringes::default_phases;

    fn exact(p: f64, v: C64, n: f64, phases: Vec<f64>) -> FringeDataset {
        let len = phases.len();
        let mut ds = FringeDataset {
            phases,
            counts_plus: vec![0; len],
            counts_minus: vec![0; len],
            counts_ref: vec![[0, 0]; len],
            shots_per_phase: n as u64,
            seed: 0,
            efficiencies: [1.0; 4],
        };
        for k in 0..len {
            let f = (v * C64::from_polar(1.0, ds.phases[k])).re;
            ds.counts_plus[k] = (0.5 * n * (p + f)).round() as u64;
            ds.counts_minus[k] = (0.5 * n * (p - f)).round() as u64;
            let rest = n as u64 - ds.counts_plus[k] - ds.counts_minus[k];
            ds.counts_ref[k] = [rest / 2, rest - rest / 2];
        }
        ds
    }

    #[test]
    fn recovers_noiseless_model() {
        // quarter-period phases keep every model count integral
        let phases: Vec<f64> = (0..4).map(|k| k as f64 * PI / 2.0).collect();
        let ds = exact(0.5, C64::new(0.5, 0.0), 4e4, phases);
        let fit = fit_fringes(&ds).unwrap();
        assert!((fit.p_hat - 0.5).abs() < 1e-9);
        assert!((fit.v_hat - C64::new(0.5, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn recovers_complex_visibility() {
        let v = C64::from_polar(0.3, 1.1);
        let ds = exact(0.45, v, 1e9, default_phases());
        let fit = fit_fringes(&ds).unwrap();
        assert!((fit.p_hat - 0.45).abs() < 1e-8);
        assert!((fit.v_hat - v).norm() < 1e-8);
        assert!(fit.is_consistent());
    }

    #[test]
    fn coverage_required() {
        let ds = exact(0.5, C64::new(0.2, 0.0), 1e4, vec![0.0, 0.3, 0.6, 0.9, 1.2]);
        assert!(matches!(fit_fringes(&ds), Err(Error::Fit(_))));
        let ds = exact(0.5, C64::new(0.2, 0.0), 1e4, vec![0.0, PI, TAU]);
        assert!(matches!(fit_fringes(&ds), Err(Error::Fit(_))));
    }

    #[test]
    fn zero_counts_are_degenerate() {
        let mut ds = exact(0.5, C64::new(0.2, 0.0), 1e4, default_phases());
        ds.counts_plus.iter_mut().for_each(|c| *c = 0);
        ds.counts_minus.iter_mut().for_each(|c| *c = 0);
        ds.counts_ref.iter_mut().for_each(|c| *c = [0, 0]);
        assert!(matches!(fit_fringes(&ds), Err(Error::Fit(_))));
    }

    #[test]
    fn inverse_of_known_matrix() {
        let a = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]];
        let inv = invert3(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let prod: f64 = (0..3).map(|k| a[i][k] * inv[k][j]).sum();
                assert!((prod - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert!(invert3(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]]).is_none());
    }
}
