//! Jones matrices of wave plates and the wave-plate program that realizes
//! the four path-dependent Pauli pairs.

use crate::channels::builders::pauli_pairs;
use crate::channels::PathChannel;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlateKind {
    Half,
    Quarter,
}

/// Wave plate with its fast axis at `angle_deg` from horizontal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WavePlateSetting {
    pub kind: PlateKind,
    pub angle_deg: f64,
}

impl WavePlateSetting {
    pub fn new(kind: PlateKind, angle_deg: f64) -> Result<Self> {
        if !(-180.0..=180.0).contains(&angle_deg) {
            return Err(Error::InvalidInput(format!(
                "wave plate angle {angle_deg} outside [-180, 180]"
            )));
        }
        Ok(Self { kind, angle_deg })
    }

    pub fn half(angle_deg: f64) -> Self {
        Self::new(PlateKind::Half, angle_deg).expect("angle in range")
    }

    pub fn quarter(angle_deg: f64) -> Self {
        Self::new(PlateKind::Quarter, angle_deg).expect("angle in range")
    }
}

/// Sign convention for plate angles.
///
/// `Standard`: a plate at `θ` is `R(θ) diag(1, e^{iΓ}) R(−θ)` with
/// `R(θ) = [[cos θ, −sin θ], [sin θ, cos θ]]` and retardance `Γ = π` (half)
/// or `π/2` (quarter). `Mirrored` uses `−θ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JonesConvention {
    Standard,
    Mirrored,
}

impl std::fmt::Display for JonesConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Standard => "standard",
            Self::Mirrored => "mirrored",
        })
    }
}

/// Jones matrix in the standard convention: a half-wave plate at 0° is
/// `diag(1, −1)`, at 45° it is `X`.
pub fn jones_matrix(setting: WavePlateSetting) -> CMatrix {
    jones_matrix_with(setting, JonesConvention::Standard)
}

pub fn jones_matrix_with(setting: WavePlateSetting, convention: JonesConvention) -> CMatrix {
    let theta = match convention {
        JonesConvention::Standard => setting.angle_deg,
        JonesConvention::Mirrored => -setting.angle_deg,
    }
    .to_radians();
    let retard = match setting.kind {
        PlateKind::Half => C64::new(-1.0, 0.0),
        PlateKind::Quarter => C64::new(0.0, 1.0),
    };
    let (s, c) = theta.sin_cos();
    let rot = CMatrix::from_real_rows(&[&[c, -s], &[s, c]]);
    let core = CMatrix::diag(&[C64::new(1.0, 0.0), retard]);
    &(&rot * &core) * &rot.transpose()
}

/// How the four plates of a row act on the two arms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlateLayout {
    /// `H3` sits in arm 0 and `H4` in arm 1; `Q1` and `Q2` act on both arms
    /// after them: `U_i = Q2 Q1 H_i`.
    SharedQuarterWave,
    /// Arm 0 passes `H3` then `Q1`, arm 1 passes `H4` then `Q2`.
    PerArm,
}

/// One setting of the four plates with the Pauli pair it should realize.
/// `None` marks a removed plate.
#[derive(Clone, Debug)]
pub struct NoiseRow {
    pub label: String,
    pub h3: Option<WavePlateSetting>,
    pub h4: Option<WavePlateSetting>,
    pub q1: Option<WavePlateSetting>,
    pub q2: Option<WavePlateSetting>,
    pub target: (CMatrix, CMatrix),
    pub weight: f64,
}

#[derive(Clone, Debug)]
pub struct NoiseProgram {
    pub rows: Vec<NoiseRow>,
}

impl NoiseProgram {
    pub fn new(rows: Vec<NoiseRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("noise program has no rows".into()));
        }
        let total: f64 = rows.iter().map(|r| r.weight).sum();
        if rows.iter().any(|r| r.weight < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("row weights sum to {total}")));
        }
        Ok(Self { rows })
    }

    /// The four equally weighted rows realizing `(1,1)`, `(X,X)`, `(Y,−Y)`
    /// and `(Z,Z)`.
    pub fn pauli_mixture() -> Self {
        const ANGLES: [(&str, [f64; 4]); 4] = [
            ("(1,1)", [-45.0, -45.0, 45.0, 45.0]),
            ("(X,X)", [45.0, 45.0, 45.0, -45.0]),
            ("(Y,-Y)", [0.0, 90.0, 45.0, 45.0]),
            ("(Z,Z)", [0.0, 0.0, 45.0, -45.0]),
        ];
        let rows = ANGLES
            .iter()
            .zip(pauli_pairs())
            .map(|(&(label, [h3, h4, q1, q2]), target)| NoiseRow {
                label: label.to_string(),
                h3: Some(WavePlateSetting::half(h3)),
                h4: Some(WavePlateSetting::half(h4)),
                q1: Some(WavePlateSetting::quarter(q1)),
                q2: Some(WavePlateSetting::quarter(q2)),
                target,
                weight: 0.25,
            })
            .collect();
        Self { rows }
    }

    /// A single row with every plate removed.
    pub fn identity() -> Self {
        let id = CMatrix::identity(2);
        Self {
            rows: vec![NoiseRow {
                label: "(1,1)".into(),
                h3: None,
                h4: None,
                q1: None,
                q2: None,
                target: (id.clone(), id),
                weight: 1.0,
            }],
        }
    }

    /// Path channel realized by the plates: Kraus pairs `√w (U0, U1)`.
    pub fn channel(&self, convention: JonesConvention, layout: PlateLayout) -> Result<PathChannel> {
        let pairs = self
            .rows
            .iter()
            .map(|row| {
                let (u0, u1) = row_unitaries(row, convention, layout);
                let s = row.weight.sqrt();
                (u0.scale_real(s), u1.scale_real(s))
            })
            .collect();
        Ok(PathChannel::new(pairs)?.with_metadata("name", "wave_plate_program"))
    }
}

fn plate(s: Option<WavePlateSetting>, convention: JonesConvention) -> CMatrix {
    s.map_or_else(
        || CMatrix::identity(2),
        |s| jones_matrix_with(s, convention),
    )
}

/// Arm unitaries `(U0, U1)` of one row.
pub fn row_unitaries(
    row: &NoiseRow,
    convention: JonesConvention,
    layout: PlateLayout,
) -> (CMatrix, CMatrix) {
    let [h3, h4, q1, q2] = [row.h3, row.h4, row.q1, row.q2].map(|s| plate(s, convention));
    match layout {
        PlateLayout::SharedQuarterWave => {
            let shared = &q2 * &q1;
            (&shared * &h3, &shared * &h4)
        }
        PlateLayout::PerArm => (&q1 * &h3, &q2 * &h4),
    }
}

#[derive(Clone, Debug)]
pub struct RowCheck {
    pub label: String,
    /// Shared global phase `γ` in `U_i ≈ e^{iγ} K_i`.
    pub phase: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug)]
pub struct ProgramCheck {
    pub convention: JonesConvention,
    pub layout: PlateLayout,
    pub rows: Vec<RowCheck>,
    pub max_deviation: f64,
}

/// Best shared phase for `(U0, U1) ≈ e^{iγ}(K0, K1)` and the remaining
/// entrywise deviation.
fn match_pair(u: (&CMatrix, &CMatrix), k: (&CMatrix, &CMatrix)) -> (f64, f64) {
    let overlap = (&k.0.adjoint() * u.0).trace() + (&k.1.adjoint() * u.1).trace();
    let gamma = overlap.arg();
    let phase = C64::from_polar(1.0, gamma);
    let dev0 = u.0.max_abs_diff(&k.0.scale(phase));
    let dev1 = u.1.max_abs_diff(&k.1.scale(phase));
    (gamma, dev0.max(dev1))
}

/// Deviation of every row from its target pair under a fixed convention.
pub fn check_noise_program(
    prog: &NoiseProgram,
    convention: JonesConvention,
    layout: PlateLayout,
) -> ProgramCheck {
    let rows: Vec<RowCheck> = prog
        .rows
        .iter()
        .map(|row| {
            let (u0, u1) = row_unitaries(row, convention, layout);
            let (phase, deviation) = match_pair((&u0, &u1), (&row.target.0, &row.target.1));
            RowCheck {
                label: row.label.clone(),
                phase,
                deviation,
            }
        })
        .collect();
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    ProgramCheck {
        convention,
        layout,
        rows,
        max_deviation,
    }
}

/// Tries the standard convention, then the mirrored one, and returns the
/// first under which every row matches within `tol`.
pub fn verify_noise_program(
    prog: &NoiseProgram,
    layout: PlateLayout,
    tol: f64,
) -> Result<ProgramCheck> {
    let mut diagnostics = Vec::new();
    for convention in [JonesConvention::Standard, JonesConvention::Mirrored] {
        let check = check_noise_program(prog, convention, layout);
        if check.max_deviation <= tol {
            return Ok(check);
        }
        for r in &check.rows {
            diagnostics.push(format!(
                "{convention} {}: deviation {:.3e}",
                r.label, r.deviation
            ));
        }
    }
    Err(Error::Convention(diagnostics.join("; ")))
}
