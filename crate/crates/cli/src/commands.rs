use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use whichway::bounds::{
    find_record, read_records_file, records_to_csv_string, single_preparation_certificate,
    swap_certificate, theory_records, BoundCertificate, FilterPair, FractionalVisibilityRecord,
    PreparationPair, RECTILINEAR,
};
use whichway::channels::{file, PathChannel};
use whichway::duality::{channel_distinguishability, generalized_visibility, verify_inequality};
use whichway::interferometer::{
    default_phases, fit_fringes, simulate_experiment, simulate_fringes, FringeSettings,
};
use whichway::linalg::C64;
use whichway::{Error, Result};

use crate::spec;
use crate::Failure;

type Outcome = std::result::Result<(), Failure>;

/// Shared knobs of the stochastic subcommands.
pub struct Sampling {
    pub seed: Option<u64>,
    pub shots: u64,
    pub contrast: f64,
}

impl Sampling {
    fn settings(&self) -> Result<FringeSettings> {
        let seed = self
            .seed
            .ok_or_else(|| Error::InvalidInput("--seed is required for simulation".into()))?;
        Ok(FringeSettings::new(self.shots, self.contrast, seed))
    }
}

/// Four decimals, without a sign on values that round to zero.
pub fn fixed(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn complex(v: C64) -> String {
    if v.im.abs() < 5e-5 {
        fixed(v.re)
    } else {
        format!(
            "{}{}{}i",
            fixed(v.re),
            if v.im < 0.0 { "-" } else { "+" },
            fixed(v.im.abs())
        )
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn setup(
    channel: &str,
    d: Option<usize>,
    prep: &str,
) -> Result<(PathChannel, whichway::channels::Preparation)> {
    let ch = spec::channel(channel, d)?;
    let prep = spec::preparation(prep, ch.spin_dim())?;
    Ok((ch, prep))
}

pub fn vg(channel: &str, d: Option<usize>, prep: &str) -> Outcome {
    let (ch, prep) = setup(channel, d, prep)?;
    println!("V_G = {}", fixed(generalized_visibility(&ch, &prep)?));
    Ok(())
}

pub fn distinguishability(channel: &str, d: Option<usize>, prep: &str) -> Outcome {
    let (ch, prep) = setup(channel, d, prep)?;
    println!("D = {}", fixed(channel_distinguishability(&ch, &prep)?));
    Ok(())
}

pub fn verify(channel: &str, d: Option<usize>, prep: &str, tol: f64) -> Outcome {
    let (ch, prep) = setup(channel, d, prep)?;
    let report = verify_inequality(&ch, &prep)?;
    println!("D = {}", fixed(report.distinguishability));
    println!("V_G = {}", fixed(report.generalized_visibility));
    println!(
        "D bound from V_G = {}",
        fixed(report.distinguishability_bound())
    );
    println!("slack = {}", fixed(report.slack));
    if report.slack < -tol {
        return Err(Failure::Violation(format!(
            "D² + V_G² exceeds 1 by {:.3e} (tolerance {tol:e})",
            -report.slack
        )));
    }
    println!("D² + V_G² ≤ 1 holds");
    Ok(())
}

pub fn fracvis(
    channel: &str,
    d: Option<usize>,
    prep: &str,
    filters: &str,
    out: Option<&Path>,
) -> Outcome {
    let ch = spec::channel(channel, d)?;
    let preps = spec::preparation_pairs(prep, ch.spin_dim())?;
    let filters = spec::filter_pairs(filters, ch.spin_dim())?;
    let records = theory_records(&ch, &preps, &filters)?;
    emit(&records_to_csv_string(&records), out)?;
    Ok(())
}

pub fn table(channel: &str, d: Option<usize>, out: Option<&Path>) -> Outcome {
    let ch = spec::channel(channel, d)?;
    let preps = spec::preparation_pairs("rectilinear", ch.spin_dim())?;
    let filters = spec::filter_pairs("rectilinear", ch.spin_dim())?;
    let records = theory_records(&ch, &preps, &filters)?;
    let grid = |title: &str, cell: &dyn Fn(&FractionalVisibilityRecord) -> String| {
        let mut s = format!("{title}\nmu\\nu");
        for nu in RECTILINEAR {
            write!(s, " {nu:>8}").unwrap();
        }
        s.push('\n');
        for mu in RECTILINEAR {
            write!(s, "{mu:<5}").unwrap();
            for nu in RECTILINEAR {
                let r = find_record(&records, mu, nu).expect("every rectilinear cell computed");
                write!(s, " {:>8}", cell(r)).unwrap();
            }
            s.push('\n');
        }
        s
    };
    print!("{}", grid("fractional visibility V", &|r| complex(r.v)));
    println!();
    print!("{}", grid("filtering probability p", &|r| fixed(r.p)));
    if let Some(path) = out {
        fs::write(path, records_to_csv_string(&records)).map_err(Error::from)?;
    }
    Ok(())
}

fn single_pair<T: Clone>(items: Vec<T>, what: &str) -> Result<T> {
    match items.as_slice() {
        [one] => Ok(one.clone()),
        _ => Err(Error::InvalidInput(format!(
            "expected exactly one {what}, got {}",
            items.len()
        ))),
    }
}

pub fn simulate(
    channel: &str,
    d: Option<usize>,
    prep: &str,
    filters: &str,
    sampling: Sampling,
    out: Option<&Path>,
) -> Outcome {
    let ch = spec::channel(channel, d)?;
    let prep = single_pair(spec::preparation_pairs(prep, ch.spin_dim())?, "preparation")?;
    let filter = single_pair(spec::filter_pairs(filters, ch.spin_dim())?, "filter")?;
    let ds = simulate_fringes(&ch, &prep, &filter, &sampling.settings()?)?;
    let fit = fit_fringes(&ds)?;
    emit(&ds.to_csv_string(), out)?;
    let summary = format!(
        "mu={} nu={} p = {} +/- {}, V = {}, |V| = {} +/- {}",
        prep.label,
        filter.label,
        fixed(fit.p_hat),
        fixed(fit.sigma_p),
        complex(fit.v_hat),
        fixed(fit.v_hat.norm()),
        fixed(fit.sigma_v)
    );
    // keep stdout clean when it carries the CSV
    if out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn bounds_text(cert: &BoundCertificate) -> String {
    format!(
        "  V_G >= {} +/- {}\n  D   <= {} +/- {}\n",
        fixed(cert.vg_lower),
        fixed(cert.sigma_vg),
        fixed(cert.d_upper),
        fixed(cert.sigma_d)
    )
}

/// Best single-preparation certificate for row `mu` over the rectilinear
/// orthonormal filter bases present in `records`.
fn best_single_row(
    mu: &str,
    records: &[FractionalVisibilityRecord],
    tol: f64,
) -> Result<Option<(Vec<FilterPair>, BoundCertificate)>> {
    let prep = PreparationPair::polarization(mu)?;
    let mut best: Option<(Vec<FilterPair>, BoundCertificate)> = None;
    for basis in [["hh", "vv"], ["hv", "vh"]] {
        if basis.iter().any(|nu| find_record(records, mu, nu).is_err()) {
            continue;
        }
        let filters = basis
            .iter()
            .map(|nu| FilterPair::polarization(nu))
            .collect::<Result<Vec<_>>>()?;
        let cert = single_preparation_certificate(&prep, &filters, records, tol)?;
        if best
            .as_ref()
            .is_none_or(|(_, b)| cert.vg_lower > b.vg_lower)
        {
            best = Some((filters, cert));
        }
    }
    Ok(best)
}

pub fn reproduce(
    channel: &str,
    sampling: Sampling,
    from_csv: Option<&Path>,
    out: Option<&Path>,
    tol: f64,
) -> Outcome {
    let mut report = String::new();
    let mut fringes = Vec::new();
    let records = match from_csv {
        Some(path) => {
            writeln!(report, "source: records from {}", path.display()).unwrap();
            read_records_file(path)?
        }
        None => {
            let settings = sampling.settings()?;
            let ch = spec::channel(channel, Some(2))?;
            writeln!(
                report,
                "source: simulation of channel {channel} (seed {}, contrast {}, {} shots/phase, {} phases)",
                settings.seed,
                fixed(settings.contrast),
                settings.shots_per_phase,
                default_phases().len()
            )
            .unwrap();
            let preps = spec::preparation_pairs("rectilinear", 2)?;
            let filters = spec::filter_pairs("rectilinear", 2)?;
            let cells = simulate_experiment(&ch, &preps, &filters, &settings)?;
            let records = cells.iter().map(|c| c.record()).collect();
            fringes = cells
                .into_iter()
                .map(|c| (format!("{}_{}.csv", c.mu, c.nu), c.dataset.to_csv_string()))
                .collect();
            records
        }
    };
    writeln!(report, "\nmu   nu   p        |V|      sigma_V").unwrap();
    for r in &records {
        writeln!(
            report,
            "{:<4} {:<4} {} {:>8} {:>8}",
            r.mu,
            r.nu,
            fixed(r.p),
            fixed(r.v.norm()),
            fixed(r.sigma_v)
        )
        .unwrap();
    }
    let swap = swap_certificate(&records, tol)?;
    writeln!(report, "\nswap estimate, mixed preparation:").unwrap();
    report.push_str(&bounds_text(&swap));
    let mut certificates = format!("swap estimate\n{}", swap.report());
    for mu in RECTILINEAR {
        if let Some((filters, cert)) = best_single_row(mu, &records, tol)? {
            let labels: Vec<&str> = filters.iter().map(|f| f.label.as_str()).collect();
            writeln!(
                report,
                "\nsingle preparation {mu}, filters {}:",
                labels.join(",")
            )
            .unwrap();
            report.push_str(&bounds_text(&cert));
            write!(certificates, "\nsingle preparation {mu}\n{}", cert.report()).unwrap();
        }
    }
    print!("{report}");
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(Error::from)?;
        fs::write(dir.join("records.csv"), records_to_csv_string(&records)).map_err(Error::from)?;
        fs::write(dir.join("certificate.txt"), certificates).map_err(Error::from)?;
        if !fringes.is_empty() {
            let fdir = dir.join("fringes");
            fs::create_dir_all(&fdir).map_err(Error::from)?;
            for (name, csv) in &fringes {
                fs::write(fdir.join(name), csv).map_err(Error::from)?;
            }
        }
    }
    Ok(())
}

pub fn export_channel(channel: &str, d: Option<usize>, out: Option<&Path>) -> Outcome {
    let ch = spec::channel(channel, d)?;
    emit(&file::to_string(&ch), out)?;
    Ok(())
}
