//! The four subcommands. Each returns its full output as a value so that
//! nothing is written until the computation has succeeded.

use std::fmt::{self, Write as _};
use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::Context;
use spinaddr::drive::{DriveAxis, DriveParams};
use spinaddr::fidelity::{baseline_total_time, monte_carlo_point, McSettings, SweepPoint};
use spinaddr::oracle::{simulate_sequence_exact, verify_swap_plan, SwapMode, SwapVerification};
use spinaddr::sequencer::{bookkeeping_rows, plan_sequence};
use spinaddr::spectrum::{occupancy, sample_config, ArrayConfig};
use spinaddr::swap_synth::{calibrated_alpha_total, quarter_turn_swap_plan, plan_swap, ExchangeLink, SwapPlan};

use crate::config::RunConfig;
use crate::error::CliError;

pub const CSV_HEADER: [&str; 8] = [
    "n_qubits",
    "f_avg_sequence",
    "f_avg_sequence_weighted",
    "f_avg_simple",
    "stderr_sequence",
    "stderr_simple",
    "n_configs",
    "seed",
];

/// Bins of the six-qubit example used for the bookkeeping table.
pub const FIXTURE_BINS: [i64; 6] = [1, 3, 4, 3, 1, 2];

/// Fixed 12-significant-digit decimal rendering.
pub fn fmt12(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (11 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn sweep_points(cfg: &RunConfig, workers: usize) -> Result<Vec<SweepPoint>, CliError> {
    let params = cfg.spectrum()?;
    let settings = McSettings {
        theta: cfg.theta(),
        phi: cfg.phi(),
        ell: cfg.ell,
        f_swap: cfg.f_swap,
        baseline_t_total: Some(baseline_total_time(&params, cfg.theta(), cfg.ell, cfg.j_max_mhz)?),
        workers,
    };
    cfg.n_qubits_list
        .iter()
        .map(|&n| Ok(monte_carlo_point(&params, n, cfg.n_configs, cfg.seed, &settings)?))
        .collect()
}

pub fn sweep_csv(points: &[SweepPoint]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).context("writing CSV header")?;
    for p in points {
        let (fb, sb) = p.baseline.map_or((f64::NAN, f64::NAN), |b| (b.mean, b.standard_error));
        w.write_record([
            p.n_qubits.to_string(),
            fmt12(p.mc_mean.f_avg),
            fmt12(p.paper_weighted.f_avg),
            fmt12(fb),
            fmt12(p.mc_mean.standard_error),
            fmt12(sb),
            p.n_sampled.to_string(),
            p.seed.to_string(),
        ])
        .context("writing CSV row")?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("flushing CSV: {e}"))?;
    Ok(String::from_utf8(bytes).expect("CSV fields are ASCII"))
}

/// Write through a temporary file in the destination directory, so a
/// failure never leaves a truncated file behind.
pub fn write_atomically(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write to {}", path.display()))?;
    tmp.write_all(contents.as_bytes())
        .with_context(|| format!("cannot write to {}", path.display()))?;
    tmp.persist(path)
        .map_err(|e| anyhow::anyhow!("cannot write {}: {}", path.display(), e.error))?;
    Ok(())
}

/// Run the sweep and write the CSV. Returns a one-line-per-N summary for
/// the chosen estimator.
pub fn cmd_sweep(cfg: &RunConfig, out: &Path, workers: usize) -> Result<String, CliError> {
    let estimator = cfg.estimator()?;
    fs::metadata(out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new(".")))
        .with_context(|| format!("output directory for {} does not exist", out.display()))?;
    let points = sweep_points(cfg, workers)?;
    let csv = sweep_csv(&points)?;
    write_atomically(out, &csv)?;
    let mut s = String::new();
    for p in &points {
        let r = p.report(estimator);
        let _ = writeln!(
            s,
            "N = {:>3}  F_avg[{}] = {:.6} ± {:.1e}  ({} excluded)",
            p.n_qubits, estimator, r.f_avg, r.standard_error, r.n_non_addressable
        );
    }
    let _ = writeln!(s, "wrote {}", out.display());
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriveReport {
    pub drive: DriveParams,
    /// `(m, |½Tr U_m|²)` for bin offsets 1..=10.
    pub idle: Vec<(i64, f64)>,
}

pub fn drive_report(cfg: &RunConfig) -> Result<DriveReport, CliError> {
    let drive = DriveParams::optimal(cfg.delta_mhz, cfg.theta(), cfg.ell, DriveAxis::X, 0)?;
    let idle = (1..=10).map(|m| (m, drive.idle_fidelity(m as f64 * cfg.delta_mhz))).collect();
    Ok(DriveReport { drive, idle })
}

impl fmt::Display for DriveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Omega = {} MHz", fmt12(self.drive.rabi))?;
        writeln!(f, "T     = {} us", fmt12(self.drive.duration))?;
        writeln!(f, "m  idle fidelity")?;
        for (m, v) in &self.idle {
            writeln!(f, "{m:<2} {}", fmt12(*v))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwapReport {
    pub link: ExchangeLink,
    /// Composite at the quarter-turn accounting, no phase pads.
    pub quarter_turn: SwapPlan,
    pub calibrated: SwapPlan,
    pub verification: SwapVerification,
}

pub fn swap_report(cfg: &RunConfig) -> Result<SwapReport, CliError> {
    let link = ExchangeLink::new(cfg.j_max_mhz, cfg.delta_ez_mhz, 0.0)?;
    let quarter_turn = quarter_turn_swap_plan(&link)?;
    let calibrated = plan_swap(&link, calibrated_alpha_total())?;
    let verification = verify_swap_plan(&calibrated, &link);
    Ok(SwapReport {
        link,
        quarter_turn,
        calibrated,
        verification,
    })
}

fn write_plan(f: &mut fmt::Formatter<'_>, label: &str, p: &SwapPlan) -> fmt::Result {
    writeln!(f, "[{label}] alpha_total = {}", fmt12(p.alpha_total))?;
    writeln!(f, "  n = {}  phi = {}  chi = {}", p.n_reps, fmt12(p.phi), fmt12(p.chi))?;
    writeln!(
        f,
        "  outer segment = {} us at J = {}, middle segment = {} us at J = 0",
        fmt12(p.outer_duration),
        fmt12(p.exchange),
        fmt12(p.middle_duration)
    )?;
    writeln!(f, "  composite duration = {} us", fmt12(p.composite_duration))?;
    if let Some(pad) = &p.pad {
        writeln!(
            f,
            "  phase pads: {} x {} us at J = {}",
            pad.count,
            fmt12(pad.duration),
            fmt12(pad.exchange)
        )?;
    }
    writeln!(f, "  total duration = {} us", fmt12(p.total_duration))
}

impl fmt::Display for SwapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "J = {} MHz, dEz = {} MHz, gamma = {}",
            fmt12(self.link.j_max),
            fmt12(self.link.delta_ez),
            fmt12(self.quarter_turn.gamma)
        )?;
        write_plan(f, "quarter-turn accounting", &self.quarter_turn)?;
        write_plan(f, "calibrated", &self.calibrated)?;
        writeln!(
            f,
            "SWAP equivalence (exact 4x4, up to local z): 1 - F = {:.3e}",
            1.0 - self.verification.fidelity
        )
    }
}

/// Schedule, timing, exact fidelity and the bookkeeping table for one array.
pub fn cmd_plan(cfg: &RunConfig, target: usize, n_qubits: usize, fixture: bool) -> Result<String, CliError> {
    let params = cfg.spectrum()?;
    let config = if fixture {
        ArrayConfig::from_bins(params, &FIXTURE_BINS)?
    } else {
        sample_config(params, n_qubits, cfg.seed)?
    };
    config.check_site(target)?;
    if !occupancy(&config).is_addressable() {
        return Err(anyhow::anyhow!(
            "seed {} gives a non-addressable array (every qubit in one bin); try another --seed",
            cfg.seed
        )
        .into());
    }
    let plan = plan_sequence(&config, target, cfg.theta(), cfg.phi(), &cfg.sequence_options())?;
    let exact = simulate_sequence_exact(&plan, &config, SwapMode::Ideal);

    let mut s = String::new();
    let bins: Vec<String> = config.bins().iter().map(i64::to_string).collect();
    let _ = writeln!(s, "bins: [{}]", bins.join(", "));
    let _ = writeln!(
        s,
        "target site {} (bin {}), partner site {} (bin {})",
        plan.target_site, plan.target_bin, plan.partner_site, plan.partner_bin
    );
    let _ = write!(s, "{}", plan.schedule());
    let _ = writeln!(s, "total time (quarter-turn swap accounting) = {} us", fmt12(plan.nominal_duration));
    let _ = writeln!(
        s,
        "exact fidelity = {}  (z-frame tracked: {})",
        fmt12(exact.fidelity),
        fmt12(exact.fidelity_z)
    );
    let _ = writeln!(s, "bookkeeping:");
    for (i, row) in bookkeeping_rows(&plan, &config).iter().enumerate() {
        let _ = writeln!(s, "{}  {row}", i + 1);
    }
    Ok(s)
}
