//! Analytic sequence fidelity and its configuration average.
//!
//! A rotation of bin `t` leaves every other bin `t + j` with an idle error;
//! `F_loc(t) = Π_{j≠0} f_j^{N_{t+j}}` where `f_j` is the single-qubit idle
//! fidelity at detuning `jδ`. The sequence fidelity averages
//! `F_SWAP⁴ F_loc(t)² F_loc(k)²` over target bin `t` and partner bin `k`.
//! Configurations are sampled from the Gaussian spectrum and averaged in
//! parallel with a result that does not depend on the worker count.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::drive::{off_resonant_unitary, DriveAxis, DriveParams};
use crate::error::{Error, Result};
use crate::rng::substream_seed;
use crate::spectrum::{config_log_probability, occupancy, sample_config, ArrayConfig, BinOccupancy, SpectrumParams};
use crate::su2::trace_gate_fidelity;
use crate::swap_synth::{quarter_turn_swap_plan, ExchangeLink};
use crate::Unitary2;

/// How sampled configurations are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    /// Plain mean; sampling already draws from `p(N⃗)`.
    McMean,
    /// Mean weighted again by `p(N⃗)`, normalized over the sample.
    PaperWeighted,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::McMean => "mc_mean",
            Estimator::PaperWeighted => "paper_weighted",
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mc_mean" => Ok(Estimator::McMean),
            "paper_weighted" => Ok(Estimator::PaperWeighted),
            other => Err(Error::invalid(
                "estimator",
                format!("unknown estimator `{other}` (expected mc_mean or paper_weighted)"),
            )),
        }
    }
}

/// Idle fidelities `f_j` for one drive, memoized by bin offset.
#[derive(Debug, Clone)]
pub struct IdleTable {
    drive: DriveParams,
    delta: f64,
    max_offset: i64,
    values: Vec<f64>,
}

impl IdleTable {
    pub fn new(drive: DriveParams, delta: f64, max_offset: i64) -> Self {
        let max_offset = max_offset.max(0);
        let values = (-max_offset..=max_offset)
            .map(|j| drive.idle_fidelity(j as f64 * delta))
            .collect();
        Self {
            drive,
            delta,
            max_offset,
            values,
        }
    }

    pub fn get(&self, offset: i64) -> f64 {
        if offset.abs() <= self.max_offset {
            self.values[(offset + self.max_offset) as usize]
        } else {
            self.drive.idle_fidelity(offset as f64 * self.delta)
        }
    }

    /// `Π_{j≠0} f_j^{N_{t+j}}`.
    pub fn local_fidelity(&self, occ: &BinOccupancy, t: i64) -> f64 {
        occ.iter()
            .filter(|&(b, _)| b != t)
            .map(|(b, c)| self.get(b - t).powi(c as i32))
            .product()
    }
}

/// Fidelity of the idle qubits when bin `t` is driven.
pub fn local_rotation_fidelity(occ: &BinOccupancy, t: i64, drive: &DriveParams, delta: f64) -> f64 {
    let mut memo: HashMap<i64, f64> = HashMap::new();
    occ.iter()
        .filter(|&(b, _)| b != t)
        .map(|(b, c)| {
            let f = *memo
                .entry(b - t)
                .or_insert_with(|| drive.idle_fidelity((b - t) as f64 * delta));
            f.powi(c as i32)
        })
        .product()
}

/// Drives of the x steps (target bin) and y steps (partner bin).
#[derive(Debug, Clone)]
pub struct SequenceModel {
    pub x: IdleTable,
    pub y: IdleTable,
    pub f_swap: f64,
}

impl SequenceModel {
    pub fn new(delta: f64, theta: f64, phi: f64, ell: u32, f_swap: f64, max_offset: i64) -> Result<Self> {
        if !(0.0..=1.0).contains(&f_swap) {
            return Err(Error::invalid("f_swap", format!("must lie in [0, 1], got {f_swap}")));
        }
        let x = DriveParams::optimal(delta, theta, ell, DriveAxis::X, 0)?;
        let y = DriveParams::optimal(delta, phi, ell, DriveAxis::Y, 0)?;
        Ok(Self {
            x: IdleTable::new(x, delta, max_offset),
            y: IdleTable::new(y, delta, max_offset),
            f_swap,
        })
    }

    /// `F_SWAP⁴ F_loc(t)² F_loc(k)²` for one target/partner bin pair.
    pub fn pair_fidelity(&self, occ: &BinOccupancy, t: i64, k: i64) -> f64 {
        let ft = self.x.local_fidelity(occ, t);
        let fk = self.y.local_fidelity(occ, k);
        self.f_swap.powi(4) * ft * ft * fk * fk
    }

    /// Average of [`Self::pair_fidelity`] with weights
    /// `(N_t/N)·(N_k/(N − N_t))`.
    pub fn sequence_fidelity(&self, occ: &BinOccupancy) -> Result<f64> {
        check_addressable(occ)?;
        let n = occ.total() as f64;
        let fx: Vec<(i64, f64, f64)> = occ
            .iter()
            .map(|(b, c)| (b, c as f64, self.x.local_fidelity(occ, b).powi(2)))
            .collect();
        let fy: Vec<f64> = occ.iter().map(|(b, _)| self.y.local_fidelity(occ, b).powi(2)).collect();
        let mut terms = Vec::with_capacity(fx.len() * fx.len());
        for (i, &(_, nt, ft)) in fx.iter().enumerate() {
            for (k, &(_, nk, _)) in fx.iter().enumerate() {
                if k != i {
                    terms.push((nt / n) * (nk / (n - nt)) * ft * fy[k]);
                }
            }
        }
        Ok(self.f_swap.powi(4) * pairwise_sum(&terms))
    }
}

fn check_addressable(occ: &BinOccupancy) -> Result<()> {
    if occ.is_addressable() {
        return Ok(());
    }
    let bin = occ.iter().next().map_or(0, |(b, _)| b);
    Err(Error::NotAddressable { bin })
}

/// Sequence fidelity bound for one occupancy.
pub fn sequence_fidelity(
    occ: &BinOccupancy,
    delta: f64,
    x_drive: &DriveParams,
    y_drive: &DriveParams,
    f_swap: f64,
) -> Result<f64> {
    let span = occ.iter().map(|(b, _)| b).max().unwrap_or(0) - occ.iter().map(|(b, _)| b).min().unwrap_or(0);
    let model = SequenceModel {
        x: IdleTable::new(*x_drive, delta, span),
        y: IdleTable::new(*y_drive, delta, span),
        f_swap,
    };
    model.sequence_fidelity(occ)
}

/// `|½Tr U|²` product over idle qubits for one long resonant pulse of
/// `Ω = (π/2)/t_total`. Each idle qubit is tuned away from the target by
/// the spectrum's tunability; one exactly at the target frequency is pushed
/// up.
pub fn simple_pulse_baseline(config: &ArrayConfig, target_site: usize, t_total: f64) -> Result<f64> {
    config.check_site(target_site)?;
    if !(t_total > 0.0) || !t_total.is_finite() {
        return Err(Error::invalid("t_total", "must be positive and finite"));
    }
    let rabi = std::f64::consts::FRAC_PI_2 / t_total;
    let shift = config.params.tunability;
    let w0 = config.qubits[target_site].raw_larmor;
    let id = Unitary2::identity();
    Ok(config
        .qubits
        .iter()
        .filter(|q| q.site != target_site)
        .map(|q| {
            let off = q.raw_larmor - w0;
            let detuning = if off < 0.0 { off - shift } else { off + shift };
            trace_gate_fidelity(&id, &off_resonant_unitary(rabi, detuning, t_total, DriveAxis::X))
        })
        .product())
}

/// Baseline averaged over every choice of target in the configuration.
pub fn simple_pulse_baseline_mean(config: &ArrayConfig, t_total: f64) -> Result<f64> {
    let vals = (0..config.len())
        .map(|t| simple_pulse_baseline(config, t, t_total))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&vals) / vals.len() as f64)
}

/// `4T + 4T_SWAP` with the closed-form swap duration at the rms gradient
/// `√2σ`. This is the time budget handed to the simple-pulse baseline.
pub fn baseline_total_time(params: &SpectrumParams, theta: f64, ell: u32, j_max: f64) -> Result<f64> {
    let drive = DriveParams::optimal(params.delta, theta, ell, DriveAxis::X, 0)?;
    let link = ExchangeLink::new(j_max, std::f64::consts::SQRT_2 * params.sigma, 0.0)?;
    let t_swap = quarter_turn_swap_plan(&link)?.total_duration;
    Ok(4.0 * drive.duration + 4.0 * t_swap)
}

/// Sum in a fixed binary tree so the result does not depend on how the
/// inputs were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Monte Carlo settings shared by every configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub theta: f64,
    pub phi: f64,
    pub ell: u32,
    pub f_swap: f64,
    /// Time budget for the simple-pulse baseline; `None` skips it.
    pub baseline_t_total: Option<f64>,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            theta: std::f64::consts::FRAC_PI_2,
            phi: std::f64::consts::FRAC_PI_2,
            ell: 4,
            f_swap: 1.0,
            baseline_t_total: None,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityReport {
    /// NaN when no configuration was addressable.
    pub f_avg: f64,
    pub standard_error: f64,
    /// Configurations that entered the average.
    pub n_configs: usize,
    /// Configurations excluded because every qubit shared one bin.
    pub n_non_addressable: usize,
    pub estimator: Estimator,
    pub f_swap: f64,
}

/// Mean and standard error of the simple-pulse baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineSummary {
    pub mean: f64,
    pub standard_error: f64,
}

/// Both estimators and the baseline from one set of samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub n_qubits: usize,
    pub n_sampled: usize,
    pub seed: u64,
    pub mc_mean: FidelityReport,
    pub paper_weighted: FidelityReport,
    pub baseline: Option<BaselineSummary>,
}

impl SweepPoint {
    pub fn report(&self, estimator: Estimator) -> FidelityReport {
        match estimator {
            Estimator::McMean => self.mc_mean,
            Estimator::PaperWeighted => self.paper_weighted,
        }
    }
}

struct Sample {
    f_seq: Option<f64>,
    log_p: f64,
    baseline: Option<f64>,
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(xs) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    let var = pairwise_sum(&dev) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn weighted_mean_and_se(xs: &[f64], log_p: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let max = log_p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_p.iter().map(|l| (l - max).exp()).collect();
    let w_sum = pairwise_sum(&w);
    let wx: Vec<f64> = w.iter().zip(xs).map(|(w, x)| w * x).collect();
    let mean = pairwise_sum(&wx) / w_sum;
    let dev: Vec<f64> = w.iter().zip(xs).map(|(w, x)| (w * (x - mean)).powi(2)).collect();
    (mean, pairwise_sum(&dev).sqrt() / w_sum)
}

/// Sample `n_configs` arrays and evaluate both estimators (and the
/// baseline, when requested) on the same draws.
pub fn monte_carlo_point(
    params: &SpectrumParams,
    n_qubits: usize,
    n_configs: usize,
    seed: u64,
    settings: &McSettings,
) -> Result<SweepPoint> {
    params.validate()?;
    if n_configs == 0 {
        return Err(Error::invalid("n_configs", "must be at least 1"));
    }
    if n_qubits == 0 {
        return Err(Error::invalid("n_qubits", "must be at least 1"));
    }
    let model = SequenceModel::new(
        params.delta,
        settings.theta,
        settings.phi,
        settings.ell,
        settings.f_swap,
        2 * params.bin_range() + 1,
    )?;

    let run = |i: usize| -> Result<Sample> {
        let config = sample_config(*params, n_qubits, substream_seed(seed, i as u64))?;
        let occ = occupancy(&config);
        let f_seq = match model.sequence_fidelity(&occ) {
            Ok(f) => Some(f),
            Err(Error::NotAddressable { .. }) => None,
            Err(e) => return Err(e),
        };
        let baseline = match settings.baseline_t_total {
            Some(t) => Some(simple_pulse_baseline_mean(&config, t)?),
            None => None,
        };
        Ok(Sample {
            f_seq,
            log_p: config_log_probability(&occ, params),
            baseline,
        })
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.workers)
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    let samples = pool.install(|| (0..n_configs).into_par_iter().map(run).collect::<Result<Vec<_>>>())?;

    let mut f = Vec::with_capacity(n_configs);
    let mut lp = Vec::with_capacity(n_configs);
    let mut base = Vec::new();
    for s in &samples {
        if let Some(v) = s.f_seq {
            f.push(v);
            lp.push(s.log_p);
        }
        if let Some(b) = s.baseline {
            base.push(b);
        }
    }
    let excluded = n_configs - f.len();
    let (m, se) = mean_and_se(&f);
    let (wm, wse) = weighted_mean_and_se(&f, &lp);
    let report = |estimator, f_avg, standard_error| FidelityReport {
        f_avg,
        standard_error,
        n_configs: f.len(),
        n_non_addressable: excluded,
        estimator,
        f_swap: settings.f_swap,
    };
    let baseline = (!base.is_empty()).then(|| {
        let (mean, standard_error) = mean_and_se(&base);
        BaselineSummary { mean, standard_error }
    });
    Ok(SweepPoint {
        n_qubits,
        n_sampled: n_configs,
        seed,
        mc_mean: report(Estimator::McMean, m, se),
        paper_weighted: report(Estimator::PaperWeighted, wm, wse),
        baseline,
    })
}

/// Configuration-averaged sequence fidelity under one estimator.
pub fn monte_carlo_average(
    params: &SpectrumParams,
    n_qubits: usize,
    n_configs: usize,
    seed: u64,
    estimator: Estimator,
    settings: &McSettings,
) -> Result<FidelityReport> {
    let settings = McSettings {
        baseline_t_total: None,
        ..*settings
    };
    Ok(monte_carlo_point(params, n_qubits, n_configs, seed, &settings)?.report(estimator))
}
