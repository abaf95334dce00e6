//! Larmor-frequency disorder, frequency binning and configuration
//! probabilities.
//!
//! Raw qubit frequencies are drawn from `Normal(ω₀, σ²)`. Each qubit is
//! tuned to the center of its bin, `ω₀ + j·δ`, which needs at most δ/2 of
//! electrical tunability. A configuration is summarized by its occupancy
//! vector `N⃗ = (…, N_{-1}, N_0, N_1, …)`, whose probability is multinomial
//! in the per-bin Gaussian masses.

use std::collections::BTreeMap;

use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::rng::Stream;

/// Frequency distribution and binning parameters (rad/µs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumParams {
    pub omega0: f64,
    pub sigma: f64,
    pub delta: f64,
    pub tunability: f64,
}

impl Default for SpectrumParams {
    /// δ = 10, σ = 60, ±5 of tunability, frequencies measured from ω₀ = 0.
    fn default() -> Self {
        Self {
            omega0: 0.0,
            sigma: 60.0,
            delta: 10.0,
            tunability: 5.0,
        }
    }
}

impl SpectrumParams {
    pub fn new(omega0: f64, sigma: f64, delta: f64, tunability: f64) -> Result<Self> {
        let p = Self {
            omega0,
            sigma,
            delta,
            tunability,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with the minimal tunability δ/2.
    pub fn with_bin_width(sigma: f64, delta: f64) -> Result<Self> {
        Self::new(0.0, sigma, delta, delta / 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::invalid("delta", format!("must be positive, got {}", self.delta)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid("sigma", format!("must be positive, got {}", self.sigma)));
        }
        if !self.omega0.is_finite() {
            return Err(Error::invalid("omega0", "must be finite"));
        }
        if !(self.tunability >= self.delta / 2.0) {
            return Err(Error::invalid(
                "tunability",
                format!("{} is below δ/2 = {}", self.tunability, self.delta / 2.0),
            ));
        }
        Ok(())
    }

    /// Truncation half-width for sums over bins: `ceil(8σ/δ)`.
    pub fn bin_range(&self) -> i64 {
        (8.0 * self.sigma / self.delta).ceil() as i64
    }

    pub fn bin_of(&self, raw: f64) -> i64 {
        // f64::round is half-away-from-zero.
        ((raw - self.omega0) / self.delta).round() as i64
    }

    pub fn bin_center(&self, bin: i64) -> f64 {
        self.omega0 + bin as f64 * self.delta
    }
}

/// One site of the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSpec {
    pub site: usize,
    pub raw_larmor: f64,
    pub bin: i64,
    pub tuned_larmor: f64,
}

/// A linear chain of qubits, in site order.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayConfig {
    pub params: SpectrumParams,
    pub qubits: Vec<QubitSpec>,
}

impl ArrayConfig {
    /// Bin and tune a list of raw frequencies.
    pub fn from_raw(params: SpectrumParams, raw: &[f64]) -> Result<Self> {
        params.validate()?;
        let qubits = raw
            .iter()
            .enumerate()
            .map(|(site, &raw_larmor)| {
                let bin = params.bin_of(raw_larmor);
                QubitSpec {
                    site,
                    raw_larmor,
                    bin,
                    tuned_larmor: params.bin_center(bin),
                }
            })
            .collect();
        Ok(Self { params, qubits })
    }

    /// Chain whose raw frequencies already sit on the given bin centers.
    pub fn from_bins(params: SpectrumParams, bins: &[i64]) -> Result<Self> {
        let raw: Vec<f64> = bins.iter().map(|&b| params.bin_center(b)).collect();
        Self::from_raw(params, &raw)
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn bins(&self) -> Vec<i64> {
        self.qubits.iter().map(|q| q.bin).collect()
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site < self.len() {
            Ok(())
        } else {
            Err(Error::SiteOutOfRange { site, n: self.len() })
        }
    }
}

/// Draw `n_qubits` raw frequencies from `Normal(ω₀, σ²)` and bin them.
pub fn sample_config(params: SpectrumParams, n_qubits: usize, seed: u64) -> Result<ArrayConfig> {
    if n_qubits == 0 {
        return Err(Error::invalid("n_qubits", "must be at least 1"));
    }
    params.validate()?;
    let mut stream = Stream::new(seed);
    let raw: Vec<f64> = (0..n_qubits)
        .map(|_| params.omega0 + params.sigma * stream.standard_normal())
        .collect();
    ArrayConfig::from_raw(params, &raw)
}

/// Per-bin qubit counts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BinOccupancy {
    counts: BTreeMap<i64, usize>,
    total: usize,
}

impl BinOccupancy {
    /// Build from `(bin, count)` pairs; zero counts are dropped and repeated
    /// bins accumulate.
    pub fn from_counts<I: IntoIterator<Item = (i64, i64)>>(pairs: I) -> Result<Self> {
        let mut counts = BTreeMap::new();
        let mut total = 0usize;
        for (bin, count) in pairs {
            if count < 0 {
                return Err(Error::NegativeCount { bin, count });
            }
            if count > 0 {
                *counts.entry(bin).or_insert(0) += count as usize;
                total += count as usize;
            }
        }
        Ok(Self { counts, total })
    }

    pub fn count(&self, bin: i64) -> usize {
        self.counts.get(&bin).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Occupied bins with their counts, in increasing bin order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, usize)> + '_ {
        self.counts.iter().map(|(&b, &c)| (b, c))
    }

    pub fn occupied_bins(&self) -> usize {
        self.counts.len()
    }

    /// At least two bins are occupied.
    pub fn is_addressable(&self) -> bool {
        self.counts.len() >= 2
    }
}

pub fn occupancy(config: &ArrayConfig) -> BinOccupancy {
    let mut counts = BTreeMap::new();
    for q in &config.qubits {
        *counts.entry(q.bin).or_insert(0) += 1;
    }
    BinOccupancy {
        counts,
        total: config.len(),
    }
}

/// Gaussian mass of bin `j`: `P(ω₀ + (j-½)δ ≤ ω < ω₀ + (j+½)δ)`.
pub fn bin_probability(params: &SpectrumParams, j: i64) -> f64 {
    // Evaluate on the upper side with erfc differences to keep tail bins
    // accurate; p_j = p_{-j}.
    let j = j.unsigned_abs() as f64;
    let scale = params.sigma * std::f64::consts::SQRT_2;
    let lo = (j - 0.5) * params.delta / scale;
    let hi = (j + 0.5) * params.delta / scale;
    (0.5 * (erfc(lo) - erfc(hi))).clamp(0.0, 1.0)
}

/// Natural log of the multinomial probability of an occupancy vector.
pub fn config_log_probability(occ: &BinOccupancy, params: &SpectrumParams) -> f64 {
    let n = occ.total() as f64;
    let mut log_p = ln_gamma(n + 1.0);
    for (bin, count) in occ.iter() {
        let c = count as f64;
        log_p += c * bin_probability(params, bin).ln() - ln_gamma(c + 1.0);
    }
    log_p
}
