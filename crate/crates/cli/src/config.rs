//! Run configuration: a flat JSON object, every key optional.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spinaddr::fidelity::Estimator;
use spinaddr::sequencer::SequenceOptions;
use spinaddr::spectrum::SpectrumParams;

use crate::error::CliError;

/// Frequencies are labelled MHz and used directly as rad/µs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub delta_mhz: f64,
    pub sigma_mhz: f64,
    pub ell: u32,
    pub theta_over_pi: f64,
    pub phi_over_pi: f64,
    pub n_qubits_list: Vec<usize>,
    pub n_configs: usize,
    pub seed: u64,
    pub f_swap: f64,
    pub estimator: String,
    pub j_max_mhz: f64,
    pub delta_ez_mhz: f64,
    pub output_path: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            delta_mhz: 10.0,
            sigma_mhz: 60.0,
            ell: 4,
            theta_over_pi: 0.5,
            phi_over_pi: 0.5,
            n_qubits_list: vec![2, 5, 10, 15, 20, 25, 30, 40, 50],
            n_configs: 10_000,
            seed: 2024,
            f_swap: 1.0,
            estimator: Estimator::McMean.name().to_string(),
            j_max_mhz: 50.0,
            delta_ez_mhz: 85.0,
            output_path: "sweep.csv".to_string(),
        }
    }
}

fn bad(field: &'static str, reason: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn positive(field: &'static str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(field, format!("must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    /// Read a config file; missing keys take their defaults.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::ConfigFile {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let msg = inner.to_string();
            // Unknown keys are reported at the root; name them instead.
            let field = match msg.strip_prefix("unknown field `") {
                Some(rest) => rest.split('`').next().unwrap_or("<root>").to_string(),
                None if path == "." => "<root>".to_string(),
                None => path,
            };
            CliError::Config { field, reason: msg }
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        positive("delta_mhz", self.delta_mhz)?;
        positive("sigma_mhz", self.sigma_mhz)?;
        positive("j_max_mhz", self.j_max_mhz)?;
        if self.ell == 0 {
            return Err(bad("ell", "must be at least 1"));
        }
        for (field, v) in [("theta_over_pi", self.theta_over_pi), ("phi_over_pi", self.phi_over_pi)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(bad(field, format!("must be non-negative and finite, got {v}")));
            }
        }
        if !self.delta_ez_mhz.is_finite() {
            return Err(bad("delta_ez_mhz", "must be finite"));
        }
        if self.n_qubits_list.is_empty() {
            return Err(bad("n_qubits_list", "must not be empty"));
        }
        if let Some(n) = self.n_qubits_list.iter().find(|&&n| n < 2) {
            return Err(bad("n_qubits_list", format!("every entry must be at least 2, got {n}")));
        }
        if self.n_configs == 0 {
            return Err(bad("n_configs", "must be at least 1"));
        }
        if !(self.f_swap > 0.0 && self.f_swap <= 1.0) {
            return Err(bad("f_swap", format!("must lie in (0, 1], got {}", self.f_swap)));
        }
        self.estimator()?;
        if self.output_path.is_empty() {
            return Err(bad("output_path", "must not be empty"));
        }
        Ok(())
    }

    pub fn estimator(&self) -> Result<Estimator, CliError> {
        self.estimator.parse().map_err(|_| {
            bad(
                "estimator",
                format!("expected `mc_mean` or `paper_weighted`, got `{}`", self.estimator),
            )
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta_over_pi * std::f64::consts::PI
    }

    pub fn phi(&self) -> f64 {
        self.phi_over_pi * std::f64::consts::PI
    }

    /// Tunability is the minimal δ/2, frequencies measured from ω₀.
    pub fn spectrum(&self) -> Result<SpectrumParams, CliError> {
        SpectrumParams::with_bin_width(self.sigma_mhz, self.delta_mhz).map_err(|e| bad("sigma_mhz", e.to_string()))
    }

    pub fn sequence_options(&self) -> SequenceOptions {
        SequenceOptions {
            j_max: self.j_max_mhz,
            ..SequenceOptions::with_ell(self.ell)
        }
    }

    pub fn output(&self) -> PathBuf {
        PathBuf::from(&self.output_path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!(RunConfig::from_json("{}").unwrap(), c);
        assert_eq!(c.spectrum().unwrap(), SpectrumParams::default());
    }

    #[test]
    fn errors_name_the_field() {
        let field = |json: &str| match RunConfig::from_json(json).and_then(|c| c.validate()) {
            Err(CliError::Config { field, .. }) => field,
            other => panic!("{other:?}"),
        };
        assert_eq!(field(r#"{"delta_mhz": -1}"#), "delta_mhz");
        assert_eq!(field(r#"{"ell": "four"}"#), "ell");
        assert_eq!(field(r#"{"estimator": "median"}"#), "estimator");
        assert_eq!(field(r#"{"n_qubits_list": [3, 1]}"#), "n_qubits_list");
        assert_eq!(field(r#"{"f_swap": 1.5}"#), "f_swap");
        assert_eq!(field(r#"{"bogus": 1}"#), "bogus");
        assert_eq!(field("42"), "<root>");
    }

    #[test]
    fn partial_files_keep_defaults() {
        let c = RunConfig::from_json(r#"{"seed": 7, "n_qubits_list": [4]}"#).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.n_qubits_list, vec![4]);
        assert_eq!(c.ell, 4);
    }
}
