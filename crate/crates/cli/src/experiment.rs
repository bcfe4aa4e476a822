//! Experiment parameterization: a human-editable TOML document plus CLI
//! overrides, resolved into a validated scenario.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use orp_coverage::config::{db_to_linear, Scheme, SystemConfig};

/// One experiment record. Every field is optional so that a config file and
/// command-line flags can each fill in part of the picture; flags win.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub scheme: Option<Scheme>,
    pub n_tx: Option<usize>,
    pub n_rx: Option<usize>,
    pub n_beams: Option<usize>,
    pub n_slots: Option<usize>,
    /// SINR threshold in dB (exclusive with `t`).
    pub t_db: Option<f64>,
    /// SINR threshold, linear scale.
    pub t: Option<f64>,
    /// Average SNR in dB (exclusive with `rho`).
    pub rho_db: Option<f64>,
    /// Average SNR, linear scale.
    pub rho: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl ExperimentConfig {
    pub fn from_toml_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Overlays `other` (typically CLI flags) on top of `self`.
    pub fn merged_with(mut self, other: &ExperimentConfig) -> Self {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if other.$field.is_some() { self.$field = other.$field.clone(); })*
            };
        }
        take!(
            scheme, n_tx, n_rx, n_beams, n_slots, t_db, t, rho_db, rho, trials, seed, out, format
        );
        self
    }

    /// Threshold in linear scale; errors if both or neither form is present.
    pub fn threshold(&self) -> Result<f64> {
        resolve_scale("T", self.t, self.t_db)
    }

    /// SNR in linear scale; errors if both or neither form is present.
    pub fn snr(&self) -> Result<f64> {
        resolve_scale("rho", self.rho, self.rho_db)
    }

    pub fn scheme(&self) -> Result<Scheme> {
        self.scheme
            .ok_or_else(|| usage_error("--scheme is required"))
    }

    pub fn trials(&self) -> u64 {
        self.trials.unwrap_or(1_000_000)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(42)
    }

    pub fn format(&self) -> OutputFormat {
        self.format.unwrap_or(OutputFormat::Csv)
    }

    /// Builds the scenario. Defaults: N_r = 1, D = 1; for ORP schemes an
    /// omitted N_t falls back to N*D (the coverage statistics do not depend
    /// on the array size beyond the beam budget). STC needs the real array
    /// size, so there N_t is mandatory.
    pub fn system(&self) -> Result<SystemConfig> {
        let scheme = self.scheme()?;
        let n_beams = match (scheme, self.n_beams) {
            // The space-time baseline ignores beams.
            (Scheme::Stc, n) => n.unwrap_or(1),
            (_, Some(n)) => n,
            (_, None) => return Err(usage_error("--N (precoding vectors) is required")),
        };
        let n_slots = self.n_slots.unwrap_or(1);
        let n_tx = match (scheme, self.n_tx) {
            (_, Some(n_tx)) => n_tx,
            (Scheme::Stc, None) => {
                return Err(usage_error("--Nt (transmit antennas) is required for stc"))
            }
            (_, None) => n_beams * n_slots,
        };
        Ok(SystemConfig {
            n_tx,
            n_rx: self.n_rx.unwrap_or(1),
            n_beams,
            n_slots,
            rho: self.snr()?,
            threshold: self.threshold()?,
        })
    }
}

fn resolve_scale(name: &str, linear: Option<f64>, db: Option<f64>) -> Result<f64> {
    match (linear, db) {
        (Some(_), Some(_)) => Err(usage_error(&format!(
            "--{name} and --{name}-db are mutually exclusive"
        ))),
        (Some(v), None) => Ok(v),
        (None, Some(v)) => Ok(db_to_linear(v)),
        (None, None) => Err(usage_error(&format!(
            "one of --{name} or --{name}-db is required"
        ))),
    }
}

/// Marker for problems that are command-line usage errors (exit code 2)
/// rather than validation failures (exit code 1).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub fn usage_error(msg: &str) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.to_string()))
}

pub fn bail_usage<T>(msg: &str) -> Result<T> {
    bail!(UsageError(msg.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_is_lossless() {
        let cfg = ExperimentConfig {
            scheme: Some(Scheme::OrpAsMpg),
            n_tx: Some(200),
            n_rx: Some(8),
            n_beams: Some(4),
            n_slots: Some(16),
            t_db: Some(-4.0),
            rho_db: Some(0.0),
            trials: Some(250_000),
            seed: Some(7),
            out: Some(PathBuf::from("out.csv")),
            format: Some(OutputFormat::Json),
            ..Default::default()
        };
        let text = toml::to_string(&cfg).unwrap();
        let back: ExperimentConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn flags_override_file_values() {
        let file = ExperimentConfig {
            scheme: Some(Scheme::OrpSa),
            n_tx: Some(32),
            t_db: Some(0.0),
            rho_db: Some(0.0),
            ..Default::default()
        };
        let flags = ExperimentConfig {
            t_db: Some(-5.0),
            ..Default::default()
        };
        let merged = file.merged_with(&flags);
        assert_eq!(merged.t_db, Some(-5.0));
        assert_eq!(merged.n_tx, Some(32));
    }

    #[test]
    fn scale_flags_are_exclusive_and_required() {
        let both = ExperimentConfig {
            t: Some(1.0),
            t_db: Some(0.0),
            ..Default::default()
        };
        assert!(both.threshold().is_err());
        let neither = ExperimentConfig::default();
        assert!(neither.threshold().is_err());
        let db_only = ExperimentConfig {
            t_db: Some(-10.0),
            ..Default::default()
        };
        assert!((db_only.threshold().unwrap() - 0.1).abs() < 1e-12);
    }
}
