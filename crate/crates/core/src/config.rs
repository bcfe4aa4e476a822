//! Scenario parameterization shared by every other module: antenna/beam/slot
//! counts, the linear-scale SNR and SINR threshold, scheme selection, and the
//! validation rules tying them together.
//!
//! Everything downstream computes in linear scale; dB exists only at the CLI
//! boundary via [`db_to_linear`] / [`linear_to_db`].

use serde::{Deserialize, Serialize};

/// Complex scalar used for channel and precoder entries.
pub type ComplexScalar = num_complex::Complex64;

/// Full scenario parameterization.
///
/// `rho` is the average received SNR and `threshold` the SINR coverage
/// threshold, both in linear scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Transmit antennas at the base station.
    pub n_tx: usize,
    /// Receive antennas at the mobile station.
    pub n_rx: usize,
    /// Precoding vectors per transmission slot.
    pub n_beams: usize,
    /// Transmission slots (precoder groups).
    pub n_slots: usize,
    /// Average received SNR, linear scale.
    pub rho: f64,
    /// SINR coverage threshold, linear scale.
    pub threshold: f64,
}

impl SystemConfig {
    /// Convenience constructor; call [`validate`] before heavy use.
    pub fn new(
        n_tx: usize,
        n_rx: usize,
        n_beams: usize,
        n_slots: usize,
        rho: f64,
        threshold: f64,
    ) -> Self {
        Self {
            n_tx,
            n_rx,
            n_beams,
            n_slots,
            rho,
            threshold,
        }
    }
}

/// Transmission/reception scheme whose coverage is analyzed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Random orthonormal precoding, single receive antenna, one slot.
    OrpSa,
    /// Random precoding with best-antenna selection at the receiver.
    OrpAs,
    /// Random precoding with multiple precoder groups over slots.
    OrpMpg,
    /// Antenna selection combined with multiple precoder groups.
    OrpAsMpg,
    /// Space-time coded baseline (post-combining SNR statistic).
    Stc,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::OrpSa,
        Scheme::OrpAs,
        Scheme::OrpMpg,
        Scheme::OrpAsMpg,
        Scheme::Stc,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::OrpSa => "orp-sa",
            Scheme::OrpAs => "orp-as",
            Scheme::OrpMpg => "orp-mpg",
            Scheme::OrpAsMpg => "orp-as-mpg",
            Scheme::Stc => "stc",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "orp-sa" | "orpsa" | "sa" => Ok(Scheme::OrpSa),
            "orp-as" | "orpas" | "as" => Ok(Scheme::OrpAs),
            "orp-mpg" | "orpmpg" | "mpg" => Ok(Scheme::OrpMpg),
            "orp-as-mpg" | "orp-as&mpg" | "orpasmpg" | "as-mpg" => Ok(Scheme::OrpAsMpg),
            "stc" => Ok(Scheme::Stc),
            other => Err(ConfigError::UnknownScheme(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error(
        "beam budget exceeded: N*D = {required} orthonormal vectors requested but N_t = {n_tx}"
    )]
    BeamBudgetExceeded { required: usize, n_tx: usize },
    #[error("parameter {name} must be positive (got {value})")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("scheme {scheme} requires {requirement}, got {value}")]
    SchemeShapeMismatch {
        scheme: Scheme,
        requirement: &'static str,
        value: usize,
    },
    #[error("unknown scheme '{0}'")]
    UnknownScheme(String),
}

/// dB to linear power ratio: 10^(x/10).
pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

/// Linear power ratio to dB: 10 log10(x).
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Checks every [`SystemConfig`] invariant plus the shape constraints the
/// scheme imposes (single-slot schemes need D = 1, single-antenna schemes
/// N_r = 1, and the STC baseline is defined for N_r = 1 only).
pub fn validate(config: &SystemConfig, scheme: Scheme) -> Result<(), ConfigError> {
    for (name, value) in [
        ("N_t", config.n_tx as f64),
        ("N_r", config.n_rx as f64),
        ("N", config.n_beams as f64),
        ("D", config.n_slots as f64),
    ] {
        if value < 1.0 {
            return Err(ConfigError::NonPositiveParameter { name, value });
        }
    }
    for (name, value) in [("rho", config.rho), ("threshold", config.threshold)] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(ConfigError::NonPositiveParameter { name, value });
        }
    }
    let required = config.n_beams * config.n_slots;
    if required > config.n_tx {
        return Err(ConfigError::BeamBudgetExceeded {
            required,
            n_tx: config.n_tx,
        });
    }
    let needs_single_slot = matches!(scheme, Scheme::OrpSa | Scheme::OrpAs);
    if needs_single_slot && config.n_slots != 1 {
        return Err(ConfigError::SchemeShapeMismatch {
            scheme,
            requirement: "D = 1",
            value: config.n_slots,
        });
    }
    let needs_single_rx = matches!(scheme, Scheme::OrpSa | Scheme::OrpMpg | Scheme::Stc);
    if needs_single_rx && config.n_rx != 1 {
        return Err(ConfigError::SchemeShapeMismatch {
            scheme,
            requirement: "N_r = 1",
            value: config.n_rx,
        });
    }
    Ok(())
}
