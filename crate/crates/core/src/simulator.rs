//! Monte Carlo estimation of downlink coverage probability for the ORP
//! scheme variants and the space-time-coded baseline.
//!
//! A trial draws one channel and one N_t x (N*D) precoder (both fresh per
//! trial, fixed across the D slots of that trial), computes the scheme's
//! decision statistic, and counts threshold exceedances. Trials own disjoint
//! RNG substreams, so estimates are reproducible and independent of thread
//! count.

use ndarray::{ArrayView1, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{validate, ComplexScalar, ConfigError, Scheme, SystemConfig};
use crate::randgen::{
    sample_channel, sample_precoder_grouped, substream, ChannelMatrix, PrecoderMatrix,
};

/// Per-beam SINRs for one receive antenna in one slot.
#[derive(Clone, Debug, PartialEq)]
pub struct SinrVector {
    values: Vec<f64>,
}

impl SinrVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Monte Carlo coverage estimate with a normal-approximation 95% interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    /// Fraction of trials whose decision statistic exceeded the threshold.
    pub p_hat: f64,
    /// 1.96 sqrt(p(1-p)/trials).
    pub ci_half_width: f64,
    pub trials: u64,
    pub master_seed: u64,
}

/// Beam powers A_n = |h^T p_n|^2 for one channel row against one precoder
/// group.
pub fn beam_powers(
    channel_row: ArrayView1<'_, ComplexScalar>,
    precoder_group: ArrayView2<'_, ComplexScalar>,
) -> Vec<f64> {
    (0..precoder_group.ncols())
        .map(|n| {
            let mut acc = ComplexScalar::new(0.0, 0.0);
            for (h, p) in channel_row.iter().zip(precoder_group.column(n)) {
                acc += h * p;
            }
            acc.norm_sqr()
        })
        .collect()
}

/// SINR of every beam: SINR_n = A_n / (N/rho + sum_{i != n} A_i), the
/// desired-beam power against noise plus the N-1 interfering beams.
pub fn beam_sinrs(
    channel_row: ArrayView1<'_, ComplexScalar>,
    precoder_group: ArrayView2<'_, ComplexScalar>,
    n_beams: usize,
    rho: f64,
) -> SinrVector {
    debug_assert_eq!(precoder_group.ncols(), n_beams);
    debug_assert!(rho > 0.0);
    let powers = beam_powers(channel_row, precoder_group);
    let noise = n_beams as f64 / rho;
    let total: f64 = powers.iter().sum();
    let values = powers.iter().map(|&a| a / (noise + (total - a))).collect();
    SinrVector { values }
}

/// Maximum SINR over the scheme's index set: beams for ORP-SA, (beam,
/// antenna) for ORP-AS, (beam, slot) for ORP-MPG, and (beam, antenna, slot)
/// for ORP-AS&MPG. Slot d uses precoder group d.
pub fn max_sinr(
    channel: &ChannelMatrix,
    precoder: &PrecoderMatrix,
    config: &SystemConfig,
    scheme: Scheme,
) -> Result<f64, ConfigError> {
    validate(config, scheme)?;
    let (rows, slots) = match scheme {
        Scheme::OrpSa => (1, 1),
        Scheme::OrpAs => (config.n_rx, 1),
        Scheme::OrpMpg => (1, config.n_slots),
        Scheme::OrpAsMpg => (config.n_rx, config.n_slots),
        Scheme::Stc => {
            return Err(ConfigError::SchemeShapeMismatch {
                scheme,
                requirement: "an ORP variant (STC has no per-beam SINR)",
                value: 0,
            })
        }
    };
    assert_eq!(precoder.n_cols(), config.n_beams * config.n_slots);
    let mut best = 0.0f64;
    for d in 0..slots {
        let group = precoder.group(d);
        for r in 0..rows {
            best = best.max(max_sinr_over_group(channel.row(r), group, config.rho));
        }
    }
    Ok(best)
}

/// Allocation-free max-SINR kernel for one (antenna, slot) pair.
fn max_sinr_over_group(
    channel_row: ArrayView1<'_, ComplexScalar>,
    precoder_group: ArrayView2<'_, ComplexScalar>,
    rho: f64,
) -> f64 {
    let n = precoder_group.ncols();
    let noise = n as f64 / rho;
    // max_n A_n/(noise + S - A_n) is attained at max_n A_n because the map
    // is increasing in A_n; only A_max and S are needed.
    let mut total = 0.0f64;
    let mut a_max = 0.0f64;
    for j in 0..n {
        let mut acc = ComplexScalar::new(0.0, 0.0);
        for (h, p) in channel_row.iter().zip(precoder_group.column(j)) {
            acc += h * p;
        }
        let a = acc.norm_sqr();
        total += a;
        a_max = a_max.max(a);
    }
    a_max / (noise + (total - a_max))
}

/// Post-combining SNR of the space-time-coded baseline:
/// (rho / N_t) sum_i |h_i|^2 for a single-antenna receiver.
pub fn stc_snr(channel: &ChannelMatrix, n_tx: usize, rho: f64) -> f64 {
    assert_eq!(channel.n_rx(), 1, "STC baseline is defined for N_r = 1");
    assert_eq!(channel.n_tx(), n_tx);
    let sum: f64 = channel.row(0).iter().map(|z| z.norm_sqr()).sum();
    rho / n_tx as f64 * sum
}

/// (A_max, B_min) bookkeeping of one trial: the largest beam power and the
/// interference sum of the maximizing beam. Used by the density
/// cross-checks.
pub fn sample_max_min_powers(
    n_tx: usize,
    n_beams: usize,
    master_seed: u64,
    trial: u64,
) -> (f64, f64) {
    let channel = sample_channel(1, n_tx, substream(master_seed, 2 * trial));
    let precoder = sample_precoder_grouped(n_tx, n_beams, 1, substream(master_seed, 2 * trial + 1))
        .expect("n_beams <= n_tx");
    let powers = beam_powers(channel.row(0), precoder.group(0));
    let (argmax, &a_max) = powers
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("at least one beam");
    let b_min: f64 = powers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != argmax)
        .map(|(_, &a)| a)
        .sum();
    (a_max, b_min)
}

/// Estimates the coverage probability: the fraction of trials in which the
/// scheme's decision statistic (max SINR for ORP variants, post-combining
/// SNR for STC) exceeds `config.threshold`.
///
/// Trial t draws its channel from substream 2t and its precoder from
/// substream 2t+1 of `master_seed`; the reduction is an integer count, so
/// the result does not depend on execution order or thread count.
pub fn estimate_coverage(
    config: &SystemConfig,
    scheme: Scheme,
    trials: u64,
    master_seed: u64,
) -> Result<CoverageEstimate, ConfigError> {
    validate(config, scheme)?;
    assert!(trials >= 1);
    let successes: u64 = (0..trials)
        .into_par_iter()
        .map(|t| trial_exceeds(config, scheme, master_seed, t) as u64)
        .sum();
    let p_hat = successes as f64 / trials as f64;
    Ok(CoverageEstimate {
        p_hat,
        ci_half_width: 1.96 * (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
        trials,
        master_seed,
    })
}

/// Per-trial decision statistics (max SINR, or post-combining SNR for STC),
/// in trial order. Same substream layout as [`estimate_coverage`], so
/// `sample_statistics(...)[t] > threshold` reproduces trial t's coverage
/// verdict exactly.
pub fn sample_statistics(
    config: &SystemConfig,
    scheme: Scheme,
    trials: u64,
    master_seed: u64,
) -> Result<Vec<f64>, ConfigError> {
    validate(config, scheme)?;
    Ok((0..trials)
        .into_par_iter()
        .map(|t| trial_statistic(config, scheme, master_seed, t))
        .collect())
}

fn trial_exceeds(config: &SystemConfig, scheme: Scheme, master_seed: u64, trial: u64) -> bool {
    trial_statistic(config, scheme, master_seed, trial) > config.threshold
}

fn trial_statistic(config: &SystemConfig, scheme: Scheme, master_seed: u64, trial: u64) -> f64 {
    match scheme {
        Scheme::Stc => {
            let channel = sample_channel(1, config.n_tx, substream(master_seed, 2 * trial));
            stc_snr(&channel, config.n_tx, config.rho)
        }
        _ => {
            let channel =
                sample_channel(config.n_rx, config.n_tx, substream(master_seed, 2 * trial));
            let precoder = sample_precoder_grouped(
                config.n_tx,
                config.n_beams,
                config.n_slots,
                substream(master_seed, 2 * trial + 1),
            )
            .expect("validated: N*D <= N_t");
            max_sinr(&channel, &precoder, config, scheme).expect("validated config")
        }
    }
}
