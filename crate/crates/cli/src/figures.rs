//! Experiment-figure reproduction: each figure id maps to a fixed scenario
//! sweep whose analytic and simulated series are written side by side.

use anyhow::Result;

use orp_coverage::analytic;
use orp_coverage::config::{db_to_linear, Scheme, SystemConfig};
use orp_coverage::simulator::{estimate_coverage, sample_statistics};

use crate::experiment::bail_usage;
use crate::output::SweepResult;

pub const FIGURE_IDS: std::ops::RangeInclusive<u32> = 2..=8;

/// Builds the sweep for one figure id.
pub fn build_figure(id: u32, trials: u64, seed: u64) -> Result<SweepResult> {
    let mut sweep = match id {
        2 => max_sinr_cdf(trials, seed)?,
        3 => beams_sweep(&[0.0, 2.0, 4.0, 8.0], 6.0, trials, seed)?,
        4 => beams_sweep(&[-1.0, -4.0, -7.0, -10.0], -2.0, trials, seed)?,
        5 => antenna_selection_vs_beams(trials, seed)?,
        6 => antenna_selection_vs_antennas(trials, seed)?,
        7 => precoder_groups_vs_stc(trials, seed)?,
        8 => combined_schemes_large_array(trials, seed)?,
        other => return bail_usage(&format!("unknown figure id {other} (expected 2..=8)")),
    };
    sweep.set_meta("figure", id);
    sweep.set_meta("trials", trials);
    sweep.set_meta("master_seed", seed);
    sweep.set_meta(
        "version",
        format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
    );
    Ok(sweep)
}

fn simulated_series(
    configs: impl Iterator<Item = (SystemConfig, Scheme)>,
    trials: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    configs
        .map(|(cfg, scheme)| Ok(estimate_coverage(&cfg, scheme, trials, seed)?.p_hat))
        .collect()
}

/// CDF of the maximum SINR, analytic vs empirical, N in {1,2,6,12}.
fn max_sinr_cdf(trials: u64, seed: u64) -> Result<SweepResult> {
    let n_tx = 32;
    let rho = 1.0; // 0 dB
    let grid: Vec<f64> = (0..=60)
        .map(|i| 10f64.powf(-2.0 + i as f64 / 20.0))
        .collect();
    let mut sweep = SweepResult::new("x", grid.clone());
    for n in [1usize, 2, 6, 12] {
        let analytic: Vec<f64> = grid
            .iter()
            .map(|&x| analytic::cdf_max_sinr(x, n, rho).map_err(anyhow::Error::from))
            .collect::<Result<_>>()?;
        sweep.push_series(format!("analytic-n{n}"), analytic);

        let cfg = SystemConfig::new(n_tx, 1, n, 1, rho, 1.0);
        let mut stats = sample_statistics(&cfg, Scheme::OrpSa, trials, seed)?;
        stats.sort_unstable_by(f64::total_cmp);
        let empirical: Vec<f64> = grid
            .iter()
            .map(|&x| stats.partition_point(|&s| s <= x) as f64 / trials as f64)
            .collect();
        sweep.push_series(format!("simulated-n{n}"), empirical);
    }
    sweep.set_meta("nt", n_tx);
    sweep.set_meta("rho_db", 0.0);
    Ok(sweep)
}

/// Single-antenna coverage versus beam count at several thresholds.
fn beams_sweep(t_dbs: &[f64], rho_db: f64, trials: u64, seed: u64) -> Result<SweepResult> {
    let n_tx = 32;
    let rho = db_to_linear(rho_db);
    let beams: Vec<usize> = (1..=n_tx).collect();
    let mut sweep = SweepResult::new("N", beams.iter().map(|&n| n as f64).collect());
    for &t_db in t_dbs {
        let thr = db_to_linear(t_db);
        let cfg = |n: usize| SystemConfig::new(n_tx, 1, n, 1, rho, thr);
        let analytic: Vec<f64> = beams
            .iter()
            .map(|&n| analytic::coverage_sa(&cfg(n)).map_err(anyhow::Error::from))
            .collect::<Result<_>>()?;
        sweep.push_series(format!("analytic-t{t_db}db"), analytic);
        let simulated =
            simulated_series(beams.iter().map(|&n| (cfg(n), Scheme::OrpSa)), trials, seed)?;
        sweep.push_series(format!("simulated-t{t_db}db"), simulated);
    }
    sweep.set_meta("nt", n_tx);
    sweep.set_meta("rho_db", rho_db);
    Ok(sweep)
}

/// Antenna-selection coverage versus beam count for N_r in {1, 4, 16}.
fn antenna_selection_vs_beams(trials: u64, seed: u64) -> Result<SweepResult> {
    let n_tx = 32;
    let rho = 1.0; // 0 dB
    let beams: Vec<usize> = (1..=8).collect();
    let mut sweep = SweepResult::new("N", beams.iter().map(|&n| n as f64).collect());
    for t_db in [-5.0, 2.0] {
        let thr = db_to_linear(t_db);
        for n_rx in [1usize, 4, 16] {
            let scheme = if n_rx == 1 {
                Scheme::OrpSa
            } else {
                Scheme::OrpAs
            };
            let cfg = |n: usize| SystemConfig::new(n_tx, n_rx, n, 1, rho, thr);
            let analytic: Vec<f64> = beams
                .iter()
                .map(|&n| analytic::coverage(&cfg(n), scheme).map_err(anyhow::Error::from))
                .collect::<Result<_>>()?;
            sweep.push_series(format!("analytic-t{t_db}db-nr{n_rx}"), analytic);
            let simulated =
                simulated_series(beams.iter().map(|&n| (cfg(n), scheme)), trials, seed)?;
            sweep.push_series(format!("simulated-t{t_db}db-nr{n_rx}"), simulated);
        }
    }
    sweep.set_meta("nt", n_tx);
    sweep.set_meta("rho_db", 0.0);
    Ok(sweep)
}

/// Antenna-selection coverage versus receive-antenna count.
fn antenna_selection_vs_antennas(trials: u64, seed: u64) -> Result<SweepResult> {
    let n_tx = 32;
    let antennas: Vec<usize> = (2..=32).collect();
    let mut sweep = SweepResult::new("Nr", antennas.iter().map(|&r| r as f64).collect());
    for (rho_db, t_db) in [(0.0, -5.0), (5.0, 2.0)] {
        let rho = db_to_linear(rho_db);
        let thr = db_to_linear(t_db);
        for n in [1usize, 2, 5] {
            let cfg = |r: usize| SystemConfig::new(n_tx, r, n, 1, rho, thr);
            let analytic: Vec<f64> = antennas
                .iter()
                .map(|&r| analytic::coverage_as(&cfg(r)).map_err(anyhow::Error::from))
                .collect::<Result<_>>()?;
            sweep.push_series(format!("analytic-t{t_db}db-rho{rho_db}db-n{n}"), analytic);
            let simulated = simulated_series(
                antennas.iter().map(|&r| (cfg(r), Scheme::OrpAs)),
                trials,
                seed,
            )?;
            sweep.push_series(format!("simulated-t{t_db}db-rho{rho_db}db-n{n}"), simulated);
        }
    }
    sweep.set_meta("nt", n_tx);
    Ok(sweep)
}

/// Precoder groups versus the space-time-coded baseline over slot count.
fn precoder_groups_vs_stc(trials: u64, seed: u64) -> Result<SweepResult> {
    let n_tx = 64;
    let level = db_to_linear(-2.0); // T = rho = -2 dB
    let slots: Vec<usize> = (1..=16).collect();
    let mut sweep = SweepResult::new("D", slots.iter().map(|&d| d as f64).collect());

    let stc = analytic::coverage_stc(n_tx, level, level)?;
    sweep.push_series("analytic-stc", vec![stc; slots.len()]);
    let stc_sim = simulated_series(
        slots
            .iter()
            .map(|&d| (SystemConfig::new(n_tx, 1, 1, d, level, level), Scheme::Stc)),
        trials,
        seed,
    )?;
    sweep.push_series("simulated-stc", stc_sim);

    for n in [1usize, 2, 3] {
        let cfg = |d: usize| SystemConfig::new(n_tx, 1, n, d, level, level);
        let analytic: Vec<f64> = slots
            .iter()
            .map(|&d| analytic::coverage_mpg(&cfg(d)).map_err(anyhow::Error::from))
            .collect::<Result<_>>()?;
        sweep.push_series(format!("analytic-mpg-n{n}"), analytic);
        let simulated = simulated_series(
            slots.iter().map(|&d| (cfg(d), Scheme::OrpMpg)),
            trials,
            seed,
        )?;
        sweep.push_series(format!("simulated-mpg-n{n}"), simulated);
    }
    sweep.set_meta("nt", n_tx);
    sweep.set_meta("t_db", -2.0);
    sweep.set_meta("rho_db", -2.0);
    Ok(sweep)
}

/// Single-antenna, antenna-selection, and combined schemes on a large array.
fn combined_schemes_large_array(trials: u64, seed: u64) -> Result<SweepResult> {
    let n_tx = 200;
    let rho = 1.0; // 0 dB
    let thr = db_to_linear(-4.0);
    let beams: Vec<usize> = (1..=12).collect();
    let mut sweep = SweepResult::new("N", beams.iter().map(|&n| n as f64).collect());

    let add = |label: String,
               scheme: Scheme,
               n_rx: usize,
               n_slots: usize,
               sweep: &mut SweepResult|
     -> Result<()> {
        let cfg = |n: usize| SystemConfig::new(n_tx, n_rx, n, n_slots, rho, thr);
        let analytic: Vec<f64> = beams
            .iter()
            .map(|&n| analytic::coverage(&cfg(n), scheme).map_err(anyhow::Error::from))
            .collect::<Result<_>>()?;
        sweep.push_series(format!("analytic-{label}"), analytic);
        let simulated = simulated_series(beams.iter().map(|&n| (cfg(n), scheme)), trials, seed)?;
        sweep.push_series(format!("simulated-{label}"), simulated);
        Ok(())
    };

    add("sa".into(), Scheme::OrpSa, 1, 1, &mut sweep)?;
    for n_rx in [4usize, 8] {
        add(format!("as-nr{n_rx}"), Scheme::OrpAs, n_rx, 1, &mut sweep)?;
    }
    for n_rx in [4usize, 8] {
        for d in [4usize, 8, 16] {
            add(
                format!("as-mpg-nr{n_rx}-d{d}"),
                Scheme::OrpAsMpg,
                n_rx,
                d,
                &mut sweep,
            )?;
        }
    }
    sweep.set_meta("nt", n_tx);
    sweep.set_meta("t_db", -4.0);
    sweep.set_meta("rho_db", 0.0);
    Ok(sweep)
}
