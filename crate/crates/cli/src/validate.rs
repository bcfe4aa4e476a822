//! Three-way cross-validation: closed form vs adaptive quadrature vs Monte
//! Carlo over a (N, T, rho) grid, with the agreement thresholds used by the
//! acceptance checks.

use anyhow::Result;

use orp_coverage::analytic::coverage_sa;
use orp_coverage::config::{Scheme, SystemConfig};
use orp_coverage::oracle::{coverage_by_quadrature, QuadratureSpec};
use orp_coverage::simulator::estimate_coverage;
use orp_coverage::stats::monte_carlo_consistent;

pub struct ValidationReport {
    pub points: usize,
    pub failures: Vec<String>,
    pub worst_quad_rel: (f64, String),
    pub worst_mc_z: (f64, String),
}

pub struct ValidationSettings {
    pub trials: u64,
    pub seed: u64,
    /// Keep only grid thresholds >= this linear value.
    pub t_min: Option<f64>,
    /// Test hook: additive perturbation of the closed-form value.
    pub perturb: f64,
}

pub fn run_validation(settings: &ValidationSettings) -> Result<ValidationReport> {
    let beams = [2usize, 3, 6, 12];
    let thresholds = [0.1, 0.2, 0.5, 0.9, 1.0, 1.585, 6.31];
    let rhos = [0.631, 1.0, 3.981];

    let mut report = ValidationReport {
        points: 0,
        failures: Vec::new(),
        worst_quad_rel: (0.0, String::new()),
        worst_mc_z: (0.0, String::new()),
    };

    for &n in &beams {
        for &thr in &thresholds {
            if settings.t_min.is_some_and(|t_min| thr < t_min) {
                continue;
            }
            for &rho in &rhos {
                let label = format!("N={n} T={thr} rho={rho}");
                let cfg = SystemConfig::new(32, 1, n, 1, rho, thr);
                let closed = coverage_sa(&cfg)? + settings.perturb;
                let quad = coverage_by_quadrature(&cfg, &QuadratureSpec::default_for(n))?;

                let quad_rel = ((closed - quad) / quad).abs();
                let quad_tol = if thr >= 1.0 { 1e-6 } else { 1e-4 };
                if quad_rel > quad_tol {
                    report.failures.push(format!(
                        "{label}: closed {closed:.9e} vs quadrature {quad:.9e} \
                         (rel {quad_rel:.2e} > {quad_tol:.0e})"
                    ));
                }
                if quad_rel > report.worst_quad_rel.0 {
                    report.worst_quad_rel = (quad_rel, label.clone());
                }

                let est = estimate_coverage(&cfg, Scheme::OrpSa, settings.trials, settings.seed)?;
                let successes = (est.p_hat * est.trials as f64).round() as u64;
                let (consistent, z) = monte_carlo_consistent(successes, est.trials, closed);
                if !consistent {
                    report.failures.push(format!(
                        "{label}: closed {closed:.6} vs MC {:.6} ± {:.6}",
                        est.p_hat, est.ci_half_width
                    ));
                }
                if z.is_finite() && z > report.worst_mc_z.0 {
                    report.worst_mc_z = (z, label);
                }
                report.points += 1;
            }
        }
    }
    Ok(report)
}
