//! Independent verification engine for the closed-form coverage results.
//!
//! Evaluates the joint density of (A_max, B_min) — the strongest beam's
//! power and the interference power seen by that beam — directly from its
//! piecewise polynomial-times-exponential form, and integrates it over the
//! coverage region with an adaptive Gauss-Kronrod scheme whose subdivision
//! boundaries sit exactly on the density's sector rays a = b/k and on the
//! coverage-line breakpoints.

use crate::config::SystemConfig;
use crate::numeric::{binomial, factorial, integrate_segmented, CompensatedSum};

/// Sector of the (a, b) plane: k = 1 is a >= b, sector k >= 2 is
/// b/k <= a <= b/(k-1). Points with b > (N-1) a carry zero density.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Sector(usize),
    Infeasible,
}

/// Classifies a point of the positive quadrant.
pub fn region_of(a: f64, b: f64, n_beams: usize) -> Region {
    debug_assert!(a > 0.0 && b >= 0.0 && n_beams >= 2);
    if b > (n_beams - 1) as f64 * a {
        return Region::Infeasible;
    }
    if a >= b {
        return Region::Sector(1);
    }
    let k = (b / a).ceil() as usize;
    Region::Sector(k.min(n_beams - 1))
}

/// Joint density of (A_max, B_min) for N >= 2 beams:
/// (N/(N-2)!) e^{-(a+b)} sum_{t=1}^{k} C(N-1,t-1) (-1)^{t+1} [b-(t-1)a]^{N-2}
/// on sector k, zero outside the feasible wedge.
pub fn joint_pdf(a: f64, b: f64, n_beams: usize) -> f64 {
    assert!(n_beams >= 2);
    let k = match region_of(a, b, n_beams) {
        Region::Infeasible => return 0.0,
        Region::Sector(k) => k,
    };
    let n = n_beams;
    let mut sum = CompensatedSum::new();
    for t in 1..=k {
        let sign = if t % 2 == 1 { 1.0 } else { -1.0 };
        let base = b - (t - 1) as f64 * a;
        sum.add(sign * binomial(n - 1, t - 1) * base.powi(n as i32 - 2));
    }
    let scale = n as f64 / factorial(n - 2);
    scale * (-(a + b)).exp() * sum.value()
}

/// Piecewise factor h_N(a/s) of the conditional sum-power density:
/// N(N-1) sum_{t=1}^{k} C(N-1,t-1) (-1)^{t+1} (1 - t r)^{N-2} on the band
/// 1/(k+1) <= r <= 1/k, zero for r < 1/N.
pub fn h_factor(ratio: f64, n_beams: usize) -> f64 {
    assert!(ratio > 0.0 && ratio <= 1.0 && n_beams >= 2);
    let n = n_beams;
    let inv = 1.0 / ratio;
    if inv > n as f64 {
        return 0.0;
    }
    let k = (inv.floor() as usize).min(n - 1);
    let mut sum = CompensatedSum::new();
    for t in 1..=k {
        let sign = if t % 2 == 1 { 1.0 } else { -1.0 };
        sum.add(sign * binomial(n - 1, t - 1) * (1.0 - t as f64 * ratio).powi(n as i32 - 2));
    }
    (n * (n - 1)) as f64 * sum.value()
}

/// Tolerances and truncation for the 2-D quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Replaces the infinite integration limits. The integrand carries
    /// e^{-(a+b)}, so a bound of 50 + 10 N pushes the neglected tail far
    /// below any tolerance in use here.
    pub truncation_bound: f64,
}

impl QuadratureSpec {
    pub fn default_for(n_beams: usize) -> Self {
        Self {
            rel_tol: 1e-8,
            // Effectively pure-relative: coverage values on the validation
            // grids go down to ~1e-61 and must still carry relative digits.
            abs_tol: f64::MIN_POSITIVE,
            max_subdivisions: 40_000,
            truncation_bound: 50.0 + 10.0 * n_beams as f64,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("quadrature tolerance not met: {0}")]
    ToleranceNotMet(#[from] crate::numeric::ToleranceNotMet),
    #[error("joint density requires at least two beams (got N = {0})")]
    UnsupportedBeamCount(usize),
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
}

/// Coverage probability by adaptive 2-D quadrature of the joint density over
/// {(a, b): a > T (N/rho + b), 0 <= b <= (N-1) a}.
///
/// The outer integral runs over b with nodes on the breakpoints b_k where
/// the coverage line meets the sector rays; the inner integral over a splits
/// on every ray it crosses. Requires N >= 2.
pub fn coverage_by_quadrature(
    config: &SystemConfig,
    spec: &QuadratureSpec,
) -> Result<f64, OracleError> {
    let n = config.n_beams;
    if n < 2 {
        return Err(OracleError::UnsupportedBeamCount(n));
    }
    crate::config::validate(
        &SystemConfig {
            n_rx: 1,
            n_slots: 1,
            ..*config
        },
        crate::config::Scheme::OrpSa,
    )?;
    let t = config.threshold;
    let rho = config.rho;
    let noise = n as f64 / rho;

    // Breakpoints where a = T(N/rho + b) meets a = b/k, defined while
    // 1/k > T.
    let mut outer_nodes = vec![0.0];
    for k in 1..n {
        let slope_gap = 1.0 / k as f64 - t;
        if slope_gap <= 0.0 {
            break;
        }
        let b_k = t * noise / slope_gap;
        if b_k < spec.truncation_bound {
            outer_nodes.push(b_k);
        }
    }
    push_decay_ladder(&mut outer_nodes, 0.0, spec.truncation_bound);

    integrate_wedge(n, spec, &outer_nodes, |b| t.mul_add(b, t * noise))
}

/// Appends geometrically spaced nodes between `base` and `end` (exclusive),
/// then `end`, and sorts. The integrands here decay at unit-or-faster
/// exponential rates, so anchoring panels at O(1) offsets from the decay
/// onset keeps the adaptive pass from judging a wide tail panel by a handful
/// of near-zero samples.
fn push_decay_ladder(nodes: &mut Vec<f64>, base: f64, end: f64) {
    for step in [0.5, 1.5, 4.0, 10.0, 25.0, 60.0, 150.0, 400.0] {
        let x = base + step;
        if x < end {
            nodes.push(x);
        }
    }
    nodes.push(end);
    nodes.sort_unstable_by(f64::total_cmp);
    nodes.dedup();
}

/// Integral of the joint density over the whole feasible wedge (should be 1;
/// exercised by the normalization checks).
pub fn density_normalization(n_beams: usize, spec: &QuadratureSpec) -> Result<f64, OracleError> {
    if n_beams < 2 {
        return Err(OracleError::UnsupportedBeamCount(n_beams));
    }
    let mut nodes = vec![0.0];
    push_decay_ladder(&mut nodes, 0.0, spec.truncation_bound);
    integrate_wedge(n_beams, spec, &nodes, |_| 0.0)
}

/// Shared outer/inner machinery: integrates joint_pdf over
/// {a >= max(a_floor(b), b/(N-1))} for b in the given outer nodes.
fn integrate_wedge(
    n: usize,
    spec: &QuadratureSpec,
    outer_nodes: &[f64],
    a_floor: impl Fn(f64) -> f64,
) -> Result<f64, OracleError> {
    let inner_failure = std::cell::Cell::new(None);
    // Largest inner value seen so far: gives later inner integrals an
    // absolute-error floor, so negligible far-tail slivers cannot burn the
    // panel budget chasing relative accuracy of noise.
    let bulk_scale = std::cell::Cell::new(0.0f64);
    let inner = |b: f64| -> f64 {
        let wedge_lo = b / (n - 1) as f64;
        let a_start = a_floor(b).max(wedge_lo);
        let a_end = a_start.max(b) + spec.truncation_bound;
        let mut nodes = Vec::with_capacity(n + 10);
        nodes.push(a_start);
        // Sector rays a = b/k, ascending in a for descending k.
        for k in (1..n).rev() {
            let ray = b / k as f64;
            if ray > a_start && ray < a_end {
                nodes.push(ray);
            }
        }
        push_decay_ladder(&mut nodes, a_start.max(b), a_end);
        let abs_floor = spec.rel_tol * bulk_scale.get() / 32768.0;
        match integrate_segmented(
            &|a| joint_pdf(a, b, n),
            &nodes,
            spec.rel_tol / 4.0,
            abs_floor,
            spec.max_subdivisions,
        ) {
            Ok(r) => {
                bulk_scale.set(bulk_scale.get().max(r.value.abs()));
                r.value
            }
            Err(e) => {
                inner_failure.set(Some(e));
                0.0
            }
        }
    };

    let outer = integrate_segmented(
        &inner,
        outer_nodes,
        spec.rel_tol / 2.0,
        spec.abs_tol,
        spec.max_subdivisions,
    )?;
    if let Some(e) = inner_failure.take() {
        return Err(OracleError::ToleranceNotMet(e));
    }
    Ok(outer.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_classification() {
        assert_eq!(region_of(2.0, 1.0, 4), Region::Sector(1));
        assert_eq!(region_of(1.0, 2.5, 4), Region::Sector(3));
        assert_eq!(region_of(1.0, 5.0, 4), Region::Infeasible);
        // Wedge boundary itself is feasible.
        assert_eq!(region_of(1.0, 3.0, 4), Region::Sector(3));
    }

    #[test]
    fn joint_pdf_hand_values() {
        // N = 2, sector 1: density reduces to 2 e^{-(a+b)}.
        let got = joint_pdf(1.0, 0.5, 2);
        assert!((got - 2.0 * (-1.5f64).exp()).abs() < 1e-12);
        assert!((got - 0.44626).abs() < 5e-6);

        // N = 3, sector 2, manual two-term expansion:
        // 3 e^{-2.5} (1.5 - 2 (1.5 - 1)) = 3 e^{-2.5} * 0.5.
        let got = joint_pdf(1.0, 1.5, 3);
        assert!((got - 3.0 * (-2.5f64).exp() * 0.5).abs() < 1e-12);
        assert!((got - 0.12313).abs() < 5e-6);

        // Outside the wedge: zero.
        assert_eq!(joint_pdf(0.1, 1.0, 3), 0.0);
    }

    #[test]
    fn h_factor_hand_values() {
        assert!((h_factor(1.0, 2) - 2.0).abs() < 1e-14);
        assert!((h_factor(0.6, 3) - 2.4).abs() < 1e-12);
        assert!((h_factor(0.4, 3) - 1.2).abs() < 1e-12);
        assert_eq!(h_factor(0.2, 3), 0.0); // below 1/N
    }

    #[test]
    fn pdf_continuous_across_rays() {
        // Evaluate both sides of each sector ray at 1e-8 offsets. The local
        // magnitude is the density's size along the same b-row (the value on
        // the ray itself can be 0, e.g. on the wedge edge).
        for n in [3usize, 6, 12] {
            let b = 2.0f64;
            let row_scale = (0..n)
                .map(|j| joint_pdf(b / (j as f64 + 0.5), b, n))
                .fold(0.0f64, f64::max);
            assert!(row_scale > 0.0);
            for k in 1..n.min(6) {
                let a = b / k as f64;
                let lo = joint_pdf(a * (1.0 - 1e-8), b, n);
                let hi = joint_pdf(a * (1.0 + 1e-8), b, n);
                assert!(
                    ((lo - hi) / row_scale).abs() < 1e-6,
                    "N={n} k={k}: {lo} vs {hi} (scale {row_scale})"
                );
            }
        }
    }

    #[test]
    fn normalization_is_unity() {
        for n in [2usize, 3, 6] {
            let spec = QuadratureSpec::default_for(n);
            let total = density_normalization(n, &spec).unwrap();
            assert!((total - 1.0).abs() < 1e-6, "N={n}: {total}");
        }
    }

    #[test]
    fn high_threshold_closed_form_agreement() {
        // For T >= 1 the coverage region stays inside sector 1 and the
        // integral has the elementary form N/(T+1)^{N-1} e^{-TN/rho}.
        for (n, t, rho) in [
            (2usize, 2.0, 1.0),
            (3, 1.0, 0.631),
            (6, 6.31, 3.981),
            (12, 1.585, 1.0),
        ] {
            let cfg = SystemConfig::new(32, 1, n, 1, rho, t);
            let spec = QuadratureSpec::default_for(n);
            let got = coverage_by_quadrature(&cfg, &spec).unwrap();
            let closed = n as f64 / (t + 1.0).powi(n as i32 - 1) * (-t * n as f64 / rho).exp();
            assert!(
                ((got - closed) / closed).abs() < 1e-6,
                "N={n} T={t} rho={rho}: {got} vs {closed}"
            );
        }
    }

    #[test]
    fn two_beam_high_branch_value() {
        let cfg = SystemConfig::new(32, 1, 2, 1, 1.0, 2.0);
        let spec = QuadratureSpec::default_for(2);
        let got = coverage_by_quadrature(&cfg, &spec).unwrap();
        let exact = 2.0 / 3.0 * (-4.0f64).exp();
        assert!((got - exact).abs() < 1e-8, "{got} vs {exact}");
    }

    #[test]
    fn enormous_threshold_vanishes() {
        let cfg = SystemConfig::new(32, 1, 2, 1, 1.0, 1e3);
        let spec = QuadratureSpec::default_for(2);
        let got = coverage_by_quadrature(&cfg, &spec).unwrap();
        assert!(got < 1e-10, "{got}");
    }

    #[test]
    fn histogram_of_simulated_pairs_matches_density() {
        // Coarse 2-D histogram check at modest sample count; the acceptance
        // suite runs the full-size version.
        use crate::simulator::sample_max_min_powers;
        let n = 3usize;
        let samples = 200_000u64;
        let (a_hi, b_hi) = (6.0, 8.0);
        let (na, nb) = (10, 8);
        let mut observed = vec![0.0f64; na * nb];
        let mut inside = 0u64;
        for trial in 0..samples {
            let (a, b) = sample_max_min_powers(n, n, 77, trial);
            if a < a_hi && b < b_hi {
                let ia = (a / a_hi * na as f64) as usize;
                let ib = (b / b_hi * nb as f64) as usize;
                observed[ia * nb + ib] += 1.0;
                inside += 1;
            }
        }
        assert!(inside as f64 > 0.97 * samples as f64);
        // Expected cell masses by quadrature of the density.
        let mut worst_rel = 0.0f64;
        for ia in 0..na {
            for ib in 0..nb {
                let (a0, a1) = (
                    ia as f64 * a_hi / na as f64,
                    (ia + 1) as f64 * a_hi / na as f64,
                );
                let (b0, b1) = (
                    ib as f64 * b_hi / nb as f64,
                    (ib + 1) as f64 * b_hi / nb as f64,
                );
                let mass = cell_mass(n, a0, a1, b0, b1);
                let expect = mass * samples as f64;
                if expect > 500.0 {
                    let rel = (observed[ia * nb + ib] - expect) / expect;
                    worst_rel = worst_rel.max(rel.abs());
                }
            }
        }
        // 500+ expected counts: relative sampling noise ~ 4.5%.
        assert!(worst_rel < 0.1, "worst cell deviation {worst_rel}");
    }

    fn cell_mass(n: usize, a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
        let inner = |b: f64| {
            let mut nodes = vec![a0];
            for k in (1..n).rev() {
                let ray = b / k as f64;
                if ray > a0 && ray < a1 {
                    nodes.push(ray);
                }
            }
            nodes.push(a1);
            integrate_segmented(&|a| joint_pdf(a, b, n), &nodes, 1e-9, 0.0, 10_000)
                .unwrap()
                .value
        };
        integrate_segmented(&inner, &[b0, b1], 1e-8, 1e-12, 10_000)
            .unwrap()
            .value
    }
}
