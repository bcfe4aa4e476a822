//! Small statistics helpers used by the validation harness and tests:
//! Kolmogorov-Smirnov distance, Pearson correlation, chi-square statistic,
//! and the Monte Carlo agreement test.

use crate::numeric::poisson_cdf;

/// Does a Binomial(trials, p) draw of `successes` sit within the two-sided
/// 3-sigma band around `p`? Returns the z-score where the normal
/// approximation is valid (NaN otherwise).
///
/// Where either expected count is below 25 the normal interval misstates the
/// tail badly, so the check switches to exact Poisson tail probabilities at
/// the matching significance (0.00135 per side).
pub fn monte_carlo_consistent(successes: u64, trials: u64, p: f64) -> (bool, f64) {
    let n = trials as f64;
    let expected_successes = p * n;
    let expected_failures = (1.0 - p) * n;
    if expected_successes < 25.0 || expected_failures < 25.0 {
        let (observed, lambda) = if expected_successes <= expected_failures {
            (successes, expected_successes)
        } else {
            (trials - successes, expected_failures)
        };
        let below = poisson_cdf(observed as usize, lambda);
        let above = if observed == 0 {
            1.0
        } else {
            1.0 - poisson_cdf(observed as usize - 1, lambda)
        };
        return (below.min(above) >= 0.001_35, f64::NAN);
    }
    let p_hat = successes as f64 / n;
    let sigma = (p_hat * (1.0 - p_hat) / n).sqrt();
    let z = (p_hat - p).abs() / sigma;
    (z <= 3.0, z)
}

/// Two-sided Kolmogorov-Smirnov statistic of `sorted` against a reference
/// CDF: sup_x |F_emp(x) - F(x)|. `sorted` must be ascending.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let values: Vec<f64> = sorted.iter().map(|&x| cdf(x)).collect();
    ks_statistic_precomputed(&values)
}

/// KS statistic when the reference CDF has already been evaluated at the
/// sorted sample points (lets callers parallelize expensive CDFs).
pub fn ks_statistic_precomputed(cdf_at_sorted: &[f64]) -> f64 {
    let n = cdf_at_sorted.len();
    assert!(n > 0, "KS statistic of an empty sample");
    let n_f = n as f64;
    let mut d = 0.0f64;
    for (i, &f) in cdf_at_sorted.iter().enumerate() {
        let lo = (f - i as f64 / n_f).abs();
        let hi = ((i + 1) as f64 / n_f - f).abs();
        d = d.max(lo).max(hi);
    }
    d
}

/// Sample Pearson correlation coefficient of two equal-length series.
pub fn pearson_correlation(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    sxy / (sxx * syy).sqrt()
}

/// Pearson chi-square statistic and degrees of freedom (bins - 1) for
/// observed counts against expected counts. Bins with expected count below
/// `min_expected` are pooled into their predecessor.
pub fn chi_square_statistic(observed: &[f64], expected: &[f64], min_expected: f64) -> (f64, usize) {
    assert_eq!(observed.len(), expected.len());
    let mut chi2 = 0.0;
    let mut bins = 0usize;
    let mut pool_obs = 0.0;
    let mut pool_exp = 0.0;
    for (&o, &e) in observed.iter().zip(expected) {
        pool_obs += o;
        pool_exp += e;
        if pool_exp >= min_expected {
            let d = pool_obs - pool_exp;
            chi2 += d * d / pool_exp;
            bins += 1;
            pool_obs = 0.0;
            pool_exp = 0.0;
        }
    }
    if pool_exp > 0.0 && bins > 0 {
        // Leftover tail pooled into a final bin.
        let d = pool_obs - pool_exp;
        chi2 += d * d / pool_exp;
        bins += 1;
    }
    (chi2, bins.saturating_sub(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_exact_uniform_grid() {
        // Midpoint grid i/n - 1/(2n) has KS = 1/(2n) against U(0,1).
        let n = 1000;
        let sorted: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&sorted, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn correlation_of_identical_series_is_one() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert!((pearson_correlation(&xs, &xs) - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert!((pearson_correlation(&xs, &neg) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_consistency_band() {
        // Normal regime: inside and outside 3 sigma.
        let trials = 1_000_000u64;
        let p = 0.3;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        let inside = ((p + 2.5 * sigma) * trials as f64) as u64;
        let outside = ((p + 4.0 * sigma) * trials as f64) as u64;
        assert!(monte_carlo_consistent(inside, trials, p).0);
        assert!(!monte_carlo_consistent(outside, trials, p).0);

        // Rare-event regime: 1 observed at expectation 4.8 is unlucky but
        // consistent; 0 observed at expectation 12 is not.
        assert!(monte_carlo_consistent(1, 20_000, 2.4e-4).0);
        assert!(!monte_carlo_consistent(0, 1_000_000, 1.2e-5).0);
        // Zero successes against a truly tiny probability is consistent.
        assert!(monte_carlo_consistent(0, 1_000_000, 1e-9).0);
        // Mirror side: near-certain coverage.
        assert!(monte_carlo_consistent(999_999, 1_000_000, 1.0 - 2e-6).0);
    }

    #[test]
    fn chi_square_pools_small_bins() {
        let observed = [10.0, 12.0, 1.0, 0.0, 1.0];
        let expected = [10.0, 10.0, 0.5, 0.5, 1.0];
        let (chi2, dof) = chi_square_statistic(&observed, &expected, 2.0);
        assert!(chi2 >= 0.0);
        assert_eq!(dof, 2); // three pooled bins
    }
}
