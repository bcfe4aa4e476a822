//! Low-level numeric kernels shared by the closed-form and quadrature paths:
//! compensated summation, exact small-integer combinatorics, regularized
//! gamma tails, and an adaptive Gauss-Kronrod integrator.

/// Neumaier compensated accumulator.
///
/// Tracks the running sum, the compensation term, and the sum of absolute
/// values. The latter drives the cancellation diagnostic: alternating-sign
/// series lose roughly `eps * abs_sum / |sum|` relative digits before
/// compensation, and the residual after compensation is bounded by
/// `2 eps |sum| + (n eps)^2 abs_sum`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
    abs_sum: f64,
    count: u64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs_sum += x.abs();
        self.count += 1;
    }

    /// Compensated total.
    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Sum of absolute values of all addends.
    #[inline]
    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }

    /// Residual-error bound after compensation (Neumaier bound).
    pub fn error_estimate(&self) -> f64 {
        let n_eps = self.count as f64 * f64::EPSILON;
        2.0 * f64::EPSILON * self.value().abs() + n_eps * n_eps * self.abs_sum
    }
}

/// Exact factorials 0!..=170! (the largest representable in f64).
const MAX_FACTORIAL: usize = 170;

/// n! for n <= 170. Every value up to 22! is exact; beyond that correctly
/// rounded to within an ulp of the table construction.
pub fn factorial(n: usize) -> f64 {
    assert!(n <= MAX_FACTORIAL, "factorial({n}) overflows f64");
    FACTORIALS[n]
}

const FACTORIALS: [f64; MAX_FACTORIAL + 1] = {
    let mut f = [1.0; MAX_FACTORIAL + 1];
    let mut n = 1;
    while n <= MAX_FACTORIAL {
        f[n] = f[n - 1] * n as f64;
        n += 1;
    }
    f
};

/// Binomial coefficient C(n, k) as f64, exact for n <= 56 (values stay
/// below 2^53 there; callers in this crate keep n <= ~80).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc.round()
}

/// Regularized upper incomplete gamma Q(n+1, x) = e^{-x} sum_{l=0}^{n} x^l/l!
/// for integer shape, i.e. the Poisson(x) CDF at n. Stable for any x >= 0:
/// terms are evaluated in log space when e^{-x} would underflow.
pub fn poisson_cdf(n: usize, x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        return 1.0;
    }
    if x < 700.0 {
        let mut term = (-x).exp();
        let mut sum = term;
        for l in 1..=n {
            term *= x / l as f64;
            sum += term;
        }
        sum.min(1.0)
    } else {
        let ln_x = x.ln();
        let mut sum = 0.0;
        let mut ln_fact = 0.0;
        for l in 0..=n {
            if l > 0 {
                ln_fact += (l as f64).ln();
            }
            sum += (l as f64 * ln_x - ln_fact - x).exp();
        }
        sum.min(1.0)
    }
}

/// Complement of [`poisson_cdf`]: the regularized lower incomplete gamma
/// P(n+1, x) = 1 - Q(n+1, x), evaluated by its own series so that tiny
/// values keep their relative accuracy instead of being extracted from a
/// near-1 complement.
pub fn poisson_sf(n: usize, x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    // x^{n+1} e^{-x} / (n+1)! * sum_{j>=0} x^j / prod_{i<=j} (n+1+i)
    let lead = ((n as f64 + 1.0) * x.ln() - x - factorial(n + 1).ln()).exp();
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for j in 1..500 {
        term *= x / (n + 1 + j) as f64;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    (lead * sum).min(1.0)
}

/// ∫_x^y e^{-lambda b} b^n db for 0 <= x <= y (y may be f64::INFINITY),
/// evaluated through the finite-sum identity
/// ∫_a^∞ e^{-u} u^n du = n! e^{-a} Σ_{l<=n} a^l/l!.
///
/// When both endpoints sit far left of the gamma mode the upper tails are
/// both close to 1 and their difference cancels; the lower-tail series is
/// used there instead (its series converges geometrically on that range).
pub fn exp_poly_integral(n: usize, lambda: f64, x: f64, y: f64) -> f64 {
    debug_assert!(lambda > 0.0 && x >= 0.0 && y >= x);
    let scale = factorial(n) / lambda.powi(n as i32 + 1);
    let (qx, qy) = (lambda * x, lambda * y);
    if qy <= 0.5 * (n as f64 + 1.0) {
        return scale * (poisson_sf(n, qy) - poisson_sf(n, qx));
    }
    let upper = if y.is_finite() {
        poisson_cdf(n, qy)
    } else {
        0.0
    };
    scale * (poisson_cdf(n, qx) - upper)
}

// 15-point Kronrod extension of 7-point Gauss-Legendre (QUADPACK dqk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// One Gauss-Kronrod 15(7) panel: returns (integral, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);

    let f_mid = f(mid);
    let mut kronrod = WGK[7] * f_mid;
    let mut gauss = WG[3] * f_mid;
    for j in 0..7 {
        let dx = half * XGK[j];
        let fsum = f(mid - dx) + f(mid + dx);
        kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;

    // The raw Gauss/Kronrod difference is a conservative error estimate;
    // this integrator serves as an oracle, so conservative is what we want.
    (kronrod, (kronrod - gauss).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

#[derive(Debug, thiserror::Error)]
#[error("adaptive quadrature did not reach the requested tolerance after {panels} panels (value {value:.6e}, error {error:.3e})")]
pub struct ToleranceNotMet {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

/// Adaptive 1-D integration of `f` over consecutive segments whose endpoints
/// are `nodes` (sorted ascending). Segment endpoints are never straddled, so
/// integrand kinks placed on them cost nothing. Bisects the worst panel until
/// `err <= abs_tol + rel_tol * |integral|` or the panel budget is exhausted.
///
/// Every initial segment is split once before the first convergence check:
/// a single Gauss-Kronrod panel over a wide segment can look converged while
/// missing a boundary layer entirely.
pub fn integrate_segmented<F: Fn(f64) -> f64>(
    f: &F,
    nodes: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<QuadResult, ToleranceNotMet> {
    #[derive(Debug)]
    struct Panel {
        a: f64,
        b: f64,
        value: f64,
        error: f64,
    }

    let mut panels: Vec<Panel> = Vec::with_capacity(64);
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a >= b {
            continue;
        }
        let mid = 0.5 * (a + b);
        for (lo, hi) in [(a, mid), (mid, b)] {
            if lo >= hi {
                continue;
            }
            let (value, error) = gk15(f, lo, hi);
            panels.push(Panel {
                a: lo,
                b: hi,
                value,
                error,
            });
        }
    }
    if panels.is_empty() {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            panels: 0,
        });
    }

    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        if err <= abs_tol + rel_tol * total.abs() {
            return Ok(QuadResult {
                value: total,
                error: err,
                panels: panels.len(),
            });
        }
        if panels.len() >= max_panels {
            return Err(ToleranceNotMet {
                value: total,
                error: err,
                panels: panels.len(),
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("non-empty panel list");
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // Interval at floating-point resolution; accept what we have.
            let total: f64 = panels.iter().map(|p| p.value).sum();
            let err: f64 = panels.iter().map(|p| p.error).sum();
            return Ok(QuadResult {
                value: total,
                error: err,
                panels: panels.len(),
            });
        }
        let (lv, le) = gk15(f, a, mid);
        let (rv, re) = gk15(f, mid, b);
        panels[worst] = Panel {
            a,
            b: mid,
            value: lv,
            error: le,
        };
        panels.push(Panel {
            a: mid,
            b,
            value: rv,
            error: re,
        });
    }
}
