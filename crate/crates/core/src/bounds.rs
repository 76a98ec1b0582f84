//! Concentration bounds, their exact oracles, and the threshold calculus.
//!
//! Closed forms (Hoeffding and the two hypergeometric corollaries) sit next
//! to exact CDF evaluators so every bound can be checked against the
//! distribution it is meant to dominate. The second half derives the
//! protocol parameters `A`, `A'`, `f`, `g`, `w` and the tolerable noise level
//! for a given round budget.
//!
//! Logarithms are natural throughout.

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{invalid, Error, Result};

/// Regime of the corruption lemma: `A` must be at least this large.
pub const MIN_A: f64 = 100.0;

/// Lower bound on `f` required before the noise threshold is meaningful.
pub const MIN_F: f64 = 0.9;

// Slack for the direction checks on `k` vs `n p`, which are frequently
// computed from products that are integral only in exact arithmetic.
const DIRECTION_SLACK: f64 = 1e-12;

fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(name, format!("{p} is not in [0, 1]")));
    }
    Ok(())
}

fn slack(x: f64) -> f64 {
    DIRECTION_SLACK * x.abs().max(1.0)
}

/// `Pr[X <= k] <= exp(-2 (np - k)^2 / n)` for `X ~ Binomial(n, p)`, `k <= np`.
pub fn hoeffding_lower_tail(n: u64, p: f64, k: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "must be positive"));
    }
    check_probability("p", p)?;
    let mean = n as f64 * p;
    if k > mean + slack(mean) {
        return Err(invalid(
            "k",
            format!("lower-tail bound needs k <= n p = {mean}, got {k}"),
        ));
    }
    let gap = (mean - k).max(0.0);
    Ok((-2.0 * gap * gap / n as f64).exp())
}

/// `Pr[X >= k] <= exp(-2 (np - k)^2 / n)` for `X ~ Binomial(n, p)`, `k >= np`.
///
/// Evaluated through the reflection `F(n - k; n, 1 - p)`, so the identity
/// with [`hoeffding_lower_tail`] holds bit for bit.
pub fn hoeffding_upper_tail(n: u64, p: f64, k: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "must be positive"));
    }
    check_probability("p", p)?;
    let mean = n as f64 * p;
    if k < mean - slack(mean) {
        return Err(invalid(
            "k",
            format!("upper-tail bound needs k >= n p = {mean}, got {k}"),
        ));
    }
    let n_f = n as f64;
    let reflected_k = n_f - k;
    let reflected_mean = n_f * (1.0 - p);
    // The reflected direction check can only fail by rounding.
    let gap = (reflected_mean - reflected_k).max(0.0);
    Ok((-2.0 * gap * gap / n_f).exp())
}

fn check_hypergeom(npop: u64, marked: u64, draws: u64) -> Result<()> {
    if npop == 0 {
        return Err(invalid("Npop", "must be positive"));
    }
    if marked > npop {
        return Err(invalid("K", format!("{marked} exceeds population {npop}")));
    }
    if draws > npop {
        return Err(invalid("n", format!("{draws} exceeds population {npop}")));
    }
    Ok(())
}

/// `Pr[X <= lambda] <= exp(-2 n (K/N - lambda/n)^2)` for
/// `X ~ Hypergeometric(N, K, n)` and `0 < lambda < nK/N`.
pub fn hypergeom_tail_low(npop: u64, marked: u64, draws: u64, lambda: f64) -> Result<f64> {
    check_hypergeom(npop, marked, draws)?;
    let mean = draws as f64 * marked as f64 / npop as f64;
    if !(lambda > 0.0 && lambda < mean) {
        return Err(invalid(
            "lambda",
            format!("must lie in (0, nK/N) = (0, {mean}), got {lambda}"),
        ));
    }
    let n = draws as f64;
    let gap = marked as f64 / npop as f64 - lambda / n;
    Ok((-2.0 * n * gap * gap).exp())
}

/// `Pr[X >= lambda] <= exp(-2 n (lambda/n - K/N)^2)` for `lambda > nK/N`.
pub fn hypergeom_tail_high(npop: u64, marked: u64, draws: u64, lambda: f64) -> Result<f64> {
    check_hypergeom(npop, marked, draws)?;
    let mean = draws as f64 * marked as f64 / npop as f64;
    if !(lambda > mean) || draws == 0 {
        return Err(invalid(
            "lambda",
            format!("must exceed nK/N = {mean}, got {lambda}"),
        ));
    }
    let n = draws as f64;
    let gap = lambda / n - marked as f64 / npop as f64;
    Ok((-2.0 * n * gap * gap).exp())
}

/// Neumaier-compensated sum of `exp(x - shift)` over `terms`.
fn compensated_exp_sum(terms: &[f64], shift: f64) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &t in terms {
        let v = (t - shift).exp();
        let s = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - s) + v;
        } else {
            comp += (v - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + compensated_exp_sum(terms, max).ln()
}

/// Exact `Pr[X <= k]` for `X ~ Binomial(n, p)`, accumulated in log space.
///
/// `k < 0` gives 0 and `k >= n` gives 1.
pub fn exact_binomial_cdf(n: u64, p: f64, k: i64) -> Result<f64> {
    check_probability("p", p)?;
    if k < 0 {
        return Ok(0.0);
    }
    let k = k as u64;
    if k >= n {
        return Ok(1.0);
    }
    if p == 0.0 {
        return Ok(1.0);
    }
    if p == 1.0 {
        return Ok(0.0);
    }
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let terms: Vec<f64> = (0..=k)
        .map(|i| ln_binomial(n, i) + i as f64 * ln_p + (n - i) as f64 * ln_q)
        .collect();
    Ok(log_sum_exp(&terms).exp().clamp(0.0, 1.0))
}

/// Exact `Pr[X >= k]` for `X ~ Binomial(n, p)`, via `F(n - k; n, 1 - p)`.
pub fn exact_binomial_sf(n: u64, p: f64, k: i64) -> Result<f64> {
    check_probability("p", p)?;
    exact_binomial_cdf(n, 1.0 - p, n as i64 - k)
}

/// Exact `Pr[X <= k]` for `X ~ Hypergeometric(Npop, K, n)`.
pub fn exact_hypergeom_cdf(npop: u64, marked: u64, draws: u64, k: i64) -> Result<f64> {
    check_hypergeom(npop, marked, draws)?;
    let lo = draws.saturating_sub(npop - marked);
    let hi = draws.min(marked);
    if k < lo as i64 {
        return Ok(0.0);
    }
    if k >= hi as i64 {
        return Ok(1.0);
    }
    let k = k as u64;
    let ln_total = ln_binomial(npop, draws);
    let terms: Vec<f64> = (lo..=k)
        .map(|i| ln_binomial(marked, i) + ln_binomial(npop - marked, draws - i) - ln_total)
        .collect();
    Ok(log_sum_exp(&terms).exp().clamp(0.0, 1.0))
}

/// Exact `Pr[X >= k]` for `X ~ Hypergeometric(Npop, K, n)`, computed as the
/// lower tail of the unmarked count so no cancellation occurs.
pub fn exact_hypergeom_sf(npop: u64, marked: u64, draws: u64, k: i64) -> Result<f64> {
    check_hypergeom(npop, marked, draws)?;
    exact_hypergeom_cdf(npop, npop - marked, draws, draws as i64 - k)
}

/// Protocol inputs for the threshold calculus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdInputs {
    /// Number of protocol rounds.
    pub n: u64,
    /// Corruption fraction the adversary must exceed on computation rounds.
    pub alpha: f64,
    /// Failure budget.
    pub delta: f64,
    /// Probability an off-computation corruption escapes detection.
    #[serde(default)]
    pub epsilon: f64,
}

impl ThresholdInputs {
    pub fn new(n: u64, alpha: f64, delta: f64, epsilon: f64) -> Result<Self> {
        let inputs = Self {
            n,
            alpha,
            delta,
            epsilon,
        };
        inputs.validate()?;
        Ok(inputs)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("N", "must be at least 1"));
        }
        if !(0.0..0.5).contains(&self.alpha) {
            return Err(invalid(
                "alpha",
                format!("{} is not in [0, 1/2)", self.alpha),
            ));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(invalid(
                "delta",
                format!("{} is not in (0, 1/2)", self.delta),
            ));
        }
        check_probability("epsilon", self.epsilon)
    }
}

/// Derived quantities for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub inputs: ThresholdInputs,
    pub a: f64,
    pub a_prime: f64,
    pub f: f64,
    pub g: f64,
    /// Abort threshold on the failed fraction of each test type.
    pub w: f64,
    /// Largest honest per-round test failure probability the bounds tolerate.
    pub noise_threshold: f64,
    pub feasible_a: bool,
    pub feasible_f: bool,
}

impl ThresholdReport {
    pub fn feasible(&self) -> bool {
        self.feasible_a && self.feasible_f
    }
}

/// `A = alpha^2 N / (6 ln(2/delta))`.
pub fn compute_a(n: u64, alpha: f64, delta: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("N", "must be at least 1"));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(invalid("alpha", format!("must be positive, got {alpha}")));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(invalid("delta", format!("{delta} is not in (0, 1/2)")));
    }
    Ok(alpha * alpha * n as f64 / (6.0 * (2.0 / delta).ln()))
}

/// Smaller root of `x^2 - (2 + 3/A) x + 1 = 0` and its complement `1 - x`.
///
/// Both are computed without cancellation: the discriminant as
/// `(3/A)(4 + 3/A)`, the root as `2 / (b + sqrt(disc))`, and the complement
/// as `(sqrt(disc) - 3/A) / 2`.
fn a_prime_parts(a: f64) -> (f64, f64) {
    let t = 3.0 / a;
    let b = 2.0 + t;
    let root_disc = (t * (4.0 + t)).sqrt();
    (2.0 / (b + root_disc), 0.5 * (root_disc - t))
}

/// `A' = ((2 + 3/A) - sqrt((2 + 3/A)^2 - 4)) / 2`, for `A >= 100`.
pub fn compute_a_prime(a: f64) -> Result<f64> {
    check_a_regime(a)?;
    Ok(a_prime_parts(a).0)
}

/// `1 - A'`, accurate to full relative precision even when `A'` is within a
/// few ulps of 1. The root identity `A'(1/A' - 1)^2 = 3/A` is badly
/// conditioned near 1 when evaluated from `A'` alone.
pub fn compute_a_prime_complement(a: f64) -> Result<f64> {
    check_a_regime(a)?;
    Ok(a_prime_parts(a).1)
}

fn check_a_regime(a: f64) -> Result<()> {
    if a.is_nan() {
        return Err(invalid("A", "is NaN"));
    }
    if a < MIN_A {
        return Err(Error::Infeasible(format!(
            "A = {a} is below the lemma regime A >= {MIN_A}"
        )));
    }
    Ok(())
}

/// Full threshold calculus for one parameter point.
///
/// `A` absorbs the `(1 - epsilon)^2` factor and `w = f (1 - epsilon) alpha`;
/// with `epsilon = 0` these are exactly `w = f alpha` and
/// `noise_threshold = f alpha - g`. Infeasible points (A < 100 or f < 9/10)
/// are reported with their flags cleared rather than rejected.
pub fn threshold_report(inputs: ThresholdInputs) -> Result<ThresholdReport> {
    inputs.validate()?;
    let detect = 1.0 - inputs.epsilon;
    if detect == 0.0 {
        return Err(invalid(
            "epsilon",
            "epsilon = 1 leaves every off-computation corruption undetected",
        ));
    }
    let a = compute_a(inputs.n, inputs.alpha * detect, inputs.delta)?;
    let (a_prime, _) = a_prime_parts(a);
    let inv_sqrt_a = a.sqrt().recip();
    let f = a_prime * (1.0 - inv_sqrt_a);
    let g = 0.5 * inv_sqrt_a;
    let w = f * detect * inputs.alpha;
    Ok(ThresholdReport {
        inputs,
        a,
        a_prime,
        f,
        g,
        w,
        noise_threshold: w - g,
        feasible_a: a >= MIN_A,
        feasible_f: f >= MIN_F,
    })
}

/// Smallest `N` whose report is feasible and tolerates noise strictly above
/// `target_p_noise`.
///
/// The noise threshold is nondecreasing in `N`, so an exponential search
/// brackets the answer and bisection pins it; the returned `N` is checked
/// to be feasible and `N - 1` to be infeasible.
pub fn min_rounds(alpha: f64, delta: f64, epsilon: f64, target_p_noise: f64) -> Result<u64> {
    ThresholdInputs::new(1, alpha, delta, epsilon)?;
    if !(alpha > 0.0) {
        return Err(invalid("alpha", "must be positive"));
    }
    let ceiling = (1.0 - epsilon) * alpha;
    if !(target_p_noise < ceiling) {
        return Err(Error::Unattainable(format!(
            "target p_noise {target_p_noise} is not below the asymptotic ceiling {ceiling}"
        )));
    }
    let ok = |n: u64| -> Result<bool> {
        let r = threshold_report(ThresholdInputs::new(n, alpha, delta, epsilon)?)?;
        Ok(r.feasible() && r.noise_threshold > target_p_noise)
    };
    const LIMIT: u64 = 1 << 62;
    let mut hi = 1u64;
    while !ok(hi)? {
        if hi >= LIMIT {
            return Err(Error::Unattainable(format!(
                "no N below 2^62 reaches p_noise {target_p_noise}"
            )));
        }
        hi *= 2;
    }
    let mut lo = hi / 2; // ok(lo) is false, or lo == 0
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    debug_assert!(hi == 1 || !ok(hi - 1)?);
    Ok(hi)
}

/// Smallest `N` meeting the lemma's round bound `N >= 6 A ln(2/delta) /
/// ((1 - epsilon)^2 alpha^2)` for a given `A` (default regime `A = 100`).
pub fn lemma_min_rounds(alpha: f64, delta: f64, epsilon: f64, a_target: f64) -> Result<u64> {
    ThresholdInputs::new(1, alpha, delta, epsilon)?;
    let detect = 1.0 - epsilon;
    if !(alpha > 0.0) || detect == 0.0 {
        return Err(invalid("alpha", "(1 - epsilon) alpha must be positive"));
    }
    let exact = 6.0 * a_target * (2.0 / delta).ln() / (detect * detect * alpha * alpha);
    let mut n = exact.ceil().max(1.0) as u64;
    // ceil of a rounded quotient can land one short of the bound
    while compute_a(n, alpha * detect, delta)? < a_target {
        n += 1;
    }
    Ok(n)
}

/// `alpha = (2q - 1) / (2q - 2)`, evaluated as `(1 - 2q) / (2 - 2q)`.
pub fn alpha_from_q(q: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&q) {
        return Err(invalid("q", format!("{q} is not in [0, 1/2)")));
    }
    Ok((1.0 - 2.0 * q) / (2.0 - 2.0 * q))
}

/// Completeness and soundness of a single run at inherent error `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleRunParams {
    pub c: f64,
    pub s: f64,
    pub gap: f64,
}

/// `c = 1 - q/3`, `s = (q + 2)/3`, `gap = (1 - 2q)/3`.
pub fn single_run_parameters(q: f64) -> Result<SingleRunParams> {
    if !(q > 0.0 && q < 0.5) {
        return Err(invalid("q", format!("{q} is not in (0, 1/2)")));
    }
    Ok(SingleRunParams {
        c: (3.0 - q) / 3.0,
        s: (q + 2.0) / 3.0,
        gap: (1.0 - 2.0 * q) / 3.0,
    })
}

/// Noise threshold `(1/k) alpha` of the earlier `k`-colourable MBQC
/// construction, kept for comparison tables.
pub fn lmko_threshold(k: u32, q: f64) -> Result<f64> {
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    Ok(alpha_from_q(q)? / f64::from(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn hoeffding_examples() {
        assert!(close(
            hoeffding_lower_tail(100, 0.5, 40.0).unwrap(),
            (-2.0f64).exp(),
            1e-15
        ));
        assert_eq!(hoeffding_lower_tail(10, 0.5, 5.0).unwrap(), 1.0);
        assert!(close(
            hoeffding_lower_tail(60, 1.0 / 3.0, 10.0).unwrap(),
            0.035_673_993_347_252_4,
            1e-12
        ));
        assert!(close(
            hoeffding_upper_tail(100, 0.5, 60.0).unwrap(),
            (-2.0f64).exp(),
            1e-15
        ));
        assert_eq!(hoeffding_upper_tail(9, 1.0 / 3.0, 3.0).unwrap(), 1.0);
    }

    #[test]
    fn hoeffding_rejects_wrong_direction() {
        assert!(hoeffding_lower_tail(100, 0.5, 51.0).is_err());
        assert!(hoeffding_upper_tail(100, 0.5, 49.0).is_err());
        assert!(hoeffding_lower_tail(0, 0.5, 0.0).is_err());
        assert!(hoeffding_lower_tail(10, 1.5, 0.0).is_err());
    }

    #[test]
    fn hoeffding_reflection_is_exact() {
        assert_eq!(
            hoeffding_upper_tail(100, 0.3, 40.0).unwrap(),
            hoeffding_lower_tail(100, 0.7, 60.0).unwrap()
        );
    }

    #[test]
    fn hypergeometric_examples() {
        let b = hypergeom_tail_low(20, 10, 10, 2.0).unwrap();
        assert!(close(b, (-1.8f64).exp(), 1e-15));
        assert!(close(b, 0.165_298_888_221_586_5, 1e-12));
        assert!(hypergeom_tail_low(20, 10, 10, 4.999_999).unwrap() > 0.999_999);
        assert!(close(
            hypergeom_tail_high(20, 10, 10, 8.0).unwrap(),
            (-1.8f64).exp(),
            1e-15
        ));
        assert!(hypergeom_tail_high(30, 10, 9, 3.0001).unwrap() > 0.999_99);
        assert!(exact_hypergeom_cdf(20, 10, 10, 2).unwrap() <= b);
        assert!(exact_hypergeom_sf(20, 10, 10, 8).unwrap() <= b);
    }

    #[test]
    fn hypergeometric_rejects_out_of_range_lambda() {
        assert!(hypergeom_tail_low(20, 10, 10, 0.0).is_err());
        assert!(hypergeom_tail_low(20, 10, 10, 5.0).is_err());
        assert!(hypergeom_tail_high(20, 10, 10, 5.0).is_err());
        assert!(hypergeom_tail_low(20, 21, 10, 1.0).is_err());
    }

    #[test]
    fn exact_cdf_examples() {
        assert_eq!(exact_binomial_cdf(4, 0.5, 4).unwrap(), 1.0);
        assert!(close(
            exact_binomial_cdf(2, 1.0 / 3.0, 0).unwrap(),
            4.0 / 9.0,
            1e-15
        ));
        let v = exact_binomial_cdf(100, 0.5, 40).unwrap();
        assert!(v > 0.0 && v <= (-2.0f64).exp());
        assert_eq!(exact_hypergeom_cdf(10, 10, 5, 5).unwrap(), 1.0);
        assert!(close(
            exact_hypergeom_cdf(4, 2, 2, 0).unwrap(),
            1.0 / 6.0,
            1e-15
        ));
    }

    #[test]
    fn a_and_a_prime_examples() {
        // reference values from 40-digit evaluation of the closed forms
        assert!(close(
            compute_a(221_049, 0.25, 0.2).unwrap(),
            1_000.003_759_689_915_8,
            1e-9
        ));
        assert!(close(
            compute_a(354_134, 0.25, 0.05).unwrap(),
            1_000.004_440_161_192_8,
            1e-9
        ));
        // alpha^2 N = 6 ln(2/delta) inverts the definition
        let delta = 0.05f64;
        let alpha = (6.0 * (2.0 / delta).ln() / 96.0).sqrt();
        assert!(close(compute_a(96, alpha, delta).unwrap(), 1.0, 1e-14));
        assert!(compute_a(100, 0.0, 0.1).is_err());

        let at_100 = compute_a_prime(100.0).unwrap();
        assert!(close(at_100, 0.841_146_613_492_862_9, 1e-14));
        assert!(close(at_100, 0.841_151, 1e-5));
        assert!(at_100 >= 0.8);
        assert!(close(
            compute_a_prime(1000.0).unwrap(),
            0.946_707_208_503_307_7,
            1e-14
        ));
        // A' = 1 - sqrt(3/A) + (3/A)/2 + O(A^-3/2); the second-order term is
        // 1.5e-8 at A = 1e8, so the first-order form is only good to 2e-8
        let big = compute_a_prime(1e8).unwrap();
        let t = 3e-8f64;
        assert!((big - (1.0 - t.sqrt())).abs() < 2e-8);
        assert!((big - (1.0 - t.sqrt() + t / 2.0)).abs() < 1e-12);
        assert!(matches!(compute_a_prime(99.9), Err(Error::Infeasible(_))));
        assert!(close(
            compute_a_prime_complement(1e9).unwrap(),
            1.0 - compute_a_prime(1e9).unwrap(),
            1e-15
        ));
    }

    #[test]
    fn threshold_report_worked_point() {
        let r = threshold_report(ThresholdInputs::new(354_134, 0.25, 0.05, 0.0).unwrap()).unwrap();
        assert!(close(r.a, 1_000.004_440_161_192_8, 1e-9));
        assert!(close(r.f, 0.916_769_875_841_047_4, 1e-13));
        assert!(close(r.g, 0.015_811_353_198_402_42, 1e-13));
        assert!(close(r.w, 0.229_192_468_960_261_86, 1e-13));
        assert!(close(r.noise_threshold, 0.213_381_115_761_859_43, 1e-13));
        assert!(r.feasible());
        assert_eq!(r.w, r.f * 0.25);
        assert_eq!(r.noise_threshold, r.f * 0.25 - r.g);

        let big =
            threshold_report(ThresholdInputs::new(10_000_000, 0.25, 0.05, 0.0).unwrap()).unwrap();
        assert!(big.noise_threshold >= 0.24);

        assert!(threshold_report(ThresholdInputs::new(100, 0.0, 0.05, 0.0).unwrap()).is_err());
    }

    #[test]
    fn infeasible_points_are_flagged_not_rejected() {
        let r = threshold_report(ThresholdInputs::new(1000, 0.25, 0.05, 0.0).unwrap()).unwrap();
        assert!(!r.feasible_a);
        assert!(!r.feasible_f);
        assert!(r.a > 0.0 && r.a_prime > 0.0 && r.a_prime < 1.0);
    }

    #[test]
    fn min_rounds_examples() {
        let n = min_rounds(0.25, 0.05, 0.0, 0.0).unwrap();
        let at = |n| threshold_report(ThresholdInputs::new(n, 0.25, 0.05, 0.0).unwrap()).unwrap();
        assert!(at(n).feasible() && at(n).noise_threshold > 0.0);
        assert!(!at(n - 1).feasible());

        let target = at(354_134).noise_threshold - 1e-12;
        let m = min_rounds(0.25, 0.05, 0.0, target).unwrap();
        assert!(m.abs_diff(354_134) <= 1, "got {m}");

        assert!(matches!(
            min_rounds(0.25, 0.05, 0.0, 0.25),
            Err(Error::Unattainable(_))
        ));
    }

    #[test]
    fn lemma_min_rounds_meets_the_bound() {
        let n = lemma_min_rounds(0.25, 0.2, 0.5, 100.0).unwrap();
        assert!(compute_a(n, 0.125, 0.2).unwrap() >= 100.0);
        assert!(compute_a(n - 1, 0.125, 0.2).unwrap() < 100.0);
    }

    #[test]
    fn conversions() {
        assert!(close(alpha_from_q(1.0 / 3.0).unwrap(), 0.25, 1e-15));
        assert_eq!(alpha_from_q(0.0).unwrap(), 0.5);
        assert!(close(alpha_from_q(0.49).unwrap(), 0.02 / 1.02, 1e-15));
        assert!(alpha_from_q(0.5).is_err());

        assert!(close(lmko_threshold(2, 1.0 / 3.0).unwrap(), 0.125, 1e-15));
        assert!(close(lmko_threshold(1, 1.0 / 3.0).unwrap(), 0.25, 1e-15));
        assert!(close(lmko_threshold(3, 0.0).unwrap(), 1.0 / 6.0, 1e-15));
    }

    #[test]
    fn single_run_examples() {
        let r = single_run_parameters(1.0 / 3.0).unwrap();
        assert_eq!(r.c, 8.0 / 9.0);
        assert_eq!(r.s, 7.0 / 9.0);
        let near_zero = single_run_parameters(1e-300).unwrap();
        assert_eq!(
            (near_zero.c, near_zero.s, near_zero.gap),
            (1.0, 2.0 / 3.0, 1.0 / 3.0)
        );
        assert!(close(
            single_run_parameters(0.25).unwrap().gap,
            1.0 / 6.0,
            1e-16
        ));
        assert!(single_run_parameters(0.0).is_err());
    }
}
