//! Exhaustive comparison of exact tails against their closed-form bounds.

use serde::{Deserialize, Serialize};

use super::Row;
use crate::bounds::{
    exact_binomial_cdf, exact_binomial_sf, exact_hypergeom_cdf, exact_hypergeom_sf,
    hoeffding_lower_tail, hoeffding_upper_tail, hypergeom_tail_high, hypergeom_tail_low,
};
use crate::error::{invalid, Result};

/// Points at which every valid integer `k` (or `lambda`) is checked.
///
/// Hypergeometric populations use `K = round(a Npop)` and `n = round(b Npop)`
/// for every pair `(a, b)` of `hypergeom_fractions`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TailGrid {
    pub binomial_n: Vec<u64>,
    pub binomial_p: Vec<f64>,
    pub hypergeom_npop: Vec<u64>,
    pub hypergeom_fractions: Vec<f64>,
    /// A point violates its bound when `exact - bound` exceeds this.
    pub tolerance: f64,
}

impl Default for TailGrid {
    fn default() -> Self {
        Self {
            binomial_n: (1..=20).map(|i| 10 * i).collect(),
            binomial_p: (1..=9).map(|i| i as f64 / 10.0).collect(),
            hypergeom_npop: vec![20, 40, 60, 80, 100, 150, 200],
            hypergeom_fractions: vec![0.1, 0.25, 0.5, 0.75, 0.9],
            tolerance: 1e-12,
        }
    }
}

impl TailGrid {
    pub fn validate(&self) -> Result<()> {
        if self.binomial_n.contains(&0) {
            return Err(invalid("binomial_n", "sizes must be positive"));
        }
        if let Some(p) = self.binomial_p.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(invalid("binomial_p", format!("{p} is not in [0, 1]")));
        }
        if self.hypergeom_npop.contains(&0) {
            return Err(invalid("hypergeom_npop", "populations must be positive"));
        }
        if let Some(f) = self
            .hypergeom_fractions
            .iter()
            .find(|f| !(0.0..=1.0).contains(*f))
        {
            return Err(invalid(
                "hypergeom_fractions",
                format!("{f} is not in [0, 1]"),
            ));
        }
        if !(self.tolerance >= 0.0) {
            return Err(invalid("tolerance", "must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFamilyResult {
    pub family: String,
    pub points: u64,
    pub violations: u64,
    /// Largest `exact / bound`; at most 1 when the bound holds.
    pub max_ratio: f64,
    /// Largest `exact - bound`; nonpositive when the bound holds.
    pub max_excess: f64,
}

impl TailFamilyResult {
    fn new(family: &str) -> Self {
        Self {
            family: family.into(),
            points: 0,
            violations: 0,
            max_ratio: 0.0,
            max_excess: f64::NEG_INFINITY,
        }
    }

    fn record(&mut self, exact: f64, bound: f64, tolerance: f64) {
        self.points += 1;
        let excess = exact - bound;
        self.violations += u64::from(excess > tolerance);
        self.max_excess = self.max_excess.max(excess);
        if bound > 0.0 {
            self.max_ratio = self.max_ratio.max(exact / bound);
        }
    }

    pub fn row(&self) -> Row {
        Row {
            experiment: "tail-bounds".into(),
            n_rounds: None,
            alpha: None,
            delta: None,
            epsilon: None,
            w: None,
            p_noise: None,
            strategy: self.family.clone(),
            trials: self.points,
            successes: self.violations,
            estimate: self.max_ratio,
            ci_low: None,
            ci_high: None,
            pass: Some(self.violations == 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub grid: TailGrid,
    pub families: Vec<TailFamilyResult>,
}

impl TailReport {
    pub fn points(&self) -> u64 {
        self.families.iter().map(|f| f.points).sum()
    }

    pub fn violations(&self) -> u64 {
        self.families.iter().map(|f| f.violations).sum()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }
}

// Integers strictly below / above `mean`, robust to `mean` being integral
// only up to rounding.
fn below(mean: f64) -> i64 {
    (mean + 1e-9).floor() as i64
}

fn above(mean: f64) -> i64 {
    (mean - 1e-9).ceil() as i64
}

/// Checks both Hoeffding tails and both hypergeometric tails at every grid
/// point inside the respective precondition.
pub fn tail_bound_validation(grid: &TailGrid) -> Result<TailReport> {
    grid.validate()?;
    let tol = grid.tolerance;
    let mut low = TailFamilyResult::new("hoeffding-lower");
    let mut high = TailFamilyResult::new("hoeffding-upper");
    for &n in &grid.binomial_n {
        for &p in &grid.binomial_p {
            let mean = n as f64 * p;
            for k in 0..=below(mean).min(n as i64) {
                low.record(
                    exact_binomial_cdf(n, p, k)?,
                    hoeffding_lower_tail(n, p, k as f64)?,
                    tol,
                );
            }
            for k in above(mean).max(0)..=n as i64 {
                high.record(
                    exact_binomial_sf(n, p, k)?,
                    hoeffding_upper_tail(n, p, k as f64)?,
                    tol,
                );
            }
        }
    }

    let mut hlow = TailFamilyResult::new("hypergeometric-lower");
    let mut hhigh = TailFamilyResult::new("hypergeometric-upper");
    for &npop in &grid.hypergeom_npop {
        for &a in &grid.hypergeom_fractions {
            for &b in &grid.hypergeom_fractions {
                let marked = (a * npop as f64).round() as u64;
                let draws = (b * npop as f64).round() as u64;
                let mean = draws as f64 * marked as f64 / npop as f64;
                // lambda ranges over the open intervals (0, mean) and (mean, n]
                let strictly_below = if (mean - mean.round()).abs() < 1e-9 {
                    mean.round() as i64 - 1
                } else {
                    mean.floor() as i64
                };
                for lambda in 1..=strictly_below {
                    hlow.record(
                        exact_hypergeom_cdf(npop, marked, draws, lambda)?,
                        hypergeom_tail_low(npop, marked, draws, lambda as f64)?,
                        tol,
                    );
                }
                let strictly_above =
                    strictly_below + 1 + i64::from((mean - mean.round()).abs() < 1e-9);
                for lambda in strictly_above.max(1)..=draws as i64 {
                    hhigh.record(
                        exact_hypergeom_sf(npop, marked, draws, lambda)?,
                        hypergeom_tail_high(npop, marked, draws, lambda as f64)?,
                        tol,
                    );
                }
            }
        }
    }
    Ok(TailReport {
        grid: grid.clone(),
        families: vec![low, high, hlow, hhigh],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_is_large_and_clean() {
        let r = tail_bound_validation(&TailGrid::default()).unwrap();
        assert!(r.points() >= 10_000, "{}", r.points());
        assert!(r.passed(), "{:?}", r.families);
        assert!(r
            .families
            .iter()
            .all(|f| f.points > 0 && f.max_ratio <= 1.0));
    }

    #[test]
    fn anchors() {
        let exact = exact_binomial_cdf(100, 0.5, 40).unwrap();
        let bound = hoeffding_lower_tail(100, 0.5, 40.0).unwrap();
        assert!(exact <= bound && bound < 0.135336);
        let exact = exact_hypergeom_cdf(20, 10, 10, 2).unwrap();
        let bound = hypergeom_tail_low(20, 10, 10, 2.0).unwrap();
        assert!(exact <= bound && bound < 0.165299);
        // k = np: the bound is exactly 1
        assert_eq!(hoeffding_lower_tail(100, 0.5, 50.0).unwrap(), 1.0);
    }

    #[test]
    fn zero_tolerance_violation_is_caught() {
        let mut f = TailFamilyResult::new("x");
        f.record(0.5, 0.4, 1e-12);
        f.record(0.3, 0.4, 1e-12);
        assert_eq!((f.points, f.violations), (2, 1));
        assert!(!f.row().pass.unwrap());
    }

    #[test]
    fn rejects_bad_grid() {
        let grid = TailGrid {
            binomial_p: vec![1.5],
            ..TailGrid::default()
        };
        assert!(tail_bound_validation(&grid).is_err());
    }
}
