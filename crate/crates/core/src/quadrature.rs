//! Node counts for trapezoidal contour integrals on a circle, from the
//! filter `1/(1 − (z/r)^N)` the rule applies to the spectrum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest node count [`advise_nodes`] will return.
pub const MAX_NODES: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterQuery {
    /// `log r` of the contour.
    pub contour_radius_log: f64,
    /// `log R` of the closest eigenvalue that must be filtered out.
    pub nearest_excluded_log: f64,
    pub epsilon: f64,
}

impl FilterQuery {
    pub fn new(contour_radius_log: f64, nearest_excluded_log: f64, epsilon: f64) -> Result<Self> {
        if !(nearest_excluded_log > contour_radius_log) {
            return Err(Error::InvalidQuery("excluded radius must exceed the contour radius"));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidQuery("epsilon must lie in (0, 1)"));
        }
        Ok(FilterQuery { contour_radius_log, nearest_excluded_log, epsilon })
    }
}

/// `|1/(1 − (z/r)^N)|` for `|z| > r`, as `e^{−Nd}/(1 − e^{−Nd})` with
/// `d = log|z| − log r`. Inside the contour the modulus on the positive axis
/// is returned.
pub fn filter_magnitude(query: &FilterQuery, nodes: u64, z_log: f64) -> Result<f64> {
    if nodes == 0 {
        return Err(Error::InvalidQuery("node count must be positive"));
    }
    let d = z_log - query.contour_radius_log;
    if d == 0.0 {
        return Err(Error::FilterPole);
    }
    let x = nodes as f64 * d;
    if x > 0.0 {
        Ok((-x).exp() / -(-x).exp_m1())
    } else {
        Ok(1.0 / -x.exp_m1())
    }
}

/// Smallest `N` with the filter at the excluded radius at most `epsilon`.
pub fn advise_nodes(query: &FilterQuery) -> Result<u64> {
    let d = query.nearest_excluded_log - query.contour_radius_log;
    let at = |n: u64| filter_magnitude(query, n, query.nearest_excluded_log);
    // Filter ≤ ε exactly when N·d ≥ ln(1 + 1/ε).
    let guess = ((1.0 + 1.0 / query.epsilon).ln() / d).ceil();
    let mut n = if guess.is_finite() { (guess as u64).clamp(1, MAX_NODES) } else { MAX_NODES };
    while n < MAX_NODES && at(n)? > query.epsilon {
        n += 1;
    }
    while n > 1 && at(n - 1)? <= query.epsilon {
        n -= 1;
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(ratio: f64, eps: f64) -> FilterQuery {
        FilterQuery::new(0.0, ratio.ln(), eps).unwrap()
    }

    #[test]
    fn direct_values() {
        let m = filter_magnitude(&q(2.0, 0.5), 10, 2f64.ln()).unwrap();
        assert!((m - 1.0 / 1023.0).abs() < 1e-17);
        let m = filter_magnitude(&q(6.25, 0.5), 18, 6.25f64.ln()).unwrap();
        assert!((m - 1.0 / (6.25f64.powi(18) - 1.0)).abs() < 1e-28);
        assert!(m > 4e-15 && m < 6e-15);
    }

    #[test]
    fn pole_is_rejected() {
        assert!(matches!(filter_magnitude(&q(2.0, 0.5), 3, 0.0), Err(Error::FilterPole)));
    }

    #[test]
    fn advice_examples() {
        assert_eq!(advise_nodes(&q(2.0, 0.5)).unwrap(), 2);
        assert_eq!(advise_nodes(&q(6.25, 1e-15)).unwrap(), 19);
        assert_eq!(advise_nodes(&q(1e300, 1e-15)).unwrap(), 1);
    }

    #[test]
    fn filter_vanishes_with_more_nodes() {
        let query = q(1.5, 0.1);
        let small = filter_magnitude(&query, 400, query.nearest_excluded_log).unwrap();
        assert!(small < 1e-60);
    }

    #[test]
    fn rejects_bad_queries() {
        assert!(FilterQuery::new(1.0, 1.0, 0.1).is_err());
        assert!(FilterQuery::new(0.0, 1.0, 1.0).is_err());
    }
}
