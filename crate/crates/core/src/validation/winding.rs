use std::f64::consts::TAU;

use num_complex::Complex64;

use super::function::{ArgumentSource, ScalarFunction};
use crate::error::{Error, Result};

/// Largest node count tried by [`count_zeros_minus_poles`].
pub const MAX_WINDING_NODES: usize = 1 << 16;
const START_NODES: usize = 64;

fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    if v.len() <= 16 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// Trapezoidal estimate of `(1/2πi)∮ f'/f` on `|z| = e^{radius_log}`, or `None`
/// when `f'/f` blows up at a node.
fn winding_estimate(f: &dyn ArgumentSource, radius_log: f64, nodes: usize) -> Option<Complex64> {
    let r = radius_log.exp();
    let terms: Option<Vec<Complex64>> = (0..nodes)
        .map(|k| {
            // Half-step offset keeps nodes off the real axis.
            let z = Complex64::from_polar(r, TAU * (k as f64 + 0.5) / nodes as f64);
            f.log_derivative(z).map(|q| q * z)
        })
        .collect();
    Some(pairwise_sum(&terms?) / nodes as f64)
}

/// Zeros minus poles of `f` inside the circle, by the argument principle.
/// Nodes double from `max(nodes, 64)` until two consecutive rounded counts agree
/// and the estimate sits within 0.25 of that integer.
pub fn count_zeros_minus_poles(f: &dyn ArgumentSource, radius_log: f64, nodes: usize) -> Result<i64> {
    let mut n = nodes.max(START_NODES);
    let mut previous: Option<i64> = None;
    while n <= MAX_WINDING_NODES {
        if let Some(s) = winding_estimate(f, radius_log, n) {
            let count = s.re.round();
            let settled = (s.re - count).abs() < 0.25 && s.im.abs() < 0.25;
            if settled && previous == Some(count as i64) {
                return Ok(count as i64);
            }
            previous = settled.then_some(count as i64);
        } else {
            previous = None;
        }
        n *= 2;
    }
    Err(Error::WindingNonConvergence { radius_log, nodes: MAX_WINDING_NODES })
}

/// Like [`count_zeros_minus_poles`], retrying on circles nudged by `±1e-3` in
/// log-radius when a zero sits too close to the requested one.
pub fn count_near(f: &dyn ArgumentSource, radius_log: f64) -> Result<i64> {
    let mut last = None;
    for shift in [0.0, 1e-3, -1e-3, 3e-3, -3e-3] {
        match count_zeros_minus_poles(f, radius_log + shift, 0) {
            Ok(c) => return Ok(c),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn same_root(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-8 * a.norm().max(1.0)
}

/// Zeros of `f` in the closed annulus `inner ≤ |z| ≤ outer` by Newton iteration
/// from a polar grid, checked against the winding counts on both circles.
/// A zero `inner_log` of `-inf` means a disk.
pub fn refine_roots(f: &ScalarFunction, inner_log: f64, outer_log: f64, grid_density: usize) -> Result<Vec<Complex64>> {
    let density = grid_density.max(4);
    let inner = inner_log.exp();
    let outer = outer_log.exp();
    let lo = if inner_log.is_finite() { inner_log } else { outer_log - 8.0 };
    let expected = count_near(f, outer_log)? - if inner_log.is_finite() { count_near(f, inner_log)? } else { 0 };
    let inside = |z: Complex64| {
        let m = z.norm();
        m >= inner * (1.0 - 1e-12) && m <= outer * (1.0 + 1e-12)
    };
    let mut found: Vec<Complex64> = Vec::new();
    let angles = 4 * density;
    for a in 0..density {
        let r = (lo + (outer_log - lo) * (a as f64 + 0.5) / density as f64).exp();
        for b in 0..angles {
            let mut z = Complex64::from_polar(r, TAU * (b as f64 + 0.25) / angles as f64);
            for _ in 0..50 {
                let (v, dv) = f.eval(z);
                let step = v / dv;
                if !step.is_finite() {
                    break;
                }
                z -= step;
                if step.norm() <= 1e-12 * z.norm().max(1.0) {
                    if inside(z) && !found.iter().any(|&w| same_root(w, z)) {
                        found.push(z);
                    }
                    break;
                }
            }
        }
    }
    found.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    if found.len() as i64 != expected {
        return Err(Error::RootCountMismatch { found: found.len(), expected });
    }
    Ok(found)
}
