use crate::error::Result;
use crate::series::{CoefficientProvider, DomainInterval, IndexRange, Side, TailBound, REL_TOL};

use super::hull::upper_hull;
use super::{
    AlphaLimits, Boundary, LimitStatus, Multiplicity, NewtonPolygon, Provenance, RootList, TropicalRoot, VertexStatus,
};

/// Outcome of the infinite-root analysis on one side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailLimit {
    /// Bounded side, or roots growing without bound.
    NotPresent,
    /// Closed domain endpoint: a root of infinite multiplicity.
    InfiniteRoot { log_alpha: f64, status: LimitStatus },
    /// Limit of the root sequence lying outside the domain.
    Accumulation { log_alpha: f64, status: LimitStatus },
}

impl TailLimit {
    pub fn log_alpha(&self) -> Option<f64> {
        match self {
            TailLimit::NotPresent => None,
            TailLimit::InfiniteRoot { log_alpha, .. } | TailLimit::Accumulation { log_alpha, .. } => Some(*log_alpha),
        }
    }
}

/// Outermost root of a window, with the change since the half window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub log_alpha: f64,
    pub tolerance: f64,
    pub divergent: bool,
}

fn outer_root(provider: &CoefficientProvider, window: IndexRange, side: Side) -> Option<f64> {
    let hull = upper_hull(&provider.points(window));
    if hull.len() < 2 {
        return None;
    }
    let (a, b) = match side {
        Side::Right => (hull[hull.len() - 2], hull[hull.len() - 1]),
        Side::Left => (hull[0], hull[1]),
    };
    Some((a.1 - b.1) / (b.0 - a.0) as f64)
}

/// Estimates the limit of the roots on `side` from the outermost root of
/// `window`, of its inner half and of its inner quarter.
pub fn tail_estimate(provider: &CoefficientProvider, window: IndexRange, side: Side) -> Option<TailEstimate> {
    let shrink = |w: IndexRange| -> IndexRange {
        let half = (w.hi - w.lo) / 2;
        match side {
            Side::Right => IndexRange { lo: w.lo, hi: w.lo + half },
            Side::Left => IndexRange { lo: w.hi - half, hi: w.hi },
        }
    };
    let half = shrink(window);
    let quarter = shrink(half);
    let r = outer_root(provider, window, side)?;
    let rh = outer_root(provider, half, side);
    let rq = outer_root(provider, quarter, side);
    let tolerance = rh.map_or(f64::INFINITY, |h| (r - h).abs());
    let divergent = match (rh, rq) {
        (Some(h), Some(q)) => {
            let d2 = (r - h).abs();
            let d1 = (h - q).abs();
            d2 > 0.0 && d2 > 0.75 * d1
        }
        _ => false,
    };
    Some(TailEstimate { log_alpha: r, tolerance, divergent })
}

fn pinned_limit(provider: &CoefficientProvider, side: Side) -> Option<f64> {
    let Some(TailBound::Geometric { log_c, log_rate }) = provider.envelope().side(side) else { return None };
    let xi = provider.asymptote().side(side)?;
    if xi.is_finite() && (xi - log_c).abs() <= REL_TOL * 1f64.max(xi.abs()) {
        Some(side.sign() as f64 * log_rate)
    } else {
        None
    }
}

/// Outermost segment `(base index, slope)` of the hull on a window.
fn outer_segment(provider: &CoefficientProvider, window: IndexRange, side: Side) -> Option<(i64, f64)> {
    let hull = upper_hull(&provider.points(window));
    if hull.len() < 2 {
        return None;
    }
    let (a, b) = match side {
        Side::Right => (hull[hull.len() - 2], hull[hull.len() - 1]),
        Side::Left => (hull[1], hull[0]),
    };
    Some((a.0, (b.1 - a.1) / (b.0 - a.0) as f64))
}

/// Decides whether the root sequence on `side` ends in an infinite-multiplicity
/// root, accumulates, or is absent.
pub fn detect_infinite_root(provider: &CoefficientProvider, side: Side, poly: &NewtonPolygon) -> TailLimit {
    match poly.boundary(side) {
        Boundary::Bounded => return TailLimit::NotPresent,
        Boundary::Ray { log_alpha, status } => return TailLimit::InfiniteRoot { log_alpha, status },
        Boundary::Open => {}
    }
    if provider.support().end(side).is_some() {
        return TailLimit::NotPresent;
    }
    if let Some(TailBound::ExpType { .. }) = provider.envelope().side(side) {
        return TailLimit::NotPresent;
    }
    if let Some(log_alpha) = pinned_limit(provider, side) {
        return TailLimit::InfiniteRoot { log_alpha, status: LimitStatus::Exact };
    }
    if provider.asymptote().side(side).is_none() {
        // A segment that stays put while the window keeps growing is a ray.
        let grow = |w: IndexRange| w.extended(side == Side::Left, side == Side::Right);
        let w2 = grow(poly.window);
        if let (Some((b2, s2)), Some((b4, s4))) = (outer_segment(provider, w2, side), outer_segment(provider, grow(w2), side)) {
            if b2 == b4 && (s2 - s4).abs() <= REL_TOL * 1f64.max(s2.abs()) && poly.window.contains(b2) {
                return TailLimit::InfiniteRoot {
                    log_alpha: -s4,
                    status: LimitStatus::Estimated { tolerance: (s2 - s4).abs() },
                };
            }
        }
    }
    let Some(est) = tail_estimate(provider, poly.window, side) else { return TailLimit::NotPresent };
    if est.divergent {
        return TailLimit::NotPresent;
    }
    let estimated = LimitStatus::Estimated { tolerance: est.tolerance };
    match provider.asymptote().side(side) {
        Some(xi) if xi.is_finite() => TailLimit::InfiniteRoot { log_alpha: est.log_alpha, status: estimated },
        _ => TailLimit::Accumulation { log_alpha: est.log_alpha, status: estimated },
    }
}

fn endpoint_root(side: Side, log_alpha: f64, status: LimitStatus) -> TropicalRoot {
    TropicalRoot {
        log_value: log_alpha,
        multiplicity: Multiplicity::Infinite,
        provenance: Provenance::DomainEndpoint { side },
        status: match status {
            LimitStatus::Exact => VertexStatus::Certified,
            LimitStatus::Estimated { .. } => VertexStatus::Estimated,
        },
        tolerance: match status {
            LimitStatus::Exact => None,
            LimitStatus::Estimated { tolerance } => Some(tolerance),
        },
    }
}

/// Roots read off the polygon: one per segment, the zero root when the
/// support starts at a positive index, and infinite-multiplicity endpoints.
pub fn roots_from_polygon(poly: &NewtonPolygon, provider: &CoefficientProvider) -> Result<RootList> {
    let mut segments: Vec<TropicalRoot> = poly
        .vertices
        .windows(2)
        .map(|w| TropicalRoot {
            log_value: (w[0].log_coeff - w[1].log_coeff) / (w[1].index - w[0].index) as f64,
            multiplicity: Multiplicity::Finite((w[1].index - w[0].index) as u64),
            provenance: Provenance::HullSegment { left_index: w[0].index, right_index: w[1].index },
            status: w[0].status.max(w[1].status),
            tolerance: None,
        })
        .collect();

    let mut ends: [Option<TropicalRoot>; 2] = [None, None];
    for (slot, side) in [Side::Left, Side::Right].into_iter().enumerate() {
        if let TailLimit::InfiniteRoot { log_alpha, status } = detect_infinite_root(provider, side, poly) {
            if poly.boundary(side) == Boundary::Open {
                // Window segments along the ray are truncations of it.
                let tol = (REL_TOL * 1f64.max(log_alpha.abs())).max(status.tolerance());
                match side {
                    Side::Right => {
                        while segments.last().is_some_and(|r| (r.log_value - log_alpha).abs() <= tol) {
                            segments.pop();
                        }
                    }
                    Side::Left => {
                        while segments.first().is_some_and(|r| (r.log_value - log_alpha).abs() <= tol) {
                            segments.remove(0);
                        }
                    }
                }
            }
            ends[slot] = Some(endpoint_root(side, log_alpha, status));
        }
    }

    let mut roots = Vec::with_capacity(segments.len() + 3);
    if poly.left == Boundary::Bounded {
        if let Some(first) = poly.vertices.first().filter(|v| v.index >= 1) {
            roots.push(TropicalRoot {
                log_value: f64::NEG_INFINITY,
                multiplicity: Multiplicity::Finite(first.index as u64),
                provenance: Provenance::ZeroRoot,
                status: VertexStatus::Certified,
                tolerance: None,
            });
        }
    }
    roots.extend(ends[0]);
    roots.extend(segments);
    roots.extend(ends[1]);
    RootList::new(roots)
}

/// The two limits of the root sequence.
pub fn alpha_limits(roots: &RootList, provider: &CoefficientProvider) -> AlphaLimits {
    let window = {
        let idx: Vec<(i64, i64)> = roots
            .segments()
            .filter_map(|r| match r.provenance {
                Provenance::HullSegment { left_index, right_index } => Some((left_index, right_index)),
                _ => None,
            })
            .collect();
        match (idx.first(), idx.last()) {
            (Some(a), Some(b)) => IndexRange::new(a.0, b.1).ok(),
            _ => None,
        }
    };
    let limit = |side: Side| -> (f64, LimitStatus) {
        let infinite = side.sign() as f64 * f64::INFINITY;
        if let Some(r) = roots.endpoint(side) {
            let status = match r.tolerance {
                Some(tolerance) => LimitStatus::Estimated { tolerance },
                None => LimitStatus::Exact,
            };
            return (r.log_value, status);
        }
        if provider.support().end(side).is_some() {
            return (infinite, LimitStatus::Exact);
        }
        if let Some(TailBound::ExpType { .. }) = provider.envelope().side(side) {
            return (infinite, LimitStatus::Exact);
        }
        if let Some(v) = pinned_limit(provider, side) {
            return (v, LimitStatus::Exact);
        }
        match window.and_then(|w| tail_estimate(provider, w, side)) {
            Some(est) if !est.divergent => (est.log_alpha, LimitStatus::Estimated { tolerance: est.tolerance }),
            _ => (infinite, LimitStatus::Estimated { tolerance: f64::INFINITY }),
        }
    };
    let (alpha_minus_log, minus_status) = limit(Side::Left);
    let (alpha_plus_log, plus_status) = limit(Side::Right);
    AlphaLimits { alpha_minus_log, alpha_plus_log, minus_status, plus_status }
}

/// Log-domain domain of the tropical series: between the limits, closed at an
/// infinite-multiplicity root.
pub fn domain_interval(limits: &AlphaLimits, roots: &RootList) -> DomainInterval {
    DomainInterval::new(
        limits.alpha_minus_log,
        limits.alpha_plus_log,
        roots.endpoint(Side::Left).is_some(),
        roots.endpoint(Side::Right).is_some(),
    )
}

/// `j,log_b,on_hull` rows over the polygon window.
pub fn polygon_csv(poly: &NewtonPolygon, provider: &CoefficientProvider) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["j", "log_b", "on_hull"])?;
    for j in poly.window.iter() {
        let y = provider.log_coeff(j);
        let h = poly.height_at(j);
        let on_hull = y.is_finite() && h.is_finite() && (y - h).abs() <= REL_TOL * 1f64.max(y.abs()).max(h.abs());
        let y_text = if y.is_finite() { y.to_string() } else { "-inf".to_string() };
        w.write_record([j.to_string(), y_text, on_hull.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::{certify_window, hull_finite};
    use crate::series::Generator;

    #[test]
    fn rational_toy_has_only_infinite_roots() {
        let p = CoefficientProvider::generator(Generator::RationalToy);
        let poly = certify_window(&p, IndexRange::new(-40, 40).unwrap()).unwrap();
        let roots = roots_from_polygon(&poly, &p).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| r.multiplicity == Multiplicity::Infinite));
        let lim = alpha_limits(&roots, &p);
        assert!((lim.alpha_minus_log + 3f64.ln()).abs() < 1e-12);
        assert!((lim.alpha_plus_log - 2f64.ln()).abs() < 1e-12);
        assert_eq!(lim.minus_status, LimitStatus::Exact);
    }

    #[test]
    fn rational_toy_without_metadata_detects_rays() {
        let p = CoefficientProvider::generator(Generator::RationalToy).without_metadata();
        let poly = certify_window(&p, IndexRange::new(-40, 40).unwrap()).unwrap();
        let roots = roots_from_polygon(&poly, &p).unwrap();
        assert_eq!(roots.len(), 2, "{roots:?}");
        assert!(roots.iter().all(|r| r.status == VertexStatus::Estimated), "{roots:?}");
    }

    #[test]
    fn polynomial_has_no_tail_root() {
        let p = CoefficientProvider::explicit([(0, 0.0), (1, 2.0), (3, 0.0)]).unwrap();
        let poly = hull_finite(&p.points(IndexRange::new(0, 3).unwrap())).unwrap();
        assert_eq!(detect_infinite_root(&p, Side::Right, &poly), TailLimit::NotPresent);
        let lim = alpha_limits(&roots_from_polygon(&poly, &p).unwrap(), &p);
        assert_eq!(lim.alpha_minus_log, f64::NEG_INFINITY);
        assert_eq!(lim.alpha_plus_log, f64::INFINITY);
    }

    #[test]
    fn polynomial_multiplicities_add_up_to_degree() {
        let p = CoefficientProvider::explicit([(2, 0.0), (3, 5.0), (7, 1.0), (9, -4.0)]).unwrap();
        let poly = hull_finite(&p.points(IndexRange::new(2, 9).unwrap())).unwrap();
        let roots = roots_from_polygon(&poly, &p).unwrap();
        let total: u64 = roots
            .iter()
            .map(|r| match r.multiplicity {
                Multiplicity::Finite(m) => m,
                Multiplicity::Infinite => unreachable!(),
            })
            .sum();
        assert_eq!(total, 9);
        assert_eq!(roots.zero_root().unwrap().multiplicity, Multiplicity::Finite(2));
    }

    #[test]
    fn harmonic_limit_is_estimated() {
        let p = CoefficientProvider::generator(Generator::HarmonicExp);
        let poly = certify_window(&p, IndexRange::new(1, 200).unwrap()).unwrap();
        match detect_infinite_root(&p, Side::Right, &poly) {
            TailLimit::Accumulation { log_alpha, status: LimitStatus::Estimated { tolerance } } => {
                assert!(log_alpha.abs() <= 1.0 / 200.0 + 1e-12);
                assert!((tolerance - 1.0 / 200.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        let roots = roots_from_polygon(&poly, &p).unwrap();
        let lim = alpha_limits(&roots, &p);
        assert_eq!(lim.alpha_minus_log, f64::NEG_INFINITY);
        assert!((lim.alpha_plus_log - 0.0).abs() <= lim.plus_status.tolerance() + 1e-12);
    }

    #[test]
    fn csv_marks_collinear_points() {
        let p = CoefficientProvider::generator(Generator::RationalToy);
        let poly = certify_window(&p, IndexRange::new(-8, 8).unwrap()).unwrap();
        let text = polygon_csv(&poly, &p).unwrap();
        assert_eq!(text.lines().count(), 18);
        assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
    }
}
