//! Incremental Newton polygon updates when a Laurent polynomial is added to
//! the series.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polygon::{
    alpha_limits, certify_window, EXTENSION_CAP, orientation, roots_from_polygon, upper_hull, Boundary, LimitStatus, NewtonPolygon,
    Orientation, PolygonVertex, VertexStatus,
};
use crate::series::{CoefficientProvider, IndexRange, Side, TailBound, REL_TOL};

/// Adds `exp(log_gamma) * z^index` to the series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonomialUpdate {
    #[serde(rename = "j")]
    pub index: i64,
    pub log_gamma: f64,
}

impl MonomialUpdate {
    pub fn new(index: i64, log_gamma: f64) -> Result<Self> {
        if !log_gamma.is_finite() {
            return Err(Error::InvalidCoefficient { index, reason: "update coefficient must be finite" });
        }
        Ok(MonomialUpdate { index, log_gamma })
    }
}

/// How the update coefficient meets the existing one at its index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combine {
    /// The coefficient becomes `gamma`.
    #[default]
    Replace,
    /// Tropical sum: the larger of the two.
    Max,
}

impl FromStr for Combine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "replace" => Ok(Combine::Replace),
            "max" => Ok(Combine::Max),
            _ => Err(Error::InvalidQuery("combine must be `replace` or `max`")),
        }
    }
}

impl fmt::Display for Combine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Combine::Replace => "replace",
            Combine::Max => "max",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruncationSide {
    Left,
    Right,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum UpdateOutcome {
    /// Finitely many vertices changed.
    FiniteDelta { removed: Vec<i64>, inserted: bool },
    /// The scan never terminates: the new node starts an infinite ray.
    InfiniteTruncation { side: TruncationSide, kept_vertex: i64 },
}

#[derive(Debug, Clone)]
pub struct UpdateResult {
    pub polygon: NewtonPolygon,
    pub outcome: UpdateOutcome,
    /// Coefficients with the update applied.
    pub provider: CoefficientProvider,
    /// Slope comparisons made by the scans.
    pub comparisons: usize,
}

#[derive(Debug, Clone)]
pub struct SequenceResult {
    pub polygon: NewtonPolygon,
    pub outcomes: Vec<UpdateOutcome>,
    pub provider: CoefficientProvider,
}

/// `y + j * log_alpha`, constant along a line of root `log_alpha`.
fn level(p: (i64, f64), log_alpha: f64) -> f64 {
    p.1 + p.0 as f64 * log_alpha
}

fn tol_of(x: f64) -> f64 {
    REL_TOL * 1f64.max(x.abs())
}

/// Limit of the roots on `side`, `None` when it is infinite.
fn side_limit(poly: &NewtonPolygon, provider: &CoefficientProvider, side: Side) -> Result<Option<(f64, f64)>> {
    if let Boundary::Ray { log_alpha, status } = poly.boundary(side) {
        return Ok(Some((log_alpha, status.tolerance())));
    }
    let limits = alpha_limits(&roots_from_polygon(poly, provider)?, provider);
    let (v, status) = limits.side(side);
    Ok(v.is_finite().then_some((v, status.tolerance())))
}

/// Whether the tail on `side` eventually rises above the line of the limit
/// root through `node`, which makes the scan terminate.
fn scan_terminates(poly: &NewtonPolygon, provider: &CoefficientProvider, side: Side, node: (i64, f64)) -> Result<bool> {
    let Some((la, tol_a)) = side_limit(poly, provider, side)? else { return Ok(true) };
    let c_node = level(node, la);
    let tol = tol_of(c_node) + node.0.unsigned_abs() as f64 * tol_a;
    if let Some(xi) = provider.asymptote().side(side) {
        if xi == f64::INFINITY {
            return Ok(true);
        }
        if tol_a == 0.0 || (xi - c_node).abs() > tol {
            // Equality belongs to the truncation case.
            return Ok(xi > c_node + tol_of(c_node));
        }
        return Err(Error::Undecidable(side));
    }
    let beyond = |j: i64| side.sign() * (j - node.0) > 0;
    let best = poly
        .vertices
        .iter()
        .filter(|v| beyond(v.index))
        .map(|v| level(v.point(), la) - v.index.unsigned_abs() as f64 * tol_a)
        .fold(f64::NEG_INFINITY, f64::max);
    if best > c_node + tol {
        return Ok(true);
    }
    if let Some(TailBound::Geometric { log_c, log_rate }) = provider.envelope().side(side) {
        let rate = side.sign() as f64 * log_rate;
        if (rate - la).abs() <= tol_a + tol_of(la) && *log_c <= c_node + tol {
            return Ok(false);
        }
    }
    Err(Error::Undecidable(side))
}

enum SideScan {
    /// Number of vertices removed from the outward list.
    Stopped(usize),
    /// Every outward vertex goes; the new node carries a ray.
    Truncated { log_alpha: f64, status: LimitStatus },
    /// The scan ran into the open window edge and continues beyond it.
    Extend,
}

fn scan_side(
    poly: &NewtonPolygon,
    provider: &CoefficientProvider,
    side: Side,
    node: (i64, f64),
    outward: &[PolygonVertex],
    comparisons: &mut usize,
) -> Result<SideScan> {
    let mut k = 0;
    while k + 1 < outward.len() {
        *comparisons += 1;
        let (v, next) = (outward[k].point(), outward[k + 1].point());
        let o = match side {
            Side::Right => orientation(node, v, next),
            Side::Left => orientation(next, v, node),
        };
        if o == Orientation::Above {
            return Ok(SideScan::Stopped(k));
        }
        k += 1;
    }
    match poly.boundary(side) {
        Boundary::Bounded => Ok(SideScan::Stopped(k)),
        Boundary::Ray { log_alpha, status } => {
            let c_node = level(node, log_alpha);
            if let Some(v) = outward.last() {
                *comparisons += 1;
                if level(v.point(), log_alpha) > c_node + tol_of(c_node) {
                    return Ok(SideScan::Stopped(k));
                }
            }
            Ok(SideScan::Truncated { log_alpha, status })
        }
        Boundary::Open => {
            if scan_terminates(poly, provider, side, node)? {
                Ok(SideScan::Extend)
            } else {
                let (log_alpha, tolerance) =
                    side_limit(poly, provider, side)?.expect("a truncating side has a finite limit");
                let status =
                    if tolerance == 0.0 { LimitStatus::Exact } else { LimitStatus::Estimated { tolerance } };
                Ok(SideScan::Truncated { log_alpha, status })
            }
        }
    }
}

fn end_status(b: Boundary) -> VertexStatus {
    match b {
        Boundary::Bounded | Boundary::Ray { status: LimitStatus::Exact, .. } => VertexStatus::Certified,
        Boundary::Ray { .. } => VertexStatus::Estimated,
        Boundary::Open => VertexStatus::Uncertified,
    }
}

fn refresh_collapsed(poly: &mut NewtonPolygon, provider: &CoefficientProvider) {
    poly.collapsed = provider
        .points(poly.window)
        .into_iter()
        .filter(|p| p.1.is_finite())
        .filter(|p| poly.vertex_at(p.0).is_none() && (p.1 - poly.height_at(p.0)).abs() <= tol_of(p.1))
        .map(|p| p.0)
        .collect();
}

fn removed_between(old: &NewtonPolygon, new: &NewtonPolygon, skip: i64) -> Vec<i64> {
    old.vertices
        .iter()
        .map(|v| v.index)
        .filter(|&j| j != skip && new.vertex_at(j).is_none())
        .collect()
}

/// Drops everything outward of `m` on `side` and hangs a ray from `m`.
fn truncate(poly: &mut NewtonPolygon, side: Side, m: i64, log_alpha: f64, status: LimitStatus) {
    poly.vertices.retain(|v| side.sign() * (v.index - m) <= 0);
    *poly.boundary_mut(side) = Boundary::Ray { log_alpha, status };
}

/// Applies one monomial update to a polygon of `provider`.
pub fn update_with_monomial(
    poly: &NewtonPolygon,
    provider: &CoefficientProvider,
    upd: MonomialUpdate,
    combine: Combine,
) -> Result<UpdateResult> {
    let m = upd.index;
    MonomialUpdate::new(m, upd.log_gamma)?;
    let old_y = provider.log_coeff(m);
    let new_y = match combine {
        Combine::Replace => upd.log_gamma,
        Combine::Max => upd.log_gamma.max(old_y),
    };
    let updated = provider.with_overrides(&BTreeMap::from([(m, new_y)]))?;

    // Bring the index into the window; an open side has to be certified that far.
    let mut base = poly.clone();
    if !base.window.contains(m) {
        let side = if m < base.window.lo { Side::Left } else { Side::Right };
        let window = IndexRange::new(base.window.lo.min(m), base.window.hi.max(m))?;
        if base.boundary(side) == Boundary::Open {
            base = certify_window(provider, window)?;
        } else {
            base.window = window;
        }
    }

    let unchanged = |base: NewtonPolygon, updated: CoefficientProvider| {
        let mut polygon = base;
        refresh_collapsed(&mut polygon, &updated);
        UpdateResult {
            polygon,
            outcome: UpdateOutcome::FiniteDelta { removed: Vec::new(), inserted: false },
            provider: updated,
            comparisons: 0,
        }
    };

    let existing = base.vertex_at(m).copied();
    let height = base.height_at(m);
    match existing {
        Some(v) if new_y == v.log_coeff => return Ok(unchanged(base, updated)),
        Some(v) if new_y < v.log_coeff => return lower_vertex(&base, &updated, v),
        None if height.is_finite() && new_y <= height + tol_of(height) => return Ok(unchanged(base, updated)),
        _ => {}
    }

    let node = (m, new_y);
    let left_out: Vec<PolygonVertex> = base.vertices.iter().rev().filter(|v| v.index < m).copied().collect();
    let right_out: Vec<PolygonVertex> = base.vertices.iter().filter(|v| v.index > m).copied().collect();
    let mut comparisons = 0;
    let left = scan_side(&base, provider, Side::Left, node, &left_out, &mut comparisons)?;
    let right = scan_side(&base, provider, Side::Right, node, &right_out, &mut comparisons)?;

    if matches!(left, SideScan::Extend) || matches!(right, SideScan::Extend) {
        return extend_and_recertify(&base, updated, m, &left, &right, comparisons);
    }

    let mut polygon = base.clone();
    let mut truncated = Vec::new();
    let mut vertices: Vec<PolygonVertex> = match left {
        SideScan::Stopped(k) => left_out[k..].iter().rev().copied().collect(),
        _ => Vec::new(),
    };
    let right_kept: Vec<PolygonVertex> = match right {
        SideScan::Stopped(k) => right_out[k..].to_vec(),
        _ => Vec::new(),
    };
    let inner_left = vertices.last().map(|v| v.status);
    let inner_right = right_kept.first().map(|v| v.status);
    for (side, scan) in [(Side::Left, &left), (Side::Right, &right)] {
        if let SideScan::Truncated { log_alpha, status } = *scan {
            *polygon.boundary_mut(side) = Boundary::Ray { log_alpha, status };
            truncated.push(side);
        }
    }
    let status = inner_left
        .unwrap_or_else(|| end_status(polygon.left))
        .min(inner_right.unwrap_or_else(|| end_status(polygon.right)));
    vertices.push(PolygonVertex { index: m, log_coeff: new_y, status });
    vertices.extend(right_kept);
    polygon.vertices = vertices;
    refresh_collapsed(&mut polygon, &updated);

    let outcome = match truncated.as_slice() {
        [] => UpdateOutcome::FiniteDelta { removed: removed_between(&base, &polygon, m), inserted: true },
        [side] => UpdateOutcome::InfiniteTruncation {
            side: match side {
                Side::Left => TruncationSide::Left,
                Side::Right => TruncationSide::Right,
            },
            kept_vertex: m,
        },
        _ => UpdateOutcome::InfiniteTruncation { side: TruncationSide::Both, kept_vertex: m },
    };
    Ok(UpdateResult { polygon, outcome, provider: updated, comparisons })
}

/// The scan on some side continues past the window: recompute on a window
/// wide enough for the new node to meet a vertex beyond it.
fn extend_and_recertify(
    base: &NewtonPolygon,
    updated: CoefficientProvider,
    m: i64,
    left: &SideScan,
    right: &SideScan,
    comparisons: usize,
) -> Result<UpdateResult> {
    let grow_left = matches!(left, SideScan::Extend);
    let grow_right = matches!(right, SideScan::Extend);
    let mut window = base.window;
    let mut polygon = certify_window(&updated, window)?;
    let reaches = |p: &NewtonPolygon, side: Side| {
        let end = p.window.end(side);
        p.vertices.iter().any(|v| side.sign() * (v.index - m) > 0 && v.index != end)
    };
    while (grow_left && polygon.left_open() && !reaches(&polygon, Side::Left))
        || (grow_right && polygon.right_open() && !reaches(&polygon, Side::Right))
    {
        window = window.extended(grow_left, grow_right);
        if window.hi - window.lo > EXTENSION_CAP {
            break;
        }
        polygon = certify_window(&updated, window)?;
    }
    let mut truncated = Vec::new();
    for (side, scan) in [(Side::Left, left), (Side::Right, right)] {
        if let SideScan::Truncated { log_alpha, status } = *scan {
            truncate(&mut polygon, side, m, log_alpha, status);
            truncated.push(side);
        }
    }
    refresh_collapsed(&mut polygon, &updated);
    let outcome = match truncated.as_slice() {
        [Side::Left] => UpdateOutcome::InfiniteTruncation { side: TruncationSide::Left, kept_vertex: m },
        [Side::Right] => UpdateOutcome::InfiniteTruncation { side: TruncationSide::Right, kept_vertex: m },
        _ => UpdateOutcome::FiniteDelta {
            removed: removed_between(base, &polygon, m),
            inserted: polygon.vertex_at(m).is_some(),
        },
    };
    Ok(UpdateResult { polygon, outcome, provider: updated, comparisons })
}

/// A vertex coefficient went down: rebuild the hull between its neighbours.
fn lower_vertex(base: &NewtonPolygon, updated: &CoefficientProvider, v: PolygonVertex) -> Result<UpdateResult> {
    let pos = base.vertices.iter().position(|w| w.index == v.index).expect("vertex present");
    let prev = pos.checked_sub(1).map(|p| base.vertices[p]);
    let next = base.vertices.get(pos + 1).copied();
    let lo = match (prev, base.left) {
        (Some(p), _) => p.index,
        (None, Boundary::Bounded) => base.window.lo,
        (None, _) => return recertify_after_lowering(base, updated, v.index),
    };
    let hi = match (next, base.right) {
        (Some(n), _) => n.index,
        (None, Boundary::Bounded) => base.window.hi,
        (None, _) => return recertify_after_lowering(base, updated, v.index),
    };
    let local = upper_hull(&updated.points(IndexRange::new(lo, hi)?));
    let status = match (prev, next) {
        (Some(p), Some(n)) => p.status.min(n.status),
        (Some(p), None) => p.status,
        (None, Some(n)) => n.status,
        (None, None) => VertexStatus::Certified,
    };
    let mut vertices: Vec<PolygonVertex> =
        if prev.is_some() { base.vertices[..pos - 1].to_vec() } else { Vec::new() };
    for &(index, log_coeff) in &local {
        let st = [prev, next]
            .into_iter()
            .flatten()
            .find(|w| w.index == index)
            .map_or(status, |w| w.status);
        vertices.push(PolygonVertex { index, log_coeff, status: st });
    }
    if next.is_some() {
        vertices.extend_from_slice(&base.vertices[pos + 2..]);
    }
    let mut polygon = base.clone();
    polygon.vertices = vertices;
    refresh_collapsed(&mut polygon, updated);
    let removed = if polygon.vertex_at(v.index).is_some() { Vec::new() } else { vec![v.index] };
    Ok(UpdateResult {
        outcome: UpdateOutcome::FiniteDelta { removed, inserted: false },
        polygon,
        provider: updated.clone(),
        comparisons: 0,
    })
}

fn recertify_after_lowering(base: &NewtonPolygon, updated: &CoefficientProvider, m: i64) -> Result<UpdateResult> {
    let mut polygon = certify_window(updated, base.window)?;
    // Rays already pinned stay in force unless the envelope re-derives them.
    for side in [Side::Left, Side::Right] {
        if let (Boundary::Ray { .. }, Boundary::Open) = (base.boundary(side), polygon.boundary(side)) {
            polygon.flags.push(format!("{side} ray dropped after lowering index {m}"));
        }
    }
    refresh_collapsed(&mut polygon, updated);
    Ok(UpdateResult {
        outcome: UpdateOutcome::FiniteDelta { removed: removed_between(base, &polygon, i64::MIN), inserted: false },
        polygon,
        provider: updated.clone(),
        comparisons: 0,
    })
}

/// Applies the monomials of a Laurent polynomial one after another.
pub fn update_with_laurent_polynomial(
    poly: &NewtonPolygon,
    provider: &CoefficientProvider,
    updates: &[MonomialUpdate],
    combine: Combine,
) -> Result<SequenceResult> {
    let mut seen = std::collections::BTreeSet::new();
    for u in updates {
        if !seen.insert(u.index) {
            return Err(Error::InvalidQuery("update indices must be distinct"));
        }
    }
    let mut polygon = poly.clone();
    let mut current = provider.clone();
    let mut outcomes = Vec::with_capacity(updates.len());
    for &u in updates {
        let step = update_with_monomial(&polygon, &current, u, combine)?;
        polygon = step.polygon;
        current = step.provider;
        outcomes.push(step.outcome);
    }
    Ok(SequenceResult { polygon, outcomes, provider: current })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::hull_finite;
    use crate::series::Generator;

    fn finite_table() -> CoefficientProvider {
        CoefficientProvider::explicit([(0, 0.0), (1, 1.5), (3, 2.0), (4, 1.0), (6, -2.0), (7, -5.0)]).unwrap()
    }

    fn brute(provider: &CoefficientProvider, window: IndexRange) -> Vec<(i64, f64)> {
        hull_finite(&provider.points(window)).unwrap().points()
    }

    #[test]
    fn saturating_series_truncates_at_new_node() {
        let p = CoefficientProvider::generator(Generator::Saturating);
        let poly = certify_window(&p, IndexRange::new(1, 50).unwrap()).unwrap();
        let r = update_with_monomial(&poly, &p, MonomialUpdate::new(0, 1.0).unwrap(), Combine::Replace).unwrap();
        assert_eq!(r.outcome, UpdateOutcome::InfiniteTruncation { side: TruncationSide::Right, kept_vertex: 0 });
        assert_eq!(r.polygon.indices(), vec![0]);
        assert_eq!(r.polygon.right, Boundary::Ray { log_alpha: 0.0, status: LimitStatus::Exact });
    }

    #[test]
    fn node_below_hull_changes_nothing() {
        let p = finite_table();
        let poly = hull_finite(&p.points(IndexRange::new(0, 7).unwrap())).unwrap();
        let r = update_with_monomial(&poly, &p, MonomialUpdate::new(2, 0.0).unwrap(), Combine::Replace).unwrap();
        assert_eq!(r.outcome, UpdateOutcome::FiniteDelta { removed: vec![], inserted: false });
        assert_eq!(r.polygon.points(), poly.points());
    }

    #[test]
    fn exp_update_matches_dense_hull() {
        let p = CoefficientProvider::generator(Generator::Exp);
        let poly = certify_window(&p, IndexRange::new(0, 60).unwrap()).unwrap();
        let r = update_with_monomial(&poly, &p, MonomialUpdate::new(3, 12.0).unwrap(), Combine::Replace).unwrap();
        let UpdateOutcome::FiniteDelta { removed, inserted } = &r.outcome else { panic!("{:?}", r.outcome) };
        assert!(*inserted);
        assert!(!removed.is_empty());
        let dense = brute(&r.provider, IndexRange::new(0, 100).unwrap());
        let ours: Vec<_> = r.polygon.vertices.iter().filter(|v| v.certified()).map(|v| v.point()).collect();
        assert!(ours.iter().all(|v| dense.contains(v)));
        assert_eq!(ours, dense.iter().copied().filter(|v| v.0 <= ours.last().unwrap().0).collect::<Vec<_>>());
    }

    #[test]
    fn two_updates_match_merged_table() {
        let p = finite_table();
        let w = IndexRange::new(0, 7).unwrap();
        let poly = hull_finite(&p.points(w)).unwrap();
        let ups = [MonomialUpdate::new(2, 3.0).unwrap(), MonomialUpdate::new(5, 0.5).unwrap()];
        let r = update_with_laurent_polynomial(&poly, &p, &ups, Combine::Replace).unwrap();
        assert_eq!(r.polygon.points(), brute(&r.provider, w));
        let swapped = update_with_laurent_polynomial(&poly, &p, &[ups[1], ups[0]], Combine::Replace).unwrap();
        assert_eq!(swapped.polygon.points(), r.polygon.points());
    }

    #[test]
    fn empty_update_list_is_identity() {
        let p = finite_table();
        let poly = hull_finite(&p.points(IndexRange::new(0, 7).unwrap())).unwrap();
        let r = update_with_laurent_polynomial(&poly, &p, &[], Combine::Replace).unwrap();
        assert_eq!(r.polygon, poly);
        assert!(r.outcomes.is_empty());
    }

    #[test]
    fn lowering_a_vertex_recomputes_locally() {
        let p = finite_table();
        let w = IndexRange::new(0, 7).unwrap();
        let poly = hull_finite(&p.points(w)).unwrap();
        let r = update_with_monomial(&poly, &p, MonomialUpdate::new(3, -1.0).unwrap(), Combine::Replace).unwrap();
        assert_eq!(r.polygon.points(), brute(&r.provider, w));
        let kept = update_with_monomial(&poly, &p, MonomialUpdate::new(3, -1.0).unwrap(), Combine::Max).unwrap();
        assert_eq!(kept.polygon.points(), poly.points());
    }

    #[test]
    fn update_beyond_bounded_end_extends_window() {
        let p = finite_table();
        let poly = hull_finite(&p.points(IndexRange::new(0, 7).unwrap())).unwrap();
        let r = update_with_monomial(&poly, &p, MonomialUpdate::new(10, 0.0).unwrap(), Combine::Replace).unwrap();
        assert_eq!(r.polygon.window, IndexRange::new(0, 10).unwrap());
        assert_eq!(r.polygon.points(), brute(&r.provider, IndexRange::new(0, 10).unwrap()));
    }

    #[test]
    fn rejects_duplicate_indices() {
        let p = finite_table();
        let poly = hull_finite(&p.points(IndexRange::new(0, 7).unwrap())).unwrap();
        let u = MonomialUpdate::new(1, 0.0).unwrap();
        assert!(update_with_laurent_polynomial(&poly, &p, &[u, u], Combine::Replace).is_err());
    }

    #[test]
    fn open_side_without_decision_is_an_error() {
        // Limit root known only from the window, tail bound unknown.
        let p = CoefficientProvider::generator(Generator::Saturating).without_metadata();
        let poly = certify_window(&p, IndexRange::new(1, 50).unwrap()).unwrap();
        let r = update_with_monomial(&poly, &p, MonomialUpdate::new(0, 1.0).unwrap(), Combine::Replace);
        assert!(matches!(r, Err(Error::Undecidable(Side::Right))), "{r:?}");
    }
}
