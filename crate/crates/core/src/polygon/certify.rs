use crate::error::{Error, Result};
use crate::series::{CoefficientProvider, IndexRange, Side, TailBound, REL_TOL};

use super::hull::{collinear_members, orientation, upper_hull, Orientation};
use super::{Boundary, LimitStatus, NewtonPolygon, PolygonVertex, VertexStatus};

/// Most indices evaluated past a window end for one tail.
pub(crate) const EXTENSION_CAP: i64 = 1 << 20;
/// Widest window the doubling heuristic may reach.
const HEURISTIC_MAX_WIDTH: i64 = 1 << 22;
/// Rate offsets tried against exponential-type envelopes.
const EXP_TYPE_OFFSETS: [f64; 12] = [0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0];

/// Lazily evaluated coefficients beyond a window end, addressed by outward
/// coordinate `x = sign * j`.
pub(crate) struct TailCache<'a> {
    provider: &'a CoefficientProvider,
    sign: i64,
    start: i64,
    values: Vec<f64>,
}

impl<'a> TailCache<'a> {
    pub(crate) fn new(provider: &'a CoefficientProvider, side: Side, x_end: i64) -> Self {
        TailCache { provider, sign: side.sign(), start: x_end + 1, values: Vec::new() }
    }

    pub(crate) fn get(&mut self, x: i64) -> f64 {
        let k = (x - self.start) as usize;
        while self.values.len() <= k {
            let xx = self.start + self.values.len() as i64;
            self.values.push(self.provider.log_coeff(self.sign * xx));
        }
        self.values[k]
    }
}

fn to_outward(side: Side, p: (i64, f64)) -> (i64, f64) {
    (side.sign() * p.0, p.1)
}

type OutwardEdge = (usize, (i64, f64), (i64, f64));

/// Edges of `hull` (ascending index) in outward order for `side`, each as
/// `(edge position, inner point, outer point)` in outward coordinates.
fn outward_edges(hull: &[(i64, f64)], side: Side) -> Vec<OutwardEdge> {
    let m = hull.len().saturating_sub(1);
    let mut out = Vec::with_capacity(m);
    match side {
        Side::Right => {
            for t in (0..m).rev() {
                out.push((t, to_outward(side, hull[t]), to_outward(side, hull[t + 1])));
            }
        }
        Side::Left => {
            for t in 0..m {
                out.push((t, to_outward(side, hull[t + 1]), to_outward(side, hull[t])));
            }
        }
    }
    out
}

/// Index beyond which the envelope alone keeps the tail under the edge line,
/// or `None` when no admissible rate works.
fn crossing_bound(inner: (i64, f64), outer: (i64, f64), bound: &TailBound) -> Option<f64> {
    let s = (outer.1 - inner.1) / (outer.0 - inner.0) as f64;
    let rates: Vec<f64> = match bound {
        TailBound::Geometric { log_rate, .. } => vec![*log_rate],
        TailBound::ExpType { .. } => EXP_TYPE_OFFSETS.iter().map(|t| -s + t).collect(),
    };
    let xi = inner.0 as f64;
    let mut best: Option<f64> = None;
    for rate in rates {
        let Some(log_c) = bound.log_c_at(rate) else { continue };
        let denom = s + rate;
        let numer = log_c + xi * s - inner.1;
        let ell = if denom.abs() <= REL_TOL * 1f64.max(s.abs()).max(rate.abs()) {
            let tol = REL_TOL * 1f64.max(inner.1.abs()).max(log_c.abs()).max((xi * s).abs());
            if numer <= tol {
                f64::NEG_INFINITY
            } else {
                continue;
            }
        } else if denom < 0.0 {
            continue;
        } else {
            numer / denom
        };
        best = Some(best.map_or(ell, |b: f64| b.min(ell)));
    }
    best
}

/// Checks that no tail point in `(x_end, floor(ell)]` rises above the edge
/// line, with `ell` from the envelope.
fn edge_clears_tail(
    inner: (i64, f64),
    outer: (i64, f64),
    bound: &TailBound,
    x_end: i64,
    tail: &mut TailCache<'_>,
) -> bool {
    let Some(ell) = crossing_bound(inner, outer, bound) else { return false };
    // The envelope only speaks for outward distances k >= 1.
    let limit = if ell.is_finite() { (ell.floor() as i64).max(0) } else { 0 };
    if limit - x_end > EXTENSION_CAP {
        return false;
    }
    for x in (x_end + 1)..=limit {
        let y = tail.get(x);
        if y.is_finite() && orientation(inner, outer, (x, y)) == Orientation::Below {
            return false;
        }
    }
    true
}

/// True when every window point at outward distance >= 1 respects the bound
/// (checked at the bound's own rate for geometric bounds).
fn envelope_holds_in_window(points: &[(i64, f64)], side: Side, bound: &TailBound) -> bool {
    let TailBound::Geometric { log_c, log_rate } = bound else { return true };
    points.iter().all(|&p| {
        let (x, y) = to_outward(side, p);
        if x < 1 || !y.is_finite() {
            return true;
        }
        let line = log_c - x as f64 * log_rate;
        y <= line + REL_TOL * 1f64.max(y.abs()).max(line.abs())
    })
}

/// Per-edge tail status from the envelope: an edge is cleared when it or any
/// edge outward of it clears the tail.
fn envelope_tail(
    provider: &CoefficientProvider,
    hull: &[(i64, f64)],
    side: Side,
    bound: &TailBound,
    x_end: i64,
) -> Vec<bool> {
    let mut ok = vec![false; hull.len().saturating_sub(1)];
    let mut tail = TailCache::new(provider, side, x_end);
    let edges = outward_edges(hull, side);
    for (pos, &(_, inner, outer)) in edges.iter().enumerate() {
        if edge_clears_tail(inner, outer, bound, x_end, &mut tail) {
            for &(u, _, _) in &edges[pos..] {
                ok[u] = true;
            }
            break;
        }
    }
    ok
}

/// Vertices of `hull` confirmed as consecutive vertices across two window
/// doublings on `side`, as a per-edge flag.
fn heuristic_tail(provider: &CoefficientProvider, window: IndexRange, hull: &[(i64, f64)], side: Side) -> Vec<bool> {
    let inner_set = |h: &[(i64, f64)]| -> Vec<(i64, u64)> {
        h.iter()
            .filter(|p| window.contains(p.0))
            .map(|p| (p.0, p.1.to_bits()))
            .collect()
    };
    let mut current = window;
    let mut history: Vec<Vec<(i64, u64)>> = vec![inner_set(hull)];
    let stable = loop {
        current = current.extended(side == Side::Left, side == Side::Right);
        if current.hi - current.lo > HEURISTIC_MAX_WIDTH {
            break None;
        }
        let h = upper_hull(&provider.points(current));
        history.push(inner_set(&h));
        let n = history.len();
        if n >= 3 && history[n - 1] == history[n - 2] && history[n - 2] == history[n - 3] {
            break history.pop();
        }
    };
    let Some(stable) = stable else { return vec![false; hull.len().saturating_sub(1)] };
    hull.windows(2)
        .map(|e| {
            let a = stable.iter().position(|s| s.0 == e[0].0 && s.1 == e[0].1.to_bits());
            let b = stable.iter().position(|s| s.0 == e[1].0 && s.1 == e[1].1.to_bits());
            matches!((a, b), (Some(a), Some(b)) if b == a + 1)
        })
        .collect()
}

/// Resolves one tail of the window hull into per-edge statuses.
fn tail_status(
    provider: &CoefficientProvider,
    window: IndexRange,
    points: &[(i64, f64)],
    hull: &[(i64, f64)],
    side: Side,
    flags: &mut Vec<String>,
) -> Vec<VertexStatus> {
    let edges = hull.len().saturating_sub(1);
    let x_end = side.sign() * window.end(side);
    let mut status = vec![VertexStatus::Uncertified; edges];
    let mut pending = vec![true; edges];
    if let Some(bound) = provider.envelope().side(side) {
        if envelope_holds_in_window(points, side, bound) {
            for (t, ok) in envelope_tail(provider, hull, side, bound, x_end).into_iter().enumerate() {
                if ok {
                    status[t] = VertexStatus::Certified;
                    pending[t] = false;
                }
            }
        } else {
            flags.push(format!("{side} envelope violated inside the window; ignored"));
        }
    }
    if pending.iter().any(|&p| p) {
        flags.push(format!("{side} tail: window-doubling heuristic"));
        for (t, ok) in heuristic_tail(provider, window, hull, side).into_iter().enumerate() {
            if pending[t] && ok {
                status[t] = VertexStatus::Estimated;
            }
        }
    }
    status
}

/// Converts the outer end of the hull into an infinite ray when its last
/// vertices sit on a geometric envelope line.
fn pin_ray(provider: &CoefficientProvider, hull: &mut Vec<(i64, f64)>, side: Side, collapsed: &mut Vec<i64>) -> Option<Boundary> {
    let Some(TailBound::Geometric { log_c, log_rate }) = provider.envelope().side(side) else { return None };
    let on_line = |p: (i64, f64)| {
        let (x, y) = to_outward(side, p);
        let line = log_c - x as f64 * log_rate;
        (y - line).abs() <= REL_TOL * 1f64.max(y.abs()).max(line.abs()).max((x as f64 * log_rate).abs())
    };
    let outer = match side {
        Side::Right => *hull.last()?,
        Side::Left => *hull.first()?,
    };
    if !on_line(outer) {
        return None;
    }
    let second = match side {
        Side::Right if hull.len() >= 2 => Some(hull[hull.len() - 2]),
        Side::Left if hull.len() >= 2 => Some(hull[1]),
        _ => None,
    };
    if second.is_some_and(on_line) {
        collapsed.push(outer.0);
        match side {
            Side::Right => hull.pop(),
            Side::Left => Some(hull.remove(0)),
        };
    }
    Some(Boundary::Ray { log_alpha: side.sign() as f64 * log_rate, status: LimitStatus::Exact })
}

/// Newton polygon of `provider` computed on `window` and certified against
/// the coefficients outside it.
///
/// A window reaching a finite support end within reach is extended to it, so
/// that side is exact. Otherwise each tail is checked with the provider's
/// envelope, falling back to window doubling.
pub fn certify_window(provider: &CoefficientProvider, window: IndexRange) -> Result<NewtonPolygon> {
    let support = provider.support();
    let mut lo = window.lo;
    let mut hi = window.hi;
    let mut left_bounded = false;
    let mut right_bounded = false;
    if let Some(l) = support.lower {
        if lo <= l || lo - l <= EXTENSION_CAP {
            lo = l;
            left_bounded = true;
        }
    }
    if let Some(u) = support.upper {
        if hi >= u || u - hi <= EXTENSION_CAP {
            hi = u;
            right_bounded = true;
        }
    }
    if lo > hi {
        return Err(Error::NoFiniteCoefficient);
    }
    let window = IndexRange::new(lo, hi)?;
    let points = provider.points(window);
    let mut hull = upper_hull(&points);
    if hull.is_empty() {
        return Err(Error::NoFiniteCoefficient);
    }
    let mut flags = Vec::new();
    let mut collapsed = collinear_members(&points, &hull);

    let mut left = if left_bounded { Boundary::Bounded } else { Boundary::Open };
    let mut right = if right_bounded { Boundary::Bounded } else { Boundary::Open };
    if !left_bounded {
        if let Some(b) = pin_ray(provider, &mut hull, Side::Left, &mut collapsed) {
            left = b;
        }
    }
    if !right_bounded {
        if let Some(b) = pin_ray(provider, &mut hull, Side::Right, &mut collapsed) {
            right = b;
        }
    }
    collapsed.sort_unstable();

    let edges = hull.len().saturating_sub(1);
    let from_left = if left_bounded || matches!(left, Boundary::Ray { .. }) {
        vec![VertexStatus::Certified; edges]
    } else {
        tail_status(provider, window, &points, &hull, Side::Left, &mut flags)
    };
    let from_right = if right_bounded || matches!(right, Boundary::Ray { .. }) {
        vec![VertexStatus::Certified; edges]
    } else {
        tail_status(provider, window, &points, &hull, Side::Right, &mut flags)
    };
    let edge: Vec<VertexStatus> = from_left.iter().zip(&from_right).map(|(a, b)| *a.min(b)).collect();
    let end_status = |b: Boundary| match b {
        Boundary::Bounded | Boundary::Ray { status: LimitStatus::Exact, .. } => VertexStatus::Certified,
        Boundary::Ray { .. } => VertexStatus::Estimated,
        Boundary::Open => VertexStatus::Uncertified,
    };
    let vertices = hull
        .iter()
        .enumerate()
        .map(|(t, &(index, log_coeff))| {
            let l = if t == 0 { end_status(left) } else { edge[t - 1] };
            let r = if t == edges { end_status(right) } else { edge[t] };
            PolygonVertex { index, log_coeff, status: l.min(r) }
        })
        .collect();
    Ok(NewtonPolygon { window, vertices, left, right, collapsed, flags })
}
