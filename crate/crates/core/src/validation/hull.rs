use crate::error::{Error, Result};
use crate::polygon::{orientation, Boundary, NewtonPolygon, Orientation, PolygonVertex, VertexStatus};
use crate::series::IndexRange;

/// Largest input [`brute_hull`] accepts.
pub const BRUTE_HULL_CAP: usize = 2000;

/// True when every other point lies on or below the line through `a` and `b`.
fn is_edge(pts: &[(i64, f64)], a: usize, b: usize) -> bool {
    let (pa, pb) = (pts[a], pts[b]);
    pts.iter().enumerate().all(|(k, &pk)| {
        if k < a {
            orientation(pk, pa, pb) != Orientation::Below
        } else if k > b {
            orientation(pa, pb, pk) != Orientation::Below
        } else if k > a && k < b {
            orientation(pa, pk, pb) != Orientation::Above
        } else {
            true
        }
    })
}

/// Upper hull by walking edges from the leftmost point: each step takes the
/// farthest point whose line through the current vertex has every point on
/// or below it. Every edge is checked against all points.
pub fn brute_hull(points: &[(i64, f64)]) -> Result<NewtonPolygon> {
    if points.len() > BRUTE_HULL_CAP {
        return Err(Error::TooManyPoints { what: "brute_hull", n: points.len(), cap: BRUTE_HULL_CAP });
    }
    for w in points.windows(2) {
        if w[0].0 >= w[1].0 {
            return Err(Error::UnsortedPoints(w[1].0));
        }
    }
    if let Some(p) = points.iter().find(|p| p.1.is_nan() || p.1 == f64::INFINITY) {
        return Err(Error::InvalidCoefficient { index: p.0, reason: "log coefficient must be finite or -inf" });
    }
    let pts: Vec<(i64, f64)> = points.iter().copied().filter(|p| p.1.is_finite()).collect();
    if pts.is_empty() {
        return Err(Error::NoFiniteCoefficient);
    }
    let slope = |a: usize, b: usize| (pts[b].1 - pts[a].1) / (pts[b].0 - pts[a].0) as f64;
    let mut chain = vec![0usize];
    let mut cur = 0;
    while cur + 1 < pts.len() {
        let steepest = (cur + 1..pts.len())
            .max_by(|&x, &y| slope(cur, x).total_cmp(&slope(cur, y)).then(x.cmp(&y)))
            .expect("nonempty range");
        let next = (steepest..pts.len())
            .rev()
            .find(|&j| (j == steepest || orientation(pts[cur], pts[steepest], pts[j]) == Orientation::On) && is_edge(&pts, cur, j))
            .or_else(|| (cur + 1..pts.len()).rev().find(|&j| is_edge(&pts, cur, j)))
            .expect("the steepest chord from a hull vertex is an edge");
        chain.push(next);
        cur = next;
    }
    let vertices: Vec<PolygonVertex> = chain
        .iter()
        .map(|&k| PolygonVertex { index: pts[k].0, log_coeff: pts[k].1, status: VertexStatus::Certified })
        .collect();
    let mut collapsed = Vec::new();
    for e in chain.windows(2) {
        for k in e[0] + 1..e[1] {
            if orientation(pts[e[0]], pts[k], pts[e[1]]) == Orientation::On {
                collapsed.push(pts[k].0);
            }
        }
    }
    Ok(NewtonPolygon {
        window: IndexRange::new(points[0].0, points[points.len() - 1].0)?,
        vertices,
        left: Boundary::Bounded,
        right: Boundary::Bounded,
        collapsed,
        flags: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::hull_finite;

    #[test]
    fn three_points() {
        assert_eq!(brute_hull(&[(0, 0.0), (1, 5.0), (2, 0.0)]).unwrap().indices(), vec![0, 1, 2]);
        assert_eq!(brute_hull(&[(0, 0.0), (1, -5.0), (2, 0.0)]).unwrap().indices(), vec![0, 2]);
    }

    #[test]
    fn matches_hull_on_collinear_runs() {
        let pts: Vec<_> = (-8..=8).map(|j: i64| (j, if j < 0 { 3.0 * j as f64 } else { -(j as f64) })).collect();
        let b = brute_hull(&pts).unwrap();
        let h = hull_finite(&pts).unwrap();
        assert_eq!(b, h);
    }

    #[test]
    fn cap_is_enforced() {
        let pts: Vec<_> = (0..2001).map(|j| (j, 0.0)).collect();
        assert!(matches!(brute_hull(&pts), Err(Error::TooManyPoints { .. })));
    }
}
