use crate::error::{Error, Result};
use crate::series::{IndexRange, REL_TOL};

use super::{Boundary, NewtonPolygon, PolygonVertex, VertexStatus};

/// Position of the middle point of an index-sorted triple relative to the
/// chord joining the outer two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Above,
    On,
    Below,
}

/// Classifies `q` against the chord `p`-`r` for `p.0 < q.0 < r.0`. Gaps within
/// `1e-12` relative to the largest magnitude involved count as collinear.
pub fn orientation(p: (i64, f64), q: (i64, f64), r: (i64, f64)) -> Orientation {
    debug_assert!(p.0 < q.0 && q.0 < r.0);
    let t = (q.0 - p.0) as f64 / (r.0 - p.0) as f64;
    let gap = (q.1 - p.1) - (r.1 - p.1) * t;
    let tol = REL_TOL * 1f64.max(p.1.abs()).max(q.1.abs()).max(r.1.abs());
    if gap > tol {
        Orientation::Above
    } else if gap < -tol {
        Orientation::Below
    } else {
        Orientation::On
    }
}

/// Monotone-chain upper hull over index-sorted points. Zero coefficients are
/// skipped and collinear middle points are dropped.
pub(crate) fn upper_hull(points: &[(i64, f64)]) -> Vec<(i64, f64)> {
    let mut stack: Vec<(i64, f64)> = Vec::new();
    for &q in points.iter().filter(|p| p.1.is_finite()) {
        while stack.len() >= 2 && orientation(stack[stack.len() - 2], stack[stack.len() - 1], q) != Orientation::Above {
            stack.pop();
        }
        stack.push(q);
    }
    stack
}

/// Finite points lying on a hull edge without being vertices.
pub(crate) fn collinear_members(points: &[(i64, f64)], hull: &[(i64, f64)]) -> Vec<i64> {
    let mut out = Vec::new();
    let mut k = 0;
    for &p in points.iter().filter(|p| p.1.is_finite()) {
        while k + 1 < hull.len() && hull[k + 1].0 <= p.0 {
            k += 1;
        }
        if hull[k].0 == p.0 || k + 1 >= hull.len() || p.0 < hull[0].0 {
            continue;
        }
        if orientation(hull[k], p, hull[k + 1]) == Orientation::On {
            out.push(p.0);
        }
    }
    out
}

pub(crate) fn check_sorted(points: &[(i64, f64)]) -> Result<()> {
    for w in points.windows(2) {
        if w[0].0 >= w[1].0 {
            return Err(Error::UnsortedPoints(w[1].0));
        }
    }
    for p in points {
        if p.1.is_nan() || p.1 == f64::INFINITY {
            return Err(Error::InvalidCoefficient { index: p.0, reason: "log coefficient must be finite or -inf" });
        }
    }
    Ok(())
}

/// Upper convex hull of a finite point set. All vertices are certified.
pub fn hull_finite(points: &[(i64, f64)]) -> Result<NewtonPolygon> {
    check_sorted(points)?;
    let hull = upper_hull(points);
    if hull.is_empty() {
        return Err(Error::NoFiniteCoefficient);
    }
    let window = IndexRange::new(points[0].0, points[points.len() - 1].0)?;
    Ok(NewtonPolygon {
        window,
        vertices: hull
            .iter()
            .map(|&(index, log_coeff)| PolygonVertex { index, log_coeff, status: VertexStatus::Certified })
            .collect(),
        left: Boundary::Bounded,
        right: Boundary::Bounded,
        collapsed: collinear_members(points, &hull),
        flags: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points() {
        let p = hull_finite(&[(0, 0.0), (1, 0.0)]).unwrap();
        assert_eq!(p.indices(), vec![0, 1]);
        assert_eq!(p.slopes(), vec![0.0]);
    }

    #[test]
    fn collinear_points_collapse() {
        let pts: Vec<_> = (0..5).map(|j| (j, 2.0 * j as f64)).collect();
        let p = hull_finite(&pts).unwrap();
        assert_eq!(p.indices(), vec![0, 4]);
        assert_eq!(p.collapsed, vec![1, 2, 3]);
    }

    #[test]
    fn zeros_are_skipped() {
        let p = hull_finite(&[(-1, f64::NEG_INFINITY), (0, 1.0), (2, f64::NEG_INFINITY), (3, 0.0)]).unwrap();
        assert_eq!(p.indices(), vec![0, 3]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(hull_finite(&[]).is_err());
        assert!(hull_finite(&[(0, f64::NEG_INFINITY)]).is_err());
        assert!(hull_finite(&[(1, 0.0), (0, 0.0)]).is_err());
        assert!(hull_finite(&[(0, f64::NAN)]).is_err());
    }

    #[test]
    fn height_interpolates() {
        let p = hull_finite(&[(0, 0.0), (4, 4.0)]).unwrap();
        assert_eq!(p.height_at(1), 1.0);
        assert_eq!(p.height_at(5), f64::NEG_INFINITY);
    }
}
