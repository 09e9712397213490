use proptest::prelude::*;

use troplaur::polygon::{certify_window, hull_finite, roots_from_polygon, Multiplicity, NewtonPolygon, Provenance};
use troplaur::series::{eval_tropical, CoefficientProvider, IndexRange};
use troplaur::validation::brute_hull;

fn coeff() -> impl Strategy<Value = f64> {
    prop_oneof![9 => -40.0f64..40.0, 1 => Just(f64::NEG_INFINITY)]
}

/// Consecutive indices from a random start, at least one coefficient finite.
fn table(max_len: usize) -> impl Strategy<Value = Vec<(i64, f64)>> {
    (-30i64..30, prop::collection::vec(coeff(), 1..max_len))
        .prop_map(|(start, ys)| ys.into_iter().enumerate().map(|(k, y)| (start + k as i64, y)).collect::<Vec<_>>())
        .prop_filter("needs a finite coefficient", |t| t.iter().any(|p| p.1.is_finite()))
}

fn window_of(t: &[(i64, f64)]) -> IndexRange {
    IndexRange::new(t[0].0, t[t.len() - 1].0).unwrap()
}

fn provider(t: &[(i64, f64)]) -> CoefficientProvider {
    CoefficientProvider::explicit(t.iter().copied()).unwrap()
}

fn same_hull(a: &NewtonPolygon, b: &NewtonPolygon) -> bool {
    a.points() == b.points()
}

proptest! {
    #[test]
    fn tropical_evaluation_is_convex(t in table(25), x in -5.0f64..5.0, h1 in 0.01f64..3.0, h2 in 0.01f64..3.0) {
        let p = provider(&t);
        let w = window_of(&t);
        let (x1, x2, x3) = (x - h1, x, x + h2);
        let (y1, y2, y3) = (eval_tropical(&p, x1, w), eval_tropical(&p, x2, w), eval_tropical(&p, x3, w));
        let chord = y1 + (y3 - y1) * (x2 - x1) / (x3 - x1);
        prop_assert!(y2 <= chord + 1e-9 * (1.0 + chord.abs()));
    }

    #[test]
    fn enlarging_the_window_never_lowers_the_value(t in table(25), x in -5.0f64..5.0, cut in 0usize..12) {
        let p = provider(&t);
        let w = window_of(&t);
        let inner = IndexRange::new(w.lo + (cut as i64).min(w.hi - w.lo), w.hi).unwrap();
        prop_assert!(eval_tropical(&p, x, inner) <= eval_tropical(&p, x, w));
    }

    #[test]
    fn slopes_decrease_and_roots_increase(t in table(40)) {
        let poly = hull_finite(&t).unwrap();
        for s in poly.slopes().windows(2) {
            prop_assert!(s[0] > s[1]);
        }
        let roots = roots_from_polygon(&poly, &provider(&t)).unwrap();
        for r in roots.as_slice().windows(2) {
            prop_assert!(r[0].log_value < r[1].log_value);
        }
    }

    #[test]
    fn multiplicities_add_up_between_vertices(t in table(40)) {
        let poly = hull_finite(&t).unwrap();
        let roots = roots_from_polygon(&poly, &provider(&t)).unwrap();
        let idx = poly.indices();
        for a in 0..idx.len() {
            for b in a + 1..idx.len() {
                let total: u64 = roots
                    .segments()
                    .filter_map(|r| match (r.provenance, r.multiplicity) {
                        (Provenance::HullSegment { left_index, right_index }, Multiplicity::Finite(m))
                            if left_index >= idx[a] && right_index <= idx[b] => Some(m),
                        _ => None,
                    })
                    .sum();
                prop_assert_eq!(total as i64, idx[b] - idx[a]);
            }
        }
    }

    #[test]
    fn scaling_shifts_roots(t in table(30), log_c in -3.0f64..3.0) {
        let scaled: Vec<_> = t.iter().map(|&(j, y)| (j, y + j as f64 * log_c)).collect();
        let r0 = roots_from_polygon(&hull_finite(&t).unwrap(), &provider(&t)).unwrap();
        let r1 = roots_from_polygon(&hull_finite(&scaled).unwrap(), &provider(&scaled)).unwrap();
        prop_assert_eq!(r0.len(), r1.len());
        for (a, b) in r0.iter().zip(r1.iter()) {
            prop_assert_eq!(a.multiplicity, b.multiplicity);
            if a.log_value.is_finite() {
                prop_assert!((a.log_value - log_c - b.log_value).abs() <= 1e-9 * (1.0 + a.log_value.abs()));
            } else {
                // the zero root stays at zero
                prop_assert_eq!(a.log_value, b.log_value);
            }
        }
    }

    #[test]
    fn certified_vertices_are_true_vertices(t in table(60), lo_cut in 0usize..20, hi_cut in 0usize..20) {
        let p = provider(&t);
        let full = hull_finite(&t).unwrap().indices();
        let w = window_of(&t);
        let lo = (w.lo + lo_cut as i64).min(w.hi);
        let hi = (w.hi - hi_cut as i64).max(lo);
        let poly = certify_window(&p, IndexRange::new(lo, hi).unwrap()).unwrap();
        let certified: Vec<i64> = poly.vertices.iter().filter(|v| v.certified()).map(|v| v.index).collect();
        for c in &certified {
            prop_assert!(full.contains(c), "{c} is not a vertex of {full:?}");
        }
        for pair in certified.windows(2) {
            let a = full.iter().position(|&j| j == pair[0]).unwrap();
            prop_assert_eq!(full[a + 1], pair[1]);
        }
    }

    #[test]
    fn brute_force_hull_agrees(t in table(500)) {
        prop_assert!(same_hull(&brute_hull(&t).unwrap(), &hull_finite(&t).unwrap()));
    }

    #[test]
    fn polygon_json_round_trips(t in table(40)) {
        let poly = certify_window(&provider(&t), window_of(&t)).unwrap();
        let text = serde_json::to_string(&poly).unwrap();
        let back: NewtonPolygon = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &poly);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
