use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use troplaur::localization::{
    key_roots, localize_matrix, localize_scalar, ItemKind, LocalizationReport, MatrixLaurentSeries, Mode, NormChoice,
};
use troplaur::polygon::{alpha_limits, hull_finite, roots_from_polygon};
use troplaur::quadrature::{advise_nodes, filter_magnitude, FilterQuery};
use troplaur::series::CoefficientProvider;
use troplaur::validation::{validate_report, ScalarFunction};

fn p_at(r: f64, delta: f64, c: f64) -> f64 {
    r * r - (2.0 + (1.0 - delta) / (delta * (1.0 + c))) * r + 1.0 / delta
}

/// Log-magnitudes on `[0, len)` with finite ends.
fn poly_logs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![6 => -12.0f64..12.0, 1 => Just(f64::NEG_INFINITY)], 2..9).prop_map(|mut ys| {
        let n = ys.len();
        ys[0] = ys[0].max(-12.0);
        ys[n - 1] = ys[n - 1].max(-12.0);
        ys
    })
}

fn scalar_report(logs: &[f64], mode: Mode) -> LocalizationReport {
    let t: Vec<(i64, f64)> = logs.iter().enumerate().map(|(j, &y)| (j as i64, y)).collect();
    let p = CoefficientProvider::explicit(t.iter().copied()).unwrap();
    let roots = roots_from_polygon(&hull_finite(&t).unwrap(), &p).unwrap();
    localize_scalar(&roots, &p, mode).unwrap()
}

fn mode() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::Wide), Just(Mode::Sharp)]
}

proptest! {
    #[test]
    fn key_roots_solve_the_quadratic(log_c in -3.0f64..3.0, u in 0.0f64..1.0) {
        let c = 10f64.powf(log_c);
        let delta = (1.0 - u) * (1.0 + 2.0 * c).powi(-2);
        prop_assume!(delta > 0.0);
        let (f, g) = key_roots(delta, c).unwrap();
        let bound = 1e-10 * (1.0 + 1.0 / delta);
        prop_assert!(p_at(f, delta, c).abs() <= bound);
        prop_assert!(p_at(g, delta, c).abs() <= bound);
        prop_assert!(((1.0 / (f - 1.0) + 1.0 / (g - 1.0)) * c - 1.0).abs() <= 1e-10);
        prop_assert!(1.0 + c <= f && f <= g);
        prop_assert!((g * delta * f - 1.0).abs() <= 1e-14 || g == f);
    }

    #[test]
    fn regions_are_consistent(logs in poly_logs(), m in mode()) {
        let report = scalar_report(&logs, m);
        let excl: Vec<(f64, f64)> = report.applicable().filter_map(|i| match i.kind {
            ItemKind::ExclusionAnnulus { inner_log, outer_log } => Some((inner_log, outer_log)),
            _ => None,
        }).collect();
        for i in report.applicable() {
            if let ItemKind::InclusionAnnulus { inner_log, outer_log, .. } = i.kind {
                for &(a, b) in &excl {
                    prop_assert!(b <= inner_log + 1e-12 || a >= outer_log - 1e-12, "({a}, {b}) meets ({inner_log}, {outer_log})");
                }
            }
        }
        let mut disks: Vec<(f64, i64)> = report.applicable().filter_map(|i| match i.kind {
            ItemKind::InclusionDisk { radius_log, count_eig_minus_poles } => Some((radius_log, count_eig_minus_poles)),
            _ => None,
        }).collect();
        disks.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in disks.windows(2) {
            prop_assert!(w[0].1 <= w[1].1);
        }
    }

    #[test]
    fn scaling_the_variable_scales_the_radii(logs in poly_logs(), log_c in -2.0f64..2.0, m in mode()) {
        let scaled: Vec<f64> = logs.iter().enumerate().map(|(j, y)| y + j as f64 * log_c).collect();
        let a = scalar_report(&logs, m);
        let b = scalar_report(&scaled, m);
        prop_assert_eq!(a.items.len(), b.items.len());
        for (x, y) in a.items.iter().zip(&b.items) {
            prop_assert_eq!(x.kind.name(), y.kind.name());
            prop_assert_eq!(x.applicable, y.applicable);
            let (xi, xo) = x.kind.radii_log();
            let (yi, yo) = y.kind.radii_log();
            for (p, q) in [(xi, yi), (xo, yo)] {
                if p.is_finite() {
                    prop_assert!((p - log_c - q).abs() <= 1e-9 * (1.0 + p.abs()), "{p} {q}");
                } else {
                    prop_assert_eq!(p, q);
                }
            }
        }
    }

    #[test]
    fn report_json_round_trips(logs in poly_logs(), m in mode()) {
        let report = scalar_report(&logs, m);
        let text = serde_json::to_string(&report).unwrap();
        let back: LocalizationReport = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, report);
    }

    #[test]
    fn advice_is_monotone_and_minimal(r1 in 1.01f64..50.0, r2 in 1.01f64..50.0, e1 in -15.0f64..-1.0, e2 in -15.0f64..-1.0) {
        let q = |ratio: f64, e: f64| FilterQuery::new(0.0, ratio.ln(), 10f64.powf(e)).unwrap();
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        prop_assert!(advise_nodes(&q(lo, e1)).unwrap() >= advise_nodes(&q(hi, e1)).unwrap());
        let (small, large) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(advise_nodes(&q(r1, small)).unwrap() >= advise_nodes(&q(r1, large)).unwrap());
        let query = q(r1, e1);
        let n = advise_nodes(&query).unwrap();
        prop_assert!(filter_magnitude(&query, n, query.nearest_excluded_log).unwrap() <= query.epsilon);
        if n > 1 {
            prop_assert!(filter_magnitude(&query, n - 1, query.nearest_excluded_log).unwrap() > query.epsilon);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn winding_counts_confirm_scalar_reports(logs in poly_logs(), phases in prop::collection::vec(0.0f64..std::f64::consts::TAU, 9), m in mode()) {
        let coeffs: Vec<(i64, Complex64)> = logs
            .iter()
            .enumerate()
            .filter(|(_, y)| y.is_finite())
            .map(|(j, &y)| (j as i64, Complex64::from_polar(y.exp(), phases[j])))
            .collect();
        let f = ScalarFunction::laurent_from(coeffs);
        let report = scalar_report(&logs, m);
        let top = (logs.len() - 1) as i64;
        let summary = validate_report(&report, &f, Some(top));
        prop_assert!(summary.passed(), "{:?}", summary.mismatches);
    }

    #[test]
    fn limits_do_not_depend_on_the_norm(seed in any::<u64>(), degree in 1usize..4) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..=degree as i64)
            .map(|j| (j, DMatrix::from_fn(3, 3, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))))
            .collect();
        let series = MatrixLaurentSeries::new(coeffs).unwrap();
        let limits = |norm| {
            let (p, _) = troplaur::localization::tropicalize(&series, norm).unwrap();
            let t = p.points(troplaur::series::IndexRange::new(0, degree as i64).unwrap());
            alpha_limits(&roots_from_polygon(&hull_finite(&t).unwrap(), &p).unwrap(), &p)
        };
        let (a, b) = (limits(NormChoice::One), limits(NormChoice::Inf));
        prop_assert_eq!(a.alpha_minus_log, b.alpha_minus_log);
        prop_assert_eq!(a.alpha_plus_log, b.alpha_plus_log);
        prop_assert!(localize_matrix(&series, NormChoice::One, Mode::Wide).is_ok());
    }
}
