//! Eigenvalue localization from the tropical roots of a matrix-valued
//! Laurent series.

mod matrix;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polygon::{alpha_limits, hull_finite, roots_from_polygon, AlphaLimits, Provenance, RootList, VertexStatus};
use crate::series::{ext_real, CoefficientProvider, IndexRange};

pub use matrix::{
    condition_number, matrix_norm, tropicalize, Conditioning, MatrixConditioning, MatrixLaurentSeries, NormChoice,
    ScalarConditioning,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Radii `(1+2κ)α_j` and `α_{j+1}/(1+2κ)`.
    #[default]
    Wide,
    /// Radii `f_j α_j` and `g_j α_j` from [`key_roots`].
    Sharp,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wide" => Ok(Mode::Wide),
            "sharp" => Ok(Mode::Sharp),
            _ => Err(Error::InvalidQuery("mode must be `wide` or `sharp`")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Wide => "wide",
            Mode::Sharp => "sharp",
        })
    }
}

/// Roots `f <= g` of `r² − (2 + (1−δ)/(δ(1+c)))r + 1/δ`.
///
/// Both come from `S ± √A` with `S = (1+2c)δ + 1` and
/// `A = (1−δ)(1−(1+2c)²δ)`; `f` is formed without the cancellation.
pub fn key_roots(delta: f64, c: f64) -> Result<(f64, f64)> {
    let w = 1.0 + 2.0 * c;
    let gate = 1.0 / (w * w);
    if !(c > 0.0 && c.is_finite() && delta > 0.0 && delta <= gate * (1.0 + 1e-12)) {
        return Err(Error::KeyRootsDomain { delta, c });
    }
    let a = ((1.0 - delta) * (1.0 - w * w * delta)).max(0.0);
    let s = w * delta + 1.0;
    let sum = s + a.sqrt();
    let f = 2.0 * (1.0 + c) / sum;
    let g = sum / (2.0 * delta * (1.0 + c));
    Ok((f, g.max(f)))
}

/// Ratio data at the vertex `k_j` shared by the segments of roots `α_j` and
/// `α_{j+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootGapData {
    /// 1-based position of `α_j` among the finite roots.
    pub gap: usize,
    pub k_prev: i64,
    pub k: i64,
    pub alpha_log: f64,
    pub next_alpha_log: f64,
    pub delta: f64,
    pub kappa_left: Option<f64>,
    pub kappa_right: Option<f64>,
    pub status: VertexStatus,
}

impl RootGapData {
    pub fn kappa_defined(&self) -> bool {
        self.kappa_right.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ItemKind {
    ExclusionAnnulus {
        #[serde(with = "ext_real")]
        inner_log: f64,
        #[serde(with = "ext_real")]
        outer_log: f64,
    },
    InclusionDisk {
        #[serde(with = "ext_real")]
        radius_log: f64,
        count_eig_minus_poles: i64,
    },
    InclusionAnnulus {
        #[serde(with = "ext_real")]
        inner_log: f64,
        #[serde(with = "ext_real")]
        outer_log: f64,
        count_eig: i64,
    },
    LowerExclusionDisk {
        #[serde(with = "ext_real")]
        radius_log: f64,
        count_at_zero: i64,
    },
    UpperBoundDisk {
        #[serde(with = "ext_real")]
        radius_log: f64,
    },
}

impl ItemKind {
    /// Log radii `(inner, outer)`; disks have inner `-inf`.
    pub fn radii_log(&self) -> (f64, f64) {
        match *self {
            ItemKind::ExclusionAnnulus { inner_log, outer_log } | ItemKind::InclusionAnnulus { inner_log, outer_log, .. } => {
                (inner_log, outer_log)
            }
            ItemKind::InclusionDisk { radius_log, .. }
            | ItemKind::LowerExclusionDisk { radius_log, .. }
            | ItemKind::UpperBoundDisk { radius_log } => (f64::NEG_INFINITY, radius_log),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ItemKind::ExclusionAnnulus { .. } => "exclusion-annulus",
            ItemKind::InclusionDisk { .. } => "inclusion-disk",
            ItemKind::InclusionAnnulus { .. } => "inclusion-annulus",
            ItemKind::LowerExclusionDisk { .. } => "lower-exclusion-disk",
            ItemKind::UpperBoundDisk { .. } => "upper-bound-disk",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ItemRepr", from = "ItemRepr")]
pub struct ReportItem {
    pub kind: ItemKind,
    pub applicable: bool,
    pub reason: String,
    /// Gap the item comes from; `(j, s)` pairs record `j`.
    pub gap: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct ItemRepr {
    #[serde(flatten)]
    kind: ItemKind,
    applicable: bool,
    #[serde(default)]
    reason: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gap: Option<usize>,
    /// Presentation only.
    #[serde(default, skip_deserializing, skip_serializing_if = "Option::is_none")]
    inner: Option<f64>,
    #[serde(default, skip_deserializing, skip_serializing_if = "Option::is_none")]
    outer: Option<f64>,
    #[serde(default, skip_deserializing, skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
}

impl From<ReportItem> for ItemRepr {
    fn from(item: ReportItem) -> Self {
        let (inner, outer, radius) = match item.kind {
            ItemKind::ExclusionAnnulus { inner_log, outer_log } | ItemKind::InclusionAnnulus { inner_log, outer_log, .. } => {
                (Some(inner_log.exp()), Some(outer_log.exp()), None)
            }
            _ => (None, None, Some(item.kind.radii_log().1.exp())),
        };
        let finite = |x: Option<f64>| x.filter(|v| v.is_finite());
        ItemRepr {
            kind: item.kind,
            applicable: item.applicable,
            reason: item.reason,
            gap: item.gap,
            inner: finite(inner),
            outer: finite(outer),
            radius: finite(radius),
        }
    }
}

impl From<ItemRepr> for ReportItem {
    fn from(r: ItemRepr) -> Self {
        ReportItem { kind: r.kind, applicable: r.applicable, reason: r.reason, gap: r.gap }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub mode: Mode,
    /// Matrix size.
    pub n: usize,
    pub items: Vec<ReportItem>,
    #[serde(default)]
    pub gaps: Vec<RootGapData>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl LocalizationReport {
    pub fn applicable(&self) -> impl Iterator<Item = &ReportItem> {
        self.items.iter().filter(|i| i.applicable)
    }
}

/// Per-gap ratios and condition numbers over the finite roots.
pub fn gap_data(roots: &RootList, cond: &dyn Conditioning) -> Vec<RootGapData> {
    let segs: Vec<_> = roots
        .segments()
        .filter_map(|r| match r.provenance {
            Provenance::HullSegment { left_index, right_index } => Some((left_index, right_index, r.log_value, r.status)),
            _ => None,
        })
        .collect();
    segs.windows(2)
        .enumerate()
        .map(|(t, w)| {
            let (k_prev, k, alpha_log, s1) = w[0];
            let (_, _, next_alpha_log, s2) = w[1];
            RootGapData {
                gap: t + 1,
                k_prev,
                k,
                alpha_log,
                next_alpha_log,
                delta: (alpha_log - next_alpha_log).exp(),
                kappa_left: cond.kappa(k_prev),
                kappa_right: cond.kappa(k),
                status: s1.min(s2),
            }
        })
        .collect()
}

/// Clips `(inner, outer)` to the limits; `Err` with a reason when nothing is left.
fn clip(inner: f64, outer: f64, limits: &AlphaLimits) -> std::result::Result<(f64, f64, Option<String>), String> {
    if inner >= outer {
        return Err("empty annulus".into());
    }
    let lo = inner.max(limits.alpha_minus_log);
    let hi = outer.min(limits.alpha_plus_log);
    if lo >= hi {
        return Err("outside the annulus of convergence".into());
    }
    let note = (lo != inner || hi != outer).then(|| "clipped to the annulus of convergence".to_string());
    Ok((lo, hi, note))
}

struct GapRegion {
    gap: usize,
    k: i64,
    disk_log: f64,
    exclusion: (f64, f64),
}

/// Localization items for every gap of the finite roots, followed by the
/// inclusion annuli between neighbouring passing gaps.
pub fn localize(
    roots: &RootList,
    limits: &AlphaLimits,
    cond: &dyn Conditioning,
    ell_minus: Option<i64>,
    ell_plus: Option<i64>,
    mode: Mode,
) -> Result<LocalizationReport> {
    let ell_minus = ell_minus.ok_or(Error::NotMeromorphic)?;
    let n = cond.dimension() as i64;
    let gaps = gap_data(roots, cond);
    let mut items = Vec::new();
    let mut passing: Vec<GapRegion> = Vec::new();

    items.extend(lower_bound_item(roots, cond, ell_minus));
    for g in &gaps {
        let Some(kappa) = g.kappa_right else {
            for kind in [
                ItemKind::InclusionDisk { radius_log: g.alpha_log, count_eig_minus_poles: n * g.k },
                ItemKind::ExclusionAnnulus { inner_log: g.alpha_log, outer_log: g.next_alpha_log },
            ] {
                items.push(ReportItem {
                    kind,
                    applicable: false,
                    reason: format!("B_{} is singular", g.k),
                    gap: Some(g.gap),
                });
            }
            continue;
        };
        let w = 1.0 + 2.0 * kappa;
        let gate = w.powi(-2);
        let (disk_log, exclusion) = match mode {
            Mode::Wide => (g.alpha_log + w.ln(), (g.alpha_log + w.ln(), g.next_alpha_log - w.ln())),
            Mode::Sharp if g.delta <= gate => {
                let (f, gg) = key_roots(g.delta, kappa)?;
                (g.alpha_log + f.ln(), (g.alpha_log + f.ln(), g.alpha_log + gg.ln()))
            }
            Mode::Sharp => (g.alpha_log + w.ln(), (g.alpha_log + w.ln(), g.next_alpha_log - w.ln())),
        };
        let mut applicable = true;
        let mut reason = Vec::new();
        if g.delta > gate {
            applicable = false;
            reason.push(format!("delta {:.6e} > (1+2*kappa)^-2 = {:.6e}", g.delta, gate));
        } else {
            reason.push(format!("delta {:.6e} <= (1+2*kappa)^-2 = {:.6e}", g.delta, gate));
        }
        match g.status {
            VertexStatus::Uncertified => {
                applicable = false;
                reason.push("roots not certified".into());
            }
            VertexStatus::Estimated => reason.push("roots estimated, not certified".into()),
            VertexStatus::Certified => {}
        }
        let disk_ok = disk_log < limits.alpha_plus_log;
        let disk_reason = if disk_ok { reason.join("; ") } else { format!("{}; outside the annulus of convergence", reason.join("; ")) };
        items.push(ReportItem {
            kind: ItemKind::InclusionDisk { radius_log: disk_log, count_eig_minus_poles: n * g.k },
            applicable: applicable && disk_ok,
            reason: disk_reason,
            gap: Some(g.gap),
        });
        let (excl, excl_ok, excl_reason) = match clip(exclusion.0, exclusion.1, limits) {
            Ok((lo, hi, note)) => {
                let mut r = reason.clone();
                r.extend(note);
                ((lo, hi), true, r.join("; "))
            }
            Err(why) => (exclusion, false, format!("{}; {why}", reason.join("; "))),
        };
        items.push(ReportItem {
            kind: ItemKind::ExclusionAnnulus { inner_log: excl.0, outer_log: excl.1 },
            applicable: applicable && excl_ok,
            reason: excl_reason,
            gap: Some(g.gap),
        });
        if applicable && excl_ok && disk_ok {
            passing.push(GapRegion { gap: g.gap, k: g.k, disk_log, exclusion: excl });
        }
    }

    // Only neighbouring passing gaps: a wider pair would contain the
    // exclusion annulus between them, and its count is the sum anyway.
    for pair in passing.windows(2) {
        let (left, right) = (&pair[0], &pair[1]);
        items.push(ReportItem {
            kind: ItemKind::InclusionAnnulus {
                inner_log: left.exclusion.1,
                outer_log: right.exclusion.0,
                count_eig: n * (right.k - left.k),
            },
            applicable: true,
            reason: format!("between gaps {} and {}", left.gap, right.gap),
            gap: Some(left.gap),
        });
    }
    debug_assert!(passing.iter().all(|p| p.disk_log <= p.exclusion.0 + 1e-12));

    items.extend(upper_bound_item(roots, cond, ell_plus));
    items.sort_by(|a, b| {
        let (ai, ao) = a.kind.radii_log();
        let (bi, bo) = b.kind.radii_log();
        ao.total_cmp(&bo).then(ai.total_cmp(&bi)).then(a.gap.cmp(&b.gap))
    });
    Ok(LocalizationReport { mode, n: n as usize, items, gaps, flags: Vec::new() })
}

fn lower_bound_item(roots: &RootList, cond: &dyn Conditioning, ell_minus: i64) -> Option<ReportItem> {
    let first = roots.segments().next()?;
    let n = cond.dimension() as i64;
    let (radius_log, applicable, reason) = match cond.kappa(ell_minus) {
        Some(kappa) => (
            first.log_value - (1.0 + kappa).ln(),
            first.status != VertexStatus::Uncertified,
            if first.status == VertexStatus::Uncertified { "smallest root not certified".to_string() } else { String::new() },
        ),
        None => (first.log_value, false, format!("B_{ell_minus} is singular")),
    };
    Some(ReportItem {
        kind: ItemKind::LowerExclusionDisk { radius_log, count_at_zero: n * ell_minus },
        applicable,
        reason,
        gap: None,
    })
}

fn upper_bound_item(roots: &RootList, cond: &dyn Conditioning, ell_plus: Option<i64>) -> Option<ReportItem> {
    let ell_plus = ell_plus?;
    let last = roots.segments().last()?;
    let (radius_log, applicable, reason) = match cond.kappa(ell_plus) {
        Some(kappa) => (
            last.log_value + (1.0 + kappa).ln(),
            last.status != VertexStatus::Uncertified,
            if last.status == VertexStatus::Uncertified { "largest root not certified".to_string() } else { String::new() },
        ),
        None => (last.log_value, false, format!("B_{ell_plus} is singular")),
    };
    Some(ReportItem { kind: ItemKind::UpperBoundDisk { radius_log }, applicable, reason, gap: None })
}

/// The lower exclusion disk and upper bound disk alone.
pub fn boundary_bounds(series: &MatrixLaurentSeries, norm: NormChoice) -> Result<Vec<ReportItem>> {
    let (provider, _) = tropicalize(series, norm)?;
    let window = IndexRange::new(series.ell_minus(), series.ell_plus())?;
    let poly = hull_finite(&provider.points(window))?;
    let roots = roots_from_polygon(&poly, &provider)?;
    let cond = MatrixConditioning::new(series, norm);
    Ok(lower_bound_item(&roots, &cond, series.ell_minus())
        .into_iter()
        .chain(upper_bound_item(&roots, &cond, Some(series.ell_plus())))
        .collect())
}

/// Full report for a finite matrix Laurent series.
pub fn localize_matrix(series: &MatrixLaurentSeries, norm: NormChoice, mode: Mode) -> Result<LocalizationReport> {
    let (provider, flags) = tropicalize(series, norm)?;
    let window = IndexRange::new(series.ell_minus(), series.ell_plus())?;
    let poly = hull_finite(&provider.points(window))?;
    let roots = roots_from_polygon(&poly, &provider)?;
    let limits = alpha_limits(&roots, &provider);
    let cond = MatrixConditioning::new(series, norm);
    let mut report = localize(&roots, &limits, &cond, Some(series.ell_minus()), Some(series.ell_plus()), mode)?;
    report.flags = flags;
    Ok(report)
}

/// Report for a scalar series given its roots.
pub fn localize_scalar(roots: &RootList, provider: &CoefficientProvider, mode: Mode) -> Result<LocalizationReport> {
    let limits = alpha_limits(roots, provider);
    let support = provider.support();
    localize(roots, &limits, &ScalarConditioning, support.lower, support.upper, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::certify_window;
    use crate::series::Generator;

    fn scalar_report(entries: &[(i64, f64)], mode: Mode) -> LocalizationReport {
        let p = CoefficientProvider::explicit(entries.iter().copied()).unwrap();
        let w = IndexRange::new(entries[0].0, entries[entries.len() - 1].0).unwrap();
        let poly = hull_finite(&p.points(w)).unwrap();
        localize_scalar(&roots_from_polygon(&poly, &p).unwrap(), &p, mode).unwrap()
    }

    #[test]
    fn key_roots_boundary_cases() {
        let (f, g) = key_roots(1.0 / 9.0, 1.0).unwrap();
        assert!((f - 3.0).abs() < 1e-12 && (g - 3.0).abs() < 1e-12);
        // A rounded gate value moves the double root by about sqrt(eps).
        for c in [1e-3, 0.5, 7.0, 1e3] {
            let (f, _) = key_roots((1.0f64 + 2.0 * c).powi(-2), c).unwrap();
            assert!((f - (1.0 + 2.0 * c)).abs() <= 1e-7 * (1.0 + 2.0 * c));
        }
        assert!(key_roots(0.2, 1.0).is_err());
        assert!(key_roots(0.01, 0.0).is_err());
    }

    #[test]
    fn key_roots_identity() {
        let c = 2.5;
        let delta = (1.0f64 + 2.0 * c).powi(-2) / 4.0;
        let (f, g) = key_roots(delta, c).unwrap();
        assert!(((1.0 / (f - 1.0) + 1.0 / (g - 1.0)) - 1.0 / c).abs() < 1e-12);
        assert!(1.0 + c <= f && f <= g);
        assert!((g * delta * f - 1.0).abs() < 1e-14);
    }

    #[test]
    fn scalar_gate_is_one_ninth() {
        // roots 1 and 16: delta = 1/16 passes
        let r = scalar_report(&[(0, 0.0), (1, 0.0), (2, -16f64.ln())], Mode::Wide);
        assert_eq!(r.gaps.len(), 1);
        assert!((r.gaps[0].delta - 1.0 / 16.0).abs() < 1e-15);
        let disk = r.items.iter().find(|i| matches!(i.kind, ItemKind::InclusionDisk { .. })).unwrap();
        assert!(disk.applicable);
        assert_eq!(disk.kind, ItemKind::InclusionDisk { radius_log: 3f64.ln(), count_eig_minus_poles: 1 });
        // roots 1 and 4: delta = 1/4 fails
        let r = scalar_report(&[(0, 0.0), (1, 0.0), (2, -4f64.ln())], Mode::Wide);
        assert!(r.items.iter().filter(|i| i.gap.is_some()).all(|i| !i.applicable));
    }

    #[test]
    fn linear_polynomial_bounds() {
        // z - 1
        let r = scalar_report(&[(0, 0.0), (1, 0.0)], Mode::Wide);
        let lower = r.items.iter().find(|i| matches!(i.kind, ItemKind::LowerExclusionDisk { .. })).unwrap();
        assert_eq!(lower.kind, ItemKind::LowerExclusionDisk { radius_log: -(2f64.ln()), count_at_zero: 0 });
        let upper = r.items.iter().find(|i| matches!(i.kind, ItemKind::UpperBoundDisk { .. })).unwrap();
        assert_eq!(upper.kind, ItemKind::UpperBoundDisk { radius_log: 2f64.ln() });
    }

    #[test]
    fn rational_toy_has_no_gaps() {
        let p = CoefficientProvider::generator(Generator::RationalToy);
        let poly = certify_window(&p, IndexRange::new(-40, 40).unwrap()).unwrap();
        let roots = roots_from_polygon(&poly, &p).unwrap();
        assert!(gap_data(&roots, &ScalarConditioning).is_empty());
    }

    #[test]
    fn single_coefficient_gives_empty_report() {
        let f = MatrixLaurentSeries::scalar([(0, num_complex::Complex64::new(2.0, 0.0))]).unwrap();
        let r = localize_matrix(&f, NormChoice::Two, Mode::Wide).unwrap();
        assert!(r.items.is_empty());
    }

    #[test]
    fn diagonal_roots() {
        use nalgebra::DMatrix;
        use num_complex::Complex64;
        let one = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        let four = DMatrix::from_element(1, 1, Complex64::new(4.0, 0.0));
        let f = MatrixLaurentSeries::new([(0, one), (2, four)].into_iter().collect()).unwrap();
        let (p, _) = tropicalize(&f, NormChoice::Two).unwrap();
        let poly = hull_finite(&p.points(IndexRange::new(0, 2).unwrap())).unwrap();
        let roots = roots_from_polygon(&poly, &p).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots.as_slice()[0].log_value - 0.5f64.ln()).abs() < 1e-15);
        assert_eq!(roots.as_slice()[0].multiplicity, crate::polygon::Multiplicity::Finite(2));
    }

    #[test]
    fn report_round_trips() {
        let r = scalar_report(&[(0, 0.0), (1, 0.0), (2, -16f64.ln()), (3, -40.0)], Mode::Sharp);
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"radius\""));
        let back: LocalizationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
