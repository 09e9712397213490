use serde::{Deserialize, Serialize};

use super::function::ArgumentSource;
use super::winding::count_zeros_minus_poles;
use crate::error::Result;
use crate::localization::{ItemKind, LocalizationReport};

/// One report item whose stated count the winding oracle contradicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub item: usize,
    pub kind: String,
    pub expected: i64,
    /// `None` when the winding count itself failed.
    pub found: Option<i64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl ValidationSummary {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Count on a circle moved off `radius_log` by a small step in direction
/// `dir`, towards the side the report claims is free of eigenvalues.
fn count_off(f: &dyn ArgumentSource, radius_log: f64, dir: f64) -> Result<i64> {
    let mut last = None;
    for step in [1e-3, 1e-4, 1e-2] {
        match count_zeros_minus_poles(f, radius_log + dir * step, 0) {
            Ok(c) => return Ok(c),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("three attempts"))
}

/// Checks every applicable item of `report` against the winding count of `f`.
/// `total` is the number of eigenvalues minus poles over the whole plane, used
/// for upper-bound disks; such items are skipped when it is unknown.
pub fn validate_report(report: &LocalizationReport, f: &dyn ArgumentSource, total: Option<i64>) -> ValidationSummary {
    let mut summary = ValidationSummary::default();
    for (pos, item) in report.items.iter().enumerate() {
        if !item.applicable {
            continue;
        }
        let (expected, found): (i64, Result<i64>) = match item.kind {
            ItemKind::ExclusionAnnulus { inner_log, outer_log } => {
                let (a, b) = if outer_log - inner_log > 2e-3 {
                    (inner_log + 1e-3, outer_log - 1e-3)
                } else {
                    let mid = 0.5 * (inner_log + outer_log);
                    (mid, mid)
                };
                let diff = (|| Ok(count_zeros_minus_poles(f, b, 0)? - count_zeros_minus_poles(f, a, 0)?))();
                (0, diff)
            }
            ItemKind::InclusionDisk { radius_log, count_eig_minus_poles } => {
                (count_eig_minus_poles, count_off(f, radius_log, 1.0))
            }
            ItemKind::InclusionAnnulus { inner_log, outer_log, count_eig } => {
                let diff = (|| Ok(count_off(f, outer_log, 1.0)? - count_off(f, inner_log, -1.0)?))();
                (count_eig, diff)
            }
            ItemKind::LowerExclusionDisk { radius_log, count_at_zero } => (count_at_zero, count_off(f, radius_log, -1.0)),
            ItemKind::UpperBoundDisk { radius_log } => match total {
                Some(t) => (t, count_off(f, radius_log, 1.0)),
                None => continue,
            },
        };
        summary.checked += 1;
        match found {
            Ok(c) if c == expected => {}
            Ok(c) => summary.mismatches.push(Mismatch {
                item: pos,
                kind: item.kind.name().to_string(),
                expected,
                found: Some(c),
                detail: String::new(),
            }),
            Err(e) => summary.mismatches.push(Mismatch {
                item: pos,
                kind: item.kind.name().to_string(),
                expected,
                found: None,
                detail: e.to_string(),
            }),
        }
    }
    summary
}
