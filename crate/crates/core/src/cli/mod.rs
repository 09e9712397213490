//! File-driven commands behind the `troplaur` binary. Each command is a pure
//! function of its inputs returning the text to write and an exit code.

mod spec;

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

pub use spec::{
    parse_updates, AsymptoteSpec, CoeffEntry, EnvelopeSpec, GeometricSpec, MatrixCoeff, Series, SeriesSpec, SpecKind, SpecParams,
    DEFAULT_SEED,
};

use crate::error::{Error, Result};
use crate::localization::{localize_matrix, localize_scalar, ItemKind, LocalizationReport, Mode, NormChoice};
use crate::polygon::{
    alpha_limits, certify_window, domain_interval, polygon_csv, roots_from_polygon, AlphaLimits, NewtonPolygon, RootList,
};
use crate::quadrature::{advise_nodes, filter_magnitude, FilterQuery};
use crate::series::{CoefficientProvider, DomainInterval, IndexRange};
use crate::update::{update_with_laurent_polynomial, Combine, MonomialUpdate, UpdateOutcome};
use crate::validation::{validate_report, ArgumentSource, ScalarFunction, ValidationSummary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INAPPLICABLE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Table,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "table" => Ok(OutputFormat::Table),
            _ => Err(Error::InvalidQuery("output format must be json, csv or table")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub text: String,
    pub code: i32,
}

impl CommandOutput {
    fn ok(text: String) -> Self {
        CommandOutput { text, code: EXIT_OK }
    }
}

/// Polygon, roots and limits of a scalar series after optional updates.
#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub polygon: NewtonPolygon,
    pub roots: RootList,
    pub alpha_limits: AlphaLimits,
    pub domain: DomainInterval,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub outcomes: Vec<UpdateOutcome>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
    #[serde(skip)]
    pub provider: CoefficientProvider,
}

/// Shared options of the polygon-building commands.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub window: Option<IndexRange>,
    pub updates: Vec<MonomialUpdate>,
    pub combine: Combine,
    pub mode: Mode,
    pub norm: Option<NormChoice>,
    pub format: OutputFormat,
}

fn with_norm(series: Series, norm: Option<NormChoice>) -> Series {
    match (series, norm) {
        (Series::Matrix { series, .. }, Some(norm)) => Series::Matrix { series, norm },
        (s, _) => s,
    }
}

pub fn analyse(spec: &SeriesSpec, opts: &RunOptions) -> Result<Analysis> {
    let series = with_norm(spec.build()?, opts.norm);
    let window = match opts.window {
        Some(w) => w,
        None => spec.default_window(&series)?,
    };
    let (provider, mut flags) = series.provider()?;
    if matches!(series, Series::Matrix { .. }) && !opts.updates.is_empty() {
        return Err(Error::Spec("updates apply to scalar series only".into()));
    }
    let base = certify_window(&provider, window)?;
    let (polygon, provider, outcomes) = if opts.updates.is_empty() {
        (base, provider, Vec::new())
    } else {
        let r = update_with_laurent_polynomial(&base, &provider, &opts.updates, opts.combine)?;
        (r.polygon, r.provider, r.outcomes)
    };
    flags.extend(polygon.flags.iter().cloned());
    let roots = roots_from_polygon(&polygon, &provider)?;
    let limits = alpha_limits(&roots, &provider);
    let domain = domain_interval(&limits, &roots);
    Ok(Analysis { polygon, roots, alpha_limits: limits, domain, outcomes, flags, provider })
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn roots_table(roots: &RootList, csv_mode: bool) -> Result<String> {
    let mut w = csv::WriterBuilder::new().delimiter(if csv_mode { b',' } else { b'\t' }).from_writer(Vec::new());
    w.write_record(["log_alpha", "alpha", "mult", "provenance", "status", "tolerance"])?;
    for r in roots.iter() {
        let prov = serde_json::to_value(r.provenance)?;
        let prov = prov.get("type").and_then(|t| t.as_str()).unwrap_or("").to_string();
        w.write_record([
            format!("{:e}", r.log_value),
            format!("{:e}", r.log_value.exp()),
            serde_json::to_value(r.multiplicity)?.to_string().trim_matches('"').to_string(),
            prov,
            serde_json::to_value(r.status)?.as_str().unwrap_or("").to_string(),
            r.tolerance.map(|t| format!("{t:e}")).unwrap_or_default(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// `troplaur polygon`: the certified polygon with its roots.
pub fn cmd_polygon(spec: &SeriesSpec, opts: &RunOptions) -> Result<CommandOutput> {
    let a = analyse(spec, opts)?;
    let text = match opts.format {
        OutputFormat::Json => json(&a)?,
        OutputFormat::Csv => polygon_csv(&a.polygon, &a.provider)?,
        OutputFormat::Table => {
            let mut s = format!("window {}  left {:?}  right {:?}\n", a.polygon.window, a.polygon.left, a.polygon.right);
            for v in &a.polygon.vertices {
                writeln!(s, "{:>8}  {:>24e}  {:?}", v.index, v.log_coeff, v.status).expect("string write");
            }
            s
        }
    };
    Ok(CommandOutput::ok(text))
}

/// `troplaur roots`: the root list alone.
pub fn cmd_roots(spec: &SeriesSpec, opts: &RunOptions) -> Result<CommandOutput> {
    let a = analyse(spec, opts)?;
    let text = match opts.format {
        OutputFormat::Json => json(&serde_json::json!({
            "roots": a.roots,
            "alpha_limits": a.alpha_limits,
            "domain": a.domain,
        }))?,
        OutputFormat::Csv => roots_table(&a.roots, true)?,
        OutputFormat::Table => roots_table(&a.roots, false)?,
    };
    Ok(CommandOutput::ok(text))
}

/// `troplaur update`: the polygon after adding the monomials of an updates file.
pub fn cmd_update(spec: &SeriesSpec, opts: &RunOptions) -> Result<CommandOutput> {
    if opts.updates.is_empty() {
        return Err(Error::Spec("update needs a nonempty updates file".into()));
    }
    cmd_polygon(spec, opts)
}

fn report_table(report: &LocalizationReport, csv_mode: bool) -> Result<String> {
    let mut w = csv::WriterBuilder::new().delimiter(if csv_mode { b',' } else { b'\t' }).from_writer(Vec::new());
    w.write_record(["kind", "applicable", "inner", "outer", "count", "reason"])?;
    for item in &report.items {
        let (inner, outer) = item.kind.radii_log();
        let count = match item.kind {
            ItemKind::InclusionDisk { count_eig_minus_poles: c, .. }
            | ItemKind::InclusionAnnulus { count_eig: c, .. }
            | ItemKind::LowerExclusionDisk { count_at_zero: c, .. } => c.to_string(),
            ItemKind::ExclusionAnnulus { .. } => "0".to_string(),
            ItemKind::UpperBoundDisk { .. } => String::new(),
        };
        w.write_record([
            item.kind.name().to_string(),
            item.applicable.to_string(),
            format!("{:.6e}", inner.exp()),
            format!("{:.6e}", outer.exp()),
            count,
            item.reason.clone(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn localization_report(spec: &SeriesSpec, opts: &RunOptions) -> Result<LocalizationReport> {
    match with_norm(spec.build()?, opts.norm) {
        Series::Matrix { series, norm } => {
            if !opts.updates.is_empty() {
                return Err(Error::Spec("updates apply to scalar series only".into()));
            }
            localize_matrix(&series, norm, opts.mode)
        }
        Series::Scalar { .. } => {
            let a = analyse(spec, opts)?;
            let mut report = localize_scalar(&a.roots, &a.provider, opts.mode)?;
            report.flags.extend(a.flags);
            Ok(report)
        }
    }
}

/// `troplaur localize`: exits with [`EXIT_INAPPLICABLE`] when the roots have
/// gaps but none of them passes its gate.
pub fn cmd_localize(spec: &SeriesSpec, opts: &RunOptions) -> Result<CommandOutput> {
    let report = localization_report(spec, opts)?;
    let text = match opts.format {
        OutputFormat::Json => json(&report)?,
        OutputFormat::Csv => report_table(&report, true)?,
        OutputFormat::Table => report_table(&report, false)?,
    };
    let gated = report.applicable().any(|i| matches!(i.kind, ItemKind::ExclusionAnnulus { .. }));
    let code = if !report.gaps.is_empty() && !gated { EXIT_INAPPLICABLE } else { EXIT_OK };
    Ok(CommandOutput { text, code })
}

/// Contour and nearest excluded radius for the `disk`-th applicable inclusion
/// disk (1-based, by radius): the disk edge and the far edge of the exclusion
/// annulus it borders.
pub fn disk_query(report: &LocalizationReport, disk: usize, epsilon: f64) -> Result<FilterQuery> {
    let mut disks: Vec<_> = report
        .applicable()
        .filter_map(|i| match i.kind {
            ItemKind::InclusionDisk { radius_log, .. } => Some((radius_log, i.gap)),
            _ => None,
        })
        .collect();
    disks.sort_by(|a, b| a.0.total_cmp(&b.0));
    let &(radius_log, gap) = disks
        .get(disk.checked_sub(1).ok_or(Error::InvalidQuery("disks are numbered from 1"))?)
        .ok_or(Error::InvalidQuery("no applicable inclusion disk with that number"))?;
    let outer = report
        .applicable()
        .filter_map(|i| match i.kind {
            ItemKind::ExclusionAnnulus { inner_log, outer_log } => {
                let same_gap = gap.is_some() && i.gap == gap;
                let same_edge = (inner_log - radius_log).abs() <= 1e-12 * radius_log.abs().max(1.0);
                (same_gap || same_edge).then_some(outer_log)
            }
            _ => None,
        })
        .next()
        .ok_or(Error::InvalidQuery("the disk borders no applicable exclusion annulus"))?;
    FilterQuery::new(radius_log, outer, epsilon)
}

#[derive(Serialize)]
struct Advice {
    nodes: u64,
    contour_radius: f64,
    nearest_excluded: f64,
    ratio: f64,
    epsilon: f64,
    filter_at_excluded: f64,
}

/// `troplaur advise`: node count for the contour at the `disk`-th inclusion disk.
pub fn cmd_advise(report: &LocalizationReport, epsilon: f64, disk: usize, format: OutputFormat) -> Result<CommandOutput> {
    let q = disk_query(report, disk, epsilon)?;
    let nodes = advise_nodes(&q)?;
    let advice = Advice {
        nodes,
        contour_radius: q.contour_radius_log.exp(),
        nearest_excluded: q.nearest_excluded_log.exp(),
        ratio: (q.nearest_excluded_log - q.contour_radius_log).exp(),
        epsilon,
        filter_at_excluded: filter_magnitude(&q, nodes, q.nearest_excluded_log)?,
    };
    let text = match format {
        OutputFormat::Json => json(&advice)?,
        _ => format!("{nodes}\n"),
    };
    Ok(CommandOutput::ok(text))
}

/// `troplaur validate`: checks the report's counts with the winding oracle and
/// exits with [`EXIT_MISMATCH`] on any disagreement.
pub fn cmd_validate(spec: &SeriesSpec, report: &LocalizationReport) -> Result<CommandOutput> {
    let summary = validate_spec_report(spec, report)?;
    let code = if summary.passed() { EXIT_OK } else { EXIT_MISMATCH };
    Ok(CommandOutput { text: json(&summary)?, code })
}

pub fn validate_spec_report(spec: &SeriesSpec, report: &LocalizationReport) -> Result<ValidationSummary> {
    match spec.build()? {
        Series::Matrix { series, .. } => {
            let total = series.dimension() as i64 * series.ell_plus();
            Ok(validate_report(report, &series as &dyn ArgumentSource, Some(total)))
        }
        Series::Scalar { function: Some(f), .. } => {
            let total = match &f {
                ScalarFunction::Laurent { .. } => f.laurent_coeffs().iter().rev().find(|(_, c)| c.norm() > 0.0).map(|(j, _)| *j),
                ScalarFunction::TwoSidedExpPlusLaurent { n, .. } => {
                    let top = f.laurent_coeffs().iter().rev().find(|(_, c)| c.norm() > 0.0).map(|(j, _)| *j);
                    Some(top.map_or(*n as i64, |t| t.max(*n as i64)))
                }
                _ => None,
            };
            Ok(validate_report(report, &f, total))
        }
        Series::Scalar { function: None, .. } => Err(Error::Spec("the spec has no evaluator (`function`) to validate against".into())),
    }
}
