use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localization::{tropicalize, MatrixLaurentSeries, NormChoice};
use crate::series::{ext_real, Asymptote, CoefficientProvider, Envelope, IndexRange, TailBound};
use crate::update::MonomialUpdate;
use crate::validation::{ComplexCoeff, ScalarFunction};

/// Seed used for synthetic matrices when neither the spec nor `TROPLAUR_SEED` sets one.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecKind {
    Generator,
    Explicit,
    Matrix,
    SyntheticMatrix,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_b0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncate: Option<u32>,
    /// Matrix size of a synthetic series.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Coefficient norms of a synthetic series, from index 0 up.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub magnitudes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A scalar coefficient, given either as `log |b_j|` or as a complex value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffEntry {
    pub j: i64,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "ext_real::option")]
    pub log_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub re: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<f64>,
}

impl CoeffEntry {
    fn complex(&self) -> Option<Complex64> {
        (self.re.is_some() || self.im.is_some()).then(|| Complex64::new(self.re.unwrap_or(0.0), self.im.unwrap_or(0.0)))
    }

    fn log_magnitude(&self) -> Result<f64> {
        match (self.log_b, self.complex()) {
            (Some(y), None) => Ok(y),
            (None, Some(c)) => Ok(c.norm().ln()),
            _ => Err(Error::Spec(format!("coefficient {} needs exactly one of `log_b` or `re`/`im`", self.j))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixCoeff {
    pub j: i64,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

/// `log b_{±k} <= log_c - k * log_rate`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometricSpec {
    pub log_c: f64,
    pub log_rate: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeSpec {
    #[serde(default)]
    pub left: Option<GeometricSpec>,
    #[serde(default)]
    pub right: Option<GeometricSpec>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoteSpec {
    #[serde(default, with = "ext_real::option")]
    pub left: Option<f64>,
    #[serde(default, with = "ext_real::option")]
    pub right: Option<f64>,
}

/// Input document describing a series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    pub kind: SpecKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default)]
    pub params: SpecParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<CoeffEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_coeffs: Option<Vec<MatrixCoeff>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope: Option<EnvelopeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asymptote: Option<AsymptoteSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormChoice>,
    /// Default window, overridden by `--window`.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "window_text")]
    pub window: Option<IndexRange>,
    /// Closed-form evaluator for the validation oracle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<ScalarFunction>,
}

mod window_text {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::series::IndexRange;

    pub fn serialize<S: Serializer>(w: &Option<IndexRange>, s: S) -> Result<S::Ok, S::Error> {
        match w {
            Some(w) => s.serialize_str(&w.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<IndexRange>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|t| t.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// A spec turned into something the commands can work on.
#[derive(Debug, Clone)]
pub enum Series {
    Scalar { provider: CoefficientProvider, function: Option<ScalarFunction> },
    Matrix { series: MatrixLaurentSeries, norm: NormChoice },
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Spec(e.to_string())
}

impl SeriesSpec {
    /// Parses and checks a spec document; errors carry line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let spec: SeriesSpec = serde_json::from_str(text).map_err(json_error)?;
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        let scalar = self.coeffs.is_some() as u8 + self.id.is_some() as u8;
        let matrix = self.matrix_coeffs.is_some() as u8;
        let ok = match self.kind {
            SpecKind::Generator => self.id.is_some() && scalar == 1 && matrix == 0,
            SpecKind::Explicit => self.coeffs.is_some() && scalar == 1 && matrix == 0,
            SpecKind::Matrix => matrix == 1 && scalar == 0,
            SpecKind::SyntheticMatrix => scalar == 0 && matrix == 0,
        };
        if !ok {
            return Err(Error::Spec("exactly one of `coeffs`, `id` or `matrix_coeffs` must match the kind".into()));
        }
        let mut seen = BTreeSet::new();
        let indices: Vec<i64> = match (&self.coeffs, &self.matrix_coeffs) {
            (Some(c), _) => c.iter().map(|e| e.j).collect(),
            (_, Some(m)) => m.iter().map(|e| e.j).collect(),
            _ => Vec::new(),
        };
        if let Some(j) = indices.into_iter().find(|j| !seen.insert(*j)) {
            return Err(Error::Spec(format!("index {j} appears twice")));
        }
        Ok(())
    }

    fn seed(&self) -> Result<u64> {
        if let Some(s) = self.params.seed {
            return Ok(s);
        }
        match std::env::var("TROPLAUR_SEED") {
            Ok(v) => v.trim().parse().map_err(|_| Error::Spec(format!("TROPLAUR_SEED `{v}` is not an integer"))),
            Err(_) => Ok(DEFAULT_SEED),
        }
    }

    fn apply_metadata(&self, mut provider: CoefficientProvider) -> CoefficientProvider {
        if let Some(e) = self.envelope {
            let geo = |g: Option<GeometricSpec>| g.map(|g| TailBound::Geometric { log_c: g.log_c, log_rate: g.log_rate });
            provider = provider.with_envelope(Envelope { left: geo(e.left), right: geo(e.right) });
        }
        if let Some(a) = self.asymptote {
            provider = provider.with_asymptote(Asymptote { left: a.left, right: a.right });
        }
        provider
    }

    fn generator_function(&self) -> Option<ScalarFunction> {
        match self.id.as_deref()? {
            "exp" => Some(ScalarFunction::ExpPlusLaurent { coeffs: Vec::new() }),
            "two-sided-exp" if self.params.log_b0.unwrap_or(0.0) == 0.0 => {
                self.params.truncate.map(|n| ScalarFunction::TwoSidedExpPlusLaurent { n, coeffs: Vec::new() })
            }
            "rational-toy" => Some(ScalarFunction::RationalToy),
            _ => None,
        }
    }

    pub fn build(&self) -> Result<Series> {
        match self.kind {
            SpecKind::Generator => {
                let id = self.id.as_deref().expect("checked");
                let provider = CoefficientProvider::from_id(id, self.params.log_b0, self.params.truncate)?;
                let function = self.function.clone().or_else(|| self.generator_function());
                Ok(Series::Scalar { provider: self.apply_metadata(provider), function })
            }
            SpecKind::Explicit => {
                let coeffs = self.coeffs.as_ref().expect("checked");
                let entries = coeffs.iter().map(|c| Ok((c.j, c.log_magnitude()?))).collect::<Result<Vec<_>>>()?;
                let provider = self.apply_metadata(CoefficientProvider::explicit(entries)?);
                let function = self.function.clone().or_else(|| {
                    let complex: Option<Vec<ComplexCoeff>> = coeffs
                        .iter()
                        .map(|c| c.complex().map(|z| ComplexCoeff { j: c.j, re: z.re, im: z.im }))
                        .collect();
                    complex.map(|coeffs| ScalarFunction::Laurent { coeffs })
                });
                Ok(Series::Scalar { provider, function })
            }
            SpecKind::Matrix => {
                let mut map = BTreeMap::new();
                for m in self.matrix_coeffs.as_ref().expect("checked") {
                    map.insert(m.j, matrix_of(m)?);
                }
                Ok(Series::Matrix { series: MatrixLaurentSeries::new(map)?, norm: self.norm.unwrap_or_default() })
            }
            SpecKind::SyntheticMatrix => {
                let n = self.params.n.ok_or_else(|| Error::Spec("synthetic-matrix needs `params.n`".into()))?;
                let mags = self
                    .params
                    .magnitudes
                    .as_ref()
                    .ok_or_else(|| Error::Spec("synthetic-matrix needs `params.magnitudes`".into()))?;
                let series = MatrixLaurentSeries::synthetic(n, mags, self.seed()?)?;
                Ok(Series::Matrix { series, norm: self.norm.unwrap_or_default() })
            }
        }
    }

    /// Window used when none is given on the command line.
    pub fn default_window(&self, series: &Series) -> Result<IndexRange> {
        if let Some(w) = self.window {
            return Ok(w);
        }
        match series {
            Series::Matrix { series, .. } => IndexRange::new(series.ell_minus(), series.ell_plus()),
            Series::Scalar { provider, .. } => {
                let s = provider.support();
                match (self.id.as_deref(), s.lower, s.upper) {
                    (_, Some(lo), Some(hi)) => IndexRange::new(lo, hi),
                    (Some("harmonic-exp" | "saturating"), _, _) => IndexRange::new(1, 200),
                    (_, Some(lo), None) => IndexRange::new(lo, lo + 40),
                    (_, None, Some(hi)) => IndexRange::new(hi - 40, hi),
                    (_, None, None) => IndexRange::new(-40, 40),
                }
            }
        }
    }
}

fn matrix_of(m: &MatrixCoeff) -> Result<DMatrix<Complex64>> {
    let n = m.re.len();
    let shape_err = || Error::MatrixShape(format!("coefficient {} is not square", m.j));
    if m.re.iter().any(|r| r.len() != n) {
        return Err(shape_err());
    }
    if let Some(im) = &m.im {
        if im.len() != n || im.iter().any(|r| r.len() != n) {
            return Err(shape_err());
        }
    }
    Ok(DMatrix::from_fn(n, n, |r, c| {
        Complex64::new(m.re[r][c], m.im.as_ref().map_or(0.0, |im| im[r][c]))
    }))
}

impl Series {
    /// The tropical coefficients the polygon is built from, plus any flags.
    pub fn provider(&self) -> Result<(CoefficientProvider, Vec<String>)> {
        match self {
            Series::Scalar { provider, .. } => Ok((provider.clone(), Vec::new())),
            Series::Matrix { series, norm } => tropicalize(series, *norm),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UpdateEntry {
    j: i64,
    #[serde(default)]
    log_gamma: Option<f64>,
    #[serde(default)]
    gamma: Option<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum UpdatesDoc {
    List(Vec<UpdateEntry>),
    Wrapped { updates: Vec<UpdateEntry> },
}

/// Parses an updates file: a list of `{j, log_gamma}` or `{j, gamma}`
/// entries, optionally wrapped as `{"updates": [...]}`.
pub fn parse_updates(text: &str) -> Result<Vec<MonomialUpdate>> {
    let doc: UpdatesDoc = serde_json::from_str(text).map_err(json_error)?;
    let entries = match doc {
        UpdatesDoc::List(v) | UpdatesDoc::Wrapped { updates: v } => v,
    };
    entries
        .into_iter()
        .map(|e| match (e.log_gamma, e.gamma) {
            (Some(y), None) => MonomialUpdate::new(e.j, y),
            (None, Some(g)) if g > 0.0 => MonomialUpdate::new(e.j, g.ln()),
            _ => Err(Error::Spec(format!("update {} needs exactly one of `log_gamma` or a positive `gamma`", e.j))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mixed_sources() {
        let err = SeriesSpec::parse(r#"{"kind":"generator","id":"exp","coeffs":[]}"#).unwrap_err();
        assert!(err.to_string().contains("exactly one"));
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = SeriesSpec::parse("{\n\"kind\": \"explicit\",\n\"coeffs\": [ {\"j\": 0, \"bogus\": 1} ]\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn duplicate_indices_are_rejected() {
        let text = r#"{"kind":"explicit","coeffs":[{"j":1,"log_b":0},{"j":1,"log_b":2}]}"#;
        assert!(SeriesSpec::parse(text).is_err());
    }

    #[test]
    fn complex_coefficients_give_an_evaluator() {
        let text = r#"{"kind":"explicit","coeffs":[{"j":0,"re":-1},{"j":2,"re":1}]}"#;
        let spec = SeriesSpec::parse(text).unwrap();
        let Series::Scalar { provider, function } = spec.build().unwrap() else { panic!() };
        assert_eq!(provider.log_coeff(0), 0.0);
        assert!(function.is_some());
        assert_eq!(spec.default_window(&spec.build().unwrap()).unwrap(), IndexRange::new(0, 2).unwrap());
    }

    #[test]
    fn updates_accept_both_forms() {
        let u = parse_updates(r#"[{"j":1,"gamma":2.0},{"j":2,"log_gamma":-1}]"#).unwrap();
        assert!((u[0].log_gamma - 2f64.ln()).abs() < 1e-15);
        let w = parse_updates(r#"{"updates":[{"j":3,"log_gamma":0}]}"#).unwrap();
        assert_eq!(w[0].index, 3);
        assert!(parse_updates(r#"[{"j":1,"gamma":-2.0}]"#).is_err());
    }
}
