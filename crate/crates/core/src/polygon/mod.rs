//! Newton polygons of tropical Laurent series and their roots.

mod certify;
mod hull;
mod roots;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{ext_real, IndexRange, Side};

pub use certify::certify_window;
pub(crate) use certify::EXTENSION_CAP;
pub use hull::{hull_finite, orientation, Orientation};
pub(crate) use hull::upper_hull;
pub use roots::{
    alpha_limits, detect_infinite_root, domain_interval, polygon_csv, roots_from_polygon, tail_estimate, TailEstimate,
    TailLimit,
};

/// Confidence attached to a vertex or root. Ordered from weakest to strongest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexStatus {
    Uncertified,
    Estimated,
    Certified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "VertexRepr", try_from = "VertexRepr")]
pub struct PolygonVertex {
    pub index: i64,
    pub log_coeff: f64,
    pub status: VertexStatus,
}

impl PolygonVertex {
    pub fn certified(&self) -> bool {
        self.status == VertexStatus::Certified
    }

    pub fn point(&self) -> (i64, f64) {
        (self.index, self.log_coeff)
    }
}

#[derive(Serialize, Deserialize)]
struct VertexRepr {
    j: i64,
    log_b: f64,
    certified: bool,
    status: VertexStatus,
}

impl From<PolygonVertex> for VertexRepr {
    fn from(v: PolygonVertex) -> Self {
        VertexRepr { j: v.index, log_b: v.log_coeff, certified: v.certified(), status: v.status }
    }
}

impl TryFrom<VertexRepr> for PolygonVertex {
    type Error = Error;
    fn try_from(r: VertexRepr) -> Result<Self> {
        if !r.log_b.is_finite() {
            return Err(Error::InvalidCoefficient { index: r.j, reason: "vertex coefficient must be finite" });
        }
        Ok(PolygonVertex { index: r.j, log_coeff: r.log_b, status: r.status })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LimitStatus {
    Exact,
    Estimated {
        #[serde(with = "ext_real")]
        tolerance: f64,
    },
}

impl LimitStatus {
    pub fn tolerance(&self) -> f64 {
        match self {
            LimitStatus::Exact => 0.0,
            LimitStatus::Estimated { tolerance } => *tolerance,
        }
    }
}

/// What lies beyond the outermost vertex on one side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Boundary {
    /// The support ends at the outermost vertex.
    Bounded,
    /// Coefficients continue past the window and were not resolved.
    Open,
    /// An edge of infinite length leaves the outermost vertex; its root is
    /// `log_alpha`.
    Ray {
        #[serde(with = "ext_real")]
        log_alpha: f64,
        status: LimitStatus,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub window: IndexRange,
    pub vertices: Vec<PolygonVertex>,
    pub left: Boundary,
    pub right: Boundary,
    /// Finite points lying on the hull without being vertices.
    #[serde(default)]
    pub collapsed: Vec<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl NewtonPolygon {
    pub fn boundary(&self, side: Side) -> Boundary {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    pub(crate) fn boundary_mut(&mut self, side: Side) -> &mut Boundary {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }

    pub fn left_open(&self) -> bool {
        self.left == Boundary::Open
    }

    pub fn right_open(&self) -> bool {
        self.right == Boundary::Open
    }

    pub fn indices(&self) -> Vec<i64> {
        self.vertices.iter().map(|v| v.index).collect()
    }

    pub fn points(&self) -> Vec<(i64, f64)> {
        self.vertices.iter().map(|v| v.point()).collect()
    }

    /// Segment slopes left to right.
    pub fn slopes(&self) -> Vec<f64> {
        self.vertices
            .windows(2)
            .map(|w| (w[1].log_coeff - w[0].log_coeff) / (w[1].index - w[0].index) as f64)
            .collect()
    }

    pub fn vertex_at(&self, index: i64) -> Option<&PolygonVertex> {
        self.vertices.binary_search_by_key(&index, |v| v.index).ok().map(|k| &self.vertices[k])
    }

    /// Checks strict index order and strictly decreasing slopes.
    pub fn check_invariants(&self) -> Result<()> {
        for w in self.vertices.windows(2) {
            if w[0].index >= w[1].index {
                return Err(Error::UnsortedPoints(w[1].index));
            }
        }
        for (k, w) in self.slopes().windows(2).enumerate() {
            if w[0] <= w[1] {
                return Err(Error::InvalidCoefficient {
                    index: self.vertices[k + 1].index,
                    reason: "hull slopes are not strictly decreasing",
                });
            }
        }
        Ok(())
    }

    /// Height of the polygon at `j`, `-inf` outside its reach.
    pub fn height_at(&self, j: i64) -> f64 {
        let (first, last) = match (self.vertices.first(), self.vertices.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return f64::NEG_INFINITY,
        };
        if j < first.index {
            return match self.left {
                Boundary::Ray { log_alpha, .. } => first.log_coeff + (first.index - j) as f64 * log_alpha,
                _ => f64::NEG_INFINITY,
            };
        }
        if j > last.index {
            return match self.right {
                Boundary::Ray { log_alpha, .. } => last.log_coeff - (j - last.index) as f64 * log_alpha,
                _ => f64::NEG_INFINITY,
            };
        }
        let k = self.vertices.partition_point(|v| v.index <= j);
        let a = &self.vertices[k - 1];
        if a.index == j {
            return a.log_coeff;
        }
        let b = &self.vertices[k];
        let t = (j - a.index) as f64 / (b.index - a.index) as f64;
        a.log_coeff + t * (b.log_coeff - a.log_coeff)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplicity {
    Finite(u64),
    Infinite,
}

impl Serialize for Multiplicity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Multiplicity::Finite(m) => s.serialize_u64(*m),
            Multiplicity::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Multiplicity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(0) => Err(serde::de::Error::custom("multiplicity must be positive")),
            Raw::Num(m) => Ok(Multiplicity::Finite(m)),
            Raw::Text(t) if t == "inf" => Ok(Multiplicity::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad multiplicity `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Provenance {
    HullSegment { left_index: i64, right_index: i64 },
    ZeroRoot,
    DomainEndpoint { side: Side },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TropicalRoot {
    #[serde(rename = "log_alpha", with = "ext_real")]
    pub log_value: f64,
    #[serde(rename = "mult")]
    pub multiplicity: Multiplicity,
    pub provenance: Provenance,
    pub status: VertexStatus,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "ext_real::option")]
    pub tolerance: Option<f64>,
}

impl TropicalRoot {
    pub fn is_segment(&self) -> bool {
        matches!(self.provenance, Provenance::HullSegment { .. })
    }
}

/// Roots sorted strictly increasing in log value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<TropicalRoot>", into = "Vec<TropicalRoot>")]
pub struct RootList(Vec<TropicalRoot>);

impl RootList {
    pub fn new(roots: Vec<TropicalRoot>) -> Result<Self> {
        for w in roots.windows(2) {
            if !(w[0].log_value < w[1].log_value) {
                return Err(Error::InvalidCoefficient { index: 0, reason: "roots must be strictly increasing" });
            }
        }
        let infinite = |side| {
            roots
                .iter()
                .filter(|r| r.provenance == Provenance::DomainEndpoint { side })
                .count()
        };
        if infinite(Side::Left) > 1 || infinite(Side::Right) > 1 {
            return Err(Error::InvalidCoefficient { index: 0, reason: "more than one infinite root on a side" });
        }
        Ok(RootList(roots))
    }

    pub fn as_slice(&self) -> &[TropicalRoot] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, TropicalRoot> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn segments(&self) -> impl Iterator<Item = &TropicalRoot> {
        self.0.iter().filter(|r| r.is_segment())
    }

    pub fn endpoint(&self, side: Side) -> Option<&TropicalRoot> {
        self.0.iter().find(|r| r.provenance == Provenance::DomainEndpoint { side })
    }

    pub fn zero_root(&self) -> Option<&TropicalRoot> {
        self.0.iter().find(|r| r.provenance == Provenance::ZeroRoot)
    }
}

impl TryFrom<Vec<TropicalRoot>> for RootList {
    type Error = Error;
    fn try_from(v: Vec<TropicalRoot>) -> Result<Self> {
        RootList::new(v)
    }
}

impl From<RootList> for Vec<TropicalRoot> {
    fn from(r: RootList) -> Self {
        r.0
    }
}

impl<'a> IntoIterator for &'a RootList {
    type Item = &'a TropicalRoot;
    type IntoIter = std::slice::Iter<'a, TropicalRoot>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Limits of the root sequence on both sides, equal to the log radii of
/// convergence of any classical series with this tropicalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaLimits {
    #[serde(with = "ext_real")]
    pub alpha_minus_log: f64,
    #[serde(with = "ext_real")]
    pub alpha_plus_log: f64,
    pub minus_status: LimitStatus,
    pub plus_status: LimitStatus,
}

impl AlphaLimits {
    pub fn side(&self, side: Side) -> (f64, LimitStatus) {
        match side {
            Side::Left => (self.alpha_minus_log, self.minus_status),
            Side::Right => (self.alpha_plus_log, self.plus_status),
        }
    }
}
