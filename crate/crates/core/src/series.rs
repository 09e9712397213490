//! Tropical Laurent series in the log domain.
//!
//! A series is a map `j -> log b_j` with `-inf` standing for `b_j = 0`. The
//! max-times value at `x` is `sup_j b_j x^j`; internally everything is the
//! max-plus value `sup_j (log b_j + j log x)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Relative tolerance used when comparing log-domain quantities that should
/// coincide exactly in real arithmetic.
pub const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// +1 for the right side, -1 for the left side.
    pub fn sign(self) -> i64 {
        match self {
            Side::Left => -1,
            Side::Right => 1,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => f.write_str("left"),
            Side::Right => f.write_str("right"),
        }
    }
}

/// Serde helpers for extended reals: finite values are plain numbers,
/// infinities are the strings `"inf"` and `"-inf"`.
pub mod ext_real {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else if *v < 0.0 {
            s.serialize_str("-inf")
        } else {
            s.serialize_str("nan")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn parse(text: &str) -> Option<f64> {
        match text {
            "inf" | "+inf" | "Infinity" | "+Infinity" => Some(f64::INFINITY),
            "-inf" | "-Infinity" => Some(f64::NEG_INFINITY),
            _ => None,
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) => parse(&t).ok_or_else(|| de::Error::custom(format!("not an extended real: {t}"))),
        }
    }

    pub mod option {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => super::serialize(x, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            #[derive(Deserialize)]
            struct Wrap(#[serde(with = "super")] f64);
            Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
        }
    }
}

/// Log of a nonnegative coefficient; `-inf` encodes zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct LogCoeff(f64);

impl LogCoeff {
    pub const ZERO: LogCoeff = LogCoeff(f64::NEG_INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value == f64::INFINITY {
            return Err(Error::InvalidCoefficient { index: 0, reason: "log coefficient must be finite or -inf" });
        }
        Ok(LogCoeff(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

impl TryFrom<f64> for LogCoeff {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        LogCoeff::new(v)
    }
}

impl From<LogCoeff> for f64 {
    fn from(c: LogCoeff) -> f64 {
        c.0
    }
}

/// Inclusive index window `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexRange {
    pub lo: i64,
    pub hi: i64,
}

impl IndexRange {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::EmptyWindow { lo, hi });
        }
        Ok(IndexRange { lo, hi })
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, j: i64) -> bool {
        self.lo <= j && j <= self.hi
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    /// Window end on the given side.
    pub fn end(&self, side: Side) -> i64 {
        match side {
            Side::Left => self.lo,
            Side::Right => self.hi,
        }
    }

    /// Doubles the width by extending the given sides.
    pub fn extended(&self, left: bool, right: bool) -> IndexRange {
        let w = (self.hi - self.lo).max(1);
        IndexRange {
            lo: if left { self.lo - w } else { self.lo },
            hi: if right { self.hi + w } else { self.hi },
        }
    }
}

impl FromStr for IndexRange {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::Spec(format!("window `{s}` is not of the form a:b")))?;
        let lo = a.trim().parse().map_err(|_| Error::Spec(format!("bad window start `{a}`")))?;
        let hi = b.trim().parse().map_err(|_| Error::Spec(format!("bad window end `{b}`")))?;
        IndexRange::new(lo, hi)
    }
}

impl fmt::Display for IndexRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

/// Indices outside `[lower, upper]` carry zero coefficients. `None` means
/// unbounded on that side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Support {
    pub lower: Option<i64>,
    pub upper: Option<i64>,
}

impl Support {
    pub fn contains(&self, j: i64) -> bool {
        self.lower.is_none_or(|l| j >= l) && self.upper.is_none_or(|u| j <= u)
    }

    /// Support bound on the given side.
    pub fn end(&self, side: Side) -> Option<i64> {
        match side {
            Side::Left => self.lower,
            Side::Right => self.upper,
        }
    }
}

/// Decay bound on one tail, written in outward distance `k > 0` from index 0:
/// `log b_{±k} <= log_c(log_rate) - k * log_rate`.
#[derive(Debug, Clone, PartialEq)]
pub enum TailBound {
    /// Fixed constants: valid only for the stated rate.
    Geometric { log_c: f64, log_rate: f64 },
    /// Valid for every rate with `log_c = max(exp(log_rate), extra terms)`,
    /// as for `sum 1/k!` style tails. Extra `(k, y)` terms come from
    /// coefficients overridden after construction.
    ExpType { extra: Vec<(u64, f64)> },
}

impl TailBound {
    /// Constant of the bound at the given rate, or `None` when the bound does
    /// not hold at that rate.
    pub fn log_c_at(&self, log_rate: f64) -> Option<f64> {
        match self {
            TailBound::Geometric { log_c, log_rate: r } => (log_rate <= *r).then_some(*log_c),
            TailBound::ExpType { extra } => {
                let mut c = log_rate.exp();
                for &(k, y) in extra {
                    c = c.max(y + k as f64 * log_rate);
                }
                Some(c)
            }
        }
    }

    fn with_override(&self, k: u64, y: f64) -> TailBound {
        match self {
            TailBound::Geometric { log_c, log_rate } => TailBound::Geometric {
                log_c: log_c.max(y + k as f64 * log_rate),
                log_rate: *log_rate,
            },
            TailBound::ExpType { extra } => {
                let mut extra = extra.clone();
                extra.push((k, y));
                TailBound::ExpType { extra }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Envelope {
    pub left: Option<TailBound>,
    pub right: Option<TailBound>,
}

impl Envelope {
    pub fn side(&self, side: Side) -> Option<&TailBound> {
        match side {
            Side::Left => self.left.as_ref(),
            Side::Right => self.right.as_ref(),
        }
    }

    fn side_mut(&mut self, side: Side) -> &mut Option<TailBound> {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }
}

/// Per-side asymptote `xi = lim (log b_j + j log alpha)` as `j -> ±inf`,
/// where alpha is the limit of the roots on that side.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Asymptote {
    pub left: Option<f64>,
    pub right: Option<f64>,
}

impl Asymptote {
    pub fn side(&self, side: Side) -> Option<f64> {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// `b_j = 1/j!` for `j >= 0`.
    Exp,
    /// `b_j = 1/|j|!`, `b_0 = exp(log_b0)`, optionally truncated to `|j| <= n`.
    TwoSidedExp { log_b0: f64, truncate: Option<u32> },
    /// `b_j = exp(H_j)` for `j >= 1`.
    HarmonicExp,
    /// `b_j = 2 * 3^(j+2)` for `j < 0`, `3 * 2^-j` for `j >= 0`.
    RationalToy,
    /// `b_j = exp(1 - 1/j)` for `j >= 1`.
    Saturating,
}

impl Generator {
    pub fn id(&self) -> &'static str {
        match self {
            Generator::Exp => "exp",
            Generator::TwoSidedExp { .. } => "two-sided-exp",
            Generator::HarmonicExp => "harmonic-exp",
            Generator::RationalToy => "rational-toy",
            Generator::Saturating => "saturating",
        }
    }

    pub fn log_coeff(&self, j: i64) -> f64 {
        match self {
            Generator::Exp => {
                if j < 0 {
                    f64::NEG_INFINITY
                } else {
                    -ln_factorial(j as u64)
                }
            }
            Generator::TwoSidedExp { log_b0, truncate } => {
                if j == 0 {
                    *log_b0
                } else if truncate.is_some_and(|n| j.unsigned_abs() > n as u64) {
                    f64::NEG_INFINITY
                } else {
                    -ln_factorial(j.unsigned_abs())
                }
            }
            Generator::HarmonicExp => {
                if j < 1 {
                    f64::NEG_INFINITY
                } else {
                    harmonic(j as u64)
                }
            }
            Generator::RationalToy => {
                if j < 0 {
                    std::f64::consts::LN_2 + (j + 2) as f64 * 3f64.ln()
                } else {
                    3f64.ln() - j as f64 * std::f64::consts::LN_2
                }
            }
            Generator::Saturating => {
                if j < 1 {
                    f64::NEG_INFINITY
                } else {
                    1.0 - 1.0 / j as f64
                }
            }
        }
    }

    pub fn support(&self) -> Support {
        match self {
            Generator::Exp => Support { lower: Some(0), upper: None },
            Generator::TwoSidedExp { truncate: Some(n), .. } => Support { lower: Some(-(*n as i64)), upper: Some(*n as i64) },
            Generator::TwoSidedExp { truncate: None, .. } => Support::default(),
            Generator::HarmonicExp | Generator::Saturating => Support { lower: Some(1), upper: None },
            Generator::RationalToy => Support::default(),
        }
    }

    pub fn envelope(&self) -> Envelope {
        let exp_type = || Some(TailBound::ExpType { extra: Vec::new() });
        match self {
            Generator::Exp => Envelope { left: None, right: exp_type() },
            Generator::TwoSidedExp { truncate: None, .. } => Envelope { left: exp_type(), right: exp_type() },
            Generator::TwoSidedExp { .. } | Generator::HarmonicExp => Envelope::default(),
            Generator::RationalToy => Envelope {
                left: Some(TailBound::Geometric { log_c: 18f64.ln(), log_rate: 3f64.ln() }),
                right: Some(TailBound::Geometric { log_c: 3f64.ln(), log_rate: std::f64::consts::LN_2 }),
            },
            Generator::Saturating => Envelope {
                left: None,
                right: Some(TailBound::Geometric { log_c: 1.0, log_rate: 0.0 }),
            },
        }
    }

    pub fn asymptote(&self) -> Asymptote {
        match self {
            Generator::HarmonicExp => Asymptote { left: None, right: Some(f64::INFINITY) },
            Generator::RationalToy => Asymptote { left: Some(18f64.ln()), right: Some(3f64.ln()) },
            Generator::Saturating => Asymptote { left: None, right: Some(1.0) },
            _ => Asymptote::default(),
        }
    }
}

/// `H_j`, exact summation for small `j`, asymptotic expansion beyond.
fn harmonic(j: u64) -> f64 {
    if j <= 64 {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for k in 1..=j {
            let y = 1.0 / k as f64 - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        return sum;
    }
    let x = j as f64;
    let inv2 = 1.0 / (x * x);
    let tail = inv2 * (-1.0 / 12.0 + inv2 * (1.0 / 120.0 + inv2 * (-1.0 / 252.0 + inv2 / 240.0)));
    x.ln() + EULER_GAMMA + (0.5 / x + tail)
}

#[derive(Debug, Clone, PartialEq)]
enum Source {
    Explicit(BTreeMap<i64, f64>),
    Generator(Generator),
    Overlay { base: Box<Source>, overrides: BTreeMap<i64, f64> },
}

impl Source {
    fn log_coeff(&self, j: i64) -> f64 {
        match self {
            Source::Explicit(t) => t.get(&j).copied().unwrap_or(f64::NEG_INFINITY),
            Source::Generator(g) => g.log_coeff(j),
            Source::Overlay { base, overrides } => match overrides.get(&j) {
                Some(v) => *v,
                None => base.log_coeff(j),
            },
        }
    }
}

/// Maps an index to `log |b_j|`, with optional decay metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientProvider {
    source: Source,
    support: Support,
    envelope: Envelope,
    asymptote: Asymptote,
}

impl CoefficientProvider {
    /// Finite table; indices not listed are zero.
    pub fn explicit<I: IntoIterator<Item = (i64, f64)>>(entries: I) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (j, v) in entries {
            if v.is_nan() || v == f64::INFINITY {
                return Err(Error::InvalidCoefficient { index: j, reason: "log coefficient must be finite or -inf" });
            }
            if table.insert(j, v).is_some() {
                return Err(Error::InvalidCoefficient { index: j, reason: "duplicate index" });
            }
        }
        let finite = || table.iter().filter(|(_, v)| v.is_finite()).map(|(j, _)| *j);
        let support = Support { lower: finite().next(), upper: finite().next_back() };
        if support.lower.is_none() {
            return Err(Error::NoFiniteCoefficient);
        }
        Ok(CoefficientProvider {
            source: Source::Explicit(table),
            support,
            envelope: Envelope::default(),
            asymptote: Asymptote::default(),
        })
    }

    pub fn generator(g: Generator) -> Self {
        CoefficientProvider {
            support: g.support(),
            envelope: g.envelope(),
            asymptote: g.asymptote(),
            source: Source::Generator(g),
        }
    }

    /// Looks up a built-in generator by id.
    pub fn from_id(id: &str, log_b0: Option<f64>, truncate: Option<u32>) -> Result<Self> {
        let g = match id {
            "exp" => Generator::Exp,
            "two-sided-exp" => Generator::TwoSidedExp { log_b0: log_b0.unwrap_or(0.0), truncate },
            "harmonic-exp" => Generator::HarmonicExp,
            "rational-toy" => Generator::RationalToy,
            "saturating" => Generator::Saturating,
            other => return Err(Error::UnknownGenerator(other.to_string())),
        };
        Ok(CoefficientProvider::generator(g))
    }

    pub fn log_coeff(&self, j: i64) -> f64 {
        if !self.support.contains(j) {
            return f64::NEG_INFINITY;
        }
        self.source.log_coeff(j)
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn envelope(&self) -> &Envelope {
        &self.envelope
    }

    pub fn asymptote(&self) -> Asymptote {
        self.asymptote
    }

    pub fn generator_id(&self) -> Option<&'static str> {
        match &self.source {
            Source::Generator(g) => Some(g.id()),
            _ => None,
        }
    }

    pub fn with_envelope(mut self, envelope: Envelope) -> Self {
        self.envelope = envelope;
        self
    }

    pub fn with_asymptote(mut self, asymptote: Asymptote) -> Self {
        self.asymptote = asymptote;
        self
    }

    /// Replaces the support hint. Widening it only removes the guarantee
    /// that coefficients outside vanish.
    pub fn with_support(mut self, support: Support) -> Self {
        self.support = support;
        self
    }

    /// Drops envelope and asymptote metadata, forcing heuristic analysis.
    pub fn without_metadata(mut self) -> Self {
        self.envelope = Envelope::default();
        self.asymptote = Asymptote::default();
        self
    }

    /// Copy with the given coefficients replaced.
    pub fn with_overrides(&self, overrides: &BTreeMap<i64, f64>) -> Result<Self> {
        if overrides.is_empty() {
            return Ok(self.clone());
        }
        let mut out = self.clone();
        let mut merged = match &self.source {
            Source::Overlay { overrides, .. } => overrides.clone(),
            _ => BTreeMap::new(),
        };
        let base = match &self.source {
            Source::Overlay { base, .. } => base.clone(),
            other => Box::new(other.clone()),
        };
        for (&j, &v) in overrides {
            if v.is_nan() || v == f64::INFINITY {
                return Err(Error::InvalidCoefficient { index: j, reason: "log coefficient must be finite or -inf" });
            }
            merged.insert(j, v);
            if v.is_finite() {
                if j != 0 {
                    let side = if j > 0 { Side::Right } else { Side::Left };
                    let slot = out.envelope.side_mut(side);
                    if let Some(b) = slot.as_ref() {
                        *slot = Some(b.with_override(j.unsigned_abs(), v));
                    }
                }
                out.support.lower = out.support.lower.map(|l| l.min(j));
                out.support.upper = out.support.upper.map(|u| u.max(j));
            }
        }
        out.source = Source::Overlay { base, overrides: merged };
        Ok(out)
    }

    /// `inf { j : b_j != 0 }` when the support is bounded below, searched up
    /// to `limit` indices past the hint.
    pub fn lowest_index(&self, limit: i64) -> Option<i64> {
        let lo = self.support.lower?;
        (lo..=lo.saturating_add(limit)).find(|&j| self.log_coeff(j).is_finite())
    }

    /// `sup { j : b_j != 0 }` when the support is bounded above.
    pub fn highest_index(&self, limit: i64) -> Option<i64> {
        let hi = self.support.upper?;
        (hi.saturating_sub(limit)..=hi).rev().find(|&j| self.log_coeff(j).is_finite())
    }

    /// Points `(j, log b_j)` over a window, zeros included.
    pub fn points(&self, window: IndexRange) -> Vec<(i64, f64)> {
        window.iter().map(|j| (j, self.log_coeff(j))).collect()
    }
}

/// Log-domain domain of convergence of a tropical series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainInterval {
    #[serde(with = "ext_real")]
    pub lower: f64,
    #[serde(with = "ext_real")]
    pub upper: f64,
    pub lower_closed: bool,
    pub upper_closed: bool,
}

impl DomainInterval {
    pub fn new(lower: f64, upper: f64, lower_closed: bool, upper_closed: bool) -> Self {
        DomainInterval {
            lower,
            upper,
            lower_closed: lower_closed && lower.is_finite(),
            upper_closed: upper_closed && upper.is_finite(),
        }
    }

    pub fn contains(&self, logx: f64) -> bool {
        let above = if self.lower_closed { logx >= self.lower } else { logx > self.lower };
        let below = if self.upper_closed { logx <= self.upper } else { logx < self.upper };
        above && below
    }
}

/// `max_{j in window} (log b_j + j logx)`.
pub fn eval_tropical(provider: &CoefficientProvider, logx: f64, window: IndexRange) -> f64 {
    window
        .iter()
        .map(|j| provider.log_coeff(j))
        .zip(window.iter())
        .filter(|(y, _)| y.is_finite())
        .map(|(y, j)| y + j as f64 * logx)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Elementwise log of positive max-times roots.
pub fn maxplus_of_maxtimes(roots: &[f64]) -> Result<Vec<f64>> {
    roots
        .iter()
        .map(|&r| if r > 0.0 { Ok(r.ln()) } else { Err(Error::NonPositiveRoot(r)) })
        .collect()
}

pub fn maxtimes_of_maxplus(roots: &[f64]) -> Vec<f64> {
    roots.iter().map(|r| r.exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_generator_matches_factorials() {
        let p = CoefficientProvider::generator(Generator::Exp);
        let mut fact = 1.0f64;
        for j in 0..=20i64 {
            if j > 0 {
                fact *= j as f64;
            }
            assert!((p.log_coeff(j) + fact.ln()).abs() < 1e-12, "j = {j}");
        }
        assert_eq!(p.log_coeff(-1), f64::NEG_INFINITY);
    }

    #[test]
    fn harmonic_matches_direct_sum_across_switch() {
        let mut h = 0.0f64;
        for j in 1..=2000u64 {
            h += 1.0 / j as f64;
            assert!((harmonic(j) - h).abs() < 1e-13, "j = {j}");
        }
    }

    #[test]
    fn tropical_values() {
        let toy = CoefficientProvider::generator(Generator::RationalToy);
        let v = eval_tropical(&toy, 0.0, IndexRange::new(-30, 30).unwrap());
        assert!((v - 6f64.ln()).abs() < 1e-14);

        let one = CoefficientProvider::explicit([(0, 0.0)]).unwrap();
        assert_eq!(eval_tropical(&one, 3.7, IndexRange::new(-5, 5).unwrap()), 0.0);

        let h = CoefficientProvider::generator(Generator::HarmonicExp);
        let v = eval_tropical(&h, -1.0, IndexRange::new(1, 100).unwrap());
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn log_exp_bijection() {
        assert_eq!(maxplus_of_maxtimes(&[1.0]).unwrap(), vec![0.0]);
        let v = maxplus_of_maxtimes(&[1.0 / 3.0, 2.0]).unwrap();
        assert!((v[0] + 3f64.ln()).abs() < 1e-15 && (v[1] - 2f64.ln()).abs() < 1e-15);
        let v = maxplus_of_maxtimes(&[(-0.5f64).exp()]).unwrap();
        assert!((v[0] + 0.5).abs() < 1e-15);
        assert!(maxplus_of_maxtimes(&[0.0]).is_err());
        assert!(maxplus_of_maxtimes(&[-2.0]).is_err());
        let back = maxtimes_of_maxplus(&v);
        assert!((back[0] - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn log_coeff_rejects_nan_and_plus_inf() {
        assert!(LogCoeff::new(f64::NAN).is_err());
        assert!(LogCoeff::new(f64::INFINITY).is_err());
        assert!(LogCoeff::new(f64::NEG_INFINITY).unwrap().is_zero());
    }

    #[test]
    fn overrides_extend_support_and_bounds() {
        let p = CoefficientProvider::generator(Generator::Saturating);
        let q = p.with_overrides(&BTreeMap::from([(0, 1.0)])).unwrap();
        assert_eq!(q.support().lower, Some(0));
        assert_eq!(q.log_coeff(0), 1.0);
        assert_eq!(q.log_coeff(5), p.log_coeff(5));
        assert_eq!(q.envelope(), p.envelope());

        let e = CoefficientProvider::generator(Generator::Exp);
        let f = e.with_overrides(&BTreeMap::from([(3, 12.0)])).unwrap();
        let c = f.envelope().right.as_ref().unwrap().log_c_at(1.0).unwrap();
        assert!((c - 15.0).abs() < 1e-12);
    }

    #[test]
    fn window_parsing() {
        let w: IndexRange = "-8:8".parse().unwrap();
        assert_eq!((w.lo, w.hi, w.len()), (-8, 8, 17));
        assert!("3:1".parse::<IndexRange>().is_err());
        assert!("3".parse::<IndexRange>().is_err());
    }
}
