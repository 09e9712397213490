use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::CoefficientProvider;

/// Matrix norm used for the tropicalization and condition numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormChoice {
    One,
    #[default]
    Two,
    Inf,
    Fro,
}

impl FromStr for NormChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" | "1" => Ok(NormChoice::One),
            "two" | "2" => Ok(NormChoice::Two),
            "inf" => Ok(NormChoice::Inf),
            "fro" => Ok(NormChoice::Fro),
            _ => Err(Error::InvalidQuery("norm must be one of one, two, inf, fro")),
        }
    }
}

impl fmt::Display for NormChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormChoice::One => "one",
            NormChoice::Two => "two",
            NormChoice::Inf => "inf",
            NormChoice::Fro => "fro",
        })
    }
}

const SVD_MAX_ITER: usize = 10_000;

fn singular_values(b: &DMatrix<Complex64>) -> Option<Vec<f64>> {
    let svd = b.clone().try_svd(false, false, f64::EPSILON, SVD_MAX_ITER)?;
    Some(svd.singular_values.iter().copied().collect())
}

/// Norm of `b`; `None` only when the two-norm SVD does not converge.
pub fn matrix_norm(b: &DMatrix<Complex64>, norm: NormChoice) -> Option<f64> {
    match norm {
        NormChoice::One => Some(
            b.column_iter()
                .map(|c| c.iter().map(|x| x.norm()).sum::<f64>())
                .fold(0.0, f64::max),
        ),
        NormChoice::Inf => Some(
            b.row_iter()
                .map(|r| r.iter().map(|x| x.norm()).sum::<f64>())
                .fold(0.0, f64::max),
        ),
        NormChoice::Fro => Some(b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()),
        NormChoice::Two => singular_values(b).map(|s| s.into_iter().fold(0.0, f64::max)),
    }
}

/// `‖B‖·‖B⁻¹‖`, `None` for a numerically singular `B`.
pub fn condition_number(b: &DMatrix<Complex64>, norm: NormChoice) -> Option<f64> {
    let n = b.nrows();
    let sv = singular_values(b).unwrap_or_default();
    let (smin, smax) = if sv.is_empty() {
        (0.0, 0.0)
    } else {
        (sv.iter().copied().fold(f64::INFINITY, f64::min), sv.iter().copied().fold(0.0, f64::max))
    };
    if !sv.is_empty() && smin <= n as f64 * f64::EPSILON * smax {
        return None;
    }
    match norm {
        NormChoice::Two if !sv.is_empty() => Some(smax / smin),
        _ => {
            let norm = if norm == NormChoice::Two { NormChoice::Fro } else { norm };
            let inv = b.clone().try_inverse()?;
            Some(matrix_norm(b, norm)? * matrix_norm(&inv, norm)?)
        }
    }
}

/// `F(z) = Σ B_j z^j` with finitely many square coefficients of one size.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixLaurentSeries {
    coeffs: BTreeMap<i64, DMatrix<Complex64>>,
    n: usize,
}

impl MatrixLaurentSeries {
    pub fn new(coeffs: BTreeMap<i64, DMatrix<Complex64>>) -> Result<Self> {
        let n = coeffs.values().next().map(|m| m.nrows()).ok_or(Error::NoFiniteCoefficient)?;
        for (j, m) in &coeffs {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::MatrixShape(format!("coefficient {j} is {}x{}, expected {n}x{n}", m.nrows(), m.ncols())));
            }
        }
        if n == 0 {
            return Err(Error::MatrixShape("empty matrices".into()));
        }
        let coeffs: BTreeMap<_, _> = coeffs.into_iter().filter(|(_, m)| m.iter().any(|x| *x != Complex64::new(0.0, 0.0))).collect();
        if coeffs.is_empty() {
            return Err(Error::NoFiniteCoefficient);
        }
        Ok(MatrixLaurentSeries { coeffs, n })
    }

    /// Scalar Laurent polynomial as a 1x1 series.
    pub fn scalar<I: IntoIterator<Item = (i64, Complex64)>>(coeffs: I) -> Result<Self> {
        Self::new(coeffs.into_iter().map(|(j, c)| (j, DMatrix::from_element(1, 1, c))).collect())
    }

    /// Real Gaussian coefficients scaled by `magnitudes[j]` at index `j`.
    pub fn synthetic(n: usize, magnitudes: &[f64], seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = magnitudes
            .iter()
            .enumerate()
            .map(|(j, &scale)| {
                let m = DMatrix::from_fn(n, n, |_, _| Complex64::new(scale * rng.sample::<f64, _>(StandardNormal), 0.0));
                (j as i64, m)
            })
            .collect();
        Self::new(coeffs)
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, DMatrix<Complex64>> {
        &self.coeffs
    }

    pub fn coeff(&self, j: i64) -> Option<&DMatrix<Complex64>> {
        self.coeffs.get(&j)
    }

    pub fn ell_minus(&self) -> i64 {
        *self.coeffs.keys().next().expect("nonempty")
    }

    pub fn ell_plus(&self) -> i64 {
        *self.coeffs.keys().next_back().expect("nonempty")
    }

    pub fn eval(&self, z: Complex64) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(self.n, self.n);
        for (&j, b) in &self.coeffs {
            out += b * z.powi(j as i32);
        }
        out
    }

    pub fn eval_derivative(&self, z: Complex64) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(self.n, self.n);
        for (&j, b) in &self.coeffs {
            if j != 0 {
                out += b * (z.powi(j as i32 - 1) * j as f64);
            }
        }
        out
    }

    /// `tr(F(z)⁻¹ F'(z))`, the logarithmic derivative of `det F`.
    pub fn log_derivative(&self, z: Complex64) -> Option<Complex64> {
        let lu = self.eval(z).lu();
        let x = lu.solve(&self.eval_derivative(z))?;
        Some(x.trace())
    }
}

/// Scalar tropicalization `log ‖B_j‖`, with the norms that had to fall back
/// to Frobenius listed as flags.
pub fn tropicalize(series: &MatrixLaurentSeries, norm: NormChoice) -> Result<(CoefficientProvider, Vec<String>)> {
    let mut flags = Vec::new();
    let mut entries = Vec::with_capacity(series.coeffs.len());
    for (&j, b) in &series.coeffs {
        let value = match matrix_norm(b, norm) {
            Some(v) => v,
            None => {
                flags.push(format!("two-norm of B_{j} did not converge; Frobenius norm used"));
                matrix_norm(b, NormChoice::Fro).expect("Frobenius norm always exists")
            }
        };
        entries.push((j, value.ln()));
    }
    Ok((CoefficientProvider::explicit(entries)?, flags))
}

/// Per-index condition numbers and the dimension, as needed by the
/// localization gates.
pub trait Conditioning {
    fn dimension(&self) -> usize;
    fn kappa(&self, j: i64) -> Option<f64>;
}

/// Scalar series: every nonzero coefficient has condition number one.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScalarConditioning;

impl Conditioning for ScalarConditioning {
    fn dimension(&self) -> usize {
        1
    }

    fn kappa(&self, _j: i64) -> Option<f64> {
        Some(1.0)
    }
}

/// Condition numbers of the coefficients of a matrix series.
#[derive(Debug, Clone)]
pub struct MatrixConditioning {
    n: usize,
    kappas: BTreeMap<i64, Option<f64>>,
}

impl MatrixConditioning {
    pub fn new(series: &MatrixLaurentSeries, norm: NormChoice) -> Self {
        let kappas = series.coeffs.iter().map(|(&j, b)| (j, condition_number(b, norm))).collect();
        MatrixConditioning { n: series.n, kappas }
    }
}

impl Conditioning for MatrixConditioning {
    fn dimension(&self) -> usize {
        self.n
    }

    fn kappa(&self, j: i64) -> Option<f64> {
        self.kappas.get(&j).copied().flatten()
    }
}
