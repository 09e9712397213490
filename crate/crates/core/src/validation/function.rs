use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::localization::MatrixLaurentSeries;

/// Something whose zeros minus poles can be counted from `f'/f`.
pub trait ArgumentSource {
    fn log_derivative(&self, z: Complex64) -> Option<Complex64>;
}

impl ArgumentSource for MatrixLaurentSeries {
    fn log_derivative(&self, z: Complex64) -> Option<Complex64> {
        MatrixLaurentSeries::log_derivative(self, z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexCoeff {
    pub j: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Closed-form scalar functions with their derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScalarFunction {
    /// `Σ c_j z^j`.
    Laurent { coeffs: Vec<ComplexCoeff> },
    /// `e^z + Σ c_j z^j`.
    ExpPlusLaurent { coeffs: Vec<ComplexCoeff> },
    /// `Σ_{|j|<=n} z^j/|j|! + Σ c_j z^j`, the truncation of `e^z + e^{1/z} − 1`
    /// plus a Laurent polynomial.
    TwoSidedExpPlusLaurent { n: u32, coeffs: Vec<ComplexCoeff> },
    /// `15/((1 − 3z)(z − 2))`.
    RationalToy,
}

fn laurent(coeffs: &[ComplexCoeff], z: Complex64) -> (Complex64, Complex64) {
    let mut f = Complex64::new(0.0, 0.0);
    let mut df = Complex64::new(0.0, 0.0);
    for c in coeffs {
        let cj = Complex64::new(c.re, c.im);
        f += cj * z.powi(c.j as i32);
        if c.j != 0 {
            df += cj * c.j as f64 * z.powi(c.j as i32 - 1);
        }
    }
    (f, df)
}

fn two_sided_exp(n: u32, z: Complex64) -> (Complex64, Complex64) {
    let w = z.inv();
    let mut f = Complex64::new(1.0, 0.0);
    let mut df = Complex64::new(0.0, 0.0);
    // term_j = z^j/j!, back_j = z^-j/j!
    let mut term = Complex64::new(1.0, 0.0);
    let mut back = Complex64::new(1.0, 0.0);
    for j in 1..=n {
        let prev_term = term;
        let jf = j as f64;
        term *= z / jf;
        back *= w / jf;
        f += term + back;
        // d/dz z^j/j! = z^{j-1}/(j-1)!,  d/dz z^-j/j! = -z^-j/(j-1)! / z
        df += prev_term - back * jf * w;
    }
    (f, df)
}

impl ScalarFunction {
    pub fn laurent_from<I: IntoIterator<Item = (i64, Complex64)>>(coeffs: I) -> Self {
        ScalarFunction::Laurent {
            coeffs: coeffs.into_iter().map(|(j, c)| ComplexCoeff { j, re: c.re, im: c.im }).collect(),
        }
    }

    /// Value and derivative at `z`.
    pub fn eval(&self, z: Complex64) -> (Complex64, Complex64) {
        match self {
            ScalarFunction::Laurent { coeffs } => laurent(coeffs, z),
            ScalarFunction::ExpPlusLaurent { coeffs } => {
                let (p, dp) = laurent(coeffs, z);
                let e = z.exp();
                (e + p, e + dp)
            }
            ScalarFunction::TwoSidedExpPlusLaurent { n, coeffs } => {
                let (p, dp) = laurent(coeffs, z);
                let (f, df) = two_sided_exp(*n, z);
                (f + p, df + dp)
            }
            ScalarFunction::RationalToy => {
                let a = Complex64::new(1.0, 0.0) - 3.0 * z;
                let b = z - 2.0;
                let f = 15.0 / (a * b);
                // f'/f = 3/(1-3z) - 1/(z-2)
                (f, f * (3.0 / a - 1.0 / b))
            }
        }
    }

    /// Coefficients of the Laurent part, merged by index.
    pub fn laurent_coeffs(&self) -> BTreeMap<i64, Complex64> {
        let mut out = BTreeMap::new();
        if let ScalarFunction::Laurent { coeffs }
        | ScalarFunction::ExpPlusLaurent { coeffs }
        | ScalarFunction::TwoSidedExpPlusLaurent { coeffs, .. } = self
        {
            for c in coeffs {
                *out.entry(c.j).or_insert(Complex64::new(0.0, 0.0)) += Complex64::new(c.re, c.im);
            }
        }
        out
    }
}

impl ArgumentSource for ScalarFunction {
    fn log_derivative(&self, z: Complex64) -> Option<Complex64> {
        let (f, df) = self.eval(z);
        let q = df / f;
        q.is_finite().then_some(q)
    }
}
