use std::ops::{Add, Mul};

use num_complex::Complex;
use num_traits::Zero;

use crate::real::{cabs, Real};

/// Dense univariate polynomial in `u` with complex coefficients; index is degree.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly<F: Real = f64> {
    coeffs: Vec<Complex<F>>,
}

impl<F: Real> UniPoly<F> {
    /// Trailing exact zeros are dropped so the leading coefficient is nonzero.
    pub fn new(mut coeffs: Vec<Complex<F>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        UniPoly::new(
            coeffs
                .iter()
                .map(|&c| Complex::new(F::from_f64(c), F::zero()))
                .collect(),
        )
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coefficients(&self) -> &[Complex<F>] {
        &self.coeffs
    }

    pub fn coefficient(&self, k: usize) -> Complex<F> {
        self.coeffs.get(k).copied().unwrap_or_else(Complex::zero)
    }

    pub fn leading(&self) -> Complex<F> {
        self.coeffs.last().copied().unwrap_or_else(Complex::zero)
    }

    pub fn constant_term(&self) -> Complex<F> {
        self.coefficient(0)
    }

    pub fn max_abs_coefficient(&self) -> F {
        self.coeffs.iter().fold(F::zero(), |acc, c| acc.max(cabs(*c)))
    }

    pub fn eval(&self, x: Complex<F>) -> Complex<F> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::zero(), |acc, c| acc * x + c)
    }

    /// `sum |a_k| |x|^k`, the natural scale for backward error at `x`.
    pub fn abs_eval(&self, x: Complex<F>) -> F {
        let r = cabs(x);
        self.coeffs
            .iter()
            .rev()
            .fold(F::zero(), |acc, c| acc * r + cabs(*c))
    }

    pub fn derivative(&self) -> UniPoly<F> {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * F::from_f64(k as f64))
                .collect(),
        )
    }

    pub fn to_f64(&self) -> UniPoly<f64> {
        UniPoly::new(
            self.coeffs
                .iter()
                .map(|c| Complex::new(c.re.to_f64(), c.im.to_f64()))
                .collect(),
        )
    }

    pub fn convert<G: Real>(&self) -> UniPoly<G> {
        UniPoly::new(
            self.coeffs
                .iter()
                .map(|c| Complex::new(G::from_f64(c.re.to_f64()), G::from_f64(c.im.to_f64())))
                .collect(),
        )
    }
}

impl<F: Real> Add for &UniPoly<F> {
    type Output = UniPoly<F>;

    fn add(self, rhs: &UniPoly<F>) -> UniPoly<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coefficient(k) + rhs.coefficient(k)).collect())
    }
}

impl<F: Real> Mul for &UniPoly<F> {
    type Output = UniPoly<F>;

    fn mul(self, rhs: &UniPoly<F>) -> UniPoly<F> {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Complex::<F>::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        UniPoly::new(out)
    }
}
