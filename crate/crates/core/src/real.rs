//! Floating-point scalars used by the numeric side of the crate.
//!
//! Everything that touches root finding or the torsion formula is generic over
//! [`Real`], so the same code runs in standard `f64` and in the extended
//! [`DoubleDouble`] mode.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{FromPrimitive, Num, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Working precision for numeric evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// IEEE double.
    #[default]
    Standard,
    /// Double-double (about 32 significant digits).
    Extended,
}

impl std::str::FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(Precision::Standard),
            "extended" => Ok(Precision::Extended),
            other => Err(format!("unknown precision `{other}` (expected standard|extended)")),
        }
    }
}

pub trait Real:
    Copy + Num + Neg<Output = Self> + PartialOrd + fmt::Debug + Send + Sync + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn from_bigint(x: &BigInt) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    /// Unit roundoff of the format.
    fn epsilon() -> Self;

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn from_bigint(x: &BigInt) -> Self {
        x.to_f64().unwrap_or(f64::NAN)
    }

    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }

    fn abs(self) -> Self {
        f64::abs(self)
    }

    fn epsilon() -> Self {
        f64::EPSILON
    }
}

/// Modulus of a complex number, scaled to avoid overflow.
pub fn cabs<F: Real>(z: Complex<F>) -> F {
    let a = z.re.abs();
    let b = z.im.abs();
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    if big.is_zero() {
        return F::zero();
    }
    let r = small / big;
    big * (F::one() + r * r).sqrt()
}

pub fn cfrom<F: Real>(z: Complex<f64>) -> Complex<F> {
    Complex::new(F::from_f64(z.re), F::from_f64(z.im))
}

pub fn cto_f64<F: Real>(z: Complex<F>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

/// Integer power by repeated squaring; negative exponents invert.
pub fn cpowi<F: Real>(z: Complex<F>, exp: i64) -> Complex<F> {
    let mut base = if exp < 0 { Complex::<F>::one() / z } else { z };
    let mut e = exp.unsigned_abs();
    let mut acc = Complex::<F>::one();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

/// Principal square root.
pub fn csqrt<F: Real>(z: Complex<F>) -> Complex<F> {
    let r = cabs(z);
    if r.is_zero() {
        return Complex::zero();
    }
    let two = F::from_f64(2.0);
    let re = ((r + z.re) / two).max(F::zero()).sqrt();
    let im_mag = ((r - z.re) / two).max(F::zero()).sqrt();
    let im = if z.im < F::zero() { -im_mag } else { im_mag };
    Complex::new(re, im)
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const fn new(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (h, l) = quick_two_sum(hi, lo);
        DoubleDouble { hi: h, lo: l }
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.hi + self.lo)
    }
}

impl Add for DoubleDouble {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Self::renorm(s, e + f)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;

    fn neg(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        Self::renorm(p, e)
    }
}

impl Div for DoubleDouble {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        // Long division: two correction steps in double precision.
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * DoubleDouble::from(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * DoubleDouble::from(q2);
        let q3 = r.hi / rhs.hi;
        let (q, e) = quick_two_sum(q1, q2);
        DoubleDouble::renorm(q, e) + DoubleDouble::from(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;

    fn rem(self, rhs: Self) -> Self {
        let q = (self / rhs).hi.trunc();
        self - rhs * DoubleDouble::from(q)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        DoubleDouble::from(0.0)
    }

    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        DoubleDouble::from(1.0)
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = std::num::ParseFloatError;

    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        s.parse::<f64>().map(DoubleDouble::from)
    }
}

impl Real for DoubleDouble {
    fn from_f64(x: f64) -> Self {
        DoubleDouble::from(x)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn from_bigint(x: &BigInt) -> Self {
        let hi = x.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return DoubleDouble::from(hi);
        }
        let rest = x - BigInt::from_f64(hi).unwrap_or_default();
        let lo = rest.to_f64().unwrap_or(0.0);
        DoubleDouble::renorm(hi, lo)
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::zero();
        }
        // One Newton step on the double approximation doubles the digits.
        let x = DoubleDouble::from(self.hi.sqrt());
        let half = DoubleDouble::from(0.5);
        x + (self - x * x) * half / x
    }

    fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    fn epsilon() -> Self {
        // 2^-104
        DoubleDouble::from(4.930380657631324e-32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(x: f64) -> DoubleDouble {
        DoubleDouble::from(x)
    }

    #[test]
    fn third_carries_extra_digits() {
        let third = dd(1.0) / dd(3.0);
        let back = third * dd(3.0) - dd(1.0);
        assert!(back.abs().to_f64() < 1e-30);
        // The low word is exactly what plain f64 loses.
        assert!((third - dd(1.0 / 3.0)).abs().to_f64() > 1e-18);
    }

    #[test]
    fn sqrt_two_squared() {
        let s = Real::sqrt(dd(2.0));
        assert!((s * s - dd(2.0)).abs().to_f64() < 1e-30);
    }

    #[test]
    fn bigint_conversion_keeps_low_bits() {
        let big: BigInt = (BigInt::from(1u64) << 70) + BigInt::from(3);
        let x = DoubleDouble::from_bigint(&big);
        let diff = x - DoubleDouble::from(2f64.powi(70));
        assert_eq!(diff.to_f64(), 3.0);
    }

    #[test]
    fn complex_helpers() {
        let z = Complex::new(3.0f64, 4.0);
        assert_eq!(cabs(z), 5.0);
        let r = csqrt(Complex::new(-4.0f64, 0.0));
        assert!((r - Complex::new(0.0, 2.0)).norm() < 1e-15);
        let p = cpowi(Complex::new(2.0f64, 0.0), -3);
        assert!((p.re - 0.125).abs() < 1e-16);
    }

    #[test]
    fn complex_dd_division() {
        let a = Complex::new(dd(1.0), dd(2.0));
        let b = Complex::new(dd(3.0), dd(-1.0));
        let q = a / b;
        let back = q * b - a;
        assert!(cabs(back).to_f64() < 1e-30);
    }
}
