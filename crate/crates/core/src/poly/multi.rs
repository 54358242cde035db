use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{PolyError, UniPoly};
use crate::real::{cpowi, Real};

/// Variable slot of a [`MultiPoly`].
///
/// After the symbolic specialization `t1 = t2 = m`, `t3 = u` the ring
/// `Z[m^±1, u]` lives in slots `T1` (for `m`) and `T3` (for `u`); the aliases
/// [`Var::M`] and [`Var::U`] name those slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    T1,
    T2,
    T3,
}

impl Var {
    pub const M: Var = Var::T1;
    pub const U: Var = Var::T3;
}

/// Exponent triple. `t1`, `t2` are Laurent, `t3` is ordinary.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub t1: i32,
    pub t2: i32,
    pub t3: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { t1: 0, t2: 0, t3: 0 };

    pub const fn new(t1: i32, t2: i32, t3: u32) -> Self {
        Monomial { t1, t2, t3 }
    }

    fn times(self, other: Monomial) -> Monomial {
        Monomial {
            t1: self.t1 + other.t1,
            t2: self.t2 + other.t2,
            t3: self.t3 + other.t3,
        }
    }
}

/// Sparse polynomial in `Z[t1^±1, t2^±1, t3]` with big-integer coefficients.
///
/// The term map never stores a zero coefficient, so structural equality is
/// polynomial equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn one() -> Self {
        MultiPoly::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        MultiPoly::monomial(c, Monomial::ONE)
    }

    pub fn monomial(c: impl Into<BigInt>, mono: Monomial) -> Self {
        let mut p = MultiPoly::zero();
        p.add_term(mono, c.into());
        p
    }

    pub fn var(v: Var) -> Self {
        let mono = match v {
            Var::T1 => Monomial::new(1, 0, 0),
            Var::T2 => Monomial::new(0, 1, 0),
            Var::T3 => Monomial::new(0, 0, 1),
        };
        MultiPoly::monomial(1, mono)
    }

    /// `m^e` in the specialized ring (slot `t1`).
    pub fn m_pow(e: i32) -> Self {
        MultiPoly::monomial(1, Monomial::new(e, 0, 0))
    }

    /// `u^e` in the specialized ring (slot `t3`).
    pub fn u_pow(e: u32) -> Self {
        MultiPoly::monomial(1, Monomial::new(0, 0, e))
    }

    /// Builds a polynomial from `(coefficient, t1, t2, t3)` tuples, merging
    /// repeated monomials.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (C, i32, i32, u32)>,
        C: Into<BigInt>,
    {
        let mut p = MultiPoly::zero();
        for (c, a, b, e) in terms {
            p.add_term(Monomial::new(a, b, e), c.into());
        }
        p
    }

    fn add_term(&mut self, mono: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::ONE)
                .is_some_and(|c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mono: Monomial) -> BigInt {
        self.terms.get(&mono).cloned().unwrap_or_default()
    }

    /// Constant value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => self.terms.get(&Monomial::ONE).cloned(),
            _ => None,
        }
    }

    pub fn max_abs_coefficient(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }

    pub fn scale(&self, c: &BigInt) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    /// Multiplies by the monomial `t1^a t2^b t3^e`.
    pub fn shift(&self, mono: Monomial) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(m, v)| (m.times(mono), v.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> MultiPoly {
        let mut acc = MultiPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Degree in `t3` (the `u` slot); `None` for the zero polynomial.
    pub fn degree_t3(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.t3).max()
    }

    /// Coefficient of `t3^j` as a polynomial in `t1`, `t2`.
    pub fn coefficient_t3(&self, j: u32) -> MultiPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.t3 == j)
                .map(|(m, c)| (Monomial::new(m.t1, m.t2, 0), c.clone()))
                .collect(),
        }
    }

    /// Formal partial derivative. Laurent exponents follow `e t^(e-1)`.
    pub fn partial(&self, var: Var) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let (e, dm) = match var {
                Var::T1 => (m.t1 as i64, Monomial { t1: m.t1 - 1, ..*m }),
                Var::T2 => (m.t2 as i64, Monomial { t2: m.t2 - 1, ..*m }),
                Var::T3 => {
                    if m.t3 == 0 {
                        continue;
                    }
                    (m.t3 as i64, Monomial { t3: m.t3 - 1, ..*m })
                }
            };
            if e != 0 {
                out.add_term(dm, c * BigInt::from(e));
            }
        }
        out
    }

    /// Substitutes `t1 = t2 = m`, keeping `t3 = u`. The result has `t2`
    /// exponent zero everywhere.
    pub fn specialize_symbolic(&self) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(Monomial::new(m.t1 + m.t2, 0, m.t3), c.clone());
        }
        out
    }

    /// Substitutes `t1 = t2 = d` and returns the result as a polynomial in `u`.
    pub fn specialize_at<F: Real>(&self, d: Complex<F>) -> Result<UniPoly<F>, PolyError> {
        if d.re.is_zero() && d.im.is_zero() && self.has_negative_exponent() {
            return Err(PolyError::ZeroBase);
        }
        let degree = self.degree_t3().unwrap_or(0) as usize;
        let mut coeffs = vec![Complex::<F>::zero(); degree + 1];
        for (m, c) in &self.terms {
            let k = F::from_bigint(c);
            coeffs[m.t3 as usize] =
                coeffs[m.t3 as usize] + cpowi(d, (m.t1 + m.t2) as i64) * k;
        }
        Ok(UniPoly::new(coeffs))
    }

    fn has_negative_exponent(&self) -> bool {
        self.terms.keys().any(|m| m.t1 < 0 || m.t2 < 0)
    }

    /// Evaluates at complex values: sums over `t1`, `t2` per `t3`-degree, then
    /// Horner in `t3`.
    pub fn eval<F: Real>(
        &self,
        t1: Complex<F>,
        t2: Complex<F>,
        t3: Complex<F>,
    ) -> Result<Complex<F>, PolyError> {
        let zero1 = t1.re.is_zero() && t1.im.is_zero();
        let zero2 = t2.re.is_zero() && t2.im.is_zero();
        if (zero1 && self.terms.keys().any(|m| m.t1 < 0))
            || (zero2 && self.terms.keys().any(|m| m.t2 < 0))
        {
            return Err(PolyError::ZeroBase);
        }
        let degree = match self.degree_t3() {
            Some(d) => d as usize,
            None => return Ok(Complex::zero()),
        };
        let mut layers = vec![Complex::<F>::zero(); degree + 1];
        for (m, c) in &self.terms {
            let k = F::from_bigint(c);
            let mono = cpowi(t1, m.t1 as i64) * cpowi(t2, m.t2 as i64);
            layers[m.t3 as usize] = layers[m.t3 as usize] + mono * k;
        }
        Ok(layers.into_iter().rev().fold(Complex::zero(), |acc, c| acc * t3 + c))
    }

    /// Evaluates an element of the specialized ring at `(m, u)`.
    pub fn eval_mu<F: Real>(&self, m: Complex<F>, u: Complex<F>) -> Result<Complex<F>, PolyError> {
        self.eval(m, m, u)
    }

    /// Renders with `t1`, `t2`, `t3` as variable names.
    pub fn display_t(&self) -> String {
        self.render(["t1", "t2", "t3"], false)
    }

    /// Renders an element of the specialized ring with `m` and `u`, ordering
    /// terms by `u`-degree, then by `|m|`-exponent with positive powers first.
    pub fn display_mu(&self) -> String {
        self.render(["m", "t2", "u"], true)
    }

    fn render(&self, names: [&str; 3], mu_order: bool) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut items: Vec<(&Monomial, &BigInt)> = self.terms.iter().collect();
        if mu_order {
            items.sort_by_key(|(m, _)| (m.t3, -(m.t1.abs()), m.t1 < 0, -(m.t2.abs()), m.t2 < 0));
        }
        let mut out = String::new();
        for (i, (m, c)) in items.into_iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            for (e, name) in [(m.t1 as i64, names[0]), (m.t2 as i64, names[1]), (m.t3 as i64, names[2])] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            if factors.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&factors.join("*"));
            } else {
                out.push_str(&format!("{mag}*{}", factors.join("*")));
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_t())
    }
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<(i32, i32, u32, String)> = self
            .terms
            .iter()
            .map(|(m, c)| (m.t1, m.t2, m.t3, c.to_string()))
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows: Vec<(i32, i32, u32, String)> = Vec::deserialize(deserializer)?;
        let mut p = MultiPoly::zero();
        for (a, b, e, c) in rows {
            let c: BigInt = c.parse().map_err(D::Error::custom)?;
            p.add_term(Monomial::new(a, b, e), c);
        }
        Ok(p)
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.times(*mb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &'a MultiPoly) -> MultiPoly {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<MultiPoly> for &'a MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        -&self
    }
}

impl From<i64> for MultiPoly {
    fn from(c: i64) -> Self {
        MultiPoly::constant(c)
    }
}
