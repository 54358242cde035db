//! Representation matrices over `Z[t1^±1, t2^±1, t3]`, the Riley polynomial,
//! and the exact identities it satisfies.

use std::ops::Mul;

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::poly::{Monomial, MultiPoly, Var};
use crate::real::Real;
use crate::schubert::{Generator, KnotWords, SchubertError, SchubertForm, Word};

/// 2×2 matrix over [`MultiPoly`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PolyMat2 {
    pub a11: MultiPoly,
    pub a12: MultiPoly,
    pub a21: MultiPoly,
    pub a22: MultiPoly,
}

impl PolyMat2 {
    pub fn new(a11: MultiPoly, a12: MultiPoly, a21: MultiPoly, a22: MultiPoly) -> Self {
        PolyMat2 { a11, a12, a21, a22 }
    }

    pub fn identity() -> Self {
        PolyMat2::new(
            MultiPoly::one(),
            MultiPoly::zero(),
            MultiPoly::zero(),
            MultiPoly::one(),
        )
    }

    pub fn det(&self) -> MultiPoly {
        &self.a11 * &self.a22 - &self.a12 * &self.a21
    }

    /// Inverse of a unimodular matrix (the adjugate).
    pub fn unimodular_inverse(&self) -> PolyMat2 {
        PolyMat2::new(self.a22.clone(), -&self.a12, -&self.a21, self.a11.clone())
    }

    pub fn map(&self, f: impl Fn(&MultiPoly) -> MultiPoly) -> PolyMat2 {
        PolyMat2::new(f(&self.a11), f(&self.a12), f(&self.a21), f(&self.a22))
    }

    pub fn scale(&self, c: &MultiPoly) -> PolyMat2 {
        self.map(|e| e * c)
    }

    pub fn add(&self, other: &PolyMat2) -> PolyMat2 {
        PolyMat2::new(
            &self.a11 + &other.a11,
            &self.a12 + &other.a12,
            &self.a21 + &other.a21,
            &self.a22 + &other.a22,
        )
    }

    pub fn sub(&self, other: &PolyMat2) -> PolyMat2 {
        PolyMat2::new(
            &self.a11 - &other.a11,
            &self.a12 - &other.a12,
            &self.a21 - &other.a21,
            &self.a22 - &other.a22,
        )
    }

    pub fn entries(&self) -> [&MultiPoly; 4] {
        [&self.a11, &self.a12, &self.a21, &self.a22]
    }

    pub fn entry(&self, i: usize, j: usize) -> &MultiPoly {
        match (i, j) {
            (1, 1) => &self.a11,
            (1, 2) => &self.a12,
            (2, 1) => &self.a21,
            (2, 2) => &self.a22,
            _ => panic!("entry ({i},{j}) out of range"),
        }
    }

    /// Substitutes `t1 = t2 = m`, `t3 = u` entry-wise.
    pub fn specialize(&self) -> PolyMat2 {
        self.map(MultiPoly::specialize_symbolic)
    }

    pub fn partial(&self, var: Var) -> PolyMat2 {
        self.map(|e| e.partial(var))
    }
}

impl Mul for &PolyMat2 {
    type Output = PolyMat2;

    fn mul(self, rhs: &PolyMat2) -> PolyMat2 {
        PolyMat2::new(
            &self.a11 * &rhs.a11 + &self.a12 * &rhs.a21,
            &self.a11 * &rhs.a12 + &self.a12 * &rhs.a22,
            &self.a21 * &rhs.a11 + &self.a22 * &rhs.a21,
            &self.a21 * &rhs.a12 + &self.a22 * &rhs.a22,
        )
    }
}

fn mono(c: i64, t1: i32, t2: i32, t3: u32) -> MultiPoly {
    MultiPoly::monomial(c, Monomial::new(t1, t2, t3))
}

/// `ρ̄(g^{±1})` over `Z[t1^±1, t2^±1, t3]`.
pub fn generator_matrix(g: Generator, exponent: i32) -> PolyMat2 {
    let base = match g {
        // [[t1, 1], [0, t1^-1]]
        Generator::G1 => PolyMat2::new(mono(1, 1, 0, 0), mono(1, 0, 0, 0), MultiPoly::zero(), mono(1, -1, 0, 0)),
        // [[t2, 0], [-t3, t2^-1]]
        Generator::G2 => PolyMat2::new(mono(1, 0, 1, 0), MultiPoly::zero(), mono(-1, 0, 0, 1), mono(1, 0, -1, 0)),
    };
    if exponent >= 0 {
        base
    } else {
        base.unimodular_inverse()
    }
}

/// Ordered product of generator matrices; the empty word maps to `I`.
pub fn rho_bar_of_word(word: &Word) -> PolyMat2 {
    word.syllables()
        .iter()
        .fold(PolyMat2::identity(), |acc, s| &acc * &generator_matrix(s.generator, s.exponent))
}

/// `ρ(word)` over `Z[m^±1, u]`.
pub fn rho_of_word(word: &Word) -> PolyMat2 {
    rho_bar_of_word(word).specialize()
}

pub fn specialize_rep(mat: &PolyMat2) -> PolyMat2 {
    mat.specialize()
}

/// `m - m^-1` in the specialized ring.
pub fn m_minus_inv() -> MultiPoly {
    MultiPoly::m_pow(1) - MultiPoly::m_pow(-1)
}

/// `φ_g = g11 - (m - m^-1) g12` for a specialized matrix.
pub fn phi(mat: &PolyMat2) -> MultiPoly {
    &mat.a11 - &(m_minus_inv() * &mat.a12)
}

/// `φ_g` of a word.
pub fn phi_of_word(word: &Word) -> MultiPoly {
    phi(&rho_of_word(word))
}

/// `φ̄_g = ḡ11 - (t1 - t1^-1) ḡ12` before specialization.
pub fn phi_bar(mat: &PolyMat2) -> MultiPoly {
    let t1_minus = mono(1, 1, 0, 0) - mono(1, -1, 0, 0);
    &mat.a11 - &(t1_minus * &mat.a12)
}

/// `ρ̄(word)` at `t1 = t2 = m`, `t3 = u`, with its partials in `t1`, `t2`
/// and `u`, accumulated factor by factor. Evaluating the product directly
/// avoids the cancellation of the expanded Laurent polynomial at large `|m|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatJet<F: Real = f64> {
    pub value: [[Complex<F>; 2]; 2],
    pub d_t1: [[Complex<F>; 2]; 2],
    pub d_t2: [[Complex<F>; 2]; 2],
    pub d_u: [[Complex<F>; 2]; 2],
}

type M2<F> = [[Complex<F>; 2]; 2];

fn mul2<F: Real>(a: &M2<F>, b: &M2<F>) -> M2<F> {
    let mut out = [[Complex::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn add2<F: Real>(a: &M2<F>, b: &M2<F>) -> M2<F> {
    let mut out = *a;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = out[i][j] + b[i][j];
        }
    }
    out
}

/// `d(AB) = dA B + A dB`.
fn leibniz<F: Real>(a: &M2<F>, da: &M2<F>, b: &M2<F>, db: &M2<F>) -> M2<F> {
    add2(&mul2(da, b), &mul2(a, db))
}

impl<F: Real> MatJet<F> {
    fn identity() -> Self {
        let (o, z) = (Complex::one(), Complex::zero());
        MatJet {
            value: [[o, z], [z, o]],
            d_t1: [[z; 2]; 2],
            d_t2: [[z; 2]; 2],
            d_u: [[z; 2]; 2],
        }
    }

    fn generator(g: Generator, exponent: i32, m: Complex<F>, u: Complex<F>) -> Self {
        let (o, z) = (Complex::<F>::one(), Complex::<F>::zero());
        let zero = [[z; 2]; 2];
        let mi = o / m;
        let dmi = -(mi * mi);
        let (value, d_t, d_u) = match (g, exponent > 0) {
            (Generator::G1, true) => ([[m, o], [z, mi]], [[o, z], [z, dmi]], zero),
            (Generator::G1, false) => ([[mi, -o], [z, m]], [[dmi, z], [z, o]], zero),
            (Generator::G2, true) => ([[m, z], [-u, mi]], [[o, z], [z, dmi]], [[z, z], [-o, z]]),
            (Generator::G2, false) => ([[mi, z], [u, m]], [[dmi, z], [z, o]], [[z, z], [o, z]]),
        };
        let (d_t1, d_t2) = match g {
            Generator::G1 => (d_t, zero),
            Generator::G2 => (zero, d_t),
        };
        MatJet { value, d_t1, d_t2, d_u }
    }

    fn then(&self, g: &MatJet<F>) -> Self {
        MatJet {
            value: mul2(&self.value, &g.value),
            d_t1: leibniz(&self.value, &self.d_t1, &g.value, &g.d_t1),
            d_t2: leibniz(&self.value, &self.d_t2, &g.value, &g.d_t2),
            d_u: leibniz(&self.value, &self.d_u, &g.value, &g.d_u),
        }
    }

    pub fn of_word(word: &Word, m: Complex<F>, u: Complex<F>) -> Self {
        word.syllables()
            .iter()
            .fold(MatJet::identity(), |acc, s| acc.then(&MatJet::generator(s.generator, s.exponent, m, u)))
    }

    /// Partial in the specialized variable `m`.
    pub fn d_m(&self) -> M2<F> {
        add2(&self.d_t1, &self.d_t2)
    }

    /// `(φ, ∂φ/∂m, ∂φ/∂u)` with `φ = g11 - (m - m^-1) g12`.
    pub fn phi(&self, m: Complex<F>) -> [Complex<F>; 3] {
        let [a1, a2] = self.phi_bar_partials(m);
        let c = m - Complex::<F>::one() / m;
        [
            self.value[0][0] - c * self.value[0][1],
            a1 + a2,
            self.d_u[0][0] - c * self.d_u[0][1],
        ]
    }

    /// `(∂φ̄/∂t1, ∂φ̄/∂t2)` at `t1 = t2 = m`, where `φ̄ = ḡ11 - (t1 - t1^-1) ḡ12`.
    pub fn phi_bar_partials(&self, m: Complex<F>) -> [Complex<F>; 2] {
        let one = Complex::<F>::one();
        let mi = one / m;
        let c = m - mi;
        [
            self.d_t1[0][0] - (one + mi * mi) * self.value[0][1] - c * self.d_t1[0][1],
            self.d_t2[0][0] - c * self.d_t2[0][1],
        ]
    }
}

/// Exact symbolic data attached to one two-bridge knot.
#[derive(Clone, Debug, Serialize)]
pub struct RileyData {
    pub form: SchubertForm,
    pub k: i64,
    pub eps_k: i32,
    pub words: KnotWords,
    /// Riley polynomial in `Z[m^±1, u]`.
    pub phi_w: MultiPoly,
    pub rho_w: PolyMat2,
    pub rho_v: PolyMat2,
    pub rho_vprime: PolyMat2,
    pub rho_y: PolyMat2,
    pub rho_wdagger: PolyMat2,
    #[serde(skip)]
    pub derived: Derived,
}

/// Polynomials derived from the Riley data that the numeric layers evaluate
/// repeatedly.
#[derive(Clone, Debug, Default)]
pub struct Derived {
    pub phi_v: MultiPoly,
    pub phi_vprime: MultiPoly,
    pub dphi_dm: MultiPoly,
    pub dphi_du: MultiPoly,
    /// `∂φ̄_w/∂t1` specialized.
    pub alpha1: MultiPoly,
    /// `∂φ̄_w/∂t2` specialized.
    pub alpha2: MultiPoly,
    /// `v11 φ_v`.
    pub v11_phi_v: MultiPoly,
    /// The matrix `M` with `ρ(r) = I + φ_w M`.
    pub m_matrix: PolyMat2,
}

impl RileyData {
    pub fn new(form: SchubertForm) -> Result<Self, SchubertError> {
        riley_polynomial(form)
    }

    pub fn p(&self) -> i64 {
        self.form.p()
    }

    pub fn q(&self) -> i64 {
        self.form.q()
    }
}

pub fn riley_polynomial(form: SchubertForm) -> Result<RileyData, SchubertError> {
    let words = form.words()?;
    let (k, eps_k) = form.find_k()?;

    let rho_bar_w = rho_bar_of_word(&words.w);
    let rho_w = rho_bar_w.specialize();
    let rho_v = rho_of_word(&words.v);
    let rho_vprime = rho_of_word(&words.v_prime);
    let rho_y = rho_of_word(&words.y);
    let rho_wdagger = rho_of_word(&words.w_dagger);

    let phi_w = phi(&rho_w);
    let phi_bar_w = phi_bar(&rho_bar_w);
    let phi_v = phi(&rho_v);
    let phi_vprime = phi(&rho_vprime);

    let derived = Derived {
        dphi_dm: phi_w.partial(Var::M),
        dphi_du: phi_w.partial(Var::U),
        alpha1: phi_bar_w.partial(Var::T1).specialize_symbolic(),
        alpha2: phi_bar_w.partial(Var::T2).specialize_symbolic(),
        v11_phi_v: &rho_v.a11 * &phi_v,
        m_matrix: m_matrix(&rho_w),
        phi_v,
        phi_vprime,
    };

    Ok(RileyData {
        form,
        k,
        eps_k,
        words,
        phi_w,
        rho_w,
        rho_v,
        rho_vprime,
        rho_y,
        rho_wdagger,
        derived,
    })
}

/// `M = [[w11 u - w21 m^-1, w11 m], [w21 u + w22 u m^-1, w21 m]]`.
pub fn m_matrix(rho_w: &PolyMat2) -> PolyMat2 {
    let u = MultiPoly::u_pow(1);
    let m = MultiPoly::m_pow(1);
    let m_inv = MultiPoly::m_pow(-1);
    PolyMat2::new(
        &rho_w.a11 * &u - &rho_w.a21 * &m_inv,
        &rho_w.a11 * &m,
        &rho_w.a21 * &u + &(&rho_w.a22 * &u) * &m_inv,
        &rho_w.a21 * &m,
    )
}

/// Outcome of the exact identity checks for one knot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    /// `det ρ(g) = 1` for every word image.
    pub det_one: bool,
    /// `u w12 + w21 = 0`.
    pub riley_relation: bool,
    /// `φ_w = w†22 + (m - m^-1) w†12`.
    pub w_dagger_identity: bool,
    /// `ρ(r) = I + φ_w M`.
    pub relator_expansion: bool,
    /// `v'11 φ_v' = m^(1-ε_k) v11 φ_v`.
    pub vprime_identity: bool,
    /// `deg_u φ_w = (p-1)/2` with leading coefficient `±1`.
    pub degree_and_leading: bool,
}

impl IdentityReport {
    pub fn all(&self) -> bool {
        self.det_one
            && self.riley_relation
            && self.w_dagger_identity
            && self.relator_expansion
            && self.vprime_identity
            && self.degree_and_leading
    }
}

pub fn check_identities(data: &RileyData) -> IdentityReport {
    let one = MultiPoly::one();
    let u = MultiPoly::u_pow(1);
    let w = &data.rho_w;
    let wd = &data.rho_wdagger;

    let det_one = [&data.rho_w, &data.rho_v, &data.rho_vprime, &data.rho_y, &data.rho_wdagger]
        .iter()
        .all(|mat| mat.det() == one);

    let riley_relation = (&u * &w.a12 + &w.a21).is_zero();
    let w_dagger_identity = data.phi_w == &wd.a22 + &(m_minus_inv() * &wd.a12);

    let rho_r = rho_of_word(&data.words.relator);
    let relator_expansion = rho_r == PolyMat2::identity().add(&data.derived.m_matrix.scale(&data.phi_w));

    let lhs = &data.rho_vprime.a11 * &data.derived.phi_vprime;
    let rhs = MultiPoly::m_pow(1 - data.eps_k) * &data.derived.v11_phi_v;
    let vprime_identity = lhs == rhs;

    let half = ((data.p() - 1) / 2) as u32;
    let degree_and_leading = data.phi_w.degree_t3() == Some(half)
        && matches!(
            data.phi_w.coefficient_t3(half).as_constant(),
            Some(c) if c == BigInt::from(1) || c == BigInt::from(-1)
        );

    IdentityReport {
        det_one,
        riley_relation,
        w_dagger_identity,
        relator_expansion,
        vprime_identity,
        degree_and_leading,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProfileError {
    #[error("word `{0}` is not g1^f1 g2^f2 ... g2^f2j of positive even length")]
    MalformedWord(String),
    #[error("entry (1,1) of `{0}` is not ±u^j at top degree")]
    NotMonic(String),
}

/// Top-degree structure of `ρ(h_j)` for an alternating word
/// `h_j = g1^{f1} g2^{f2} ... g2^{f_2j}`, after normalizing the global sign
/// so that entry (1,1) is monic in `u`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeadingProfile {
    pub j: u32,
    /// Sign that was applied to all four entries.
    pub sign: i32,
    /// `u`-degrees of the entries, row-major; `None` for a zero entry.
    pub degrees: [Option<u32>; 4],
    /// Leading `u`-coefficients (Laurent polynomials in `m`), row-major.
    pub leading: [MultiPoly; 4],
    /// Coefficient of `u^(j-1)` in entry (1,1).
    pub a: MultiPoly,
    /// Coefficient of `u^(j-1)` in entry (2,1) divided by `f1 m^-f1`.
    pub b: MultiPoly,
    pub a_minus_b: MultiPoly,
}

impl LeadingProfile {
    /// Whether degrees and leading coefficients follow the pattern
    /// `[[u^j, -f_2j m^-f_2j u^(j-1)], [f1 m^-f1 u^j, -f1 f_2j m^(-f1-f_2j) u^(j-1)]]`.
    pub fn matches_pattern(&self, f1: i32, f_last: i32) -> bool {
        let j = self.j;
        let sm = |c: i32, e: i32| MultiPoly::monomial(c, Monomial::new(e, 0, 0));
        self.degrees == [Some(j), Some(j - 1), Some(j), Some(j - 1)]
            && self.leading[0].is_one()
            && self.leading[1] == sm(-f_last, -f_last)
            && self.leading[2] == sm(f1, -f1)
            && self.leading[3] == sm(-f1 * f_last, -f1 - f_last)
    }
}

fn alternating_exponents(word: &Word) -> Option<Vec<i32>> {
    if word.is_empty() || !word.len().is_multiple_of(2) {
        return None;
    }
    let mut out = Vec::with_capacity(word.len());
    for (i, s) in word.syllables().iter().enumerate() {
        let expected = if i % 2 == 0 { Generator::G1 } else { Generator::G2 };
        if s.generator != expected {
            return None;
        }
        out.push(s.exponent);
    }
    Some(out)
}

/// Leading-term profile of `ρ(word)` for an alternating word.
pub fn leading_profile(word: &Word) -> Result<LeadingProfile, ProfileError> {
    let f = alternating_exponents(word).ok_or_else(|| ProfileError::MalformedWord(word.to_string()))?;
    let mat = rho_of_word(word);
    profile_of_matrix(&mat, (f.len() / 2) as u32, f[0])
        .ok_or_else(|| ProfileError::NotMonic(word.to_string()))
}

/// Normalizes `mat` (an image of an alternating word of half-length `j`
/// starting with exponent `f1`) and extracts its leading-term profile.
pub fn profile_of_matrix(mat: &PolyMat2, j: u32, f1: i32) -> Option<LeadingProfile> {
    let top = mat.a11.coefficient_t3(j).as_constant()?;
    let sign = if top == BigInt::from(1) {
        1
    } else if top == BigInt::from(-1) {
        -1
    } else {
        return None;
    };
    let s = MultiPoly::constant(sign);
    let entries: Vec<MultiPoly> = mat.entries().iter().map(|e| *e * &s).collect();

    let degrees = [
        entries[0].degree_t3(),
        entries[1].degree_t3(),
        entries[2].degree_t3(),
        entries[3].degree_t3(),
    ];
    let leading = [0, 1, 2, 3].map(|i| match degrees[i] {
        Some(d) => entries[i].coefficient_t3(d),
        None => MultiPoly::zero(),
    });
    let a = entries[0].coefficient_t3(j - 1);
    // Dividing by f1 m^-f1 is multiplying by f1 m^f1.
    let b = entries[2]
        .coefficient_t3(j - 1)
        .shift(Monomial::new(f1, 0, 0))
        .scale(&BigInt::from(f1));
    let a_minus_b = &a - &b;
    Some(LeadingProfile {
        j,
        sign,
        degrees,
        leading,
        a,
        b,
        a_minus_b,
    })
}

/// Profiles of every prefix `h_1, ..., h_n` of the alternating word with
/// exponents `f` (even length `2n`), and whether they match the expected
/// leading-term pattern with `A_j - B_j` the same for all `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    pub exponents: Vec<i32>,
    pub profiles: Vec<LeadingProfile>,
    pub patterns_match: bool,
    pub a_minus_b_constant: bool,
}

impl LemmaCheck {
    pub fn holds(&self) -> bool {
        self.patterns_match && self.a_minus_b_constant
    }
}

pub fn check_leading_lemma(f: &[i32]) -> Result<LemmaCheck, ProfileError> {
    let full = Word::alternating(Generator::G1, f);
    if f.is_empty() || !f.len().is_multiple_of(2) || f.iter().any(|&e| e != 1 && e != -1) {
        return Err(ProfileError::MalformedWord(full.to_string()));
    }
    let mut profiles = Vec::with_capacity(f.len() / 2);
    let mut mat = PolyMat2::identity();
    for (j, pair) in f.chunks(2).enumerate() {
        let step = Word::alternating(Generator::G1, pair);
        mat = &mat * &rho_of_word(&step);
        let prefix = Word::alternating(Generator::G1, &f[..2 * j + 2]);
        let prof = profile_of_matrix(&mat, j as u32 + 1, f[0]).ok_or(ProfileError::NotMonic(prefix.to_string()))?;
        profiles.push(prof);
    }
    let patterns_match = profiles
        .iter()
        .enumerate()
        .all(|(j, prof)| prof.matches_pattern(f[0], f[2 * j + 1]));
    let a_minus_b_constant = profiles.windows(2).all(|w| w[0].a_minus_b == w[1].a_minus_b);
    Ok(LemmaCheck {
        exponents: f.to_vec(),
        profiles,
        patterns_match,
        a_minus_b_constant,
    })
}

/// `ε_{k-1} ε_k d^(-ε_{k-1}-ε_k) + ε_{k-1} d^(-ε_{k-1}) (d - d^-1) + ε_k ε_{k+1} d^(ε_k+ε_{k+1})`
/// as a Laurent polynomial in `d` (slot `m`).
pub fn sign_pattern_expression(prev: i32, cur: i32, next: i32) -> MultiPoly {
    let sm = |c: i32, e: i32| MultiPoly::monomial(c, Monomial::new(e, 0, 0));
    sm(prev * cur, -prev - cur) + sm(prev, -prev) * m_minus_inv() + sm(cur * next, cur + next)
}

/// Checks `W11 = V11 + Y21 + ε_{k-1} d^(-ε_{k-1}) (d - d^-1)` on the
/// normalized sub-leading coefficients of `ρ(w)`, `ρ(v)`, `ρ(y)`.
/// Only meaningful for hyperbolic forms (`k >= 3`).
pub fn subleading_identity_holds(data: &RileyData) -> Option<bool> {
    if data.form.is_torus() {
        return None;
    }
    let p = data.p();
    let k = data.k;
    let eps = |i: i64| data.form.epsilon(i);
    let w = profile_of_matrix(&data.rho_w, ((p - 1) / 2) as u32, eps(1))?;
    let v = profile_of_matrix(&data.rho_v, ((k - 1) / 2) as u32, eps(1))?;
    let y = profile_of_matrix(&data.rho_y, ((p - k) / 2) as u32, eps(k))?;
    let prev = eps(k - 1);
    let correction = MultiPoly::monomial(prev, Monomial::new(-prev, 0, 0)) * m_minus_inv();
    Some(w.a == v.a + y.b + correction)
}
