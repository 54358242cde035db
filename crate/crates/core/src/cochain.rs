//! Adjoint torsion from the twisted cochain complex of the two-generator,
//! one-relator presentation.
//!
//! The cochain complex is `0 → 𝔤 → 𝔤² → 𝔤 → 0` with
//! `δ⁰ = [Ad ρ(g1) - I; Ad ρ(g2) - I]` and `δ¹ = [Φ(∂r/∂g1) Φ(∂r/∂g2)]`,
//! where `Φ` is the linear extension of `Ad ∘ ρ` to the group ring and `∂`
//! is the Fox derivative. Everything here is dense complex linear algebra in
//! dimensions 3 and 6, and serves as an independent check of the closed-form
//! torsion in [`crate::torsion`].
//!
//! Coordinates on `𝔤 = sl(2, C)` use `e1 = [[0,1],[0,0]]`, `e2 = [[1,0],[0,-1]]`,
//! `e3 = [[0,0],[1,0]]`, so `[[b, a], [c, -b]]` has coordinates `(a, b, c)`.

use nalgebra::{DMatrix, Matrix2, Matrix3, SMatrix, Vector3, Vector6};
use num_complex::{Complex, Complex64};
use num_traits::One;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::config::Tolerances;
use crate::numeric::sample_generic_with;
use crate::poly::MultiPoly;
use crate::real::{cabs, cfrom, DoubleDouble, Real};
use crate::riley::{rho_of_word, MatJet, PolyMat2, RileyData};
use crate::schubert::{Generator, Word};
use crate::torsion::{torsion_at, trace_preimage, trial_rng, CharacterPoint, TorsionError};

pub type Matrix6x3 = SMatrix<Complex64, 6, 3>;
pub type Matrix3x6 = SMatrix<Complex64, 3, 6>;
pub type Matrix6 = SMatrix<Complex64, 6, 6>;

/// Tolerance on `|det Ad(g) - 1|`.
pub const ADJOINT_DET_TOL: f64 = 1e-10;
/// Tolerance on Killing-form preservation by `Ad(g)`, relative to the entry scale.
pub const KILLING_TOL: f64 = 1e-9;
/// Tolerance on `|det g - 1|` accepted by [`adjoint_of`].
pub const UNIMODULAR_TOL: f64 = 1e-10;
/// Tolerance for `δ¹δ⁰ = 0`, `δ¹ h1 = 0` (relative to matrix norms) and `F1 = F2 = 1`.
pub const COCHAIN_TOL: f64 = 1e-9;
/// Minimum normalized distance of `h1` from `Im δ⁰`.
pub const COBOUNDARY_DISTANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("matrix is not unimodular (|det - 1| = {0:e})")]
    NotUnimodular(f64),
    #[error("degenerate character: {0}")]
    DegeneratePoint(String),
    #[error("{which} transition matrix is singular (normalized determinant {normalized:e})")]
    SingularTransition { which: &'static str, normalized: f64 },
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// The basis element `e_i` (1-based) as a 2×2 matrix.
pub fn basis_matrix(i: usize) -> Matrix2<Complex64> {
    let (o, z) = (c(1.0), c(0.0));
    match i {
        1 => Matrix2::new(z, o, z, z),
        2 => Matrix2::new(o, z, z, -o),
        3 => Matrix2::new(z, z, o, z),
        _ => panic!("basis index {i} out of range"),
    }
}

/// Coordinates `(a, b, c)` of `[[b, a], [c, -b]]`.
pub fn coords(x: &Matrix2<Complex64>) -> Vector3<Complex64> {
    Vector3::new(x[(0, 1)], x[(0, 0)], x[(1, 0)])
}

pub fn from_coords(v: &Vector3<Complex64>) -> Matrix2<Complex64> {
    Matrix2::new(v[1], v[0], v[2], -v[1])
}

/// `8 b b' + 4 (a c' + c a')`.
pub fn killing(x: &Vector3<Complex64>, y: &Vector3<Complex64>) -> Complex64 {
    x[1] * y[1] * 8.0 + (x[0] * y[2] + x[2] * y[0]) * 4.0
}

/// `Ad(g)` in the basis `(e1, e2, e3)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdjointMatrix(pub Matrix3<Complex64>);

impl AdjointMatrix {
    pub fn matrix(&self) -> &Matrix3<Complex64> {
        &self.0
    }

    pub fn det(&self) -> Complex64 {
        self.0.determinant()
    }

    /// Largest `|⟨AX, AY⟩ - ⟨X, Y⟩|` over basis pairs, divided by `max(1, |A|²)`.
    pub fn killing_defect(&self) -> f64 {
        let scale = self.0.iter().map(|z| z.norm()).fold(1.0, f64::max).powi(2);
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let lhs = killing(&self.0.column(i).into(), &self.0.column(j).into());
                let rhs = killing(&Vector3::ith(i, c(1.0)), &Vector3::ith(j, c(1.0)));
                worst = worst.max((lhs - rhs).norm() / scale);
            }
        }
        worst
    }
}

/// Columns are the coordinates of `g e_i g^-1`.
pub fn adjoint_of(g: &Matrix2<Complex64>) -> Result<AdjointMatrix, OracleError> {
    let det = g.determinant();
    let defect = (det - 1.0).norm();
    if defect > UNIMODULAR_TOL {
        return Err(OracleError::NotUnimodular(defect));
    }
    Ok(AdjointMatrix(conjugation(g, &adjugate(g))))
}

fn adjugate(g: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    Matrix2::new(g[(1, 1)], -g[(0, 1)], -g[(1, 0)], g[(0, 0)])
}

fn conjugation(g: &Matrix2<Complex64>, inv: &Matrix2<Complex64>) -> Matrix3<Complex64> {
    let mut ad = Matrix3::zeros();
    for i in 0..3 {
        ad.set_column(i, &coords(&(g * basis_matrix(i + 1) * inv)));
    }
    ad
}

/// Symbolic `Ad(g)` for a unimodular [`PolyMat2`], by conjugating the basis.
pub fn adjoint_symbolic(g: &PolyMat2) -> [[MultiPoly; 3]; 3] {
    let inv = g.unimodular_inverse();
    let zero = MultiPoly::zero;
    let one = MultiPoly::one;
    let basis = [
        PolyMat2::new(zero(), one(), zero(), zero()),
        PolyMat2::new(one(), zero(), zero(), -one()),
        PolyMat2::new(zero(), zero(), one(), zero()),
    ];
    let mut out: [[MultiPoly; 3]; 3] = Default::default();
    for (i, e) in basis.iter().enumerate() {
        let img = &(g * e) * &inv;
        out[0][i] = img.a12.clone();
        out[1][i] = img.a11.clone();
        out[2][i] = img.a21.clone();
    }
    out
}

/// `δ⁰` over `Z[m^±1, u]`, stacked `Ad ρ(g1) - I` over `Ad ρ(g2) - I`.
pub fn delta0_symbolic() -> [[MultiPoly; 3]; 6] {
    let mut out: [[MultiPoly; 3]; 6] = Default::default();
    for (block, g) in [Generator::G1, Generator::G2].into_iter().enumerate() {
        let ad = adjoint_symbolic(&rho_of_word(&Word::generator(g, 1)));
        for i in 0..3 {
            for j in 0..3 {
                let entry = if i == j { &ad[i][j] - &MultiPoly::one() } else { ad[i][j].clone() };
                out[3 * block + i][j] = entry;
            }
        }
    }
    out
}

/// The explicit closed form of `δ⁰`, written out entry by entry.
pub fn delta0_reference() -> [[MultiPoly; 3]; 6] {
    let m = MultiPoly::m_pow;
    let u = || MultiPoly::u_pow(1);
    let k = |n: i64| MultiPoly::constant(n);
    let z = MultiPoly::zero;
    let mu = |a: i64, e: i32| MultiPoly::from_terms([(a, e, 0, 1)]);
    [
        [m(2) - k(1), m(1) * k(-2), k(-1)],
        [z(), z(), m(-1)],
        [z(), z(), m(-2) - k(1)],
        [m(2) - k(1), z(), z()],
        [mu(1, 1), z(), z()],
        [-(u() * u()), mu(-2, -1), m(-2) - k(1)],
    ]
}

/// One signed term `±word` of a Fox derivative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FoxTerm {
    pub sign: i32,
    pub word: Word,
}

/// `∂r/∂g` as a formal sum of signed prefixes.
pub fn fox_derivative(r: &Word, g: Generator) -> Vec<FoxTerm> {
    let mut terms = Vec::new();
    let mut prefix = Word::empty();
    for s in r.syllables() {
        let step = Word::generator(s.generator, s.exponent);
        if s.generator == g {
            if s.exponent > 0 {
                terms.push(FoxTerm { sign: 1, word: prefix.clone() });
            } else {
                terms.push(FoxTerm { sign: -1, word: prefix.concat(&step) });
            }
        }
        prefix = prefix.concat(&step);
    }
    terms
}

/// Numeric `ρ(g1)`, `ρ(g2)` and their inverses at one character.
#[derive(Clone, Copy, Debug)]
pub struct NumericRep {
    pub g1: Matrix2<Complex64>,
    pub g2: Matrix2<Complex64>,
    g1_inv: Matrix2<Complex64>,
    g2_inv: Matrix2<Complex64>,
}

impl NumericRep {
    pub fn new(m: Complex64, u: Complex64) -> Result<Self, OracleError> {
        let mi = m.inv();
        let zero = c(0.0);
        let g1 = Matrix2::new(m, c(1.0), zero, mi);
        let g1_inv = Matrix2::new(mi, c(-1.0), zero, m);
        let g2 = Matrix2::new(m, zero, -u, mi);
        let g2_inv = Matrix2::new(mi, zero, u, m);
        adjoint_of(&g1)?;
        adjoint_of(&g2)?;
        Ok(NumericRep { g1, g2, g1_inv, g2_inv })
    }

    fn slot(g: Generator, exponent: i32) -> usize {
        match (g, exponent > 0) {
            (Generator::G1, true) => 0,
            (Generator::G1, false) => 1,
            (Generator::G2, true) => 2,
            (Generator::G2, false) => 3,
        }
    }

    pub fn of_word(&self, word: &Word) -> Matrix2<Complex64> {
        let mats = [self.g1, self.g1_inv, self.g2, self.g2_inv];
        word.syllables()
            .iter()
            .fold(Matrix2::identity(), |acc, s| acc * mats[Self::slot(s.generator, s.exponent)])
    }

    /// `Ad ρ(word)`. The product is unimodular by construction, so the
    /// determinant check of [`adjoint_of`] is skipped.
    pub fn adjoint_of_word(&self, word: &Word) -> Matrix3<Complex64> {
        let g = self.of_word(word);
        conjugation(&g, &adjugate(&g))
    }

    /// `Φ` applied to a formal sum.
    pub fn phi(&self, terms: &[FoxTerm]) -> Matrix3<Complex64> {
        let mut out = Matrix3::zeros();
        for t in terms {
            out += self.adjoint_of_word(&t.word) * c(t.sign as f64);
        }
        out
    }
}

/// Newton steps in `u` on `φ_w(m, u) = 0` with `m` held fixed, carried out
/// at precision `F`.
pub fn refine_u<F: Real>(data: &RileyData, m: Complex<F>, mut u: Complex<F>, steps: usize) -> Complex<F> {
    for _ in 0..steps {
        let [phi, _, dphi_du] = MatJet::of_word(&data.words.w, m, u).phi(m);
        if cabs(dphi_du) == F::zero() {
            break;
        }
        u = u - phi / dphi_du;
    }
    u
}

/// `F2` at working precision `F`, straight from its definition: the Killing
/// pairing of `P` with `(-Ad ρ(v')^-1 + Ad ρ(w†)) (0, 0, -1/(4 v'11 φ_v'))`.
pub fn f2_value<F: Real>(data: &RileyData, m: Complex<F>, u: Complex<F>) -> Complex<F> {
    let one = Complex::<F>::one();
    let vp = MatJet::of_word(&data.words.v_prime, m, u);
    let h = -one / (vp.value[0][0] * vp.phi(m)[0] * F::from_f64(4.0));
    let [[a, b], [cc, d]] = vp.value;
    let vinv = [[d, -b], [-cc, a]];
    let wdag = MatJet::of_word(&data.words.w_dagger, m, u).value;
    // Ad(g) e3 = (-b^2, b d, d^2) for g = [[a, b], [c, d]].
    let image = |g: [[Complex<F>; 2]; 2]| [-(g[0][1] * g[0][1]) * h, g[0][1] * g[1][1] * h, g[1][1] * g[1][1] * h];
    let (x, y) = (image(wdag), image(vinv));
    let diff = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
    let p_b = (m - one / m) / F::from_f64(2.0);
    // 8 b b' + 4 (a c' + c a') with P = (1, p_b, 0).
    p_b * diff[1] * F::from_f64(8.0) + diff[2] * F::from_f64(4.0)
}

/// The cochain-level data at one character.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CochainData {
    pub p: i64,
    pub q: i64,
    #[serde(with = "crate::serde_complex")]
    pub m: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub u: Complex64,
    #[serde(serialize_with = "ser_mat")]
    pub delta0: Matrix6x3,
    #[serde(serialize_with = "ser_mat")]
    pub delta1: Matrix3x6,
    #[serde(serialize_with = "ser_vec")]
    pub a0: Vector6<Complex64>,
    #[serde(serialize_with = "ser_vec")]
    pub a1: Vector6<Complex64>,
    #[serde(serialize_with = "ser_vec")]
    pub a2: Vector6<Complex64>,
    #[serde(serialize_with = "ser_vec")]
    pub a3: Vector6<Complex64>,
    #[serde(with = "crate::serde_complex")]
    pub alpha1: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub alpha2: Complex64,
    #[serde(rename = "M", serialize_with = "ser_mat")]
    pub m_matrix: Matrix2<Complex64>,
    #[serde(rename = "P", serialize_with = "ser_vec")]
    pub p_vec: Vector3<Complex64>,
    #[serde(serialize_with = "ser_vec")]
    pub h1_rep: Vector6<Complex64>,
    #[serde(serialize_with = "ser_vec")]
    pub h2_rep: Vector3<Complex64>,
    #[serde(serialize_with = "ser_pair")]
    pub b1: [Vector6<Complex64>; 2],
    #[serde(with = "crate::serde_complex")]
    pub dphi_dm: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub dphi_du: Complex64,
}

fn ser_mat<const R: usize, const C: usize, S: Serializer>(
    mat: &SMatrix<Complex64, R, C>,
    s: S,
) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<[f64; 2]>> = (0..R)
        .map(|i| (0..C).map(|j| [mat[(i, j)].re, mat[(i, j)].im]).collect())
        .collect();
    rows.serialize(s)
}

fn ser_vec<const R: usize, S: Serializer>(v: &SMatrix<Complex64, R, 1>, s: S) -> Result<S::Ok, S::Error> {
    v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
}

fn ser_pair<S: Serializer>(pair: &[Vector6<Complex64>; 2], s: S) -> Result<S::Ok, S::Error> {
    pair.iter()
        .map(|v| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .serialize(s)
}

/// `(δ⁰, δ¹)` at `(m, u)`.
pub fn boundary_maps(data: &RileyData, m: Complex64, u: Complex64) -> Result<(Matrix6x3, Matrix3x6), OracleError> {
    let rep = NumericRep::new(m, u)?;
    let mut delta0 = Matrix6x3::zeros();
    let ad1 = adjoint_of(&rep.g1)?.0 - Matrix3::identity();
    let ad2 = adjoint_of(&rep.g2)?.0 - Matrix3::identity();
    delta0.fixed_view_mut::<3, 3>(0, 0).copy_from(&ad1);
    delta0.fixed_view_mut::<3, 3>(3, 0).copy_from(&ad2);
    let r = &data.words.relator;
    let mut delta1 = Matrix3x6::zeros();
    delta1
        .fixed_view_mut::<3, 3>(0, 0)
        .copy_from(&rep.phi(&fox_derivative(r, Generator::G1)));
    delta1
        .fixed_view_mut::<3, 3>(0, 3)
        .copy_from(&rep.phi(&fox_derivative(r, Generator::G2)));
    Ok((delta0, delta1))
}

/// `A0 .. A3`: infinitesimal deformations of `ρ` in the directions `m`
/// (both generators), `t1`, `t2` and `u`, as 1-cochains.
pub fn a_vectors(m: Complex64, u: Complex64) -> [Vector6<Complex64>; 4] {
    let mi = m.inv();
    let z = c(0.0);
    let a1 = Vector6::new(c(-1.0), mi, z, z, z, z);
    let a2 = Vector6::new(z, z, z, z, mi, -u * mi * mi);
    let a3 = Vector6::new(z, z, z, z, z, -mi);
    [a1 + a2, a1, a2, a3]
}

/// `P = [[(m - m^-1)/2, 1], [0, -(m - m^-1)/2]]` in coordinates.
pub fn p_vector(m: Complex64) -> Vector3<Complex64> {
    Vector3::new(c(1.0), (m - m.inv()) * 0.5, c(0.0))
}

fn first_half(v: &Vector6<Complex64>) -> Vector3<Complex64> {
    Vector3::new(v[0], v[1], v[2])
}

/// `M` evaluated from a numeric `ρ(w)`.
fn m_matrix_at(w: &[[Complex64; 2]; 2], m: Complex64, u: Complex64) -> Matrix2<Complex64> {
    let mi = m.inv();
    Matrix2::new(
        w[0][0] * u - w[1][0] * mi,
        w[0][0] * m,
        w[1][0] * u + w[1][1] * u * mi,
        w[1][0] * m,
    )
}

/// Builds `δ⁰`, `δ¹`, the A-vectors, the `H¹`/`H²` representatives and the
/// default `b¹` (with `β = (α2, -α1)`).
pub fn basis_construction(data: &RileyData, pt: &CharacterPoint, tol: &Tolerances) -> Result<CochainData, OracleError> {
    let (m, u) = (pt.d, pt.u);
    if (m * m - 1.0).norm() < tol.degeneracy {
        return Err(OracleError::DegeneratePoint("m = ±1".into()));
    }
    let w = MatJet::of_word(&data.words.w, m, u);
    let [_, dphi_dm, dphi_du] = w.phi(m);
    let [alpha1, alpha2] = w.phi_bar_partials(m);
    if dphi_du.norm() < tol.degeneracy || dphi_dm.norm() < tol.degeneracy {
        return Err(OracleError::DegeneratePoint("vanishing partial of the Riley polynomial".into()));
    }
    let vprime = MatJet::of_word(&data.words.v_prime, m, u);
    let vp = vprime.value[0][0] * vprime.phi(m)[0];
    if vp.norm() < tol.degeneracy {
        return Err(OracleError::DegeneratePoint("v'11 φ_v' vanishes".into()));
    }
    let (delta0, delta1) = boundary_maps(data, m, u)?;
    let [a0, a1, a2, a3] = a_vectors(m, u);
    let norm = (c(1.0) - m.powi(-2)) * 4.0;
    let h1_rep = (a0 - a3 * (dphi_dm / dphi_du)) / norm;
    let h2_rep = Vector3::new(c(0.0), c(0.0), -(vp * 4.0).inv());
    let (beta1, beta2) = (alpha2, -alpha1);
    Ok(CochainData {
        p: data.p(),
        q: data.q(),
        m,
        u,
        delta0,
        delta1,
        a0,
        a1,
        a2,
        a3,
        alpha1,
        alpha2,
        m_matrix: m_matrix_at(&w.value, m, u),
        p_vec: p_vector(m),
        h1_rep,
        h2_rep,
        b1: [a1 * beta1 + a2 * beta2, a3],
        dphi_dm,
        dphi_du,
    })
}

/// `|det| / Π |column|`, a scale-free measure of singularity.
fn normalized_det<const N: usize>(mat: &SMatrix<Complex64, N, N>) -> (Complex64, f64) {
    let det = to_dynamic(mat).determinant();
    let cols: f64 = mat.column_iter().map(|col| col.norm()).product();
    let normalized = if cols == 0.0 { 0.0 } else { det.norm() / cols };
    (det, normalized)
}

impl CochainData {
    /// `F1(h1)`: the Killing pairing of `P` with the value of `h1` on `g1`.
    pub fn f1(&self) -> Complex64 {
        killing(&self.p_vec, &first_half(&self.h1_rep))
    }

    /// `F2(h2)`: pairing of `P` with `(-Ad ρ(v')^-1 + Ad ρ(w†)) h2`.
    pub fn f2(&self, data: &RileyData) -> Result<Complex64, OracleError> {
        let rep = NumericRep::new(self.m, self.u)?;
        let vinv = rep.adjoint_of_word(&data.words.v_prime.inverse());
        let wdag = rep.adjoint_of_word(&data.words.w_dagger);
        Ok(killing(&self.p_vec, &((wdag - vinv) * self.h2_rep)))
    }

    /// Torsion from the three transition determinants, using `b¹ = (x, A3)`
    /// with `x = β1 A1 + β2 A2`.
    pub fn torsion_with(&self, first: &Vector6<Complex64>, tol: &Tolerances) -> Result<Complex64, OracleError> {
        let mut t1 = Matrix6::zeros();
        for j in 0..3 {
            t1.set_column(j, &self.delta0.column(j));
        }
        t1.set_column(3, &self.h1_rep);
        t1.set_column(4, first);
        t1.set_column(5, &self.a3);
        let mut t2 = Matrix3::zeros();
        t2.set_column(0, &(self.delta1 * first));
        t2.set_column(1, &(self.delta1 * self.a3));
        t2.set_column(2, &self.h2_rep);
        let (det6, n6) = normalized_det(&t1);
        if n6 < tol.singular_transition {
            return Err(OracleError::SingularTransition { which: "C1", normalized: n6 });
        }
        let (det3, n3) = normalized_det(&t2);
        if n3 < tol.singular_transition {
            return Err(OracleError::SingularTransition { which: "C2", normalized: n3 });
        }
        Ok(det3 / det6)
    }

    /// `(β1 A1 + β2 A2)` for an admissible pair (`α1 β1 + α2 β2 = 0`, `β1 ≠ β2`).
    pub fn b1_first(&self, beta1: Complex64, beta2: Complex64) -> Result<Vector6<Complex64>, OracleError> {
        let scale = beta1.norm().max(beta2.norm()) * self.alpha1.norm().max(self.alpha2.norm());
        if (self.alpha1 * beta1 + self.alpha2 * beta2).norm() > 1e-9 * scale {
            return Err(OracleError::DegeneratePoint("β violates α1 β1 + α2 β2 = 0".into()));
        }
        if (beta1 - beta2).norm() <= 1e-12 * scale {
            return Err(OracleError::DegeneratePoint("β1 = β2".into()));
        }
        Ok(self.a1 * beta1 + self.a2 * beta2)
    }
}

/// The torsion at one character computed from the cochain complex. Agrees
/// with [`crate::torsion::torsion_at`] up to a sign shared by the whole knot.
pub fn torsion_oracle(data: &RileyData, pt: &CharacterPoint, tol: &Tolerances) -> Result<Complex64, OracleError> {
    let cd = basis_construction(data, pt, tol)?;
    cd.torsion_with(&cd.b1[0], tol)
}

/// Same as [`torsion_oracle`] but with an explicit `(β1, β2)`.
pub fn torsion_oracle_with_beta(
    data: &RileyData,
    pt: &CharacterPoint,
    beta: (Complex64, Complex64),
    tol: &Tolerances,
) -> Result<Complex64, OracleError> {
    let cd = basis_construction(data, pt, tol)?;
    let first = cd.b1_first(beta.0, beta.1)?;
    cd.torsion_with(&first, tol)
}

fn to_dynamic<const R: usize, const C: usize>(mat: &SMatrix<Complex64, R, C>) -> DMatrix<Complex64> {
    DMatrix::from_iterator(R, C, mat.iter().copied())
}

/// Numerical rank of the equilibrated matrix, with threshold `rel × σ_max`.
pub fn numerical_rank<const R: usize, const C: usize>(mat: &SMatrix<Complex64, R, C>, rel: f64) -> usize {
    let sv = equilibrated(mat).singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel * top).count()
}

/// Rows, then columns, scaled to unit max-norm. Rank is unchanged.
fn equilibrated<const R: usize, const C: usize>(mat: &SMatrix<Complex64, R, C>) -> DMatrix<Complex64> {
    let mut out = to_dynamic(mat);
    for mut row in out.row_iter_mut() {
        let top = row.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if top > 0.0 {
            row /= c(top);
        }
    }
    for mut col in out.column_iter_mut() {
        let top = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if top > 0.0 {
            col /= c(top);
        }
    }
    out
}

/// `|x - proj_{col(A)} x| / |x|` using the dominant left singular vectors.
pub fn distance_from_column_space<const R: usize, const C: usize>(
    mat: &SMatrix<Complex64, R, C>,
    x: &SMatrix<Complex64, R, 1>,
    rel: f64,
) -> f64 {
    let svd = to_dynamic(mat).svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let xd = DMatrix::from_iterator(R, 1, x.iter().copied());
    let mut residual = xd.clone();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > rel * top {
            let col = u.column(i);
            let coef = col.dotc(&xd.column(0));
            residual -= col * coef;
        }
    }
    residual.norm() / xd.norm()
}

/// Diagnostics of every cochain-level property at one character.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CochainChecks {
    /// `|δ¹δ⁰| / (|δ¹| |δ⁰|)`.
    pub cochain_residual: f64,
    pub rank_delta0: usize,
    pub rank_delta1: usize,
    /// `|δ¹ h1| / (|δ¹| |h1|)`.
    pub h1_cocycle_residual: f64,
    pub h1_coboundary_distance: f64,
    pub f1_error: f64,
    /// `|F2 - 1|` in double-double, after refining `u` onto the character
    /// variety at that precision.
    pub f2_error: f64,
    /// The same quantity through the f64 adjoint products; informational only,
    /// it loses digits to cancellation when `|u|` is large.
    pub f2_error_standard: f64,
    /// `A0 - A1 - A2`, exactly zero by construction.
    pub a_sum_error: f64,
    /// `|α1 + α2 - ∂φ_w/∂m| / |∂φ_w/∂m|`.
    pub alpha_sum_error: f64,
    /// Largest relative mismatch between `δ¹ A_i` and `∂ρ(r)` in the matching
    /// direction, including `∂φ_w/∂m · M` and `∂φ_w/∂u · M`.
    pub weil_error: f64,
    /// `|ρ(r) - I| / (1 + |ρ(w)|²)`.
    pub relator_residual: f64,
    /// Largest `|det Ad - 1|` and Killing defect over `ρ(g1)`, `ρ(g2)`.
    pub adjoint_det_error: f64,
    pub adjoint_killing_defect: f64,
}

impl CochainChecks {
    pub fn failures(&self, tol: &Tolerances) -> Vec<String> {
        let mut out = Vec::new();
        let mut check = |ok: bool, what: String| {
            if !ok {
                out.push(what);
            }
        };
        check(self.cochain_residual <= COCHAIN_TOL, format!("δ¹δ⁰ residual {:e}", self.cochain_residual));
        check(self.rank_delta0 == 3, format!("rank δ⁰ = {}", self.rank_delta0));
        check(self.rank_delta1 == 2, format!("rank δ¹ = {}", self.rank_delta1));
        check(self.h1_cocycle_residual <= COCHAIN_TOL, format!("δ¹h1 residual {:e}", self.h1_cocycle_residual));
        check(
            self.h1_coboundary_distance > COBOUNDARY_DISTANCE,
            format!("h1 distance from Im δ⁰ {:e}", self.h1_coboundary_distance),
        );
        check(self.f1_error <= COCHAIN_TOL, format!("F1 error {:e}", self.f1_error));
        check(self.f2_error <= COCHAIN_TOL, format!("F2 error {:e}", self.f2_error));
        check(self.a_sum_error == 0.0, format!("A0 - A1 - A2 = {:e}", self.a_sum_error));
        check(self.alpha_sum_error <= COCHAIN_TOL, format!("α1 + α2 error {:e}", self.alpha_sum_error));
        check(self.weil_error <= tol.oracle_agreement, format!("Weil relation error {:e}", self.weil_error));
        check(self.relator_residual <= COCHAIN_TOL, format!("relator residual {:e}", self.relator_residual));
        check(self.adjoint_det_error <= ADJOINT_DET_TOL, format!("det Ad error {:e}", self.adjoint_det_error));
        check(
            self.adjoint_killing_defect <= KILLING_TOL,
            format!("Killing defect {:e}", self.adjoint_killing_defect),
        );
        out
    }
}

fn rel_diff(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

/// Evaluates every cochain invariant at the character of `cd`.
pub fn check_cochain(
    data: &RileyData,
    cd: &CochainData,
    tol: &Tolerances,
) -> Result<CochainChecks, OracleError> {
    let (m, u) = (cd.m, cd.u);
    let d1d0 = cd.delta1 * cd.delta0;
    let cochain_residual = d1d0.norm() / (cd.delta1.norm() * cd.delta0.norm());
    let h1_cocycle_residual = (cd.delta1 * cd.h1_rep).norm() / (cd.delta1.norm() * cd.h1_rep.norm());

    let a_sum_error = (cd.a0 - cd.a1 - cd.a2).norm();
    let alpha_sum_error = (cd.alpha1 + cd.alpha2 - cd.dphi_dm).norm() / cd.dphi_dm.norm();

    let reshape = |v: Vector3<Complex64>| from_coords(&v);
    let jet = MatJet::of_word(&data.words.relator, m, u);
    let mat = |a: [[Complex64; 2]; 2]| Matrix2::new(a[0][0], a[0][1], a[1][0], a[1][1]);
    let pairs = [
        (reshape(cd.delta1 * cd.a0), mat(jet.d_m())),
        (reshape(cd.delta1 * cd.a1), mat(jet.d_t1)),
        (reshape(cd.delta1 * cd.a2), mat(jet.d_t2)),
        (reshape(cd.delta1 * cd.a3), mat(jet.d_u)),
        (reshape(cd.delta1 * cd.a0), cd.m_matrix * cd.dphi_dm),
        (reshape(cd.delta1 * cd.a3), cd.m_matrix * cd.dphi_du),
    ];
    let weil_error = pairs.iter().map(|(a, b)| rel_diff(a, b)).fold(0.0, f64::max);

    let rep = NumericRep::new(m, u)?;
    let rho_w = rep.of_word(&data.words.w);
    let rho_r = rep.of_word(&data.words.relator);
    let relator_residual = (rho_r - Matrix2::identity()).norm() / (1.0 + rho_w.norm().powi(2));

    let mut adjoint_det_error: f64 = 0.0;
    let mut adjoint_killing_defect: f64 = 0.0;
    for g in [rep.g1, rep.g2] {
        let ad = adjoint_of(&g)?;
        adjoint_det_error = adjoint_det_error.max((ad.det() - 1.0).norm());
        adjoint_killing_defect = adjoint_killing_defect.max(ad.killing_defect());
    }

    Ok(CochainChecks {
        cochain_residual,
        rank_delta0: numerical_rank(&cd.delta0, tol.rank_relative),
        rank_delta1: numerical_rank(&cd.delta1, tol.rank_relative),
        h1_cocycle_residual,
        h1_coboundary_distance: distance_from_column_space(&cd.delta0, &cd.h1_rep, tol.rank_relative),
        f1_error: (cd.f1() - 1.0).norm(),
        f2_error: {
            let m_dd = cfrom::<DoubleDouble>(m);
            let u_dd = refine_u(data, m_dd, cfrom(u), 3);
            cabs(f2_value(data, m_dd, u_dd) - Complex::one()).to_f64()
        },
        f2_error_standard: (cd.f2(data)? - 1.0).norm(),
        a_sum_error,
        alpha_sum_error,
        weil_error,
        relator_residual,
        adjoint_det_error,
        adjoint_killing_defect,
    })
}

/// Formula-vs-oracle comparison at one character.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleComparison {
    #[serde(with = "crate::serde_complex")]
    pub u: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub formula: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub oracle: Complex64,
    pub abs_formula: f64,
    pub abs_oracle: f64,
    /// `||oracle| / |formula| - 1|`.
    pub relative_difference: f64,
    /// `oracle / formula`.
    #[serde(with = "crate::serde_complex")]
    pub ratio: Complex64,
}

impl OracleComparison {
    pub fn new(u: Complex64, formula: Complex64, oracle: Complex64) -> Self {
        OracleComparison {
            u,
            formula,
            oracle,
            abs_formula: formula.norm(),
            abs_oracle: oracle.norm(),
            relative_difference: (oracle.norm() / formula.norm() - 1.0).abs(),
            ratio: oracle / formula,
        }
    }

    /// `+1` or `-1` if the ratio is that real sign to within `tol`.
    pub fn sign(&self, tol: f64) -> Option<i32> {
        if (self.ratio - 1.0).norm() <= tol {
            Some(1)
        } else if (self.ratio + 1.0).norm() <= tol {
            Some(-1)
        } else {
            None
        }
    }
}

/// Common sign of a set of comparisons, if every ratio is the same `±1`.
pub fn constant_sign(cmps: &[OracleComparison], tol: f64) -> Option<i32> {
    let first = cmps.first()?.sign(tol)?;
    cmps.iter().all(|c| c.sign(tol) == Some(first)).then_some(first)
}

/// One character visited by [`oracle_survey`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurveyEntry {
    pub sample: usize,
    #[serde(with = "crate::serde_complex")]
    pub c: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub d: Complex64,
    #[serde(flatten)]
    pub comparison: OracleComparison,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleSurvey {
    pub p: i64,
    pub q: i64,
    pub seed: u64,
    pub samples: usize,
    pub entries: Vec<SurveyEntry>,
    pub max_relative_difference: f64,
    /// Common value of `oracle / formula` when it is the same `±1` everywhere.
    pub sign: Option<i32>,
    #[serde(skip)]
    pub cochain: Vec<CochainData>,
}

impl OracleSurvey {
    pub fn passes(&self, tol: &Tolerances) -> bool {
        self.sign.is_some() && self.max_relative_difference <= tol.oracle_agreement
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SurveyError {
    #[error(transparent)]
    Torsion(#[from] TorsionError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

fn survey_fiber(
    data: &RileyData,
    sample: usize,
    c: Complex64,
    tol: &Tolerances,
) -> Result<Vec<(SurveyEntry, CochainData)>, SurveyError> {
    let (d, points) = trace_preimage(data, c, tol)?;
    let mut out = Vec::with_capacity(points.len());
    for pt in &points {
        let formula = torsion_at(data, pt, tol)?;
        let cd = basis_construction(data, pt, tol)?;
        let oracle = cd.torsion_with(&cd.b1[0], tol)?;
        let entry = SurveyEntry {
            sample,
            c,
            d,
            comparison: OracleComparison::new(pt.u, formula, oracle),
        };
        out.push((entry, cd));
    }
    Ok(out)
}

fn survey_sample(data: &RileyData, seed: u64, sample: usize, tol: &Tolerances) -> Result<Vec<(SurveyEntry, CochainData)>, SurveyError> {
    let mut rng = trial_rng(seed, sample);
    let mut last = String::new();
    for _ in 0..=tol.trial_retries {
        let draw = sample_generic_with(data, &mut rng, tol).map_err(TorsionError::from)?;
        match survey_fiber(data, sample, draw.c, tol) {
            Ok(found) => return Ok(found),
            Err(SurveyError::Torsion(e)) if !e.is_resampleable() => return Err(e.into()),
            Err(e) => last = e.to_string(),
        }
    }
    Err(TorsionError::RetriesExhausted {
        retries: tol.trial_retries,
        last,
    }
    .into())
}

/// Compares the closed form with the oracle on every character over
/// `samples` sampled trace values. Deterministic in `(seed, samples, tol)`.
pub fn oracle_survey(data: &RileyData, samples: usize, seed: u64, tol: &Tolerances) -> Result<OracleSurvey, SurveyError> {
    let per_sample: Vec<Vec<(SurveyEntry, CochainData)>> = (0..samples.max(1))
        .into_par_iter()
        .map(|s| survey_sample(data, seed, s, tol))
        .collect::<Result<_, _>>()?;
    let (entries, cochain): (Vec<_>, Vec<_>) = per_sample.into_iter().flatten().unzip();
    let comparisons: Vec<OracleComparison> = entries.iter().map(|e| e.comparison.clone()).collect();
    Ok(OracleSurvey {
        p: data.p(),
        q: data.q(),
        seed,
        samples: samples.max(1),
        max_relative_difference: comparisons.iter().map(|c| c.relative_difference).fold(0.0, f64::max),
        sign: constant_sign(&comparisons, tol.oracle_agreement),
        entries,
        cochain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riley::riley_polynomial;
    use crate::schubert::validate;

    fn data(p: i64, q: i64) -> RileyData {
        riley_polynomial(validate(p, q).unwrap()).unwrap()
    }

    fn word(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn killing_values() {
        let e = |i| Vector3::ith(i, c(1.0));
        assert_eq!(killing(&e(1), &e(1)), c(8.0));
        assert_eq!(killing(&e(0), &e(2)), c(4.0));
        assert_eq!(killing(&e(0), &e(0)), c(0.0));
    }

    #[test]
    fn adjoint_of_identity_and_generators() {
        assert_eq!(adjoint_of(&Matrix2::identity()).unwrap().0, Matrix3::identity());
        let (m, u) = (Complex64::new(1.3, 0.2), Complex64::new(-0.4, 0.9));
        let rep = NumericRep::new(m, u).unwrap();
        let ad1 = adjoint_of(&rep.g1).unwrap().0 - Matrix3::identity();
        let z = c(0.0);
        let want1 = Matrix3::new(m * m - 1.0, m * -2.0, c(-1.0), z, z, m.inv(), z, z, m.powi(-2) - 1.0);
        assert!((ad1 - want1).norm() < 1e-14);
        let ad2 = adjoint_of(&rep.g2).unwrap().0 - Matrix3::identity();
        let want2 = Matrix3::new(m * m - 1.0, z, z, u * m, z, z, -u * u, u * m.inv() * -2.0, m.powi(-2) - 1.0);
        assert!((ad2 - want2).norm() < 1e-14);
    }

    #[test]
    fn adjoint_invariants_on_random_unimodular() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut z = || Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        for _ in 0..50 {
            let (a, b, cc) = (z(), z(), z());
            if a.norm() < 0.1 {
                continue;
            }
            let d = (c(1.0) + b * cc) / a;
            let ad = adjoint_of(&Matrix2::new(a, b, cc, d)).unwrap();
            assert!((ad.det() - 1.0).norm() <= ADJOINT_DET_TOL * ad.0.norm().powi(3).max(1.0));
            assert!(ad.killing_defect() <= KILLING_TOL);
        }
    }

    #[test]
    fn adjoint_rejects_non_unimodular() {
        let g = Matrix2::new(c(2.0), c(0.0), c(0.0), c(1.0));
        assert!(matches!(adjoint_of(&g), Err(OracleError::NotUnimodular(_))));
    }

    #[test]
    fn delta0_matches_closed_form() {
        assert_eq!(delta0_symbolic(), delta0_reference());
    }

    #[test]
    fn fox_rules() {
        let terms = fox_derivative(&word("g1 g2"), Generator::G1);
        assert_eq!(terms, vec![FoxTerm { sign: 1, word: Word::empty() }]);
        let terms = fox_derivative(&word("g1^-1"), Generator::G1);
        assert_eq!(terms, vec![FoxTerm { sign: -1, word: word("g1^-1") }]);
        assert!(fox_derivative(&word("g2 g2^-1"), Generator::G1).is_empty());
    }

    #[test]
    fn fox_trefoil_relator() {
        let d = data(3, 1);
        let terms = fox_derivative(&d.words.relator, Generator::G1);
        let reduced: Vec<(i32, Word)> = terms.iter().map(|t| (t.sign, t.word.free_reduce())).collect();
        let w = d.words.w.clone();
        let wgw = w.concat(&word("g1")).concat(&w.inverse()).free_reduce();
        assert_eq!(reduced, vec![(1, Word::empty()), (1, w), (-1, wgw)]);
    }

    #[test]
    fn trefoil_oracle_is_half() {
        let d = data(3, 1);
        let tol = Tolerances::default();
        let (_, pts) = trace_preimage(&d, Complex64::new(0.7, 1.9), &tol).unwrap();
        let t = torsion_oracle(&d, &pts[0], &tol).unwrap();
        assert!((t.norm() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn figure_eight_oracle_matches_formula() {
        let d = data(5, 3);
        let tol = Tolerances::default();
        let (_, pts) = trace_preimage(&d, Complex64::new(2.5, 0.0), &tol).unwrap();
        let mut cmps = Vec::new();
        for pt in &pts {
            let formula = torsion_at(&d, pt, &tol).unwrap();
            let oracle = torsion_oracle(&d, pt, &tol).unwrap();
            cmps.push(OracleComparison::new(pt.u, formula, oracle));
            let cd = basis_construction(&d, pt, &tol).unwrap();
            let checks = check_cochain(&d, &cd, &tol).unwrap();
            assert!(checks.failures(&tol).is_empty(), "{:?}", checks.failures(&tol));
        }
        assert!(cmps.iter().all(|c| c.relative_difference < 1e-8));
        assert!(constant_sign(&cmps, 1e-8).is_some());
    }

    #[test]
    fn beta_rescaling_is_invisible() {
        let d = data(7, 3);
        let tol = Tolerances::default();
        let (_, pts) = trace_preimage(&d, Complex64::new(-1.1, 2.3), &tol).unwrap();
        for pt in &pts {
            let cd = basis_construction(&d, pt, &tol).unwrap();
            let base = torsion_oracle(&d, pt, &tol).unwrap();
            let s = Complex64::new(0.3, -1.7);
            let other = torsion_oracle_with_beta(&d, pt, (cd.alpha2 * s, -cd.alpha1 * s), &tol).unwrap();
            assert!((other - base).norm() <= 1e-9 * base.norm());
        }
    }

    #[test]
    fn inadmissible_beta_is_rejected() {
        let d = data(5, 3);
        let tol = Tolerances::default();
        let (_, pts) = trace_preimage(&d, Complex64::new(2.5, 0.0), &tol).unwrap();
        let r = torsion_oracle_with_beta(&d, &pts[0], (c(1.0), c(1.0)), &tol);
        assert!(matches!(r, Err(OracleError::DegeneratePoint(_))));
    }

    #[test]
    fn survey_trefoil() {
        let d = data(3, 1);
        let tol = Tolerances::default();
        let s = oracle_survey(&d, 5, 3, &tol).unwrap();
        assert_eq!(s.entries.len(), 5);
        assert!(s.entries.iter().all(|e| (e.comparison.abs_oracle - 0.5).abs() < 1e-10));
        assert!(s.passes(&tol));
        assert_eq!(s, oracle_survey(&d, 5, 3, &tol).unwrap());
    }

    #[test]
    fn cochain_dump_is_json() {
        let d = data(5, 3);
        let tol = Tolerances::default();
        let (_, pts) = trace_preimage(&d, Complex64::new(2.5, 0.0), &tol).unwrap();
        let cd = basis_construction(&d, &pts[0], &tol).unwrap();
        let v: serde_json::Value = serde_json::to_value(&cd).unwrap();
        assert_eq!(v["delta0"].as_array().unwrap().len(), 6);
        assert_eq!(v["delta1"][0].as_array().unwrap().len(), 6);
        assert_eq!(v["a3"][5][0].as_f64().unwrap(), -0.5);
        assert_eq!(v["b1"].as_array().unwrap().len(), 2);
    }
}
