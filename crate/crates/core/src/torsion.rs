//! Closed-form adjoint torsion at characters and inverse-torsion sums over
//! trace fibers.
//!
//! The torsion at a character `(m, u)` with `m ≠ ±1` is reported as
//!
//! ```text
//! T = m^(ε_k + 1) / (2 (m^2 - 1)) · w11 / (v11 φ_v) · ∂φ_w/∂u
//! ```
//!
//! with the `+` sign; the true torsion differs from it by one sign shared by
//! every character of the knot, so all comparisons downstream either use
//! magnitudes or sums where that sign factors out.

use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Tolerances;
use crate::numeric::{poly_roots, sample_generic_with, GenericSample, NumericError, RootSet};
use crate::poly::{MultiPoly, PolyError, UniPoly};
use crate::real::{cabs, cfrom, cpowi, csqrt, cto_f64, DoubleDouble, Precision, Real};
use crate::riley::{MatJet, RileyData};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TorsionError {
    #[error("degenerate character: {0}")]
    DegeneratePoint(String),
    #[error("non-generic trace value: {0}")]
    NonGenericTrace(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("no generic trace value after {retries} retries: {last}")]
    RetriesExhausted { retries: usize, last: String },
}

impl TorsionError {
    /// Errors that mean "this trace value was unlucky, draw another".
    pub fn is_resampleable(&self) -> bool {
        matches!(
            self,
            TorsionError::DegeneratePoint(_) | TorsionError::NonGenericTrace(_) | TorsionError::Numeric(_)
        )
    }
}

/// Point `(d, u)` on the zero set of the Riley polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CharacterPoint<F: Real = f64> {
    #[serde(skip_serializing)]
    pub d: Complex<F>,
    #[serde(serialize_with = "ser_c")]
    pub u: Complex<F>,
    /// `|φ_w(d, u)|`.
    #[serde(serialize_with = "ser_r")]
    pub residual: F,
}

fn ser_c<F: Real, S: serde::Serializer>(z: &Complex<F>, s: S) -> Result<S::Ok, S::Error> {
    crate::serde_complex::serialize(&cto_f64(*z), s)
}

fn ser_r<F: Real, S: serde::Serializer>(x: &F, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(x.to_f64())
}

impl<F: Real> CharacterPoint<F> {
    pub fn to_f64(&self) -> CharacterPoint<f64> {
        CharacterPoint {
            d: cto_f64(self.d),
            u: cto_f64(self.u),
            residual: self.residual.to_f64(),
        }
    }
}

/// Values the torsion formula divides by (and `∂φ_w/∂m`), at one character.
#[derive(Clone, Copy, Debug)]
pub struct PointValues<F: Real> {
    pub w11: Complex<F>,
    pub v11_phi_v: Complex<F>,
    pub dphi_du: Complex<F>,
    pub dphi_dm: Complex<F>,
}

/// Evaluated through [`MatJet`] products of the generator matrices.
pub fn point_values<F: Real>(data: &RileyData, d: Complex<F>, u: Complex<F>) -> PointValues<F> {
    let w = MatJet::of_word(&data.words.w, d, u);
    let [_, dphi_dm, dphi_du] = w.phi(d);
    let v = MatJet::of_word(&data.words.v, d, u);
    let [phi_v, _, _] = v.phi(d);
    PointValues {
        w11: w.value[0][0],
        v11_phi_v: v.value[0][0] * phi_v,
        dphi_du,
        dphi_dm,
    }
}

/// Newton steps on `φ_w(d, ·)` evaluated by matrix products, kept only while
/// `|φ_w|` decreases and the step stays below `max_step`.
fn polish_root<F: Real>(data: &RileyData, d: Complex<F>, u0: Complex<F>, max_step: F) -> Complex<F> {
    let eval = |u| MatJet::of_word(&data.words.w, d, u).phi(d);
    let mut u = u0;
    let [mut f, _, mut fu] = eval(u);
    for _ in 0..8 {
        if cabs(fu).is_zero() || cabs(f).is_zero() {
            break;
        }
        let next = u - f / fu;
        if cabs(next - u0) > max_step {
            break;
        }
        let [fn_, _, fun] = eval(next);
        if cabs(fn_).partial_cmp(&cabs(f)) != Some(std::cmp::Ordering::Less) {
            break;
        }
        u = next;
        f = fn_;
        fu = fun;
    }
    u
}

/// Smallest magnitudes seen over a fiber; decides genericity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenericityFlags {
    pub min_root_gap: f64,
    pub min_abs_dphi_dm: f64,
    pub min_abs_dphi_du: f64,
    pub min_abs_w11: f64,
    pub min_abs_v11_phi_v: f64,
    pub abs_constant_term: f64,
}

impl GenericityFlags {
    /// Reason to reject the fiber, if any threshold is violated.
    pub fn rejection(&self, tol: &Tolerances) -> Option<String> {
        if self.min_root_gap < tol.root_gap {
            return Some(format!("near double root (gap {:e})", self.min_root_gap));
        }
        if self.abs_constant_term < tol.constant_term {
            return Some(format!("vanishing constant term ({:e})", self.abs_constant_term));
        }
        for (name, value) in [
            ("∂φ_w/∂m", self.min_abs_dphi_dm),
            ("∂φ_w/∂u", self.min_abs_dphi_du),
            ("w11", self.min_abs_w11),
            ("v11 φ_v", self.min_abs_v11_phi_v),
        ] {
            if value < tol.degeneracy {
                return Some(format!("|{name}| = {value:e} below tolerance"));
            }
        }
        None
    }
}

/// The fiber `{u : φ_w(d, u) = 0}` over a fixed `d`.
#[derive(Clone, Debug)]
pub struct Fiber<F: Real> {
    pub d: Complex<F>,
    pub polynomial: UniPoly<F>,
    pub roots: RootSet<F>,
    pub points: Vec<CharacterPoint<F>>,
    pub flags: GenericityFlags,
}

/// Solves `φ_w(d, u) = 0` for `u` and records genericity diagnostics.
pub fn fiber_at<F: Real>(data: &RileyData, d: Complex<F>, tol: &Tolerances) -> Result<Fiber<F>, TorsionError> {
    let polynomial = data.phi_w.specialize_at(d)?;
    let expected = ((data.p() - 1) / 2) as usize;
    let scale = polynomial.max_abs_coefficient();
    if polynomial.degree() != expected
        || cabs(polynomial.leading()).to_f64() <= tol.leading_coefficient * scale.to_f64()
    {
        return Err(TorsionError::NonGenericTrace("fiber polynomial drops degree".into()));
    }
    let mut roots = poly_roots(&polynomial, tol)?;
    let max_step = F::from_f64(0.25 * roots.min_gap.min(1.0));
    for u in roots.roots.iter_mut() {
        *u = polish_root(data, d, *u, max_step);
    }
    roots.min_gap = min_gap(&roots.roots);
    let bound = F::from_f64(tol.character_residual) * scale;
    let mut points = Vec::with_capacity(roots.roots.len());
    let mut flags = GenericityFlags {
        min_root_gap: roots.min_gap,
        min_abs_dphi_dm: f64::INFINITY,
        min_abs_dphi_du: f64::INFINITY,
        min_abs_w11: f64::INFINITY,
        min_abs_v11_phi_v: f64::INFINITY,
        abs_constant_term: cabs(polynomial.constant_term()).to_f64(),
    };
    for &u in &roots.roots {
        let residual = cabs(polynomial.eval(u));
        if residual > bound {
            return Err(TorsionError::NonGenericTrace(format!(
                "root residual {:e} exceeds character tolerance",
                residual.to_f64()
            )));
        }
        let vals = point_values(data, d, u);
        flags.min_abs_dphi_dm = flags.min_abs_dphi_dm.min(cabs(vals.dphi_dm).to_f64());
        flags.min_abs_dphi_du = flags.min_abs_dphi_du.min(cabs(vals.dphi_du).to_f64());
        flags.min_abs_w11 = flags.min_abs_w11.min(cabs(vals.w11).to_f64());
        flags.min_abs_v11_phi_v = flags.min_abs_v11_phi_v.min(cabs(vals.v11_phi_v).to_f64());
        points.push(CharacterPoint { d, u, residual });
    }
    Ok(Fiber {
        d,
        polynomial,
        roots,
        points,
        flags,
    })
}

fn min_gap<F: Real>(roots: &[Complex<F>]) -> f64 {
    let mut gap = f64::INFINITY;
    for (i, a) in roots.iter().enumerate() {
        for b in &roots[i + 1..] {
            gap = gap.min(cabs(*a - *b).to_f64());
        }
    }
    gap
}

/// Torsion formula at a character, after checking its hypotheses numerically.
pub fn torsion_at<F: Real>(data: &RileyData, pt: &CharacterPoint<F>, tol: &Tolerances) -> Result<Complex<F>, TorsionError> {
    let d = pt.d;
    let one = Complex::<F>::one();
    if cabs(d).is_zero() {
        return Err(TorsionError::DegeneratePoint("m = 0".into()));
    }
    let d2m1 = d * d - one;
    if cabs(d2m1).to_f64() < tol.degeneracy {
        return Err(TorsionError::DegeneratePoint("m = ±1".into()));
    }
    let vals = point_values(data, d, pt.u);
    for (name, value) in [
        ("w11", vals.w11),
        ("v11 φ_v", vals.v11_phi_v),
        ("∂φ_w/∂u", vals.dphi_du),
        ("∂φ_w/∂m", vals.dphi_dm),
    ] {
        let mag = cabs(value).to_f64();
        if mag < tol.degeneracy {
            return Err(TorsionError::DegeneratePoint(format!("|{name}| = {mag:e}")));
        }
    }
    let two = F::from_f64(2.0);
    let prefactor = cpowi(d, (data.eps_k + 1) as i64) / (d2m1 * two);
    Ok(prefactor * vals.w11 / vals.v11_phi_v * vals.dphi_du)
}

/// Root of `d + 1/d = c` with `|d| >= 1`.
pub fn d_from_trace<F: Real>(c: Complex<F>) -> Complex<F> {
    let two = F::from_f64(2.0);
    let four = Complex::new(F::from_f64(4.0), F::zero());
    let s = csqrt(c * c - four);
    let d1 = (c + s) / two;
    let d2 = (c - s) / two;
    if cabs(d1) >= cabs(d2) {
        d1
    } else {
        d2
    }
}

/// Meridian eigenvalue for trace `c` and the characters over it.
pub fn trace_preimage<F: Real>(
    data: &RileyData,
    c: Complex<F>,
    tol: &Tolerances,
) -> Result<(Complex<F>, Vec<CharacterPoint<F>>), TorsionError> {
    let two = Complex::new(F::from_f64(2.0), F::zero());
    if cabs(c - two).to_f64() < tol.trace_exclusion || cabs(c + two).to_f64() < tol.trace_exclusion {
        return Err(TorsionError::NonGenericTrace("trace ±2 gives m = ±1".into()));
    }
    let d = d_from_trace(c);
    let fiber = fiber_at(data, d, tol)?;
    Ok((d, fiber.points))
}

/// Per-fiber record of characters, torsions and the inverse sum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorsionReport {
    pub p: i64,
    pub q: i64,
    #[serde(with = "crate::serde_complex")]
    pub c: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub d: Complex64,
    pub points: Vec<CharacterPoint>,
    #[serde(with = "crate::serde_complex::vec")]
    pub torsions: Vec<Complex64>,
    #[serde(with = "crate::serde_complex")]
    pub inverse_sum: Complex64,
    /// `|Σ 1/T| / Σ |1/T|`.
    pub relative_residual: f64,
    pub flags: GenericityFlags,
}

impl TorsionReport {
    /// `|Σ 1/T + 2q| / |2q|`, the deviation from the torus-knot value.
    pub fn torus_deviation(&self) -> f64 {
        let target = Complex64::new(-2.0 * self.q as f64, 0.0);
        (self.inverse_sum - target).norm() / target.norm()
    }
}

fn spectrum_at_d<F: Real>(data: &RileyData, c: Complex64, d: Complex<F>, tol: &Tolerances) -> Result<TorsionReport, TorsionError> {
    let fiber = fiber_at(data, d, tol)?;
    if fiber.flags.min_root_gap < tol.root_gap {
        return Err(TorsionError::NonGenericTrace(format!("near double root (gap {:e})", fiber.flags.min_root_gap)));
    }
    if fiber.flags.abs_constant_term < tol.constant_term {
        return Err(TorsionError::NonGenericTrace("fiber contains u = 0".into()));
    }
    let mut torsions = Vec::with_capacity(fiber.points.len());
    let mut inverse_sum = Complex::<F>::zero();
    let mut magnitude = F::zero();
    for pt in &fiber.points {
        let t = torsion_at(data, pt, tol)?;
        let inv = Complex::<F>::one() / t;
        inverse_sum = inverse_sum + inv;
        magnitude = magnitude + cabs(inv);
        torsions.push(cto_f64(t));
    }
    let relative_residual = if magnitude.is_zero() {
        0.0
    } else {
        (cabs(inverse_sum) / magnitude).to_f64()
    };
    Ok(TorsionReport {
        p: data.p(),
        q: data.q(),
        c,
        d: cto_f64(d),
        points: fiber.points.iter().map(CharacterPoint::to_f64).collect(),
        torsions,
        inverse_sum: cto_f64(inverse_sum),
        relative_residual,
        flags: fiber.flags,
    })
}

fn spectrum_generic<F: Real>(data: &RileyData, c: Complex64, tol: &Tolerances) -> Result<TorsionReport, TorsionError> {
    let cf: Complex<F> = cfrom(c);
    let two = Complex::new(F::from_f64(2.0), F::zero());
    if cabs(cf - two).to_f64() < tol.trace_exclusion || cabs(cf + two).to_f64() < tol.trace_exclusion {
        return Err(TorsionError::NonGenericTrace("trace ±2 gives m = ±1".into()));
    }
    spectrum_at_d(data, c, d_from_trace(cf), tol)
}

/// Torsions over the whole trace fiber `tr^-1(c)` and their inverse sum.
pub fn torsion_spectrum(data: &RileyData, c: Complex64, precision: Precision, tol: &Tolerances) -> Result<TorsionReport, TorsionError> {
    match precision {
        Precision::Standard => spectrum_generic::<f64>(data, c, tol),
        Precision::Extended => spectrum_generic::<DoubleDouble>(data, c, tol),
    }
}

/// Same as [`torsion_spectrum`] but over an explicit `d`, bypassing the
/// `|d| >= 1` branch choice.
pub fn torsion_spectrum_at_d(data: &RileyData, d: Complex64, tol: &Tolerances) -> Result<TorsionReport, TorsionError> {
    if (d * d - 1.0).norm() < tol.degeneracy {
        return Err(TorsionError::NonGenericTrace("d = ±1".into()));
    }
    spectrum_at_d(data, d + d.inv(), d, tol)
}

/// One trial of [`inverse_sum_statistics`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub sample: GenericSample,
    /// Rejected spectra before this one succeeded.
    pub retries: usize,
    pub report: TorsionReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InverseSumStatistics {
    pub p: i64,
    pub q: i64,
    pub seed: u64,
    pub precision: Precision,
    pub trials: Vec<TrialRecord>,
    pub max_relative_residual: f64,
    pub median_relative_residual: f64,
    /// Largest `|Σ 1/T + 2q| / |2q|`; only for torus knots.
    pub max_torus_deviation: Option<f64>,
    /// Total sampler draws over all trials.
    pub total_draws: usize,
    pub total_retries: usize,
}

impl InverseSumStatistics {
    /// Torus knots: every sum within `torus_sum` of `-2q`. Hyperbolic knots:
    /// every relative residual within `vanishing`.
    pub fn passes(&self, tol: &Tolerances) -> bool {
        match self.max_torus_deviation {
            Some(dev) => dev <= tol.torus_sum,
            None => self.max_relative_residual <= tol.vanishing,
        }
    }
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Deterministic per-trial generator: one ChaCha stream per trial.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn run_trial(data: &RileyData, seed: u64, trial: usize, precision: Precision, tol: &Tolerances) -> Result<TrialRecord, TorsionError> {
    let mut rng = trial_rng(seed, trial);
    let mut last = String::new();
    let mut draws = 0;
    for retries in 0..=tol.trial_retries {
        let mut sample = sample_generic_with(data, &mut rng, tol)?;
        draws += sample.attempts;
        sample.attempts = draws;
        match torsion_spectrum(data, sample.c, precision, tol) {
            Ok(report) => {
                return Ok(TrialRecord {
                    trial,
                    sample,
                    retries,
                    report,
                })
            }
            Err(e) if e.is_resampleable() => last = e.to_string(),
            Err(e) => return Err(e),
        }
    }
    Err(TorsionError::RetriesExhausted {
        retries: tol.trial_retries,
        last,
    })
}

/// Samples `trials` generic trace values and summarizes the inverse sums.
/// Trials run in parallel; results are ordered by trial index and depend only
/// on `(seed, trials, precision, tol)`.
pub fn inverse_sum_statistics(
    data: &RileyData,
    trials: usize,
    seed: u64,
    precision: Precision,
    tol: &Tolerances,
) -> Result<InverseSumStatistics, TorsionError> {
    let records: Vec<TrialRecord> = (0..trials.max(1))
        .into_par_iter()
        .map(|t| run_trial(data, seed, t, precision, tol))
        .collect::<Result<_, _>>()?;
    let mut residuals: Vec<f64> = records.iter().map(|r| r.report.relative_residual).collect();
    let max_relative_residual = residuals.iter().copied().fold(0.0, f64::max);
    let median_relative_residual = median(&mut residuals);
    let max_torus_deviation = data.form.is_torus().then(|| {
        records
            .iter()
            .map(|r| r.report.torus_deviation())
            .fold(0.0, f64::max)
    });
    Ok(InverseSumStatistics {
        p: data.p(),
        q: data.q(),
        seed,
        precision,
        total_draws: records.iter().map(|r| r.sample.attempts).sum(),
        total_retries: records.iter().map(|r| r.retries).sum(),
        trials: records,
        max_relative_residual,
        median_relative_residual,
        max_torus_deviation,
    })
}

/// `m^(q+1) w11 ∂φ_w/∂u / (2 (m^2 - 1))`, the torus-knot form of the formula.
pub fn torus_reduced_formula(data: &RileyData, d: Complex64, u: Complex64) -> Result<Complex64, PolyError> {
    let w11 = data.rho_w.a11.eval_mu(d, u)?;
    let dphi = data.derived.dphi_du.eval_mu(d, u)?;
    Ok(cpowi(d, data.q() + 1) * w11 * dphi / (2.0 * (d * d - 1.0)))
}

/// `(y21 - (d - 1/d) y22) φ_v` as a polynomial in `u` at fixed `d`; its sum
/// against `1/φ_w'` over the fiber vanishes for hyperbolic knots.
pub fn reduction_numerator(data: &RileyData, d: Complex64) -> Result<UniPoly<f64>, PolyError> {
    let mm = crate::riley::m_minus_inv();
    let combo: MultiPoly = &data.rho_y.a21 - &(mm * &data.rho_y.a22);
    let poly = &combo * &data.derived.phi_v;
    poly.specialize_at(d)
}
