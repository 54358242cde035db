//! Complex root finding, generic trace sampling and Euler–Jacobi sums.

use std::f64::consts::PI;

use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Tolerances;
use crate::poly::UniPoly;
use crate::real::{cabs, Real};
use crate::riley::RileyData;
use crate::torsion::fiber_at;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericError {
    #[error("leading coefficient vanishes numerically (degree collapse)")]
    DegreeCollapse,
    #[error("root iteration did not converge in {iterations} iterations (backward error {backward_error:e})")]
    NoConvergence { iterations: usize, backward_error: f64 },
    #[error("polynomial has a double root (gap {gap:e})")]
    DoubleRoot { gap: f64 },
    #[error("polynomial has a vanishing constant term")]
    ZeroConstantTerm,
    #[error("no generic sample after {attempts} draws; last rejection: {last_reason}")]
    RetriesExhausted { attempts: usize, last_reason: String },
}

/// All roots of a polynomial with quality diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet<F: Real = f64> {
    pub roots: Vec<Complex<F>>,
    /// Smallest pairwise distance; infinite for a single root.
    pub min_gap: f64,
    /// Largest `|f(z)| / sum |a_k| |z|^k` over the roots.
    pub max_backward_error: f64,
}

fn backward_error<F: Real>(f: &UniPoly<F>, z: Complex<F>) -> F {
    let scale = f.abs_eval(z);
    if scale.is_zero() {
        return F::zero();
    }
    cabs(f.eval(z)) / scale
}

fn min_pairwise_gap<F: Real>(roots: &[Complex<F>]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            gap = gap.min(cabs(roots[i] - roots[j]).to_f64());
        }
    }
    gap
}

/// Upper bound on root moduli of a monic polynomial (Fujiwara).
fn root_radius<F: Real>(monic: &[Complex<F>]) -> f64 {
    let n = monic.len() - 1;
    let mut bound: f64 = 0.0;
    for k in 1..=n {
        let a = cabs(monic[n - k]).to_f64();
        let a = if k == n { a / 2.0 } else { a };
        bound = bound.max(a.powf(1.0 / k as f64));
    }
    if bound > 0.0 {
        bound
    } else {
        1.0
    }
}

/// All complex roots by Aberth–Ehrlich simultaneous iteration from a
/// perturbed circle, followed by Newton polishing.
pub fn poly_roots<F: Real>(f: &UniPoly<F>, tol: &Tolerances) -> Result<RootSet<F>, NumericError> {
    let n = f.degree();
    if f.is_zero() || n == 0 {
        return Err(NumericError::DegreeCollapse);
    }
    let lead = f.leading();
    if cabs(lead).to_f64() <= tol.leading_coefficient * f.max_abs_coefficient().to_f64() {
        return Err(NumericError::DegreeCollapse);
    }
    let monic_coeffs: Vec<Complex<F>> = f.coefficients().iter().map(|c| c / lead).collect();
    let monic = UniPoly::new(monic_coeffs.clone());
    let deriv = monic.derivative();

    let mut roots: Vec<Complex<F>> = if n == 1 {
        vec![-monic_coeffs[0]]
    } else {
        let radius = root_radius(&monic_coeffs);
        let mut z: Vec<Complex<F>> = (0..n)
            .map(|j| {
                let theta = 2.0 * PI * j as f64 / n as f64 + 0.4;
                Complex::new(F::from_f64(radius * theta.cos()), F::from_f64(radius * theta.sin()))
            })
            .collect();
        let small = F::from_f64(16.0 * n as f64) * F::epsilon();
        let mut done = vec![false; n];
        let mut converged = false;
        for _ in 0..tol.max_root_iterations {
            for i in 0..n {
                if done[i] {
                    continue;
                }
                let zi = z[i];
                let pz = monic.eval(zi);
                if pz.is_zero() || backward_error(&monic, zi) <= small {
                    done[i] = true;
                    continue;
                }
                let dpz = deriv.eval(zi);
                let mut repulsion = Complex::<F>::zero();
                for (j, zj) in z.iter().enumerate() {
                    let diff = zi - zj;
                    if j != i && !diff.is_zero() {
                        repulsion = repulsion + Complex::<F>::one() / diff;
                    }
                }
                let denom = dpz - pz * repulsion;
                if denom.is_zero() {
                    continue;
                }
                let step = pz / denom;
                z[i] = zi - step;
                if cabs(step) <= small * cabs(z[i]).max(F::one()) {
                    done[i] = true;
                }
            }
            if done.iter().all(|&d| d) {
                converged = true;
                break;
            }
        }
        if !converged {
            let worst = z
                .iter()
                .map(|zi| backward_error(&monic, *zi).to_f64())
                .fold(0.0, f64::max);
            if worst > tol.root_backward_error {
                return Err(NumericError::NoConvergence {
                    iterations: tol.max_root_iterations,
                    backward_error: worst,
                });
            }
        }
        z
    };

    // Newton polish on the original polynomial, keeping only improvements.
    let fd = f.derivative();
    for z in roots.iter_mut() {
        for _ in 0..3 {
            let fz = f.eval(*z);
            let dfz = fd.eval(*z);
            if fz.is_zero() || dfz.is_zero() {
                break;
            }
            let candidate = *z - fz / dfz;
            if cabs(f.eval(candidate)) < cabs(fz) {
                *z = candidate;
            } else {
                break;
            }
        }
    }

    roots.sort_by(|a, b| {
        (a.re.to_f64(), a.im.to_f64())
            .partial_cmp(&(b.re.to_f64(), b.im.to_f64()))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let max_backward_error = roots
        .iter()
        .map(|z| backward_error(f, *z).to_f64())
        .fold(0.0, f64::max);
    if max_backward_error.is_nan() || max_backward_error > tol.root_backward_error {
        return Err(NumericError::NoConvergence {
            iterations: tol.max_root_iterations,
            backward_error: max_backward_error,
        });
    }
    Ok(RootSet {
        min_gap: min_pairwise_gap(&roots),
        max_backward_error,
        roots,
    })
}

/// Terms `g(z) / f'(z)` over the roots of `f`.
pub fn euler_jacobi_terms<F: Real>(
    f: &UniPoly<F>,
    g: &UniPoly<F>,
    tol: &Tolerances,
) -> Result<Vec<Complex<F>>, NumericError> {
    let scale = f.max_abs_coefficient().to_f64();
    if cabs(f.constant_term()).to_f64() <= tol.constant_term * scale {
        return Err(NumericError::ZeroConstantTerm);
    }
    let roots = poly_roots(f, tol)?;
    if roots.min_gap < tol.root_gap {
        return Err(NumericError::DoubleRoot { gap: roots.min_gap });
    }
    let fd = f.derivative();
    Ok(roots.roots.iter().map(|z| g.eval(*z) / fd.eval(*z)).collect())
}

/// `sum over f(z) = 0 of g(z) / f'(z)`; vanishes when `deg g <= deg f - 2`.
pub fn euler_jacobi_sum<F: Real>(
    f: &UniPoly<F>,
    g: &UniPoly<F>,
    tol: &Tolerances,
) -> Result<Complex<F>, NumericError> {
    Ok(euler_jacobi_terms(f, g, tol)?
        .into_iter()
        .fold(Complex::zero(), |acc, t| acc + t))
}

/// Accepted trace value with its meridian eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenericSample {
    #[serde(with = "crate::serde_complex")]
    pub c: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub d: Complex64,
    /// Number of draws, including the accepted one.
    pub attempts: usize,
}

/// Draws `d` uniformly (by area) from the annulus `annulus_inner <= |d| <=
/// annulus_outer` until the fiber over `c = d + 1/d` passes every genericity
/// check.
pub fn sample_generic_with<R: Rng>(
    data: &RileyData,
    rng: &mut R,
    tol: &Tolerances,
) -> Result<GenericSample, NumericError> {
    let (r0, r1) = (tol.annulus_inner, tol.annulus_outer);
    let mut last_reason = String::from("no draws");
    for attempt in 1..=tol.max_resamples {
        let radius = rng.random_range(r0 * r0..=r1 * r1).sqrt();
        let angle = rng.random_range(0.0..2.0 * PI);
        let d = Complex64::from_polar(radius, angle);
        if (d * d - 1.0).norm() < tol.unit_exclusion {
            last_reason = "d too close to ±1".to_string();
            continue;
        }
        let fiber = match fiber_at::<f64>(data, d, tol) {
            Ok(fiber) => fiber,
            Err(e) => {
                last_reason = e.to_string();
                continue;
            }
        };
        if let Some(reason) = fiber.flags.rejection(tol) {
            last_reason = reason;
            continue;
        }
        return Ok(GenericSample {
            c: d + d.inv(),
            d,
            attempts: attempt,
        });
    }
    Err(NumericError::RetriesExhausted {
        attempts: tol.max_resamples,
        last_reason,
    })
}

pub fn sample_generic(data: &RileyData, seed: u64, tol: &Tolerances) -> Result<GenericSample, NumericError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_generic_with(data, &mut rng, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::DoubleDouble;
    use crate::riley::riley_polynomial;
    use crate::schubert::validate;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn contains(roots: &[Complex64], z: Complex64, eps: f64) -> bool {
        roots.iter().any(|r| (r - z).norm() < eps)
    }

    #[test]
    fn quadratic_formula_roots() {
        let f: UniPoly = UniPoly::from_real(&[-1.25, -1.25, 1.0]);
        let rs = poly_roots(&f, &tol()).unwrap();
        let disc = (1.25f64 * 1.25 + 4.0 * 1.25).sqrt();
        let (a, b) = ((1.25 + disc) / 2.0, (1.25 - disc) / 2.0);
        assert!((a - 1.9058688).abs() < 1e-7);
        assert!(contains(&rs.roots, Complex64::new(a, 0.0), 1e-14));
        assert!(contains(&rs.roots, Complex64::new(b, 0.0), 1e-14));
    }

    #[test]
    fn cube_roots_of_unity() {
        let f: UniPoly = UniPoly::from_real(&[-1.0, 0.0, 0.0, 1.0]);
        let rs = poly_roots(&f, &tol()).unwrap();
        assert_eq!(rs.roots.len(), 3);
        for k in 0..3 {
            let w = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0);
            assert!(contains(&rs.roots, w, 1e-14));
        }
        assert!((rs.min_gap - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn double_root_is_found_and_flagged() {
        let f: UniPoly = UniPoly::from_real(&[4.0, -4.0, 1.0]);
        let rs = poly_roots(&f, &tol()).unwrap();
        assert!(rs.roots.iter().all(|r| (r - Complex64::new(2.0, 0.0)).norm() < 1e-6));
        assert!(rs.min_gap < 1e-6);
        let g: UniPoly = UniPoly::from_real(&[1.0]);
        assert!(matches!(euler_jacobi_sum(&f, &g, &tol()), Err(NumericError::DoubleRoot { .. })));
    }

    #[test]
    fn degree_collapse() {
        let f: UniPoly = UniPoly::from_real(&[1.0, 2.0, 1e-20]);
        assert_eq!(poly_roots(&f, &tol()), Err(NumericError::DegreeCollapse));
        let c: UniPoly = UniPoly::from_real(&[3.0]);
        assert_eq!(poly_roots(&c, &tol()), Err(NumericError::DegreeCollapse));
    }

    #[test]
    fn euler_jacobi_small_cases() {
        let f: UniPoly = UniPoly::from_real(&[-1.0, 0.0, 1.0]);
        let g: UniPoly = UniPoly::from_real(&[1.0]);
        assert!(euler_jacobi_sum(&f, &g, &tol()).unwrap().norm() < 1e-15);
        let f: UniPoly = UniPoly::from_real(&[-1.0, 0.0, 0.0, 1.0]);
        let g: UniPoly = UniPoly::from_real(&[0.0, 1.0]);
        assert!(euler_jacobi_sum(&f, &g, &tol()).unwrap().norm() < 1e-15);
        // deg g = deg f - 1 does not vanish: sum of 1/(3 z^2) * z^... = 1/3 * 3 = 1.
        let g: UniPoly = UniPoly::from_real(&[0.0, 0.0, 1.0]);
        assert!((euler_jacobi_sum(&f, &g, &tol()).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let f: UniPoly = UniPoly::from_real(&[0.0, -1.0, 1.0]);
        assert_eq!(euler_jacobi_sum(&f, &UniPoly::from_real(&[1.0]), &tol()), Err(NumericError::ZeroConstantTerm));
    }

    #[test]
    fn extended_precision_roots() {
        let f: UniPoly<DoubleDouble> = UniPoly::from_real(&[-1.25, -1.25, 1.0]);
        let rs = poly_roots(&f, &tol()).unwrap();
        for r in &rs.roots {
            assert!(cabs(f.eval(*r)).to_f64() < 1e-28);
        }
    }

    #[test]
    fn sampler_respects_annulus_and_seed() {
        let data = riley_polynomial(validate(5, 3).unwrap()).unwrap();
        let a = sample_generic(&data, 7, &tol()).unwrap();
        let b = sample_generic(&data, 7, &tol()).unwrap();
        assert_eq!(a, b);
        assert!(a.d.norm() >= 1.2 - 1e-12 && a.d.norm() <= 4.0 + 1e-12);
        assert!((a.d + a.d.inv() - a.c).norm() < 1e-14);
        let fiber = fiber_at::<f64>(&data, a.d, &tol()).unwrap();
        assert_eq!(fiber.points.len(), 2);
        assert!(fiber.flags.min_root_gap > 1e-6);
    }

    #[test]
    fn sampler_gives_up_with_impossible_thresholds() {
        let data = riley_polynomial(validate(3, 1).unwrap()).unwrap();
        let mut t = tol();
        t.degeneracy = 1e12;
        t.max_resamples = 5;
        match sample_generic(&data, 1, &t) {
            Err(NumericError::RetriesExhausted { attempts, .. }) => assert_eq!(attempts, 5),
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }
}
