//! Root finding and Euler-Jacobi sums `Σ g(z)/f'(z)` over the roots of `f`,
//! in double and double-double precision.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twobridge_torsion::numeric::{euler_jacobi_sum, poly_roots};
use twobridge_torsion::real::cabs;
use twobridge_torsion::{DoubleDouble, Real, Tolerances, UniPoly};

fn random_poly(rng: &mut ChaCha8Rng, degree: usize) -> UniPoly {
    UniPoly::new(
        (0..=degree)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect(),
    )
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerances::default();
    let roots = poly_roots(&UniPoly::<f64>::from_real(&[-1.25, -1.25, 1.0]), &tol)?;
    for z in &roots.roots {
        println!("root of u^2 - 1.25u - 1.25: {z:.10}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    println!("\n{:>4} {:>4}  {:>12}  {:>12}", "deg f", "g", "|Σ| f64", "|Σ| dd");
    for _ in 0..6 {
        let n = rng.random_range(3..=20);
        let f = random_poly(&mut rng, n);
        let g = random_poly(&mut rng, n - 2);
        let standard = euler_jacobi_sum(&f, &g, &tol)?.norm();
        let extended = cabs(euler_jacobi_sum(&f.convert::<DoubleDouble>(), &g.convert(), &tol)?).to_f64();
        println!("{:>5} {:>4}  {:>12.3e}  {:>12.3e}", n, n - 2, standard, extended);
    }
    Ok(())
}
