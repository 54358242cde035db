//! Closed-form adjoint torsion on one trace fiber.
//!
//! The trefoil gives -1/2 at every character; the figure-eight fiber over
//! `c = 2.5` has two characters whose inverse torsions cancel.

use num_complex::Complex64;

use twobridge_torsion::torsion::{torsion_at, trace_preimage};
use twobridge_torsion::{riley_polynomial, validate, Tolerances};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerances::default();
    for (p, q, c) in [(3, 1, Complex64::new(2.5, 0.0)), (5, 3, Complex64::new(2.5, 0.0)), (7, 3, Complex64::new(1.1, 2.3))] {
        let data = riley_polynomial(validate(p, q)?)?;
        let (d, points) = trace_preimage(&data, c, &tol)?;
        println!("({p},{q}) over c = {c}, d = {d:.6}");
        let mut inverse_sum = Complex64::new(0.0, 0.0);
        for pt in &points {
            let t = torsion_at(&data, pt, &tol)?;
            inverse_sum += t.inv();
            println!("  u = {:>28}  T = {:.12}", format!("{:.9}", pt.u), t);
        }
        println!("  sum of 1/T = {inverse_sum:.3e}\n");
    }
    Ok(())
}
