//! Inverse-torsion sums over sampled trace fibers: `-2q` for torus knots,
//! zero for hyperbolic ones.

use twobridge_torsion::torsion::inverse_sum_statistics;
use twobridge_torsion::{riley_polynomial, validate, Precision, Tolerances};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerances::default();
    let knots = [(3, 1), (5, 1), (5, -1), (9, 1), (5, 3), (7, 3), (7, 5), (9, 5), (11, 7), (13, 5)];
    println!("{:>8}  {:>6}  {:>14}  {:>14}", "knot", "trials", "max residual", "torus dev.");
    for (p, q) in knots {
        let data = riley_polynomial(validate(p, q)?)?;
        let stats = inverse_sum_statistics(&data, 20, 2024, Precision::Standard, &tol)?;
        let torus = stats.max_torus_deviation.map_or("-".to_string(), |d| format!("{d:.3e}"));
        let residual = if data.form.is_torus() {
            "-".to_string()
        } else {
            format!("{:.3e}", stats.max_relative_residual)
        };
        println!("{:>8}  {:>6}  {:>14}  {:>14}", format!("({p},{q})"), stats.trials.len(), residual, torus);
    }
    Ok(())
}
