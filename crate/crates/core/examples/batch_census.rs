//! Census over every Schubert form with `p` up to a bound (default 15):
//! symbolic identities plus sampled inverse-torsion sums, in parallel.

use rayon::prelude::*;

use twobridge_torsion::riley::check_identities;
use twobridge_torsion::schubert::all_forms;
use twobridge_torsion::torsion::inverse_sum_statistics;
use twobridge_torsion::{riley_polynomial, Precision, Tolerances};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let max_p: i64 = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(15);
    let tol = Tolerances::default();
    let rows: Vec<String> = all_forms(max_p)
        .into_par_iter()
        .map(|form| {
            let data = riley_polynomial(form).expect("valid form");
            let identities = check_identities(&data).all();
            let verdict = match inverse_sum_statistics(&data, 5, 9, Precision::Standard, &tol) {
                Ok(stats) if stats.passes(&tol) => {
                    let value = stats.max_torus_deviation.unwrap_or(stats.max_relative_residual);
                    format!("pass {value:.2e}")
                }
                Ok(_) => "FAIL".to_string(),
                Err(e) => format!("error: {e}"),
            };
            format!("{:>10}  {:>5}  identities {:<5}  {}", form.to_string(), if form.is_torus() { "torus" } else { "" }, identities, verdict)
        })
        .collect();
    for row in rows {
        println!("{row}");
    }
    Ok(())
}
