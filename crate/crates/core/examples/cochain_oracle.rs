//! Torsion from the twisted cochain complex, compared with the closed form,
//! plus the cochain-level invariants at the first character.

use twobridge_torsion::cochain::{check_cochain, oracle_survey};
use twobridge_torsion::{riley_polynomial, validate, Tolerances};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerances::default();
    let data = riley_polynomial(validate(7, 3)?)?;
    let survey = oracle_survey(&data, 3, 17, &tol)?;
    println!("{:>30}  {:>14}  {:>14}  {:>10}", "u", "|formula|", "|oracle|", "rel. diff");
    for e in &survey.entries {
        let c = &e.comparison;
        println!(
            "{:>30}  {:>14.10}  {:>14.10}  {:>10.2e}",
            format!("{:.8}", c.u),
            c.abs_formula,
            c.abs_oracle,
            c.relative_difference
        );
    }
    println!("signed ratio oracle/formula: {:?}", survey.sign);

    let checks = check_cochain(&data, &survey.cochain[0], &tol)?;
    println!("\nat u = {:.6}:", survey.cochain[0].u);
    println!("  |δ¹δ⁰|           {:.2e}", checks.cochain_residual);
    println!("  rank δ⁰, δ¹      {}, {}", checks.rank_delta0, checks.rank_delta1);
    println!("  F1 - 1           {:.2e}", checks.f1_error);
    println!("  F2 - 1           {:.2e}", checks.f2_error);
    println!("  Weil relations   {:.2e}", checks.weil_error);
    println!("  failures         {:?}", checks.failures(&tol));
    Ok(())
}
