//! Riley polynomials and their exact identities for a few two-bridge knots.
//!
//! ```text
//! cargo run --example riley_polynomial -- 7 3
//! ```

use twobridge_torsion::riley::check_identities;
use twobridge_torsion::{riley_polynomial, validate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<i64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let knots = match args.as_slice() {
        [p, q] => vec![(*p, *q)],
        _ => vec![(3, 1), (5, 3), (7, 3), (9, 5)],
    };
    for (p, q) in knots {
        let data = riley_polynomial(validate(p, q)?)?;
        println!("({p},{q})  k = {}, eps_k = {:+}", data.k, data.eps_k);
        println!("  epsilon = {:?}", data.form.epsilon_sequence());
        println!("  w  = {}", data.words.w);
        println!("  v  = {}", data.words.v);
        println!("  v' = {}", data.words.v_prime);
        println!("  phi_w = {}", data.phi_w.display_mu());
        let report = check_identities(&data);
        println!("  exact identities hold: {}\n", report.all());
    }
    Ok(())
}
