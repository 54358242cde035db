//! Top-degree structure of `ρ(g1^f1 g2^f2 ... g2^f2j)` for a sign sequence.
//!
//! ```text
//! cargo run --example leading_terms -- + - - + + -
//! ```

use twobridge_torsion::riley::check_leading_lemma;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut f: Vec<i32> = std::env::args()
        .skip(1)
        .map(|a| if a.starts_with('-') { -1 } else { 1 })
        .collect();
    if f.is_empty() {
        f = vec![1, -1, -1, 1, 1, 1, -1, -1];
    }
    let check = check_leading_lemma(&f)?;
    println!("f = {f:?}");
    for prof in &check.profiles {
        let lead: Vec<String> = prof.leading.iter().map(|c| c.display_mu()).collect();
        println!(
            "  j = {}  degrees {:?}  leading [{}]  A - B = {}",
            prof.j,
            prof.degrees.map(|d| d.unwrap_or(0)),
            lead.join(", "),
            prof.a_minus_b.display_mu()
        );
    }
    println!("pattern matches: {}, A - B constant: {}", check.patterns_match, check.a_minus_b_constant);
    Ok(())
}
