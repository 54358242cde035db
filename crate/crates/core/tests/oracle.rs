use std::path::PathBuf;

use num_complex::Complex64;
use serde_json::Value;

use twobridge_torsion::cochain::{
    a_vectors, basis_construction, check_cochain, fox_derivative, oracle_survey, torsion_oracle, torsion_oracle_with_beta,
    FoxTerm,
};
use twobridge_torsion::schubert::Generator;
use twobridge_torsion::torsion::{torsion_at, trace_preimage};
use twobridge_torsion::{riley_polynomial, validate, RileyData, Tolerances, Word};

fn knot(p: i64, q: i64) -> RileyData {
    riley_polynomial(validate(p, q).unwrap()).unwrap()
}

fn word(s: &str) -> Word {
    s.parse().unwrap()
}

#[test]
fn fox_derivative_of_the_trefoil_relator() {
    let data = knot(3, 1);
    assert_eq!(data.words.relator.to_string(), "g1 g2 g1 g2^-1 g1^-1 g2^-1");
    // 1 + w - w g1 w^-1 with w = g1 g2
    let expected = vec![
        FoxTerm { sign: 1, word: Word::empty() },
        FoxTerm { sign: 1, word: word("g1 g2") },
        FoxTerm { sign: -1, word: word("g1 g2 g1 g2^-1 g1^-1") },
    ];
    assert_eq!(fox_derivative(&data.words.relator, Generator::G1), expected);
    assert_eq!(fox_derivative(&word("g1 g2"), Generator::G1), vec![FoxTerm { sign: 1, word: Word::empty() }]);
    assert_eq!(
        fox_derivative(&word("g1^-1"), Generator::G1),
        vec![FoxTerm { sign: -1, word: word("g1^-1") }]
    );
}

#[test]
fn a_vectors_have_the_closed_form() {
    let (m, u) = (Complex64::new(1.4, -0.3), Complex64::new(0.2, 2.0));
    let [a0, a1, a2, a3] = a_vectors(m, u);
    let z = Complex64::new(0.0, 0.0);
    assert_eq!(a1.as_slice(), &[Complex64::new(-1.0, 0.0), m.inv(), z, z, z, z]);
    assert_eq!(a3.as_slice(), &[z, z, z, z, z, -m.inv()]);
    assert_eq!(a0, a1 + a2);
}

#[test]
fn figure_eight_at_two() {
    let tol = Tolerances::default();
    let data = knot(5, 3);
    let (_, points) = trace_preimage(&data, Complex64::new(2.5, 0.0), &tol).unwrap();
    for pt in &points {
        let formula = torsion_at(&data, pt, &tol).unwrap();
        let oracle = torsion_oracle(&data, pt, &tol).unwrap();
        assert!((oracle.norm() / formula.norm() - 1.0).abs() <= 1e-8);

        let cd = basis_construction(&data, pt, &tol).unwrap();
        let s = Complex64::new(0.3, -2.1);
        let other = torsion_oracle_with_beta(&data, pt, (cd.alpha2 * s, -cd.alpha1 * s), &tol).unwrap();
        assert!((other - oracle).norm() <= 1e-8 * oracle.norm());
    }
}

#[test]
fn trefoil_oracle_is_one_half() {
    let tol = Tolerances::default();
    let survey = oracle_survey(&knot(3, 1), 10, 4, &tol).unwrap();
    assert_eq!(survey.entries.len(), 10);
    for e in &survey.entries {
        assert!((e.comparison.oracle.norm() - 0.5).abs() <= 1e-8);
    }
}

#[test]
fn cochain_checks_on_sampled_characters() {
    let tol = Tolerances::default();
    for (p, q) in [(5, 1), (7, 5), (11, 7)] {
        let data = knot(p, q);
        let survey = oracle_survey(&data, 4, 21, &tol).unwrap();
        assert!(survey.passes(&tol));
        for cd in &survey.cochain {
            let checks = check_cochain(&data, cd, &tol).unwrap();
            assert!(checks.failures(&tol).is_empty(), "({p},{q}) {:?}", checks.failures(&tol));
            assert!(checks.alpha_sum_error <= 1e-9);
        }
    }
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Structural equality with numbers compared to a relative tolerance.
fn assert_json_close(got: &Value, want: &Value, path: &str) {
    match (got, want) {
        (Value::Number(a), Value::Number(b)) => {
            let (a, b) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{path}: {a} vs {b}");
        }
        (Value::Array(a), Value::Array(b)) => {
            assert_eq!(a.len(), b.len(), "{path}: length");
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                assert_json_close(x, y, &format!("{path}[{i}]"));
            }
        }
        (Value::Object(a), Value::Object(b)) => {
            assert_eq!(a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>(), "{path}: keys");
            for (k, x) in a {
                assert_json_close(x, &b[k], &format!("{path}.{k}"));
            }
        }
        _ => assert_eq!(got, want, "{path}"),
    }
}

#[test]
fn cochain_dump_matches_golden() {
    let tol = Tolerances::default();
    let data = knot(5, 3);
    let (_, mut points) = trace_preimage(&data, Complex64::new(2.5, 0.0), &tol).unwrap();
    points.sort_by(|a, b| a.u.re.total_cmp(&b.u.re));
    let dump: Vec<Value> = points
        .iter()
        .map(|pt| serde_json::to_value(basis_construction(&data, pt, &tol).unwrap()).unwrap())
        .collect();
    let got = Value::Array(dump);
    let path = golden_path("cochain_5_3.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, serde_json::to_string_pretty(&got).unwrap() + "\n").unwrap();
    }
    let want: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_json_close(&got, &want, "$");
}
