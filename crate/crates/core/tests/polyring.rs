use num_complex::Complex64;
use num_traits::ToPrimitive;
use proptest::prelude::*;

use twobridge_torsion::{Monomial, MultiPoly, UniPoly, Var};

fn term() -> impl Strategy<Value = (i64, i32, i32, u32)> {
    (-9i64..=9, -3i32..=3, -3i32..=3, 0u32..=3)
}

fn poly() -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(term(), 0..6).prop_map(MultiPoly::from_terms)
}

fn complex() -> impl Strategy<Value = Complex64> {
    (0.5f64..1.5, -1.0f64..1.0).prop_map(|(r, th)| Complex64::from_polar(r, th))
}

fn close(a: Complex64, b: Complex64, scale: f64) -> bool {
    (a - b).norm() <= 1e-10 * scale.max(1.0)
}

fn uni_close(a: &UniPoly, b: &UniPoly) -> bool {
    let n = a.coefficients().len().max(b.coefficients().len());
    let scale = a.max_abs_coefficient().max(b.max_abs_coefficient());
    (0..n).all(|k| close(a.coefficient(k), b.coefficient(k), scale))
}

proptest! {
    #[test]
    fn addition_is_associative_and_commutative(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn multiplication_is_associative_and_commutative(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &MultiPoly::one(), a.clone());
    }

    #[test]
    fn distributivity(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn eval_is_a_homomorphism(a in poly(), b in poly(), t1 in complex(), t2 in complex(), t3 in complex()) {
        let ea = a.eval(t1, t2, t3).unwrap();
        let eb = b.eval(t1, t2, t3).unwrap();
        let scale = (ea.norm() + 1.0) * (eb.norm() + 1.0) * 100.0;
        prop_assert!(close((&a + &b).eval(t1, t2, t3).unwrap(), ea + eb, scale));
        prop_assert!(close((&a * &b).eval(t1, t2, t3).unwrap(), ea * eb, scale));
    }

    #[test]
    fn partial_matches_centered_differences(a in poly(), t1 in complex(), t2 in complex(), t3 in complex()) {
        let bound = 1e3 * a.max_abs_coefficient().to_f64().unwrap();
        for h in [1e-4, 1e-5] {
            let exact = a.partial(Var::T3).eval(t1, t2, t3).unwrap();
            let fd = (a.eval(t1, t2, t3 + h).unwrap() - a.eval(t1, t2, t3 - h).unwrap()) / (2.0 * h);
            // Truncation is O(h^2); rounding in the difference is O(eps / h).
            prop_assert!((exact - fd).norm() <= bound * (h * h + 1e-16 / h));

            let exact = a.partial(Var::T1).eval(t1, t2, t3).unwrap();
            let fd = (a.eval(t1 + h, t2, t3).unwrap() - a.eval(t1 - h, t2, t3).unwrap()) / (2.0 * h);
            prop_assert!((exact - fd).norm() <= bound * 1e2 * (h * h + 1e-16 / h));
        }
    }

    #[test]
    fn symbolic_specialization_is_a_ring_homomorphism(a in poly(), b in poly()) {
        let s = |p: &MultiPoly| p.specialize_symbolic();
        prop_assert_eq!(s(&(&a * &b)), &s(&a) * &s(&b));
        prop_assert_eq!(s(&(&a + &b)), &s(&a) + &s(&b));
        prop_assert!(s(&a).terms().all(|(m, _)| m.t2 == 0));
    }

    #[test]
    fn numeric_specialization_is_a_ring_homomorphism(a in poly(), b in poly(), d in complex()) {
        let prod = (&a * &b).specialize_at(d).unwrap();
        let sa = a.specialize_at(d).unwrap();
        let sb = b.specialize_at(d).unwrap();
        prop_assert!(uni_close(&prod, &(&sa * &sb)));
        prop_assert!(uni_close(&(&a + &b).specialize_at(d).unwrap(), &(&sa + &sb)));
    }

    #[test]
    fn json_roundtrip(a in poly()) {
        let text = serde_json::to_string(&a).unwrap();
        let back: MultiPoly = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, a);
    }
}

#[test]
fn small_examples() {
    let u = MultiPoly::u_pow(1);
    let target = &(&u * &u) + &MultiPoly::from_terms([(3, 0, 0, 1)]);
    assert_eq!(target.partial(Var::U), MultiPoly::from_terms([(2, 0, 0, 1), (3, 0, 0, 0)]));
    assert!(MultiPoly::var(Var::T2).partial(Var::T1).is_zero());

    let ratio = MultiPoly::from_terms([(1, 1, -1, 0)]);
    assert!(ratio.specialize_symbolic().is_one());

    // u^2 + (3 - m^2 - m^-2)(u + 1) at m = 2.
    let fig8 = MultiPoly::from_terms([(1, 0, 0, 2), (3, 0, 0, 1), (-1, 2, 0, 1), (-1, -2, 0, 1), (3, 0, 0, 0), (-1, 2, 0, 0), (-1, -2, 0, 0)]);
    let fiber = fig8.specialize_at(Complex64::new(2.0, 0.0)).unwrap();
    assert!(uni_close(&fiber, &UniPoly::from_real(&[-1.25, -1.25, 1.0])));
    let root = (1.25 + (1.25f64 * 1.25 + 5.0).sqrt()) / 2.0;
    let two = Complex64::new(2.0, 0.0);
    assert!(fig8.eval_mu(two, Complex64::new(root, 0.0)).unwrap().norm() < 1e-12);

    let trefoil = MultiPoly::from_terms([(1, 2, 0, 0), (1, -2, 0, 0), (-1, 0, 0, 0), (-1, 0, 0, 1)]);
    let one = Complex64::new(1.0, 0.0);
    assert_eq!(trefoil.eval_mu(one, one).unwrap(), Complex64::new(0.0, 0.0));
    assert_eq!(MultiPoly::var(Var::T3).eval(one, one, Complex64::new(5.0, 0.0)).unwrap(), Complex64::new(5.0, 0.0));
    assert_eq!(trefoil.coefficient(Monomial::new(-2, 0, 0)), 1.into());
}
