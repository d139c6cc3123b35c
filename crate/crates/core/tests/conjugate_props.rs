use ndyn::builder::{catalog, catalog_entries};
use ndyn::conjugate::{conjugated_operator, extract_normal_form, OperatorForm};
use ndyn::poly::{Complex, ExtComplex};
use proptest::prelude::*;

fn complex(r: f64) -> impl Strategy<Value = Complex> {
    (-r..r, -r..r).prop_map(|(a, b)| Complex::new(a, b))
}

fn nonzero(r: f64) -> impl Strategy<Value = Complex> {
    complex(r).prop_filter("away from zero", |z| z.norm() > 0.2)
}

/// Coefficients `a_1..a_k` of a form that is neither degenerate nor missing `a_k`.
fn coeffs(max_k: usize) -> impl Strategy<Value = Vec<Complex>> {
    prop::collection::vec(complex(3.0), 1..=max_k).prop_filter("generic", |a| {
        let sum = a.iter().fold(Complex::new(1.0, 0.0), |s, x| s + x);
        a.last().unwrap().norm() > 0.1 && sum.norm() > 0.1
    })
}

fn one() -> Complex {
    Complex::new(1.0, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn catalog_operators_fix_zero_infinity_and_one(c in nonzero(2.0), x in nonzero(1.5)) {
        for e in catalog_entries() {
            let params = vec![x; e.params.len()];
            let Ok(r) = conjugated_operator(e, &params, c) else {
                // os3 is undefined at two parameter values
                prop_assert!(e.name == "os3");
                continue;
            };
            prop_assert!(r.eval(ExtComplex::finite(0.0, 0.0)).approx_eq(&ExtComplex::finite(0.0, 0.0), 1e-8), "{}", e.name);
            prop_assert!(r.eval(ExtComplex::Infinity).is_infinite(), "{}", e.name);
            let at_one = r.eval_c(one());
            let expected = if e.name == "os5" { -1.0 } else { 1.0 };
            prop_assert!((at_one - expected).norm() <= 1e-8, "{}: R(1) = {}", e.name, at_one);
        }
    }

    #[test]
    fn product_form_equals_coefficient_form(n in 1usize..=6, a in coeffs(6)) {
        let form = OperatorForm::new(n, a).unwrap();
        let r = form.map().unwrap();
        for i in 0..50 {
            let z = Complex::from_polar(0.2 + 0.05 * i as f64, 0.9 * i as f64);
            let want = r.eval_c(z);
            if !want.is_finite() || want.norm() > 1e6 {
                continue;
            }
            let got = form.eval_product(z);
            prop_assert!((got - want).norm() <= 1e-8 * (1.0 + want.norm()), "z={}: {} vs {}", z, got, want);
        }
    }

    #[test]
    fn extract_inverts_reconstruct(n in 1usize..=6, a in coeffs(6)) {
        let r = OperatorForm::new(n, a.clone()).unwrap().map().unwrap();
        let back = extract_normal_form(&r).unwrap();
        prop_assert_eq!(back.n, n);
        prop_assert_eq!(back.k, a.len());
        prop_assert_eq!(back.sign, 1);
        for (x, y) in back.a.iter().zip(&a) {
            prop_assert!((x - y).norm() <= 1e-10 * (1.0 + y.norm()), "{} vs {}", x, y);
        }
    }

    #[test]
    fn s5_reduces_to_a_two_cycle(a in complex(4.0)) {
        let r = conjugated_operator(catalog("os5").unwrap(), &[a], one()).unwrap();
        prop_assume!(r.num().deg() == 7);
        prop_assert_eq!(r.den().deg(), 3);
        let form = extract_normal_form(&r).unwrap();
        prop_assert_eq!(form.sign, -1);
        prop_assert_eq!((form.n, form.k), (4, 3));
        prop_assert!((r.eval_c(one()) + 1.0).norm() <= 1e-9);
        prop_assert!((r.eval_c(-one()) - 1.0).norm() <= 1e-9);
    }
}
