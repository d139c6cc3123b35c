use ndyn::builder::{catalog, catalog_entries, check_lambda_odd, instantiate_expr, BinOp, Expr, SchemeContext};
use ndyn::conjugate::{conjugated_operator, instantiate_method};
use ndyn::poly::{rat_combine, CombineOp, Complex, RationalMap};
use ndyn::stability::m4_alpha_family;
use proptest::prelude::*;

fn complex(r: f64) -> impl Strategy<Value = Complex> {
    (-r..r, -r..r).prop_map(|(a, b)| Complex::new(a, b))
}

fn nonzero(r: f64) -> impl Strategy<Value = Complex> {
    complex(r).prop_filter("away from zero", |z| z.norm() > 0.2)
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::Var),
        complex(3.0).prop_map(Expr::Const),
        (0usize..=2).prop_map(|k| Expr::deriv(k, Expr::Var)),
    ];
    leaf.prop_recursive(3, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::bin(BinOp::Add, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::bin(BinOp::Mul, a, b)),
            inner.clone().prop_map(|a| Expr::deriv(1, a)),
        ]
    })
}

fn op() -> impl Strategy<Value = (BinOp, CombineOp)> {
    prop_oneof![
        Just((BinOp::Add, CombineOp::Add)),
        Just((BinOp::Sub, CombineOp::Sub)),
        Just((BinOp::Mul, CombineOp::Mul)),
        Just((BinOp::Div, CombineOp::Div)),
    ]
}

/// Largest relative difference at a fixed ring of points, skipping poles.
fn pointwise_gap(a: &RationalMap, b: &RationalMap) -> f64 {
    (0..24)
        .map(|i| Complex::from_polar(0.45 + 0.07 * i as f64, 0.3 + 1.17 * i as f64))
        .filter_map(|z| {
            let (x, y) = (a.eval_c(z), b.eval_c(z));
            (x.norm() < 1e6 && y.norm() < 1e6).then(|| (x - y).norm() / (1.0 + y.norm()))
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instantiate_is_homomorphic(e1 in expr(), e2 in expr(), (bop, cop) in op(), d in 2usize..=4, c in nonzero(2.0)) {
        let ctx = SchemeContext::new(d, c).unwrap();
        let (Ok(r1), Ok(r2)) = (instantiate_expr(&e1, &ctx), instantiate_expr(&e2, &ctx)) else {
            return Ok(());
        };
        prop_assume!(!(matches!(bop, BinOp::Div) && r2.is_zero()));
        let whole = instantiate_expr(&Expr::bin(bop, e1, e2), &ctx).unwrap();
        let parts = rat_combine(cop, &r1, &r2).unwrap();
        prop_assert_eq!(whole.degree(), parts.degree());
        prop_assert!(pointwise_gap(&whole, &parts) <= 1e-8, "{} vs {}", whole, parts);
    }

    #[test]
    fn amat_is_king_after_reparametrization(beta in complex(3.0), c in nonzero(2.0)) {
        let king_beta = -beta * 4.0 / 3.0 - 2.0;
        let amat = conjugated_operator(catalog("amat").unwrap(), &[beta], c).unwrap();
        let king = conjugated_operator(catalog("king").unwrap(), &[king_beta], c).unwrap();
        prop_assert!(amat.approx_eq(&king, 1e-8), "{} vs {}", amat, king);
    }

    #[test]
    fn m4_beta_form_matches_alpha_form(beta in nonzero(2.0)) {
        let alpha = (beta * 5.0 - 1.0) / beta;
        let in_beta = conjugated_operator(catalog("m4").unwrap(), &[beta], Complex::new(1.0, 0.0)).unwrap();
        let in_alpha = m4_alpha_family(alpha).unwrap().map().unwrap();
        prop_assert!(in_beta.approx_eq(&in_alpha, 1e-10));
    }

    #[test]
    fn combinator_schemes_are_lambda_odd(d in 2usize..=4, c in nonzero(2.0), x in nonzero(1.5)) {
        for e in catalog_entries().iter().filter(|e| e.newton_like && !e.is_post_conjugation()) {
            let params = vec![x; e.params.len()];
            let r = instantiate_method(e, &params, d, c).unwrap();
            prop_assert!(check_lambda_odd(&r, d, 20), "{} at d={}", e.name, d);
        }
    }
}
