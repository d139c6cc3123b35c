use ndyn::builder::catalog;
use ndyn::conjugate::{instantiate_method, OperatorForm};
use ndyn::planes::{
    dynamical_plane, iterate_orbit, parameter_plane, CriticalSelector, KnownAttractor, Outcome, PlaneError,
    RenderConfig,
};
use ndyn::poly::{poly_roots, Complex};
use ndyn::stability::{linearize, method_family, operator_family, stability_region_z1, RegionKind};
use proptest::prelude::*;

fn complex(r: f64) -> impl Strategy<Value = Complex> {
    (-r..r, -r..r).prop_map(|(a, b)| Complex::new(a, b))
}

fn coeffs(max_k: usize) -> impl Strategy<Value = Vec<Complex>> {
    prop::collection::vec(complex(3.0), 1..=max_k).prop_filter("generic", |a| {
        let sum = a.iter().fold(Complex::new(1.0, 0.0), |s, x| s + x);
        a.last().unwrap().norm() > 0.1 && sum.norm() > 0.1
    })
}

fn swap_roots(o: Outcome) -> Outcome {
    match o {
        Outcome::Root0 => Outcome::RootInf,
        Outcome::RootInf => Outcome::Root0,
        other => other,
    }
}

fn small_config(window: (f64, f64, f64, f64), threads: usize) -> RenderConfig {
    RenderConfig { window, width: 23, height: 17, max_iter: 60, threads: Some(threads), ..RenderConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn planes_do_not_depend_on_worker_count(
        a in coeffs(3),
        n in 2usize..=4,
        x0 in -2.0f64..0.0,
        y0 in -2.0f64..0.0,
        w in 0.5f64..3.0,
    ) {
        let r = OperatorForm::new(n, a).unwrap().map().unwrap();
        let window = (x0, x0 + w, y0, y0 + w);
        let base = dynamical_plane(&r, &small_config(window, 1), &[]).unwrap();
        for threads in [2, 5] {
            let img = dynamical_plane(&r, &small_config(window, threads), &[]).unwrap();
            prop_assert_eq!(&img.pixels, &base.pixels);
            prop_assert_eq!(&img.rgb, &base.rgb);
        }
        let family = operator_family("chebyshev-halley", Complex::new(1.0, 0.0)).unwrap();
        let p1 = parameter_plane(&family, CriticalSelector::Default, &small_config(window, 1), &[]).unwrap();
        let p4 = parameter_plane(&family, CriticalSelector::Default, &small_config(window, 4), &[]).unwrap();
        prop_assert_eq!(&p1.pixels, &p4.pixels);
        prop_assert_eq!(&p1.rgb, &p4.rgb);
        prop_assert_eq!((p1.no_free_critical, p1.ambiguous_critical), (p4.no_free_critical, p4.ambiguous_critical));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_points_have_mirrored_fates(n in 1usize..=4, a in coeffs(4), z in complex(3.0)) {
        prop_assume!(z.norm() > 0.05);
        let r = OperatorForm::new(n, a).unwrap().map().unwrap();
        let cfg = RenderConfig { max_iter: 80, conv_radius: 1e-4, infinity_radius: 1e4, ..RenderConfig::default() };
        let here = iterate_orbit(&r, z, &cfg, &[]);
        let there = iterate_orbit(&r, z.inv(), &cfg, &[]);
        prop_assert_eq!(here.outcome, swap_roots(there.outcome), "z={}", z);
        prop_assert_eq!(here.iterations, there.iterations, "z={}", z);
    }

    #[test]
    fn rotated_points_share_their_fate(d in 2usize..=4, c in complex(2.0), beta in complex(2.0), z in complex(2.0)) {
        prop_assume!(c.norm() > 0.2);
        let r = instantiate_method(catalog("king").unwrap(), &[beta], d, c).unwrap();
        let roots = poly_roots(&ndyn::builder::SchemeContext::new(d, c).unwrap().polynomial()).unwrap();
        let attractors: Vec<KnownAttractor> = roots.into_iter().map(KnownAttractor::Point).collect();
        let lambda = Complex::from_polar(1.0, std::f64::consts::TAU / d as f64);
        let cfg = RenderConfig { max_iter: 80, ..RenderConfig::default() };
        let here = iterate_orbit(&r, z, &cfg, &attractors);
        let there = iterate_orbit(&r, lambda * z, &cfg, &attractors);
        prop_assert_eq!(here, there, "z={}", z);
    }
}

#[test]
fn parameters_inside_the_stability_circle_avoid_the_roots() {
    let c = Complex::new(1.0, 0.0);
    let mut checked = 0;
    for name in ["king", "chebyshev-halley", "c-family", "amat", "os2", "os4"] {
        let fam = method_family(name, c).unwrap();
        let k = fam(Complex::new(0.61, -0.47)).unwrap().k;
        let reg = stability_region_z1(&linearize(&fam, k).unwrap()).unwrap();
        if reg.kind != RegionKind::Circle || reg.side != ndyn::stability::AttractingSide::Inside {
            continue;
        }
        let (cx, r) = (reg.center, reg.radius);
        let cfg = RenderConfig {
            window: (cx.re - r, cx.re + r, cx.im - r, cx.im + r),
            width: 40,
            height: 40,
            max_iter: 200,
            threads: Some(2),
            ..RenderConfig::default()
        };
        let family = operator_family(name, c).unwrap();
        let img = match parameter_plane(&family, CriticalSelector::Default, &cfg, &[]) {
            Err(PlaneError::MultipleFreePairs(_)) => continue,
            other => other.unwrap(),
        };
        let (mut inside, mut to_roots) = (0, 0);
        for row in 0..cfg.height {
            for col in 0..cfg.width {
                if (cfg.pixel_point(col, row) - cx).norm() > 0.98 * r {
                    continue;
                }
                inside += 1;
                if matches!(img.pixel(col, row).outcome, Outcome::Root0 | Outcome::RootInf) {
                    to_roots += 1;
                }
            }
        }
        assert!(inside > 1000, "{name}: {inside}");
        assert!(to_roots as f64 <= 0.05 * inside as f64, "{name}: {to_roots} of {inside} reach a root");
        checked += 1;
    }
    assert!(checked >= 2, "only {checked} families checked");
}
