use std::f64::consts::PI;

use diskflow::boundary::theorem1_verify;
use diskflow::commute::{
    commute_residual, default_grid, elliptic_group, family, hyperbolic_auto_generator, lft_semigroup, mobius,
    proportionality, rotation_equivariance, CommuteError, DEFAULT_TIMES, FAMILIES,
};
use diskflow::flow::{evolve, semigroup_residual, GeneratorSpec, IntegratorConfig};
use diskflow::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gen(text: &str) -> GeneratorSpec {
    GeneratorSpec::parse(text, text).unwrap()
}

fn disk_point(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..radius, -PI..PI).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

#[test]
fn elliptic_group_is_the_flow_of_its_generator() {
    // m o (e^{i phi t} .) o m is generated by -i phi m / m' = -i phi (z - tau)(1 - conj(tau) z) / (1 - |tau|^2)
    let (tau, phi) = (c(0.3, -0.2), 1.3);
    let s = 1.0 - tau.norm_sqr();
    let k = c(0.0, -phi) / s;
    let text = format!(
        "({}+{}*i)*(z-({}+{}*i))*(1-({}+{}*i)*z)",
        k.re, k.im, tau.re, tau.im, tau.conj().re, tau.conj().im
    );
    let g = gen(&text);
    let cfg = IntegratorConfig { rel_tol: 1e-12, abs_tol: 1e-14, ..Default::default() };
    for t in [0.3, 1.0, 2.7] {
        let map = elliptic_group(tau, phi, t).unwrap();
        for z in default_grid() {
            let flowed = evolve(&g, z, t, 0, &cfg).unwrap().u;
            assert!((flowed - map.apply(z).unwrap()).norm() < 1e-9, "t={t} z={z}");
        }
    }
}

#[test]
fn lft_semigroup_is_the_flow_of_its_generator() {
    // generated by a m / m'
    let (tau, a) = (c(-0.4, 0.1), c(0.7, 2.0));
    let s = 1.0 - tau.norm_sqr();
    let k = a / s;
    let text = format!(
        "({}+{}*i)*(z-({}+{}*i))*(1-({}+{}*i)*z)",
        k.re, k.im, tau.re, tau.im, tau.conj().re, tau.conj().im
    );
    let g = gen(&text);
    let cfg = IntegratorConfig { rel_tol: 1e-12, abs_tol: 1e-14, ..Default::default() };
    for t in [0.5, 2.0] {
        let map = lft_semigroup(tau, a, t).unwrap();
        for z in default_grid() {
            let flowed = evolve(&g, z, t, 0, &cfg).unwrap().u;
            assert!((flowed - map.apply(z).unwrap()).norm() < 1e-9, "t={t} z={z}");
        }
    }
}

#[test]
fn hyperbolic_automorphism_generator_moves_points_as_an_automorphism() {
    let tau = Complex64::from_polar(1.0, 0.4);
    let sigma = Complex64::from_polar(1.0, 2.9);
    let g = hyperbolic_auto_generator(tau, sigma, 1.5).unwrap();
    g.validate().unwrap();
    let cfg = IntegratorConfig::default();
    // an automorphism preserves the Poincare distance
    let (z, w) = (c(0.2, 0.1), c(-0.3, 0.5));
    let rho = |a: Complex64, b: Complex64| ((a - b) / (1.0 - b.conj() * a)).norm();
    let before = rho(z, w);
    let after = rho(evolve(&g, z, 1.0, 0, &cfg).unwrap().u, evolve(&g, w, 1.0, 0, &cfg).unwrap().u);
    assert!((before - after).abs() < 1e-8);
    assert!(semigroup_residual(&g, &default_grid(), 0.5, 1.5, &cfg).unwrap() < 1e-8);
}

#[test]
fn half_turn_commutes_only_at_integer_times() {
    let cfg = IntegratorConfig::default();
    let rotation = family("elliptic-rotation").unwrap().spec();
    let cubic = family("odd-cubic").unwrap().spec();
    let grid = default_grid();
    let integer = commute_residual(&rotation, &cubic, &[(1.0, 1.0), (2.0, 0.5), (1.0, 3.0)], &grid, &cfg).unwrap();
    assert!(integer.max_residual < 1e-8, "{:e}", integer.max_residual);
    let half = commute_residual(&rotation, &cubic, &[(0.5, 1.0)], &grid, &cfg).unwrap();
    assert!(half.max_residual > 1e-3, "{:e}", half.max_residual);
    assert!(rotation_equivariance(&cubic, PI, 1.0, &grid, &cfg).unwrap() < 1e-8);
    assert!(rotation_equivariance(&cubic, PI / 2.0, 1.0, &grid, &cfg).unwrap() > 1e-3);
    // generators are not proportional
    assert!(proportionality(&rotation, &cubic, &grid).unwrap().residual > 1e-2);
}

#[test]
fn proportionality_fits() {
    let grid = default_grid();
    let p = proportionality(&gen("3*(1-z)^2"), &gen("-(1-z)^2"), &grid).unwrap();
    assert!((p.a + 3.0).norm() < 1e-14);
    assert!(p.residual < 1e-14);
    let err = proportionality(&gen("z"), &gen("0*z"), &grid).unwrap_err();
    assert_eq!(err, CommuteError::DegenerateSample { vanishing: 8, size: 8 });
    assert!(matches!(proportionality(&gen("z"), &gen("z"), &grid[..4]), Err(CommuteError::InvalidSample(_))));
}

#[test]
fn commuting_boundary_pairs_share_the_boundary_derivative_type() {
    let cfg = IntegratorConfig::default();
    for name in ["hyperbolic-automorphism", "parabolic-nonautomorphic"] {
        let f = family(name).unwrap().spec();
        let g = f.scaled(c(2.5, 0.0), "scaled");
        let r = commute_residual(&f, &g, &DEFAULT_TIMES, &default_grid(), &cfg).unwrap();
        assert!(r.max_residual < 1e-8);
        let df = theorem1_verify(&f, 1.0, 1, &cfg).unwrap().measured;
        let dg = theorem1_verify(&g, 1.0, 1, &cfg).unwrap().measured;
        let unit = |d: Complex64| (d - 1.0).norm() < 1e-4;
        assert_eq!(unit(df), unit(dg), "{name}: {df} vs {dg}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn mobius_is_an_involution(tau in disk_point(0.95), z in disk_point(0.95)) {
        let back = mobius(tau, mobius(tau, z).unwrap()).unwrap();
        prop_assert!((back - z).norm() < 1e-12);
    }

    #[test]
    fn elliptic_group_law(tau in disk_point(0.9), phi in -4.0f64..4.0, t in -3.0f64..3.0, s in -3.0f64..3.0, z in disk_point(0.9)) {
        let composed = elliptic_group(tau, phi, t).unwrap().apply(elliptic_group(tau, phi, s).unwrap().apply(z).unwrap()).unwrap();
        let direct = elliptic_group(tau, phi, t + s).unwrap().apply(z).unwrap();
        prop_assert!((composed - direct).norm() < 1e-12);
    }

    #[test]
    fn lft_semigroup_law(
        tau in disk_point(0.9),
        a in (0.0f64..3.0, -3.0f64..3.0),
        t in 0.0f64..3.0,
        s in 0.0f64..3.0,
        z in disk_point(0.9),
    ) {
        let a = c(a.0, a.1);
        let composed = lft_semigroup(tau, a, t).unwrap().apply(lft_semigroup(tau, a, s).unwrap().apply(z).unwrap()).unwrap();
        let direct = lft_semigroup(tau, a, t + s).unwrap().apply(z).unwrap();
        prop_assert!((composed - direct).norm() < 1e-12);
        prop_assert!(direct.norm() < 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(14))]

    #[test]
    fn proportional_generators_commute(k in 0usize..7, a in 0.1f64..4.0) {
        let cfg = IntegratorConfig::default();
        let f = FAMILIES[k].spec();
        let g = f.scaled(c(a, 0.0), "scaled");
        let r = commute_residual(&f, &g, &DEFAULT_TIMES, &default_grid(), &cfg).unwrap();
        prop_assert!(r.max_residual < 100.0 * cfg.rel_tol, "{} a={}: {:e}", FAMILIES[k].name, a, r.max_residual);
    }
}
