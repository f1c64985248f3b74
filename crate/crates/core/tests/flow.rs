use diskflow::commute::FAMILIES;
use diskflow::flow::{
    evolve, evolve_in, iterate, semigroup_residual, FlowError, Frame, GeneratorSpec, IntegratorConfig, Trajectory,
};
use diskflow::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gen(text: &str) -> GeneratorSpec {
    GeneratorSpec::parse(text, text).unwrap()
}

fn tight() -> IntegratorConfig {
    IntegratorConfig { rel_tol: 1e-12, abs_tol: 1e-14, ..Default::default() }
}

/// `F_t(z)` and its first three z-derivatives for the closed-form families.
fn oracle(f: &str, z: Complex64, t: f64) -> [Complex64; 4] {
    let one = c(1.0, 0.0);
    match f {
        "z" => {
            let e = (-t).exp();
            [e * z, c(e, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        }
        // F_t = tanh(artanh z + t/2) = (z + T) / (1 + T z)
        "(z^2-1)/2" => {
            let th = (t / 2.0).tanh();
            let d = one + th * z;
            let k = 1.0 - th * th;
            [(z + th) / d, k / (d * d), -2.0 * th * k / d.powi(3), 6.0 * th * th * k / d.powi(4)]
        }
        // 1/(1 - F_t) = 1/(1 - z) + a t for f = -a (1 - z)^2
        "-(1-z)^2" | "-(i/2)*(1-z)^2" => {
            let a = if f == "-(1-z)^2" { one } else { c(0.0, 0.5) };
            let w = one - z;
            let d = one + a * t * w;
            [one - w / d, one / (d * d), 2.0 * a * t / d.powi(3), 6.0 * (a * t).powi(2) / d.powi(4)]
        }
        "-i*3.141592653589793*z" => {
            let r = Complex64::from_polar(1.0, std::f64::consts::PI * t);
            [r * z, r, c(0.0, 0.0), c(0.0, 0.0)]
        }
        _ => unreachable!(),
    }
}

const CLOSED_FORMS: [&str; 5] = ["z", "(z^2-1)/2", "-(1-z)^2", "-(i/2)*(1-z)^2", "-i*3.141592653589793*z"];

fn disk_point(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..radius, -std::f64::consts::PI..std::f64::consts::PI)
        .prop_map(|(r, a)| Complex64::from_polar(r, a))
}

#[test]
fn jets_match_closed_forms() {
    let cfg = tight();
    for f in CLOSED_FORMS {
        let g = gen(f);
        for z in [c(0.0, 0.0), c(0.5, 0.3), c(-0.7, 0.1), c(0.2, -0.85)] {
            for t in [0.1, 1.0, 3.5] {
                let j = evolve(&g, z, t, 3, &cfg).unwrap();
                let want = oracle(f, z, t);
                for (k, w) in want.iter().enumerate() {
                    let got = j.derivative(k);
                    assert!((got - w).norm() < 1e-9 * w.norm().max(1.0), "{f} z={z} t={t} k={k}: {got} vs {w}");
                }
            }
        }
    }
}

#[test]
fn frames_agree_with_plain_coordinates() {
    let cfg = tight();
    let z = c(0.4, -0.3);
    let par = gen("-(1-z)^2");
    let a = evolve_in(&par, Frame::Boundary(c(1.0, 0.0)), z, 5.0, 3, &cfg).unwrap();
    let want = oracle("-(1-z)^2", z, 5.0);
    assert!((a.u - want[0]).norm() < 1e-12);
    assert!((a.u3 - want[3]).norm() < 1e-8 * want[3].norm());
    let lin = gen("z");
    let b = evolve_in(&lin, Frame::Interior(c(0.0, 0.0)), z, 30.0, 1, &cfg).unwrap();
    // relative accuracy survives although |u| ~ 5e-14
    let exact = z * (-30.0f64).exp();
    assert!((b.offset - exact).norm() < 1e-9 * exact.norm());
}

#[test]
fn boundary_frame_keeps_relative_precision_near_tau() {
    // 1 - F_n(0) = 1/(n+1) for the parabolic family
    let g = gen("-(1-z)^2");
    let mut tr = Trajectory::start(&g, Frame::Boundary(c(1.0, 0.0)), c(0.0, 0.0), 0, &tight()).unwrap();
    tr.advance(1e6).unwrap();
    let want = 1.0 / (1e6 + 1.0);
    assert!((tr.offset() - want).norm() < 1e-9 * want, "{}", tr.offset());
}

#[test]
fn hyperbolic_orbit_is_tanh() {
    let orbit = iterate(&gen("(z^2-1)/2"), c(0.0, 0.0), 6, &tight()).unwrap();
    for (k, w) in orbit.iter().enumerate() {
        assert!((w - ((k as f64 + 1.0) / 2.0).tanh()).norm() < 1e-11);
    }
}

#[test]
fn tighter_tolerance_shrinks_the_defect() {
    let points = [c(0.5, 0.2), c(-0.3, 0.4), c(0.1, -0.6), c(-0.5, -0.5)];
    for f in ["(z^2-1)/2", "-(1-z)^2", "-(i/2)*(1-z)^2"] {
        let g = gen(f);
        let defect = |rel_tol: f64| {
            let cfg = IntegratorConfig { rel_tol, abs_tol: rel_tol * 1e-2, ..Default::default() };
            points
                .iter()
                .map(|&z| (evolve(&g, z, 2.0, 0, &cfg).unwrap().u - oracle(f, z, 2.0)[0]).norm())
                .fold(0.0, f64::max)
        };
        for tol in [1e-6, 1e-7, 1e-8] {
            let (loose, tight) = (defect(tol), defect(tol / 10.0));
            assert!(loose >= 5.0 * tight, "{f} at {tol:e}: {loose:e} -> {tight:e}");
        }
    }
}

#[test]
fn escaping_field_is_not_a_generator() {
    let err = evolve(&gen("z - 2"), c(0.9, 0.0), 5.0, 0, &IntegratorConfig::default()).unwrap_err();
    assert!(matches!(err, FlowError::NotAGenerator { .. }), "{err:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evolve_matches_closed_forms(k in 0usize..5, z in disk_point(0.95), t in 0.0f64..4.0) {
        let f = CLOSED_FORMS[k];
        let u = evolve(&gen(f), z, t, 0, &tight()).unwrap().u;
        prop_assert!((u - oracle(f, z, t)[0]).norm() < 1e-10);
    }

    #[test]
    fn flow_stays_in_the_disk(k in 0usize..7, z in disk_point(0.95)) {
        let fam = &FAMILIES[k];
        let g = fam.spec();
        let cfg = IntegratorConfig::default();
        let mut tr = Trajectory::start(&g, Frame::Plain, z, 0, &cfg).unwrap();
        for _ in 0..40 {
            tr.advance(0.1).unwrap();
            prop_assert!(tr.jet().u.norm() < 1.0, "{} from {}", fam.name, z);
        }
    }

    #[test]
    fn semigroup_law_on_random_grids(
        k in 0usize..7,
        grid in prop::collection::vec(disk_point(0.9), 4),
        t in 0.0f64..2.0,
        s in 0.0f64..2.0,
    ) {
        let cfg = IntegratorConfig::default();
        let r = semigroup_residual(&FAMILIES[k].spec(), &grid, t, s, &cfg).unwrap();
        prop_assert!(r < 100.0 * cfg.rel_tol, "{}: {:e}", FAMILIES[k].name, r);
    }

    #[test]
    fn flow_jets_match_finite_differences(k in 0usize..7, z in disk_point(0.9), t in 0.2f64..2.0) {
        // each component against a 4th-order central difference of the one below it
        let g = FAMILIES[k].spec();
        let cfg = tight();
        let h = 1e-3;
        let at = |dz: f64| evolve(&g, z + dz, t, 3, &cfg).unwrap();
        let centre = at(0.0);
        let (m2, m1, p1, p2) = (at(-2.0 * h), at(-h), at(h), at(2.0 * h));
        for order in 1..=3 {
            let d = |j: &diskflow::flow::FlowJet| j.derivative(order - 1);
            let fd = (d(&m2) - 8.0 * d(&m1) + 8.0 * d(&p1) - d(&p2)) / (12.0 * h);
            let got = centre.derivative(order);
            prop_assert!(
                (got - fd).norm() <= 1e-5 * fd.norm().max(1.0),
                "{} order {}: {} vs {}", FAMILIES[k].name, order, got, fd
            );
        }
    }
}
